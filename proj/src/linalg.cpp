// SPDX-License-Identifier: Apache-2.0
//
// sirp-doa: direction finding for MIMO radar in compound-Gaussian clutter
// Copyright (C) 2026 The sirp-doa authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#include "sirp/linalg.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sirp {

Whitener::Whitener(const CMat& sigma)
{
    Eigen::LLT<CMat> llt(sigma);
    if (sigma.rows() == 0 || sigma.rows() != sigma.cols() || llt.info() != Eigen::Success)
        throw std::domain_error("Whitener: covariance is not positive-definite");
    chol_ = llt.matrixL();
    if (!(chol_.diagonal().real().minCoeff() > 0.0))
        throw std::domain_error("Whitener: covariance is numerically singular");
}

CMat Whitener::apply(const CMat& x) const
{
    return chol_.triangularView<Eigen::Lower>().solve(x);
}

CVec Whitener::apply(const CVec& x) const
{
    return chol_.triangularView<Eigen::Lower>().solve(x);
}

RVec Whitener::quadratic_forms(const CMat& x) const
{
    return apply(x).colwise().squaredNorm().transpose();
}

double Whitener::log_det() const
{
    return 2.0 * chol_.diagonal().real().array().log().sum();
}

namespace {

CMat hermitian_power(const CMat& sigma, double power)
{
    Eigen::SelfAdjointEigenSolver<CMat> eig(sigma);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("hermitian_power: eigendecomposition failed");
    const RVec& lambda = eig.eigenvalues();
    if (!(lambda.minCoeff() > 0.0))
        throw std::domain_error("hermitian_power: matrix is not positive-definite");
    const RVec scaled = lambda.array().pow(power);
    return eig.eigenvectors() * scaled.asDiagonal() * eig.eigenvectors().adjoint();
}

} // namespace

CMat hermitian_inv_sqrt(const CMat& sigma)
{
    return hermitian_power(sigma, -0.5);
}

CMat hermitian_sqrt(const CMat& sigma)
{
    return hermitian_power(sigma, 0.5);
}

CMat hermitian_part(const CMat& x)
{
    return 0.5 * (x + x.adjoint());
}

double gram_condition(const CMat& x)
{
    if (x.cols() == 0)
        return 1.0;
    Eigen::JacobiSVD<CMat> svd(x);
    const RVec& s = svd.singularValues();
    const double lo = s[s.size() - 1];
    if (!(lo > 0.0))
        return std::numeric_limits<double>::infinity();
    const double r = s[0] / lo;
    return r * r;
}

} // namespace sirp

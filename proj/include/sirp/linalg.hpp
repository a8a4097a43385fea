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


#pragma once

#include "sirp/types.hpp"

namespace sirp {

/// Whitening by the lower Cholesky factor C of Sigma (C C^H = Sigma):
/// x -> C^{-1} x. Residual norms after whitening do not depend on which
/// square root of Sigma is used.
class Whitener
{
public:
    /// Throws std::domain_error when Sigma is not positive-definite.
    explicit Whitener(const CMat& sigma);

    CMat apply(const CMat& x) const;
    CVec apply(const CVec& x) const;

    /// x^H Sigma^{-1} x for each column of x.
    RVec quadratic_forms(const CMat& x) const;

    double log_det() const;
    int dim() const { return static_cast<int>(chol_.rows()); }
    const CMat& factor() const { return chol_; }

private:
    CMat chol_;
};

/// Sigma^{-1/2} from the eigendecomposition (the Hermitian root).
CMat hermitian_inv_sqrt(const CMat& sigma);

/// Sigma^{1/2}, Hermitian root.
CMat hermitian_sqrt(const CMat& sigma);

/// (X + X^H) / 2.
CMat hermitian_part(const CMat& x);

/// cond(X^H X) from the singular values of X; +inf for rank-deficient X.
double gram_condition(const CMat& x);

} // namespace sirp

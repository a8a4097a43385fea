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


#include "sirp/crb.hpp"

#include "sirp/linalg.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace sirp {

double kappa(const TextureFamily& texture, int mn, const specfun::QuadratureSpec& spec)
{
    texture.validate();
    if (mn < 1)
        throw std::invalid_argument("kappa: mn must be >= 1");
    const double a = texture.shape;
    const double b = texture.scale;
    if (texture.kind == TextureKind::TDistributed)
        return mn * a * (a + mn) / (b * (a + mn + 1.0));

    const double nu = a - mn;
    // Near 0 the integrand behaves like x^(2a - 3) when a < MN.
    if (a < mn && !(a > 1.0))
        throw std::domain_error("kappa: the K-family integral diverges for a <= 1");
    const specfun::LogBesselK k_nu(nu);
    const specfun::LogBesselK k_lower(nu - 1.0);
    const auto log_f = [&](double x) {
        return (mn + a - 1.0) * std::log(x) + 2.0 * k_lower(x) - k_nu(x);
    };
    // Locate the peak on a coarse grid in ln x, then integrate around it.
    double peak_s = 0.0;
    double peak = -std::numeric_limits<double>::infinity();
    for (double s = -15.0; s <= 8.0; s += 0.05) {
        const double v = log_f(std::exp(s));
        if (v > peak) {
            peak = v;
            peak_s = s;
        }
    }
    const double integral =
        specfun::integrate_halfline([&](double x) { return std::exp(log_f(x) - peak); }, spec, std::exp(peak_s));
    const double log_den = (mn + a - 2.0) * std::numbers::ln2 + std::log(b) + specfun::log_gamma(mn) +
                           specfun::log_gamma(a);
    return integral * std::exp(peak - log_den);
}

std::pair<CMat, CMat> steering_derivatives(const ArrayGeometry& geom, const Angles& angles)
{
    geom.validate();
    const int m = geom.m();
    const int n = geom.n();
    const auto k = static_cast<Eigen::Index>(angles.size());
    CMat dt(geom.mn(), k);
    CMat dr(geom.mn(), k);
    const double w = 2.0 * std::numbers::pi / geom.wavelength;
    for (Eigen::Index c = 0; c < k; ++c) {
        const auto& ang = angles[static_cast<std::size_t>(c)];
        const CVec at = steering_vector(geom.tx_positions, geom.wavelength, ang.dod);
        const CVec ar = steering_vector(geom.rx_positions, geom.wavelength, ang.doa);
        const double ct = std::cos(ang.dod);
        const double cr = std::cos(ang.doa);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) {
                const cd e = at[i] * ar[j];
                dt(i * n + j, c) = cd(0.0, w * ct * geom.tx_positions[static_cast<std::size_t>(i)]) * e;
                dr(i * n + j, c) = cd(0.0, w * cr * geom.rx_positions[static_cast<std::size_t>(j)]) * e;
            }
    }
    return {dt, dr};
}

std::pair<CMat, CMat> steering_derivatives(const ArrayGeometry& geom, const Scene& scene)
{
    return steering_derivatives(geom, scene.angles());
}

namespace {

// D~^H P_perp D~ with the Hermitian whitening root.
CMat projected_derivatives(const ArrayGeometry& geom, const Scene& scene, const ClutterModel& clutter)
{
    scene.validate();
    clutter.validate();
    if (clutter.speckle_cov.rows() != geom.mn())
        throw std::invalid_argument("crb_theta: speckle covariance must be MN x MN");
    const CMat root = hermitian_inv_sqrt(clutter.speckle_cov);
    const auto [dt, dr] = steering_derivatives(geom, scene);
    CMat d(geom.mn(), 2 * scene.targets());
    d << dt, dr;
    const CMat dw = root * d;
    const CMat aw = root * steering_matrix(geom, scene);
    const CMat gram = aw.adjoint() * aw;
    Eigen::LDLT<CMat> ldlt(gram);
    if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().real().minCoeff() > 0.0))
        throw SingularFimError("crb_theta: steering matrix is rank deficient");
    const CMat proj_dw = dw - aw * ldlt.solve(aw.adjoint() * dw);
    return dw.adjoint() * proj_dw;
}

RMat checked_inverse(const RMat& fim)
{
    const RMat sym = 0.5 * (fim + fim.transpose());
    Eigen::LLT<RMat> llt(sym);
    if (llt.info() != Eigen::Success)
        throw SingularFimError("crb_theta: Fisher information is not positive-definite");
    const RMat inv = llt.solve(RMat::Identity(sym.rows(), sym.cols()));
    return 0.5 * (inv + inv.transpose());
}

} // namespace

CrbResult crb_theta(const ArrayGeometry& geom, const Scene& scene, const ClutterModel& clutter)
{
    const CMat x = projected_derivatives(geom, scene, clutter);
    const CMat v = signal_matrix(scene);
    const int k = scene.targets();
    const double pulses = scene.pulses;
    const CMat pv = v * v.adjoint() / pulses;
    CMat p(2 * k, 2 * k);
    p << pv, pv, pv, pv;
    const RMat fim = x.cwiseProduct(p.transpose()).real();
    CrbResult out;
    out.kappa = kappa(clutter.texture, geom.mn());
    out.matrix = geom.mn() / (2.0 * out.kappa * pulses) * checked_inverse(fim);
    out.per_angle_bound = out.matrix.diagonal();
    return out;
}

RMat crb_theta_pulse_sum(const ArrayGeometry& geom, const Scene& scene, const ClutterModel& clutter)
{
    const CMat x = projected_derivatives(geom, scene, clutter);
    const int k = scene.targets();
    CMat sum = CMat::Zero(2 * k, 2 * k);
    for (int l = 0; l < scene.pulses; ++l) {
        const CVec v = signal_vector(scene, l);
        CVec h(2 * k);
        h << v, v;
        const auto hd = h.asDiagonal();
        sum += hd.toDenseMatrix().adjoint() * x * hd.toDenseMatrix();
    }
    const double kap = kappa(clutter.texture, geom.mn());
    const RMat fim = (2.0 * kap / geom.mn()) * sum.real();
    return checked_inverse(fim);
}

double aggregate_db(std::span<const double> per_angle_deg2)
{
    if (per_angle_deg2.empty())
        throw std::invalid_argument("aggregate_db: no angles");
    double s = 0.0;
    for (double v : per_angle_deg2)
        s += v;
    return 10.0 * std::log10(s);
}

double crb_db(const CrbResult& crb)
{
    const double to_deg2 = rad2deg(1.0) * rad2deg(1.0);
    std::vector<double> deg2(static_cast<std::size_t>(crb.per_angle_bound.size()));
    for (Eigen::Index i = 0; i < crb.per_angle_bound.size(); ++i)
        deg2[static_cast<std::size_t>(i)] = crb.per_angle_bound[i] * to_deg2;
    return aggregate_db(deg2);
}

} // namespace sirp

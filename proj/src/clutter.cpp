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

#include "sirp/clutter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sirp {

std::string_view to_string(TextureKind kind)
{
    switch (kind) {
    case TextureKind::KDistributed:
        return "K";
    case TextureKind::TDistributed:
        return "t";
    }
    return "?";
}

TextureKind texture_kind_from_string(std::string_view name)
{
    if (name == "K" || name == "k" || name == "K-distributed" || name == "gamma")
        return TextureKind::KDistributed;
    if (name == "t" || name == "T" || name == "t-distributed" || name == "inverse-gamma")
        return TextureKind::TDistributed;
    throw std::invalid_argument("unknown texture family '" + std::string(name) + "'");
}

void TextureFamily::validate() const
{
    if (!(shape > 0.0) || !std::isfinite(shape) || !(scale > 0.0) || !std::isfinite(scale))
        throw std::domain_error("TextureFamily: shape and scale must be finite and > 0");
}

void ClutterModel::validate() const
{
    texture.validate();
    const auto n = speckle_cov.rows();
    if (n == 0 || speckle_cov.cols() != n)
        throw std::invalid_argument("ClutterModel: speckle covariance must be square and non-empty");
    const double asym = (speckle_cov - speckle_cov.adjoint()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * std::max(1.0, speckle_cov.cwiseAbs().maxCoeff()))
        throw std::domain_error("ClutterModel: speckle covariance is not Hermitian");
    Eigen::LLT<CMat> llt(speckle_cov);
    if (llt.info() != Eigen::Success)
        throw std::domain_error("ClutterModel: speckle covariance is not positive-definite");
}

double texture_mean(const TextureFamily& texture)
{
    texture.validate();
    if (texture.kind == TextureKind::KDistributed)
        return texture.shape * texture.scale;
    if (texture.shape <= 1.0)
        throw std::domain_error("texture_mean: t-distributed texture mean needs shape > 1");
    return texture.scale / (texture.shape - 1.0);
}

// ------------------------------------------------------------------------
// Sampling
// ------------------------------------------------------------------------

std::vector<double> sample_texture(const TextureFamily& texture, int count, Rng& rng)
{
    texture.validate();
    if (count < 1)
        throw std::invalid_argument("sample_texture: count must be >= 1");
    std::vector<double> tau(static_cast<std::size_t>(count));
    if (texture.kind == TextureKind::KDistributed) {
        std::gamma_distribution<double> gamma(texture.shape, texture.scale);
        for (auto& t : tau)
            t = gamma(rng);
    } else {
        std::gamma_distribution<double> gamma(texture.shape, 1.0 / texture.scale);
        for (auto& t : tau)
            t = 1.0 / gamma(rng);
    }
    return tau;
}

CMat sample_speckle(const CMat& sigma, int count, Rng& rng)
{
    Eigen::LLT<CMat> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw std::domain_error("sample_speckle: covariance is not positive-definite");
    const auto dim = sigma.rows();
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    CMat w(dim, count);
    for (int c = 0; c < count; ++c)
        for (Eigen::Index r = 0; r < dim; ++r) {
            const double re = normal(rng);
            const double im = normal(rng);
            w(r, c) = cd(re, im);
        }
    return llt.matrixL() * w;
}

CMat sample_clutter(const CMat& sigma, const std::vector<double>& textures, Rng& rng)
{
    CMat n = sample_speckle(sigma, static_cast<int>(textures.size()), rng);
    for (std::size_t l = 0; l < textures.size(); ++l)
        n.col(static_cast<Eigen::Index>(l)) *= std::sqrt(textures[l]);
    return n;
}

CMat sample_clutter(const ClutterModel& model, int count, Rng& rng)
{
    const auto tau = sample_texture(model.texture, count, rng);
    return sample_clutter(model.speckle_cov, tau, rng);
}

// ------------------------------------------------------------------------
// Density kernels
// ------------------------------------------------------------------------

namespace {

void check_kernel_args(double rho_sq, const TextureFamily& texture, int mn)
{
    texture.validate();
    if (!(rho_sq >= 0.0) || !std::isfinite(rho_sq))
        throw std::domain_error("clutter kernel: rho_sq must be finite and >= 0");
    if (mn < 1)
        throw std::invalid_argument("clutter kernel: mn must be >= 1");
}

double clamped_rho(double rho_sq)
{
    return std::max(std::sqrt(rho_sq), kRhoFloor);
}

// Texture posterior for the K family, in s = ln(tau):
//   phi(s) = nu s - rho^2 exp(-s) - exp(s) / b,  nu = a - MN.
// phi is strictly concave, so the integrand is unimodal in s.
struct KPosterior
{
    double nu;
    double rho_sq;
    double b;
    double mode_s;   // argmax phi
    double peak;     // phi(mode_s)
    double width_s;  // 1 / sqrt(-phi''(mode_s))

    KPosterior(double rho_sq_in, const TextureFamily& texture, int mn)
        : nu(texture.shape - mn), b(texture.scale)
    {
        const double rho = clamped_rho(rho_sq_in);
        rho_sq = rho * rho;
        const double disc = std::sqrt(nu * nu + 4.0 * rho_sq / b);
        const double tau_mode = nu >= 0.0 ? 0.5 * b * (nu + disc) : 2.0 * rho_sq / (disc - nu);
        mode_s = std::log(tau_mode);
        peak = phi(mode_s);
        width_s = 1.0 / std::sqrt(rho_sq / tau_mode + tau_mode / b);
    }

    double phi(double s) const { return nu * s - rho_sq * std::exp(-s) - std::exp(s) / b; }

    // exp(phi(ln tau) - peak) / tau; integrate_halfline supplies the
    // Jacobian tau, so the integral runs over s with unit weight.
    double density(double tau) const
    {
        const double s = std::log(tau);
        return std::exp(phi(s) - peak) / tau;
    }
};

// Expectation of f(s) under the normalised K-family texture posterior.
template <typename F>
double posterior_expectation(const KPosterior& post, F&& centred, const specfun::QuadratureSpec& spec)
{
    const double tau_mode = std::exp(post.mode_s);
    const double mass = specfun::integrate_halfline([&](double tau) { return post.density(tau); },
                                                    spec, tau_mode);
    specfun::QuadratureSpec inner = spec;
    inner.abs_tol = std::max(spec.abs_tol, spec.rel_tol * mass * post.width_s);
    const double moment = specfun::integrate_halfline(
        [&](double tau) { return centred(std::log(tau) - post.mode_s) * post.density(tau); }, inner,
        tau_mode);
    return moment / mass;
}

} // namespace

double log_g(double rho_sq, const TextureFamily& texture, int mn)
{
    check_kernel_args(rho_sq, texture, mn);
    const double a = texture.shape;
    const double b = texture.scale;
    if (texture.kind == TextureKind::TDistributed) {
        return a * std::log(b) + specfun::log_gamma(mn + a) - specfun::log_gamma(a) -
               (mn + a) * std::log(rho_sq + b);
    }
    const double rho = clamped_rho(rho_sq);
    const double u = 2.0 * rho / std::sqrt(b);
    return std::log(2.0) + (a - mn) * std::log(rho) + specfun::log_bessel_k(a - mn, u) -
           0.5 * (mn + a) * std::log(b) - specfun::log_gamma(a);
}

double h_weight(double rho_sq, const TextureFamily& texture, int mn)
{
    check_kernel_args(rho_sq, texture, mn);
    const double a = texture.shape;
    const double b = texture.scale;
    if (texture.kind == TextureKind::TDistributed)
        return (mn + a) / (rho_sq + b);
    const double rho = clamped_rho(rho_sq);
    const double u = 2.0 * rho / std::sqrt(b);
    const double nu = a - mn;
    const double log_ratio = specfun::log_bessel_k(nu - 1.0, u) - specfun::log_bessel_k(nu, u);
    return std::exp(log_ratio) / (std::sqrt(b) * rho);
}

double score_a(double rho_sq, const TextureFamily& texture, int mn, const specfun::QuadratureSpec& spec)
{
    check_kernel_args(rho_sq, texture, mn);
    const double a = texture.shape;
    const double b = texture.scale;
    if (texture.kind == TextureKind::TDistributed)
        return -(std::log1p(rho_sq / b) - specfun::digamma(mn + a) + specfun::digamma(a));

    // d/da ln g = E[ln tau | rho] - ln b - Psi(a).
    const KPosterior post(rho_sq, texture, mn);
    const double mean_log_tau =
        post.mode_s + posterior_expectation(post, [](double ds) { return ds; }, spec);
    return mean_log_tau - std::log(b) - specfun::digamma(a);
}

double score_b(double rho_sq, const TextureFamily& texture, int mn)
{
    check_kernel_args(rho_sq, texture, mn);
    const double a = texture.shape;
    const double b = texture.scale;
    if (texture.kind == TextureKind::TDistributed)
        return (a * rho_sq - mn * b) / (b * (rho_sq + b));

    // d/db ln g = (E[tau | rho] - a b) / b^2.
    const double rho = clamped_rho(rho_sq);
    const double u = 2.0 * rho / std::sqrt(b);
    const double nu = a - mn;
    const double mean_tau =
        std::sqrt(b) * rho * std::exp(specfun::log_bessel_k(nu + 1.0, u) - specfun::log_bessel_k(nu, u));
    return (mean_tau - a * b) / (b * b);
}

double score_b_quadrature(double rho_sq, const TextureFamily& texture, int mn,
                          const specfun::QuadratureSpec& spec)
{
    check_kernel_args(rho_sq, texture, mn);
    if (texture.kind == TextureKind::TDistributed)
        return score_b(rho_sq, texture, mn);
    const double a = texture.shape;
    const double b = texture.scale;
    const KPosterior post(rho_sq, texture, mn);
    const double tau_mode = std::exp(post.mode_s);
    // E[tau] = tau_mode * (1 + E[exp(s - s*) - 1]).
    const double rel = posterior_expectation(post, [](double ds) { return std::expm1(ds); }, spec);
    const double mean_tau = tau_mode * (1.0 + rel);
    return (mean_tau - a * b) / (b * b);
}

} // namespace sirp

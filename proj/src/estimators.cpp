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


#include "sirp/estimators.hpp"

#include "sirp/linalg.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

namespace sirp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Knots per unit of ln r^2 in the K-family grid table.
constexpr double kTableStep = 0.02;

} // namespace

void EstimatorConfig::validate() const
{
    search_options().validate();
    if (max_outer_iters < 1 || min_outer_iters < 0 || min_outer_iters > max_outer_iters)
        throw std::invalid_argument("EstimatorConfig: need 0 <= min_outer_iters <= max_outer_iters, max >= 1");
    if (sigma_fixed_point_iters < 1 || !(sigma_fixed_point_tol > 0.0) || !(sigma_loading > 0.0))
        throw std::invalid_argument("EstimatorConfig: Sigma fixed-point settings must be positive");
    if (!(a_min > 0.0) || !(a_min < a_max) || !(b_min > 0.0) || !(b_min < b_max))
        throw std::invalid_argument("EstimatorConfig: texture bounds must be positive and ordered");
    if (!(root_tol > 0.0) || !(initial_a > 0.0) || !(initial_b > 0.0))
        throw std::invalid_argument("EstimatorConfig: root_tol and initial (a, b) must be > 0");
    quadrature.validate();
}

SearchOptions EstimatorConfig::search_options() const
{
    SearchOptions s;
    s.grid_step_deg = coarse_grid_step;
    s.grid_min_deg = grid_min;
    s.grid_max_deg = grid_max;
    s.refine_tol_deg = refine_tol;
    s.sweeps = sweeps;
    s.polish = polish;
    return s;
}

const Angles& EstimateResult::theta(int iteration) const
{
    if (iterations.empty())
        throw std::logic_error("EstimateResult: no iterations recorded");
    const auto i = static_cast<std::size_t>(std::clamp(iteration, 0, static_cast<int>(iterations.size()) - 1));
    return iterations[i].theta;
}

std::vector<double> EstimateResult::ll_trace() const
{
    std::vector<double> out;
    out.reserve(iterations.size());
    for (const auto& it : iterations)
        out.push_back(it.log_likelihood);
    return out;
}

// ------------------------------------------------------------------------
// Projections
// ------------------------------------------------------------------------

namespace {

struct WhitenedSteering
{
    CMat q;  // orthonormal basis of the whitened steering columns
    Eigen::HouseholderQR<CMat> qr;
};

WhitenedSteering whiten_steering(const Whitener& w, const ArrayGeometry& geom, const Angles& theta,
                                 double max_condition)
{
    const CMat a = w.apply(steering_matrix(geom, theta));
    const double cond = gram_condition(a);
    if (!(cond <= max_condition))
        throw RankDeficientError("steering matrix is rank deficient (cond(A^H Sigma^-1 A) = " +
                                 std::to_string(cond) + ")");
    WhitenedSteering ws{CMat(), Eigen::HouseholderQR<CMat>(a)};
    ws.q = ws.qr.householderQ() * CMat::Identity(a.rows(), a.cols());
    return ws;
}

void check_obs(const ArrayGeometry& geom, const CMat& z)
{
    if (z.rows() != geom.mn() || z.cols() < 1)
        throw std::invalid_argument("observations must be MN x L with L >= 1");
    if (!z.allFinite())
        throw std::invalid_argument("observations contain non-finite entries");
}

} // namespace

double whitened_residual_norm_sq(const ArrayGeometry& geom, const Angles& theta, const CMat& sigma,
                                 const CVec& z, double max_condition)
{
    const Whitener w(sigma);
    const auto ws = whiten_steering(w, geom, theta, max_condition);
    const CVec zw = w.apply(z);
    return (zw - ws.q * (ws.q.adjoint() * zw)).squaredNorm();
}

CVec estimate_v(const ArrayGeometry& geom, const Angles& theta, const CMat& sigma, const CVec& z,
                double max_condition)
{
    const Whitener w(sigma);
    const auto ws = whiten_steering(w, geom, theta, max_condition);
    return ws.qr.solve(w.apply(z));
}

CMat estimate_v_all(const ArrayGeometry& geom, const Angles& theta, const CMat& sigma, const CMat& z,
                    double max_condition)
{
    check_obs(geom, z);
    const Whitener w(sigma);
    const auto ws = whiten_steering(w, geom, theta, max_condition);
    return ws.qr.solve(w.apply(z));
}

RVec whitened_energies(const ArrayGeometry& geom, const Angles& theta, const CMat& v, const CMat& sigma,
                       const CMat& z)
{
    const CMat r = z - steering_matrix(geom, theta) * v;
    return Whitener(sigma).quadratic_forms(r);
}

// ------------------------------------------------------------------------
// Concentrated objective
// ------------------------------------------------------------------------

MarginalCost::MarginalCost(const TextureFamily& texture, int mn, double r2_max)
    : texture_(texture), mn_(mn), bessel_(texture.shape - mn), bessel_lower_(texture.shape - mn - 1.0)
{
    texture_.validate();
    if (texture_.kind != TextureKind::KDistributed || !(r2_max > 0.0))
        return;
    const double floor2 = kRhoFloor * kRhoFloor;
    s0_ = std::log(floor2);
    const double s1 = std::log(std::max(r2_max, floor2)) + 0.1;
    ds_ = kTableStep;
    const auto n = static_cast<std::size_t>(std::ceil((s1 - s0_) / ds_)) + 1;
    value_.resize(n);
    slope_.resize(n);
    const double sqrt_b = std::sqrt(texture_.scale);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = s0_ + static_cast<double>(i) * ds_;
        const double r2 = std::exp(s);
        const double r = std::sqrt(r2);
        const double u = 2.0 * r / sqrt_b;
        const double lk = bessel_(u);
        value_[i] = 0.5 * (mn_ - texture_.shape) * s - lk;
        // dc/ds = r^2 h(r^2)
        slope_[i] = r2 * std::exp(bessel_lower_(u) - lk) / (sqrt_b * r);
    }
}

double MarginalCost::term(int /*pulse*/, double r2) const
{
    if (texture_.kind == TextureKind::TDistributed)
        return std::log(r2 + texture_.scale);
    const double r = std::max(std::sqrt(std::max(r2, 0.0)), kRhoFloor);
    return (mn_ - texture_.shape) * std::log(r) - bessel_(2.0 * r / std::sqrt(texture_.scale));
}

double MarginalCost::grid_term(int pulse, double r2) const
{
    if (value_.empty())
        return term(pulse, r2);
    const double s = std::log(std::max(r2, kRhoFloor * kRhoFloor));
    const double x = (s - s0_) / ds_;
    const auto i = static_cast<std::size_t>(x);
    if (i + 1 >= value_.size())
        return term(pulse, r2);
    const double t = x - static_cast<double>(i);
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    return h00 * value_[i] + h10 * ds_ * slope_[i] + h01 * value_[i + 1] + h11 * ds_ * slope_[i + 1];
}

double immle_theta_objective(const ArrayGeometry& geom, const Angles& theta, const CMat& sigma,
                             const TextureFamily& texture, const ObservationBlock& obs)
{
    check_obs(geom, obs.z);
    const Whitener w(sigma);
    const auto ws = whiten_steering(w, geom, theta, 1e12);
    const CMat zw = w.apply(obs.z);
    const RVec r2 = (zw - ws.q * (ws.q.adjoint() * zw)).colwise().squaredNorm().transpose();
    const MarginalCost cost(texture, geom.mn(), 0.0);
    double s = 0.0;
    for (int l = 0; l < obs.pulses(); ++l)
        s += cost.term(l, r2[l]);
    return s;
}

// ------------------------------------------------------------------------
// Sigma update
// ------------------------------------------------------------------------

SigmaUpdate scatter_fixed_point(const CMat& residuals, const CMat& sigma0, const ScatterWeight& weight,
                                const EstimatorConfig& config)
{
    const auto mn = residuals.rows();
    const auto pulses = residuals.cols();
    if (sigma0.rows() != mn || sigma0.cols() != mn || pulses < 1)
        throw std::invalid_argument("scatter_fixed_point: dimension mismatch");
    SigmaUpdate out;
    CMat sigma = sigma0;
    for (int it = 0; it < config.sigma_fixed_point_iters; ++it) {
        const RVec rho_sq = Whitener(sigma).quadratic_forms(residuals);
        RVec w(pulses);
        for (Eigen::Index l = 0; l < pulses; ++l)
            w[l] = weight(static_cast<int>(l), rho_sq[l]);
        CMat next = hermitian_part(residuals * w.asDiagonal() * residuals.adjoint() / static_cast<double>(pulses));

        const double load = config.sigma_loading * next.trace().real() / static_cast<double>(mn);
        Eigen::SelfAdjointEigenSolver<CMat> eig(next, Eigen::EigenvaluesOnly);
        if (!(eig.eigenvalues().minCoeff() > load)) {
            next.diagonal().array() += load;
            out.loaded = true;
        }
        const double change = (next - sigma).norm() / sigma.norm();
        sigma = std::move(next);
        out.iterations = it + 1;
        if (change < config.sigma_fixed_point_tol)
            break;
    }
    const double c = static_cast<double>(mn) / sigma.trace().real();
    out.sigma = hermitian_part(c * sigma);
    out.scale = c;
    return out;
}

SigmaUpdate update_sigma(const ArrayGeometry& geom, const Angles& theta, const CMat& v, const CMat& sigma,
                         const TextureFamily& texture, const ObservationBlock& obs,
                         const EstimatorConfig& config)
{
    check_obs(geom, obs.z);
    const CMat r = obs.z - steering_matrix(geom, theta) * v;
    const int mn = geom.mn();
    return scatter_fixed_point(
        r, sigma, [&](int, double rho_sq) { return h_weight(rho_sq, texture, mn); }, config);
}

// ------------------------------------------------------------------------
// Texture parameters
// ------------------------------------------------------------------------

namespace {

double sum_log_g(const std::vector<double>& rho_sq, const TextureFamily& tex, int mn)
{
    double s = 0.0;
    for (double r : rho_sq)
        s += log_g(r, tex, mn);
    return s;
}

struct RootChoice
{
    double x;
    double objective;
    bool bracketed;
};

// Maximizes `objective` over the roots of `score` in [lo, hi]; without a
// sign change the end point with the smaller |score| is the only candidate.
RootChoice best_root(const std::function<double(double)>& score, const std::function<double(double)>& objective,
                     double lo, double hi)
{
    constexpr int kScan = 24;
    std::vector<double> xs(kScan + 1), fs(kScan + 1);
    const double llo = std::log(lo);
    const double lhi = std::log(hi);
    for (int i = 0; i <= kScan; ++i) {
        xs[static_cast<std::size_t>(i)] = std::exp(llo + (lhi - llo) * i / kScan);
        fs[static_cast<std::size_t>(i)] = score(xs[static_cast<std::size_t>(i)]);
    }
    xs.front() = lo;
    xs.back() = hi;

    std::vector<double> roots;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        if (fs[i] == 0.0) {
            roots.push_back(xs[i]);
            continue;
        }
        if (!std::isfinite(fs[i]) || !std::isfinite(fs[i + 1]) || (fs[i] > 0.0) == (fs[i + 1] > 0.0) ||
            fs[i + 1] == 0.0)
            continue;
        std::uintmax_t max_iter = 100;
        const auto [a, b] = boost::math::tools::toms748_solve(
            score, xs[i], xs[i + 1], fs[i], fs[i + 1], boost::math::tools::eps_tolerance<double>(45), max_iter);
        roots.push_back(0.5 * (a + b));
    }
    if (fs.back() == 0.0)
        roots.push_back(xs.back());

    RootChoice best{kNaN, -std::numeric_limits<double>::infinity(), !roots.empty()};
    if (roots.empty())
        roots.push_back(std::fabs(fs.front()) <= std::fabs(fs.back()) ? lo : hi);
    for (double r : roots) {
        const double o = objective(r);
        if (o > best.objective) {
            best.x = r;
            best.objective = o;
        }
    }
    return best;
}

double sum_score_a(const std::vector<double>& rho_sq, const TextureFamily& tex, int mn,
                   const specfun::QuadratureSpec& spec)
{
    double s = 0.0;
    for (double r : rho_sq)
        s += score_a(r, tex, mn, spec);
    return s;
}

double sum_score_b(const std::vector<double>& rho_sq, const TextureFamily& tex, int mn)
{
    double s = 0.0;
    for (double r : rho_sq)
        s += score_b(r, tex, mn);
    return s;
}

} // namespace

TextureFit solve_texture_params(const std::vector<double>& rho_sq, TextureKind kind, double a_current,
                                double b_current, int mn, const EstimatorConfig& config)
{
    if (rho_sq.empty())
        throw std::invalid_argument("solve_texture_params: need at least one pulse");
    TextureFit fit{a_current, b_current, 0.0, 0.0, 0};
    const auto tex = [&](double a, double b) { return TextureFamily{kind, a, b}; };

    double current = sum_log_g(rho_sq, tex(fit.a, fit.b), mn);
    {
        const double b = fit.b;
        const RootChoice c = best_root(
            [&](double a) { return sum_score_a(rho_sq, tex(a, b), mn, config.quadrature); },
            [&](double a) { return sum_log_g(rho_sq, tex(a, b), mn); }, config.a_min, config.a_max);
        if (!c.bracketed)
            fit.flags |= kFlagABracket;
        if (c.objective >= current) {
            fit.a = c.x;
            current = c.objective;
        }
    }
    {
        const double a = fit.a;
        const RootChoice c = best_root([&](double b) { return sum_score_b(rho_sq, tex(a, b), mn); },
                                       [&](double b) { return sum_log_g(rho_sq, tex(a, b), mn); },
                                       config.b_min, config.b_max);
        if (!c.bracketed)
            fit.flags |= kFlagBBracket;
        if (c.objective >= current) {
            fit.b = c.x;
            current = c.objective;
        }
    }
    fit.score_a_sum = sum_score_a(rho_sq, tex(fit.a, fit.b), mn, config.quadrature);
    fit.score_b_sum = sum_score_b(rho_sq, tex(fit.a, fit.b), mn);
    return fit;
}

TextureFit solve_texture_params(const ArrayGeometry& geom, const Angles& theta, const CMat& v,
                                const CMat& sigma, const ObservationBlock& obs, TextureKind kind,
                                double a_current, double b_current, const EstimatorConfig& config)
{
    const RVec r = whitened_energies(geom, theta, v, sigma, obs.z);
    return solve_texture_params(std::vector<double>(r.begin(), r.end()), kind, a_current, b_current, geom.mn(),
                                config);
}

double marginal_log_likelihood(const ArrayGeometry& geom, const Angles& theta, const CMat& v,
                               const CMat& sigma, const TextureFamily& texture, const ObservationBlock& obs)
{
    check_obs(geom, obs.z);
    const Whitener w(sigma);
    const RVec rho_sq = w.quadratic_forms(obs.z - steering_matrix(geom, theta) * v);
    const int mn = geom.mn();
    const double pulses = obs.pulses();
    double s = -pulses * mn * std::log(std::numbers::pi) - pulses * w.log_det();
    for (Eigen::Index l = 0; l < rho_sq.size(); ++l)
        s += log_g(rho_sq[l], texture, mn);
    return s;
}

// ------------------------------------------------------------------------
// Marginal-likelihood estimator
// ------------------------------------------------------------------------

namespace {

bool settled(const EstimatorConfig& config, int i, const Angles& now, const Angles& before)
{
    return i >= config.min_outer_iters && max_angle_change(now, before) < deg2rad(config.refine_tol);
}

void finish(EstimateResult& res, bool converged)
{
    res.converged = converged;
    if (!converged)
        res.flags |= kFlagNotConverged;
    res.iterations_used = static_cast<int>(res.iterations.size()) - 1;
}

} // namespace

EstimateResult immle_run(const ObservationBlock& obs, const ArrayGeometry& geom, TextureKind kind, int targets,
                         const EstimatorConfig& config)
{
    config.validate();
    check_obs(geom, obs.z);
    const int mn = geom.mn();
    const SteeringGrid grid(geom, config.search_options());

    EstimateResult res;
    res.estimator = "IMMLE";
    CMat sigma = CMat::Identity(mn, mn);
    TextureFamily tex{kind, config.initial_a, config.initial_b};
    Angles prev;
    bool converged = false;
    for (int i = 0; i <= config.max_outer_iters; ++i) {
        // Step 1
        const WhitenedData data(grid, sigma, obs.z);
        const MarginalCost cost(tex, mn, data.max_energy());
        const SearchResult sr = minimize_residual_cost(data, cost, targets, i > 0 ? &prev : nullptr);
        res.evaluations += sr.evaluations;
        if (sr.multimodal)
            res.flags |= kFlagMultimodal;
        const CMat v = estimate_v_all(geom, sr.angles, sigma, obs.z);
        const double ll = marginal_log_likelihood(geom, sr.angles, v, sigma, tex, obs);
        res.iterations.push_back({sr.angles, sigma, tex.shape, tex.scale, v, ll});

        if (i > 0 && settled(config, i, sr.angles, prev)) {
            converged = true;
            break;
        }
        prev = sr.angles;
        if (i == config.max_outer_iters)
            break;

        // Step 2: a, then b, then Sigma.
        const RVec r = whitened_energies(geom, prev, v, sigma, obs.z);
        const TextureFit fit = solve_texture_params(std::vector<double>(r.begin(), r.end()), kind, tex.shape,
                                                    tex.scale, mn, config);
        res.flags |= fit.flags;
        tex.shape = fit.a;
        tex.scale = fit.b;

        const SigmaUpdate su = update_sigma(geom, prev, v, sigma, tex, obs, config);
        // Normalizing Sigma by c is compensated by b / c, which leaves the
        // likelihood unchanged.
        const TextureFamily tex_n{kind, tex.shape, std::clamp(tex.scale / su.scale, config.b_min, config.b_max)};
        const double before = marginal_log_likelihood(geom, prev, v, sigma, tex, obs);
        const double after = marginal_log_likelihood(geom, prev, v, su.sigma, tex_n, obs);
        if (after >= before) {
            sigma = su.sigma;
            tex = tex_n;
            if (su.loaded)
                res.flags |= kFlagSigmaLoaded;
        }
    }
    finish(res, converged);
    return res;
}

// ------------------------------------------------------------------------
// Baselines
// ------------------------------------------------------------------------

namespace {

Angles unwhitened_search(const SteeringGrid& grid, const CMat& z, int targets, EstimateResult& res)
{
    const int mn = grid.geometry().mn();
    const WhitenedData data(grid, CMat::Identity(mn, mn), z);
    const WeightedEnergyCost cost(std::vector<double>(static_cast<std::size_t>(z.cols()), 1.0));
    const SearchResult sr = minimize_residual_cost(data, cost, targets);
    res.evaluations += sr.evaluations;
    if (sr.multimodal)
        res.flags |= kFlagMultimodal;
    return sr.angles;
}

IterationRecord plain_record(const Angles& theta, const CMat& sigma, const CMat& z, const ArrayGeometry& geom,
                             double a = kNaN, double b = kNaN)
{
    return {theta, sigma, a, b, estimate_v_all(geom, theta, sigma, z), kNaN};
}

} // namespace

EstimateResult gaussian_baseline(const ObservationBlock& obs, const ArrayGeometry& geom, int targets,
                                 const EstimatorConfig& config, bool iterative, const Angles* initial)
{
    config.validate();
    check_obs(geom, obs.z);
    const int mn = geom.mn();
    const SteeringGrid grid(geom, config.search_options());

    EstimateResult res;
    res.estimator = iterative ? "ICvMLE" : "CvMLE-U";
    CMat sigma = CMat::Identity(mn, mn);
    Angles prev = initial ? *initial : unwhitened_search(grid, obs.z, targets, res);
    res.iterations.push_back(plain_record(prev, sigma, obs.z, geom));
    if (!iterative) {
        finish(res, true);
        return res;
    }
    const std::vector<double> ones(static_cast<std::size_t>(obs.pulses()), 1.0);
    const WeightedEnergyCost cost(ones);
    bool converged = false;
    for (int i = 1; i <= config.max_outer_iters; ++i) {
        const CMat& v = res.iterations.back().v;
        const CMat r = obs.z - steering_matrix(geom, prev) * v;
        const SigmaUpdate su = scatter_fixed_point(r, sigma, [](int, double) { return 1.0; }, config);
        if (su.loaded)
            res.flags |= kFlagSigmaLoaded;
        sigma = su.sigma;

        const WhitenedData data(grid, sigma, obs.z);
        const SearchResult sr = minimize_residual_cost(data, cost, targets, &prev);
        res.evaluations += sr.evaluations;
        if (sr.multimodal)
            res.flags |= kFlagMultimodal;
        res.iterations.push_back(plain_record(sr.angles, sigma, obs.z, geom));
        if (settled(config, i, sr.angles, prev)) {
            converged = true;
            break;
        }
        prev = sr.angles;
    }
    finish(res, converged);
    return res;
}

double texture_estimate(TextureMode mode, double rho_sq, const TextureFamily& texture, int mn)
{
    const double r2 = std::max(rho_sq, kRhoFloor * kRhoFloor);
    if (mode == TextureMode::Conditional)
        return r2 / mn;
    const double a = texture.shape;
    const double b = texture.scale;
    if (texture.kind == TextureKind::TDistributed)
        return (r2 + b) / (mn + a + 1.0);
    const double c = a - 1.0 - mn;
    const double disc = std::sqrt(b * b * c * c + 4.0 * b * r2);
    // Same root as (b c + disc) / 2, written without cancellation for c < 0.
    return c >= 0.0 ? 0.5 * (b * c + disc) : 2.0 * b * r2 / (disc - b * c);
}

TextureFamily fit_texture_samples(const std::vector<double>& tau, TextureKind kind, const EstimatorConfig& config)
{
    if (tau.empty())
        throw std::invalid_argument("fit_texture_samples: no samples");
    // Gamma ML on x = tau (K) or x = 1/tau (t): ln a - Psi(a) = ln mean(x) - mean(ln x).
    double mean = 0.0;
    double mean_log = 0.0;
    for (double t : tau) {
        const double x = kind == TextureKind::KDistributed ? t : 1.0 / t;
        mean += x;
        mean_log += std::log(x);
    }
    mean /= static_cast<double>(tau.size());
    mean_log /= static_cast<double>(tau.size());
    const double target = std::log(mean) - mean_log;
    const auto f = [&](double a) { return std::log(a) - specfun::digamma(a) - target; };

    double a;
    const double f_lo = f(config.a_min);
    const double f_hi = f(config.a_max);
    if (!(target > 0.0) || f_hi >= 0.0) {
        a = config.a_max;
    } else if (f_lo <= 0.0) {
        a = config.a_min;
    } else {
        std::uintmax_t max_iter = 100;
        const auto [lo, hi] = boost::math::tools::toms748_solve(f, config.a_min, config.a_max, f_lo, f_hi,
                                                                boost::math::tools::eps_tolerance<double>(45),
                                                                max_iter);
        a = 0.5 * (lo + hi);
    }
    const double gamma_scale = mean / a;
    const double b = kind == TextureKind::KDistributed ? gamma_scale : 1.0 / gamma_scale;
    return {kind, a, std::clamp(b, config.b_min, config.b_max)};
}

EstimateResult texture_weighted_baseline(const ObservationBlock& obs, const ArrayGeometry& geom,
                                         TextureKind kind, int targets, const EstimatorConfig& config,
                                         TextureMode mode, const Angles* initial)
{
    config.validate();
    check_obs(geom, obs.z);
    const int mn = geom.mn();
    const SteeringGrid grid(geom, config.search_options());
    const bool joint = mode == TextureMode::Joint;

    EstimateResult res;
    res.estimator = joint ? "IJMLE" : "ICdMLE";
    CMat sigma = CMat::Identity(mn, mn);
    TextureFamily tex{kind, config.initial_a, config.initial_b};
    Angles prev = initial ? *initial : unwhitened_search(grid, obs.z, targets, res);
    res.iterations.push_back(
        plain_record(prev, sigma, obs.z, geom, joint ? tex.shape : kNaN, joint ? tex.scale : kNaN));

    bool converged = false;
    for (int i = 1; i <= config.max_outer_iters; ++i) {
        const CMat& v = res.iterations.back().v;
        const CMat r = obs.z - steering_matrix(geom, prev) * v;
        const SigmaUpdate su = scatter_fixed_point(
            r, sigma, [&](int, double rho_sq) { return 1.0 / texture_estimate(mode, rho_sq, tex, mn); }, config);
        if (su.loaded)
            res.flags |= kFlagSigmaLoaded;
        sigma = su.sigma;
        tex.scale = std::clamp(tex.scale / su.scale, config.b_min, config.b_max);

        const RVec rho_sq = Whitener(sigma).quadratic_forms(r);
        std::vector<double> tau(static_cast<std::size_t>(rho_sq.size()));
        if (joint) {
            for (Eigen::Index l = 0; l < rho_sq.size(); ++l)
                tau[static_cast<std::size_t>(l)] = texture_estimate(mode, rho_sq[l], tex, mn);
            tex = fit_texture_samples(tau, kind, config);
        }
        std::vector<double> weights(tau.size());
        for (Eigen::Index l = 0; l < rho_sq.size(); ++l)
            weights[static_cast<std::size_t>(l)] = 1.0 / texture_estimate(mode, rho_sq[l], tex, mn);

        const WhitenedData data(grid, sigma, obs.z);
        const WeightedEnergyCost cost(std::move(weights));
        const SearchResult sr = minimize_residual_cost(data, cost, targets, &prev);
        res.evaluations += sr.evaluations;
        if (sr.multimodal)
            res.flags |= kFlagMultimodal;
        res.iterations.push_back(
            plain_record(sr.angles, sigma, obs.z, geom, joint ? tex.shape : kNaN, joint ? tex.scale : kNaN));
        if (settled(config, i, sr.angles, prev)) {
            converged = true;
            break;
        }
        prev = sr.angles;
    }
    finish(res, converged);
    return res;
}

} // namespace sirp

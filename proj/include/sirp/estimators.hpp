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

#include "sirp/clutter.hpp"
#include "sirp/model.hpp"
#include "sirp/specfun.hpp"
#include "sirp/theta_search.hpp"
#include "sirp/types.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sirp {

struct EstimatorConfig
{
    double coarse_grid_step = 1.0;  // degrees
    double refine_tol = 0.01;       // degrees
    double grid_min = -89.0;        // degrees
    double grid_max = 89.0;         // degrees
    int sweeps = 2;
    bool polish = true;

    int max_outer_iters = 5;
    int min_outer_iters = 2;

    int sigma_fixed_point_iters = 10;
    double sigma_fixed_point_tol = 1e-3;
    double sigma_loading = 1e-8;  // relative to tr(Sigma)/MN

    double a_min = 0.05;
    double a_max = 100.0;
    double b_min = 1e-3;
    double b_max = 1e4;
    double root_tol = 1e-6;
    double initial_a = 2.0;
    double initial_b = 1.0;

    bool music_polish = true;
    specfun::QuadratureSpec quadrature;

    void validate() const;
    SearchOptions search_options() const;
};

/// Bit flags attached to an estimate.
enum EstimateFlag : unsigned
{
    kFlagMultimodal = 1u << 0,         // search sweeps disagreed
    kFlagSigmaLoaded = 1u << 1,        // diagonal loading applied to Sigma
    kFlagABracket = 1u << 2,           // no sign change for the a equation
    kFlagBBracket = 1u << 3,           // no sign change for the b equation
    kFlagNotConverged = 1u << 4,       // hit max_outer_iters
    kFlagDegenerateSpectrum = 1u << 5, // MUSIC eigen-gap below threshold
};

/// State after iteration i: theta^(i) from the search using the nuisance
/// estimates (sigma, a, b) listed here, and v^(i) from theta^(i).
struct IterationRecord
{
    Angles theta;
    CMat sigma;  // normalized, trace MN
    double a = 0.0;
    double b = 0.0;
    CMat v;      // K x L
    double log_likelihood = 0.0;  // marginal log-likelihood; NaN where undefined
};

struct EstimateResult
{
    std::string estimator;
    std::vector<IterationRecord> iterations;  // index 0 is the initial pass
    bool converged = false;
    int iterations_used = 0;  // index of the last record
    unsigned flags = 0;
    long evaluations = 0;     // objective evaluations over all searches

    /// theta^(i); requests beyond the last record return the last one.
    const Angles& theta(int iteration) const;
    const Angles& final_theta() const { return iterations.back().theta; }
    std::vector<double> ll_trace() const;
};

/// Thrown when cond(A^H Sigma^-1 A) exceeds the configured limit.
class RankDeficientError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// ||P_perp z~||^2 with P_perp the projector onto the orthogonal complement
/// of Sigma^{-1/2} A(theta).
double whitened_residual_norm_sq(const ArrayGeometry& geom, const Angles& theta, const CMat& sigma,
                                 const CVec& z, double max_condition = 1e12);

/// Whitened least-squares amplitudes (A~^H A~)^{-1} A~^H z~.
CVec estimate_v(const ArrayGeometry& geom, const Angles& theta, const CMat& sigma, const CVec& z,
                double max_condition = 1e12);

/// estimate_v for every pulse (K x L).
CMat estimate_v_all(const ArrayGeometry& geom, const Angles& theta, const CMat& sigma, const CMat& z,
                    double max_condition = 1e12);

/// rho(l)^H rho(l) with rho(l) = Sigma^{-1/2} (z(l) - A v(l)).
RVec whitened_energies(const ArrayGeometry& geom, const Angles& theta, const CMat& v, const CMat& sigma,
                       const CMat& z);

/// Concentrated cost for theta, lower is better:
///   K: sum_l (MN - a) ln r_l - ln K_{a-MN}(2 r_l / sqrt(b))
///   t: sum_l ln(r_l^2 + b)
/// with r_l = ||P_perp z~(l)||.
double immle_theta_objective(const ArrayGeometry& geom, const Angles& theta, const CMat& sigma,
                             const TextureFamily& texture, const ObservationBlock& obs);

/// Per-pulse form of immle_theta_objective, usable by the grid search.
/// The K family precomputes a cubic Hermite table in ln r^2 for the grid.
class MarginalCost : public ResidualCost
{
public:
    MarginalCost(const TextureFamily& texture, int mn, double r2_max);
    double term(int pulse, double r2) const override;
    double grid_term(int pulse, double r2) const override;

private:
    TextureFamily texture_;
    int mn_;
    specfun::LogBesselK bessel_;
    specfun::LogBesselK bessel_lower_;
    double s0_ = 0.0;
    double ds_ = 0.0;
    std::vector<double> value_;
    std::vector<double> slope_;
};

/// sum_l w_l r_l^2.
class WeightedEnergyCost : public ResidualCost
{
public:
    explicit WeightedEnergyCost(std::vector<double> weights) : w_(std::move(weights)) {}
    double term(int pulse, double r2) const override { return w_[static_cast<std::size_t>(pulse)] * r2; }

private:
    std::vector<double> w_;
};

struct SigmaUpdate
{
    CMat sigma;           // normalized to trace MN
    double scale = 1.0;   // c with sigma = c * (unnormalized fixed point)
    int iterations = 0;
    bool loaded = false;
};

/// Per-pulse weight w(l, rho^2) of a scatter fixed point.
using ScatterWeight = std::function<double(int pulse, double rho_sq)>;

/// Fixed point Sigma <- (1/L) sum_l w(l, r_l^H Sigma^-1 r_l) r_l r_l^H over
/// the residual columns r_l, started from `sigma0`, then trace-normalized.
/// Diagonal loading keeps every iterate positive-definite.
SigmaUpdate scatter_fixed_point(const CMat& residuals, const CMat& sigma0, const ScatterWeight& weight,
                                const EstimatorConfig& config);

/// The marginal-likelihood Sigma update: weights h_MN(rho^2; a, b).
SigmaUpdate update_sigma(const ArrayGeometry& geom, const Angles& theta, const CMat& v, const CMat& sigma,
                         const TextureFamily& texture, const ObservationBlock& obs,
                         const EstimatorConfig& config);

struct TextureFit
{
    double a = 0.0;
    double b = 0.0;
    double score_a_sum = 0.0;  // sum_l d ln g / d a at the returned point
    double score_b_sum = 0.0;
    unsigned flags = 0;
};

/// a from sum_l score_a = 0 with b fixed, then b from sum_l score_b = 0 with
/// the new a. Roots are bracketed on a log-spaced scan of the bounds and
/// refined by TOMS 748. Among several roots the one with the largest
/// sum_l ln g is taken, and a candidate is only accepted if it does not
/// lower sum_l ln g below the value at the current point.
TextureFit solve_texture_params(const std::vector<double>& rho_sq, TextureKind kind, double a_current,
                                double b_current, int mn, const EstimatorConfig& config);

TextureFit solve_texture_params(const ArrayGeometry& geom, const Angles& theta, const CMat& v,
                                const CMat& sigma, const ObservationBlock& obs, TextureKind kind,
                                double a_current, double b_current, const EstimatorConfig& config);

/// -L MN ln(pi) - L ln|Sigma| + sum_l ln g_MN(||rho(l)||^2; a, b).
double marginal_log_likelihood(const ArrayGeometry& geom, const Angles& theta, const CMat& v,
                               const CMat& sigma, const TextureFamily& texture, const ObservationBlock& obs);

/// The marginal-likelihood estimator: Sigma = I and (initial_a, initial_b)
/// for the first search, then alternating search / (a, b, Sigma) updates.
EstimateResult immle_run(const ObservationBlock& obs, const ArrayGeometry& geom, TextureKind kind, int targets,
                         const EstimatorConfig& config);

/// Unwhitened least squares (iterative = false), or least squares alternated
/// with the normalized residual sample covariance (iterative = true).
/// `initial` skips the unwhitened search when the caller already has it.
EstimateResult gaussian_baseline(const ObservationBlock& obs, const ArrayGeometry& geom, int targets,
                                 const EstimatorConfig& config, bool iterative,
                                 const Angles* initial = nullptr);

enum class TextureMode
{
    Conditional,  // tau(l) = rho^2 / MN
    Joint,        // stationary point of the joint density in tau(l)
};

/// Per-pulse texture estimate used by the weighted baselines.
double texture_estimate(TextureMode mode, double rho_sq, const TextureFamily& texture, int mn);

/// Least squares weighted by 1 / tau(l), alternated with the matching
/// Sigma fixed point and (joint mode) a texture-parameter fit.
EstimateResult texture_weighted_baseline(const ObservationBlock& obs, const ArrayGeometry& geom,
                                         TextureKind kind, int targets, const EstimatorConfig& config,
                                         TextureMode mode, const Angles* initial = nullptr);

/// Maximum-likelihood (a, b) of the texture family from texture samples.
TextureFamily fit_texture_samples(const std::vector<double>& tau, TextureKind kind, const EstimatorConfig& config);

/// MUSIC on the sample covariance: the K deepest well-separated minima of
/// MN - ||E_s^H a||^2 on the search grid, optionally polished.
EstimateResult music_scm(const ObservationBlock& obs, const ArrayGeometry& geom, int targets,
                         const EstimatorConfig& config);

/// MUSIC null spectrum a^H E_n E_n^H a at one (DOD, DOA).
double music_spectrum(const CMat& signal_subspace, const ArrayGeometry& geom, const AnglePair& angles);

} // namespace sirp

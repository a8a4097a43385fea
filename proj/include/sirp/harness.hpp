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
#include "sirp/estimators.hpp"
#include "sirp/model.hpp"
#include "sirp/types.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace sirp {

enum class SweepAxis
{
    Scr,     // SCR in dB, pulses fixed
    Pulses,  // pulse count L, SCR fixed
};

std::string_view to_string(SweepAxis axis);

/// Canonical estimator names.
inline constexpr std::string_view kImmle = "IMMLE";
inline constexpr std::string_view kIcdmle = "ICdMLE";
inline constexpr std::string_view kIjmle = "IJMLE";
inline constexpr std::string_view kIcvmle = "ICvMLE";
inline constexpr std::string_view kCvmleU = "CvMLE-U";
inline constexpr std::string_view kMusicScm = "MUSIC-SCM";

/// Throws std::invalid_argument for names outside the list above.
std::string canonical_estimator_name(std::string_view name);

struct EstimatorSelection
{
    std::string name;
    std::vector<int> iterations{2};  // which theta^(i) to score
};

struct ExperimentConfig
{
    ArrayGeometry geometry;
    Scene scene;              // pulses is overridden on the L axis
    TextureFamily texture;
    double cov_base = 0.9;    // [Sigma]_{m,n} ~ base^|m-n| exp(j step (m-n))
    double cov_phase_step = std::numbers::pi / 2.0;

    SweepAxis axis = SweepAxis::Scr;
    std::vector<double> sweep_values;
    double fixed_scr_db = 15.0;  // SCR used on the L axis

    int trials = 500;
    std::uint64_t base_seed = 1;
    std::vector<EstimatorSelection> estimators;
    EstimatorConfig estimator;
    std::string output_path;
    int threads = 0;  // 0: one per hardware thread

    void validate() const;

    /// Two targets at (18, 20) and (45, 40) degrees, M = 3, N = 4 half-wavelength
    /// ULAs, L = 15, T = 5, SCR sweep -5..30 dB, every estimator at 2 iterations.
    static ExperimentConfig paper_defaults(TextureKind kind);

    Scene scene_at(std::size_t sweep_index) const;
    ClutterModel clutter_at(std::size_t sweep_index) const;
};

/// Squared (DOD, DOA) errors under the assignment of estimated to true
/// pairs with the smallest total; ordered as [dod_1, doa_1, dod_2, ...]
/// following `truth`. Same units as the inputs.
std::vector<double> match_permutation(const Angles& estimate, const Angles& truth);

/// 10 log10 of the trial-mean of the per-trial error sums, i.e.
/// aggregate_db of the per-angle means. Throws when `trial_errors` is empty.
double aggregate(const std::vector<std::vector<double>>& trial_errors);

struct EstimatorOutcome
{
    std::string name;
    bool failed = false;
    std::string failure;
    std::vector<int> iterations;
    std::vector<std::vector<double>> squared_errors_deg2;  // one per entry of `iterations`
    EstimateResult result;
};

struct TrialResult
{
    Angles truth;
    std::vector<EstimatorOutcome> estimators;
};

/// One Monte Carlo trial. The generator is seeded from (base_seed,
/// sweep_index, trial_index) only, so trials can run in any order.
TrialResult run_trial(const ExperimentConfig& config, std::size_t sweep_index, std::size_t trial_index);

struct SweepRow
{
    SweepAxis axis = SweepAxis::Scr;
    double sweep_value = 0.0;
    std::string estimator;
    int iterations = 0;
    double mse_db = 0.0;  // NaN when every trial failed
    double crb_db = 0.0;
    int trials_used = 0;
    int failures = 0;
};

struct SweepResult
{
    std::vector<SweepRow> rows;
};

/// Bound in dB at one sweep point.
double crb_db_at(const ExperimentConfig& config, std::size_t sweep_index);

/// Progress callback: (sweep index, trials finished at that point).
using SweepProgress = std::function<void(std::size_t, int)>;

SweepResult sweep(const ExperimentConfig& config, const SweepProgress& progress = {});

inline constexpr std::string_view kSweepCsvHeader =
    "sweep_axis,sweep_value,estimator,iterations,mse_db,crb_db,trials_used,failures";

void write_sweep_csv(std::ostream& out, const SweepResult& result);

/// Columns sweep_value,crb_db.
void write_crb_csv(std::ostream& out, const ExperimentConfig& config);

/// Formats a double the way every CSV column does.
std::string format_value(double v);

} // namespace sirp

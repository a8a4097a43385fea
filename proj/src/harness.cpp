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


#include "sirp/harness.hpp"

#include "sirp/crb.hpp"

#include <algorithm>
#include <cctype>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace sirp {

std::string_view to_string(SweepAxis axis)
{
    return axis == SweepAxis::Scr ? "scr_db" : "pulses";
}

std::string canonical_estimator_name(std::string_view name)
{
    for (std::string_view known : {kImmle, kIcdmle, kIjmle, kIcvmle, kCvmleU, kMusicScm}) {
        if (name.size() != known.size())
            continue;
        bool same = true;
        for (std::size_t i = 0; i < name.size(); ++i)
            if (std::tolower(static_cast<unsigned char>(name[i])) != std::tolower(static_cast<unsigned char>(known[i])))
                same = false;
        if (same)
            return std::string(known);
    }
    throw std::invalid_argument("unknown estimator '" + std::string(name) +
                                "' (expected IMMLE, ICdMLE, IJMLE, ICvMLE, CvMLE-U or MUSIC-SCM)");
}

// ------------------------------------------------------------------------
// Configuration
// ------------------------------------------------------------------------

void ExperimentConfig::validate() const
{
    geometry.validate();
    scene.validate();
    texture.validate();
    estimator.validate();
    if (!(cov_base > 0.0) || !(cov_base < 1.0))
        throw std::invalid_argument("covariance base must lie in (0, 1)");
    if (!std::isfinite(cov_phase_step))
        throw std::invalid_argument("covariance phase step must be finite");
    if (sweep_values.empty())
        throw std::invalid_argument("sweep list must not be empty");
    for (double v : sweep_values) {
        if (!std::isfinite(v))
            throw std::invalid_argument("sweep values must be finite");
        if (axis == SweepAxis::Pulses && (v < 1.0 || v != std::floor(v)))
            throw std::invalid_argument("pulse counts must be positive integers");
    }
    if (trials < 1)
        throw std::invalid_argument("trials must be >= 1");
    if (estimators.empty())
        throw std::invalid_argument("estimator list must not be empty");
    for (const auto& e : estimators) {
        canonical_estimator_name(e.name);
        if (e.iterations.empty())
            throw std::invalid_argument("estimator '" + e.name + "' needs at least one iteration count");
        for (int i : e.iterations)
            if (i < 0 || i > estimator.max_outer_iters)
                throw std::invalid_argument("iteration counts must lie in [0, max_outer_iters]");
    }
    if (threads < 0)
        throw std::invalid_argument("threads must be >= 0");
    if (texture.kind == TextureKind::TDistributed && !(texture.shape > 1.0))
        throw std::invalid_argument("SCR needs a finite texture mean (t family shape > 1)");
    if (scene.targets() >= geometry.mn())
        throw std::invalid_argument("need fewer targets than virtual sensors");
}

ExperimentConfig ExperimentConfig::paper_defaults(TextureKind kind)
{
    ExperimentConfig c;
    c.geometry = ArrayGeometry::uniform(3, 4, 0.5, 1.0);
    c.scene.dod = {deg2rad(18.0), deg2rad(45.0)};
    c.scene.doa = {deg2rad(20.0), deg2rad(40.0)};
    c.scene.rcs = {cd(2.0, 3.0), cd(1.0, -0.5)};
    c.scene.doppler = {0.3, 0.8};
    c.scene.pulses = 15;
    c.scene.snapshots_per_pulse = 5;
    c.texture = kind == TextureKind::KDistributed ? TextureFamily{kind, 2.0, 10.0} : TextureFamily{kind, 1.1, 2.0};
    c.axis = SweepAxis::Scr;
    c.sweep_values = {-5.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0};
    c.fixed_scr_db = 15.0;
    c.trials = 500;
    c.base_seed = 1;
    for (std::string_view n : {kImmle, kIcdmle, kIjmle, kIcvmle, kMusicScm})
        c.estimators.push_back({std::string(n), {2}});
    return c;
}

Scene ExperimentConfig::scene_at(std::size_t sweep_index) const
{
    Scene s = scene;
    if (axis == SweepAxis::Pulses)
        s.pulses = static_cast<int>(sweep_values.at(sweep_index));
    return s;
}

ClutterModel ExperimentConfig::clutter_at(std::size_t sweep_index) const
{
    const Scene s = scene_at(sweep_index);
    const double scr = axis == SweepAxis::Scr ? sweep_values.at(sweep_index) : fixed_scr_db;
    const int mn = geometry.mn();
    ClutterModel model{texture, speckle_template(mn, 1.0, cov_base, cov_phase_step)};
    const double sigma2 = sigma2_for_scr(geometry, s, model, scr);
    model.speckle_cov = speckle_template(mn, sigma2, cov_base, cov_phase_step);
    return model;
}

// ------------------------------------------------------------------------
// Scoring
// ------------------------------------------------------------------------

std::vector<double> match_permutation(const Angles& estimate, const Angles& truth)
{
    if (estimate.size() != truth.size() || truth.empty())
        throw std::invalid_argument("match_permutation: estimate and truth need the same non-zero length");
    const Angles aligned = align_to(estimate, truth);
    std::vector<double> out;
    out.reserve(2 * truth.size());
    for (std::size_t k = 0; k < truth.size(); ++k) {
        const double dt = aligned[k].dod - truth[k].dod;
        const double dr = aligned[k].doa - truth[k].doa;
        out.push_back(dt * dt);
        out.push_back(dr * dr);
    }
    return out;
}

double aggregate(const std::vector<std::vector<double>>& trial_errors)
{
    if (trial_errors.empty())
        throw std::invalid_argument("aggregate: no successful trials");
    std::vector<double> mean(trial_errors.front().size(), 0.0);
    for (const auto& t : trial_errors) {
        if (t.size() != mean.size())
            throw std::invalid_argument("aggregate: trials disagree on the number of angles");
        for (std::size_t i = 0; i < t.size(); ++i)
            mean[i] += t[i];
    }
    for (double& m : mean)
        m /= static_cast<double>(trial_errors.size());
    return aggregate_db(mean);
}

// ------------------------------------------------------------------------
// Trials
// ------------------------------------------------------------------------

namespace {

Rng trial_rng(std::uint64_t base_seed, std::size_t sweep_index, std::size_t trial_index)
{
    std::seed_seq seq{static_cast<std::uint32_t>(base_seed), static_cast<std::uint32_t>(base_seed >> 32),
                      static_cast<std::uint32_t>(sweep_index), static_cast<std::uint32_t>(trial_index)};
    return Rng(seq);
}

Angles to_degrees(const Angles& a)
{
    Angles out = a;
    for (auto& p : out) {
        p.dod = rad2deg(p.dod);
        p.doa = rad2deg(p.doa);
    }
    return out;
}

bool needs_cvmle(const ExperimentConfig& config)
{
    for (const auto& e : config.estimators) {
        const std::string n = canonical_estimator_name(e.name);
        if (n == kIcdmle || n == kIjmle || n == kIcvmle || n == kCvmleU)
            return true;
    }
    return false;
}

} // namespace

TrialResult run_trial(const ExperimentConfig& config, std::size_t sweep_index, std::size_t trial_index)
{
    const Scene scene = config.scene_at(sweep_index);
    const ClutterModel clutter = config.clutter_at(sweep_index);
    Rng rng = trial_rng(config.base_seed, sweep_index, trial_index);
    const ObservationBlock obs = synthesize(config.geometry, scene, sample_clutter(clutter, scene.pulses, rng));

    const int k = scene.targets();
    const TextureKind kind = config.texture.kind;
    const EstimatorConfig& ec = config.estimator;

    TrialResult out;
    out.truth = scene.angles();
    const Angles truth_deg = to_degrees(out.truth);

    // The unwhitened least-squares fit is the starting point of three
    // baselines; compute it once.
    std::optional<EstimateResult> cvmle;
    std::string cvmle_error;
    if (needs_cvmle(config)) {
        try {
            cvmle = gaussian_baseline(obs, config.geometry, k, ec, false);
        } catch (const std::exception& e) {
            cvmle_error = e.what();
        }
    }

    for (const auto& sel : config.estimators) {
        EstimatorOutcome o;
        o.name = canonical_estimator_name(sel.name);
        o.iterations = sel.iterations;
        try {
            const bool uses_init = o.name == kIcdmle || o.name == kIjmle || o.name == kIcvmle || o.name == kCvmleU;
            if (uses_init && !cvmle)
                throw std::runtime_error("initial least-squares fit failed: " + cvmle_error);
            const Angles* init = cvmle ? &cvmle->final_theta() : nullptr;
            if (o.name == kImmle)
                o.result = immle_run(obs, config.geometry, kind, k, ec);
            else if (o.name == kIcdmle)
                o.result = texture_weighted_baseline(obs, config.geometry, kind, k, ec, TextureMode::Conditional, init);
            else if (o.name == kIjmle)
                o.result = texture_weighted_baseline(obs, config.geometry, kind, k, ec, TextureMode::Joint, init);
            else if (o.name == kIcvmle)
                o.result = gaussian_baseline(obs, config.geometry, k, ec, true, init);
            else if (o.name == kCvmleU)
                o.result = *cvmle;
            else
                o.result = music_scm(obs, config.geometry, k, ec);
            for (int it : sel.iterations)
                o.squared_errors_deg2.push_back(match_permutation(to_degrees(o.result.theta(it)), truth_deg));
        } catch (const std::exception& e) {
            o.failed = true;
            o.failure = e.what();
            o.squared_errors_deg2.clear();
        }
        out.estimators.push_back(std::move(o));
    }
    return out;
}

// ------------------------------------------------------------------------
// Sweeps
// ------------------------------------------------------------------------

double crb_db_at(const ExperimentConfig& config, std::size_t sweep_index)
{
    return crb_db(crb_theta(config.geometry, config.scene_at(sweep_index), config.clutter_at(sweep_index)));
}

SweepResult sweep(const ExperimentConfig& config, const SweepProgress& progress)
{
    config.validate();
    const int threads = config.threads > 0 ? config.threads
                                           : std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
    SweepResult result;
    for (std::size_t s = 0; s < config.sweep_values.size(); ++s) {
        const double crb = crb_db_at(config, s);

        // Per estimator, per iteration count: the error vectors of every trial.
        std::vector<std::vector<std::vector<std::vector<double>>>> errors(config.estimators.size());
        for (std::size_t e = 0; e < config.estimators.size(); ++e)
            errors[e].assign(config.estimators[e].iterations.size(),
                             std::vector<std::vector<double>>(static_cast<std::size_t>(config.trials)));
        std::vector<std::vector<char>> failed(config.estimators.size(),
                                              std::vector<char>(static_cast<std::size_t>(config.trials), 0));

        std::atomic<int> next{0};
        std::atomic<int> done{0};
        std::mutex progress_mutex;
        std::exception_ptr fatal;
        const auto worker = [&] {
            for (int t = next++; t < config.trials; t = next++) {
                try {
                    TrialResult tr = run_trial(config, s, static_cast<std::size_t>(t));
                    for (std::size_t e = 0; e < tr.estimators.size(); ++e) {
                        auto& o = tr.estimators[e];
                        if (o.failed) {
                            failed[e][static_cast<std::size_t>(t)] = 1;
                            continue;
                        }
                        for (std::size_t i = 0; i < o.squared_errors_deg2.size(); ++i)
                            errors[e][i][static_cast<std::size_t>(t)] = std::move(o.squared_errors_deg2[i]);
                    }
                } catch (...) {
                    std::lock_guard lock(progress_mutex);
                    if (!fatal)
                        fatal = std::current_exception();
                }
                const int d = ++done;
                if (progress) {
                    std::lock_guard lock(progress_mutex);
                    progress(s, d);
                }
            }
        };
        if (threads == 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (int i = 0; i < std::min(threads, config.trials); ++i)
                pool.emplace_back(worker);
            for (auto& th : pool)
                th.join();
        }
        if (fatal)
            std::rethrow_exception(fatal);

        for (std::size_t e = 0; e < config.estimators.size(); ++e) {
            const auto& sel = config.estimators[e];
            for (std::size_t i = 0; i < sel.iterations.size(); ++i) {
                std::vector<std::vector<double>> ok;
                for (int t = 0; t < config.trials; ++t)
                    if (!failed[e][static_cast<std::size_t>(t)])
                        ok.push_back(errors[e][i][static_cast<std::size_t>(t)]);
                SweepRow row;
                row.axis = config.axis;
                row.sweep_value = config.sweep_values[s];
                row.estimator = canonical_estimator_name(sel.name);
                row.iterations = sel.iterations[i];
                row.trials_used = static_cast<int>(ok.size());
                row.failures = config.trials - row.trials_used;
                row.mse_db = ok.empty() ? std::numeric_limits<double>::quiet_NaN() : aggregate(ok);
                row.crb_db = crb;
                result.rows.push_back(std::move(row));
            }
        }
    }
    std::stable_sort(result.rows.begin(), result.rows.end(), [](const SweepRow& a, const SweepRow& b) {
        if (a.sweep_value != b.sweep_value)
            return a.sweep_value < b.sweep_value;
        if (a.estimator != b.estimator)
            return a.estimator < b.estimator;
        return a.iterations < b.iterations;
    });
    return result;
}

std::string format_value(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result)
{
    out << kSweepCsvHeader << '\n';
    for (const auto& r : result.rows)
        out << to_string(r.axis) << ',' << format_value(r.sweep_value) << ',' << r.estimator << ','
            << r.iterations << ',' << format_value(r.mse_db) << ',' << format_value(r.crb_db) << ','
            << r.trials_used << ',' << r.failures << '\n';
}

void write_crb_csv(std::ostream& out, const ExperimentConfig& config)
{
    out << "sweep_value,crb_db\n";
    for (std::size_t s = 0; s < config.sweep_values.size(); ++s)
        out << format_value(config.sweep_values[s]) << ',' << format_value(crb_db_at(config, s)) << '\n';
}

} // namespace sirp

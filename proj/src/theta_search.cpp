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


#include "sirp/theta_search.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <stdexcept>

namespace sirp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr Eigen::Index kScanBlock = 2048;

} // namespace

void SearchOptions::validate() const
{
    if (!(grid_step_deg > 0.0))
        throw std::invalid_argument("SearchOptions: grid step must be > 0");
    if (!(refine_tol_deg > 0.0) || !(refine_tol_deg < grid_step_deg))
        throw std::invalid_argument("SearchOptions: need 0 < refine_tol < grid step");
    if (!(grid_min_deg > -90.0) || !(grid_max_deg < 90.0) || !(grid_min_deg <= grid_max_deg))
        throw std::invalid_argument("SearchOptions: grid bounds must satisfy -90 < min <= max < 90");
    if (sweeps < 1 || polish_rounds < 0 || polish_max_evals < 1)
        throw std::invalid_argument("SearchOptions: sweeps >= 1, polish_rounds >= 0, polish_max_evals >= 1");
    if (!(max_condition > 1.0))
        throw std::invalid_argument("SearchOptions: max_condition must exceed 1");
}

int SearchOptions::axis_points() const
{
    return static_cast<int>(std::floor((grid_max_deg - grid_min_deg) / grid_step_deg + 1e-9)) + 1;
}

double SearchOptions::axis_angle(int i) const
{
    return deg2rad(grid_min_deg + i * grid_step_deg);
}

// ------------------------------------------------------------------------
// Helpers
// ------------------------------------------------------------------------

Angles align_to(const Angles& angles, const Angles& reference)
{
    if (angles.size() != reference.size())
        throw std::invalid_argument("align_to: length mismatch");
    std::vector<std::size_t> perm(angles.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::size_t> best = perm;
    double best_cost = kInf;
    do {
        double c = 0.0;
        for (std::size_t k = 0; k < perm.size(); ++k) {
            const double dt = angles[perm[k]].dod - reference[k].dod;
            const double dr = angles[perm[k]].doa - reference[k].doa;
            c += dt * dt + dr * dr;
        }
        if (c < best_cost) {
            best_cost = c;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    Angles out(angles.size());
    for (std::size_t k = 0; k < best.size(); ++k)
        out[k] = angles[best[k]];
    return out;
}

double max_angle_change(const Angles& a, const Angles& b)
{
    if (a.size() != b.size())
        throw std::invalid_argument("max_angle_change: length mismatch");
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        m = std::max({m, std::fabs(a[k].dod - b[k].dod), std::fabs(a[k].doa - b[k].doa)});
    return m;
}

namespace {

// Fills `values` (one entry per grid point) for a new target scanned with
// `others` held fixed.
using GridScan = std::function<void(const Angles& others, std::vector<double>& values)>;

struct PolishTarget
{
    const AngleObjective* objective;
    Angles* angles;
    std::size_t index;
    long* evaluations;
};

double polish_eval(const gsl_vector* x, void* params)
{
    auto* p = static_cast<PolishTarget*>(params);
    const double dod = gsl_vector_get(x, 0);
    const double doa = gsl_vector_get(x, 1);
    constexpr double kEdge = std::numbers::pi / 2.0 - 1e-6;
    if (!(std::fabs(dod) < kEdge) || !(std::fabs(doa) < kEdge))
        return 1e300;
    (*p->angles)[p->index] = {dod, doa};
    ++*p->evaluations;
    const double v = (*p->objective)(*p->angles);
    return std::isfinite(v) ? v : 1e300;
}

// Nelder-Mead on one (DOD, DOA) pair. Returns true when the pair moved to a
// strictly better point.
bool polish_target(const AngleObjective& objective, Angles& angles, double& value, std::size_t k,
                   const SearchOptions& opt, long& evaluations)
{
    Angles work = angles;
    PolishTarget params{&objective, &work, k, &evaluations};
    gsl_multimin_function fn{&polish_eval, 2, &params};

    std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(2), &gsl_vector_free);
    std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> step(gsl_vector_alloc(2), &gsl_vector_free);
    gsl_vector_set(x.get(), 0, angles[k].dod);
    gsl_vector_set(x.get(), 1, angles[k].doa);
    gsl_vector_set_all(step.get(), 0.5 * deg2rad(opt.grid_step_deg));

    std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> nm(
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2),
        &gsl_multimin_fminimizer_free);
    gsl_multimin_fminimizer_set(nm.get(), &fn, x.get(), step.get());

    const double size_tol = 0.25 * deg2rad(opt.refine_tol_deg);
    const long start = evaluations;
    while (evaluations - start < opt.polish_max_evals) {
        if (gsl_multimin_fminimizer_iterate(nm.get()) != GSL_SUCCESS)
            break;
        if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(nm.get()), size_tol) == GSL_SUCCESS)
            break;
    }
    const gsl_vector* best = gsl_multimin_fminimizer_x(nm.get());
    const AnglePair cand{gsl_vector_get(best, 0), gsl_vector_get(best, 1)};
    work[k] = cand;
    ++evaluations;
    const double v = objective(work);
    if (v < value) {
        angles[k] = cand;
        value = v;
        return true;
    }
    return false;
}

std::size_t argmin(const std::vector<double>& values)
{
    std::size_t best = 0;
    for (std::size_t p = 1; p < values.size(); ++p)
        if (values[p] < values[best])
            best = p;
    return best;
}

AnglePair grid_pair(const SearchOptions& opt, std::size_t p)
{
    const int g = opt.axis_points();
    return {opt.axis_angle(static_cast<int>(p) / g), opt.axis_angle(static_cast<int>(p) % g)};
}

SearchResult run_search(const GridScan& scan, const AngleObjective& exact, int targets,
                        const SearchOptions& opt, const Angles* incumbent, long grid_points)
{
    opt.validate();
    if (targets < 1)
        throw std::invalid_argument("minimize_theta: need at least one target");
    if (incumbent && static_cast<int>(incumbent->size()) != targets)
        throw std::invalid_argument("minimize_theta: incumbent has the wrong number of targets");

    SearchResult res;
    std::vector<double> values;
    Angles cur;
    for (int k = 0; k < targets; ++k) {
        scan(cur, values);
        res.evaluations += grid_points;
        cur.push_back(grid_pair(opt, argmin(values)));
    }
    const Angles first = cur;
    for (int s = 1; s < opt.sweeps; ++s) {
        for (int k = 0; k < targets; ++k) {
            Angles others = cur;
            others.erase(others.begin() + k);
            scan(others, values);
            res.evaluations += grid_points;
            cur[static_cast<std::size_t>(k)] = grid_pair(opt, argmin(values));
        }
    }
    if (opt.sweeps > 1)
        res.multimodal = max_angle_change(first, cur) > deg2rad(opt.grid_step_deg) + 1e-12;

    double value = exact(cur);
    ++res.evaluations;
    if (opt.polish) {
        for (int round = 0; round < opt.polish_rounds; ++round) {
            bool moved = false;
            for (int k = 0; k < targets; ++k) {
                const AnglePair before = cur[static_cast<std::size_t>(k)];
                if (polish_target(exact, cur, value, static_cast<std::size_t>(k), opt, res.evaluations)) {
                    const AnglePair& after = cur[static_cast<std::size_t>(k)];
                    const double change =
                        std::max(std::fabs(after.dod - before.dod), std::fabs(after.doa - before.doa));
                    moved = moved || change > deg2rad(opt.refine_tol_deg);
                }
            }
            if (!moved)
                break;
        }
    }
    if (incumbent) {
        const double inc = exact(*incumbent);
        ++res.evaluations;
        if (inc <= value) {
            cur = *incumbent;
            value = inc;
        }
        cur = align_to(cur, *incumbent);
    }
    res.angles = std::move(cur);
    res.value = value;
    return res;
}

} // namespace

SearchResult minimize_theta(const AngleObjective& objective, int targets, const SearchOptions& options,
                            const Angles* incumbent)
{
    const int g = options.axis_points();
    const std::size_t n = static_cast<std::size_t>(g) * static_cast<std::size_t>(g);
    GridScan scan = [&](const Angles& others, std::vector<double>& values) {
        values.assign(n, kInf);
        Angles trial = others;
        trial.emplace_back();
        for (std::size_t p = 0; p < n; ++p) {
            trial.back() = grid_pair(options, p);
            const double v = objective(trial);
            values[p] = std::isnan(v) ? kInf : v;
        }
    };
    return run_search(scan, objective, targets, options, incumbent, static_cast<long>(n));
}

// ------------------------------------------------------------------------
// Steering grid and whitened data
// ------------------------------------------------------------------------

SteeringGrid::SteeringGrid(const ArrayGeometry& geom, const SearchOptions& options)
    : geom_(geom), options_(options)
{
    geom_.validate();
    options_.validate();
    axis_ = options_.axis_points();
    const int m = geom_.m();
    const int n = geom_.n();
    std::vector<CVec> tx(static_cast<std::size_t>(axis_)), rx(static_cast<std::size_t>(axis_));
    for (int i = 0; i < axis_; ++i) {
        tx[static_cast<std::size_t>(i)] = steering_vector(geom_.tx_positions, geom_.wavelength, options_.axis_angle(i));
        rx[static_cast<std::size_t>(i)] = steering_vector(geom_.rx_positions, geom_.wavelength, options_.axis_angle(i));
    }
    table_.resize(geom_.mn(), static_cast<Eigen::Index>(axis_) * axis_);
    for (int it = 0; it < axis_; ++it)
        for (int ir = 0; ir < axis_; ++ir) {
            auto col = table_.col(static_cast<Eigen::Index>(it) * axis_ + ir);
            for (int mi = 0; mi < m; ++mi)
                col.segment(mi * n, n) = tx[static_cast<std::size_t>(it)][mi] * rx[static_cast<std::size_t>(ir)];
        }
}

AnglePair SteeringGrid::angles(Eigen::Index p) const
{
    return grid_pair(options_, static_cast<std::size_t>(p));
}

WhitenedData::WhitenedData(const SteeringGrid& grid, const CMat& sigma, const CMat& z)
    : grid_(&grid), whitener_(sigma)
{
    if (z.rows() != grid.geometry().mn() || z.cols() < 1)
        throw std::invalid_argument("WhitenedData: observations must be MN x L with L >= 1");
    zw_ = whitener_.apply(z);
    gw_ = whitener_.apply(grid.table());
    gnorm_ = gw_.colwise().squaredNorm().transpose();
}

double WhitenedData::max_energy() const
{
    return zw_.colwise().squaredNorm().maxCoeff();
}

std::optional<RVec> WhitenedData::residual_energies(const Angles& angles) const
{
    const CMat a = whitener_.apply(steering_matrix(grid_->geometry(), angles));
    if (gram_condition(a) > grid_->options().max_condition)
        return std::nullopt;
    Eigen::HouseholderQR<CMat> qr(a);
    const CMat q = qr.householderQ() * CMat::Identity(a.rows(), a.cols());
    const CMat r = zw_ - q * (q.adjoint() * zw_);
    return RVec(r.colwise().squaredNorm().transpose());
}

double residual_cost_value(const WhitenedData& data, const ResidualCost& cost, const Angles& angles)
{
    const auto r2 = data.residual_energies(angles);
    if (!r2)
        return kInf;
    double s = 0.0;
    for (int l = 0; l < data.pulses(); ++l)
        s += cost.term(l, (*r2)[l]);
    return s;
}

SearchResult minimize_residual_cost(const WhitenedData& data, const ResidualCost& cost, int targets,
                                    const Angles* incumbent)
{
    const SearchOptions& opt = data.grid().options();
    const CMat& g = data.grid_table();
    const RVec& gg = data.grid_norms();
    const Eigen::Index n = g.cols();
    const int pulses = data.pulses();

    GridScan scan = [&](const Angles& others, std::vector<double>& values) {
        values.assign(static_cast<std::size_t>(n), kInf);
        CMat q;
        CMat y = data.z();
        if (!others.empty()) {
            const CMat a = data.whitener().apply(steering_matrix(data.grid().geometry(), others));
            Eigen::HouseholderQR<CMat> qr(a);
            q = qr.householderQ() * CMat::Identity(a.rows(), a.cols());
            y -= q * (q.adjoint() * y);
        }
        const RVec yy = y.colwise().squaredNorm().transpose();
        CMat c;
        RVec proj;
        for (Eigen::Index b = 0; b < n; b += kScanBlock) {
            const Eigen::Index len = std::min(kScanBlock, n - b);
            const auto block = g.middleCols(b, len);
            c.noalias() = block.adjoint() * y;
            if (q.cols() > 0)
                proj = (q.adjoint() * block).colwise().squaredNorm().transpose();
            for (Eigen::Index i = 0; i < len; ++i) {
                const Eigen::Index p = b + i;
                const double uu = q.cols() > 0 ? gg[p] - proj[i] : gg[p];
                if (!(uu * opt.max_condition > gg[p]))
                    continue;
                double s = 0.0;
                for (int l = 0; l < pulses; ++l) {
                    const double r2 = std::max(yy[l] - std::norm(c(i, l)) / uu, 0.0);
                    s += cost.grid_term(l, r2);
                }
                values[static_cast<std::size_t>(p)] = s;
            }
        }
    };
    AngleObjective exact = [&](const Angles& angles) { return residual_cost_value(data, cost, angles); };
    return run_search(scan, exact, targets, opt, incumbent, static_cast<long>(n));
}

} // namespace sirp

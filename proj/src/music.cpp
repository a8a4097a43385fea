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

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

namespace sirp {

double music_spectrum(const CMat& signal_subspace, const ArrayGeometry& geom, const AnglePair& angles)
{
    const CVec a = virtual_steering(geom, angles.dod, angles.doa);
    return a.squaredNorm() - (signal_subspace.adjoint() * a).squaredNorm();
}

namespace {

struct SpectrumParams
{
    const CMat* es;
    const ArrayGeometry* geom;
};

double spectrum_eval(const gsl_vector* x, void* p)
{
    const auto* sp = static_cast<const SpectrumParams*>(p);
    const AnglePair ang{gsl_vector_get(x, 0), gsl_vector_get(x, 1)};
    constexpr double kEdge = std::numbers::pi / 2.0 - 1e-6;
    if (!(std::fabs(ang.dod) < kEdge) || !(std::fabs(ang.doa) < kEdge))
        return 1e300;
    return music_spectrum(*sp->es, *sp->geom, ang);
}

AnglePair polish_minimum(const CMat& es, const ArrayGeometry& geom, const AnglePair& start,
                         const SearchOptions& opt, long& evaluations)
{
    SpectrumParams params{&es, &geom};
    gsl_multimin_function fn{&spectrum_eval, 2, &params};
    std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(2), &gsl_vector_free);
    std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> step(gsl_vector_alloc(2), &gsl_vector_free);
    gsl_vector_set(x.get(), 0, start.dod);
    gsl_vector_set(x.get(), 1, start.doa);
    gsl_vector_set_all(step.get(), 0.5 * deg2rad(opt.grid_step_deg));
    std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> nm(
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2), &gsl_multimin_fminimizer_free);
    gsl_multimin_fminimizer_set(nm.get(), &fn, x.get(), step.get());
    const double size_tol = 0.25 * deg2rad(opt.refine_tol_deg);
    for (int it = 0; it < opt.polish_max_evals; ++it) {
        ++evaluations;
        if (gsl_multimin_fminimizer_iterate(nm.get()) != GSL_SUCCESS)
            break;
        if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(nm.get()), size_tol) == GSL_SUCCESS)
            break;
    }
    const gsl_vector* best = gsl_multimin_fminimizer_x(nm.get());
    const AnglePair cand{gsl_vector_get(best, 0), gsl_vector_get(best, 1)};
    // Stay in the basin of the grid minimum.
    const double reach = deg2rad(opt.grid_step_deg);
    if (std::fabs(cand.dod - start.dod) > reach || std::fabs(cand.doa - start.doa) > reach)
        return start;
    return music_spectrum(es, geom, cand) < music_spectrum(es, geom, start) ? cand : start;
}

} // namespace

EstimateResult music_scm(const ObservationBlock& obs, const ArrayGeometry& geom, int targets,
                         const EstimatorConfig& config)
{
    config.validate();
    const int mn = geom.mn();
    if (obs.z.rows() != mn || obs.pulses() < targets || targets < 1 || targets >= mn)
        throw std::invalid_argument("music_scm: need MN x L observations with K <= L and K < MN");

    EstimateResult res;
    res.estimator = "MUSIC-SCM";
    const CMat r = obs.z * obs.z.adjoint() / static_cast<double>(obs.pulses());
    Eigen::SelfAdjointEigenSolver<CMat> eig(r);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("music_scm: eigendecomposition failed");
    const RVec& lambda = eig.eigenvalues();  // ascending
    const double gap = lambda[mn - targets] - lambda[mn - targets - 1];
    if (!(gap > 1e-10 * std::max(lambda[mn - 1], std::numeric_limits<double>::min())))
        res.flags |= kFlagDegenerateSpectrum;
    const CMat es = eig.eigenvectors().rightCols(targets);

    const SearchOptions opt = config.search_options();
    const SteeringGrid grid(geom, opt);
    const int g = grid.axis_points();
    const CMat& table = grid.table();
    std::vector<double> spec(static_cast<std::size_t>(table.cols()));
    constexpr Eigen::Index kBlock = 2048;
    for (Eigen::Index b = 0; b < table.cols(); b += kBlock) {
        const Eigen::Index len = std::min(kBlock, table.cols() - b);
        const auto block = table.middleCols(b, len);
        const RVec p = block.colwise().squaredNorm().transpose() -
                       (es.adjoint() * block).colwise().squaredNorm().transpose();
        for (Eigen::Index i = 0; i < len; ++i)
            spec[static_cast<std::size_t>(b + i)] = p[i];
    }
    res.evaluations = table.cols();

    // Local minima over the 8-neighbourhood; ties resolved by index order.
    const auto at = [&](int i, int j) { return spec[static_cast<std::size_t>(i) * g + j]; };
    std::vector<int> minima;
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) {
            const double c = at(i, j);
            bool is_min = true;
            for (int di = -1; di <= 1 && is_min; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    if ((di == 0 && dj == 0) || i + di < 0 || i + di >= g || j + dj < 0 || j + dj >= g)
                        continue;
                    const double n = at(i + di, j + dj);
                    const int idx_n = (i + di) * g + j + dj;
                    if (n < c || (n == c && idx_n < i * g + j)) {
                        is_min = false;
                        break;
                    }
                }
            if (is_min)
                minima.push_back(i * g + j);
        }
    // Fall back to every grid point so that K picks always exist.
    std::vector<int> order(spec.size());
    std::iota(order.begin(), order.end(), 0);
    const auto by_value = [&](int x, int y) {
        return spec[static_cast<std::size_t>(x)] < spec[static_cast<std::size_t>(y)] ||
               (spec[static_cast<std::size_t>(x)] == spec[static_cast<std::size_t>(y)] && x < y);
    };
    std::sort(minima.begin(), minima.end(), by_value);
    std::sort(order.begin(), order.end(), by_value);
    minima.insert(minima.end(), order.begin(), order.end());

    std::vector<int> picks;
    for (int p : minima) {
        if (static_cast<int>(picks.size()) == targets)
            break;
        bool separated = true;
        for (int q : picks)
            if (std::max(std::abs(p / g - q / g), std::abs(p % g - q % g)) < 2)
                separated = false;
        if (separated)
            picks.push_back(p);
    }

    Angles theta;
    for (int p : picks) {
        AnglePair ang = grid.angles(p);
        if (config.music_polish)
            ang = polish_minimum(es, geom, ang, opt, res.evaluations);
        theta.push_back(ang);
    }
    res.iterations.push_back({theta, CMat::Identity(mn, mn), std::numeric_limits<double>::quiet_NaN(),
                              std::numeric_limits<double>::quiet_NaN(), CMat(), std::numeric_limits<double>::quiet_NaN()});
    res.converged = true;
    res.iterations_used = 0;
    return res;
}

} // namespace sirp

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

#include "sirp/linalg.hpp"
#include "sirp/model.hpp"
#include "sirp/types.hpp"

#include <functional>
#include <optional>

namespace sirp {

/// Controls of the alternating grid search over (DOD, DOA) pairs.
struct SearchOptions
{
    double grid_step_deg = 1.0;
    double grid_min_deg = -89.0;
    double grid_max_deg = 89.0;
    double refine_tol_deg = 0.01;
    int sweeps = 2;
    bool polish = true;
    int polish_rounds = 3;
    int polish_max_evals = 400;  // per target and round
    double max_condition = 1e12;

    void validate() const;

    int axis_points() const;
    double axis_angle(int i) const;  // radians
};

struct SearchResult
{
    Angles angles;
    double value = 0.0;
    long evaluations = 0;
    bool multimodal = false;  // first and last sweep disagree by more than one grid step
};

/// Objective over 1..K angle pairs. During the first sweep it is called with
/// the targets found so far plus the candidate, so it must accept fewer
/// than K pairs.
using AngleObjective = std::function<double(const Angles&)>;

/// Alternating per-target exhaustive grid (sweep 1 adds targets one at a
/// time, later sweeps rescan each target with the others fixed), followed
/// by a per-target Nelder-Mead polish. When `incumbent` is given it is kept
/// if nothing better is found, and the result is reordered to match it.
SearchResult minimize_theta(const AngleObjective& objective, int targets,
                            const SearchOptions& options, const Angles* incumbent = nullptr);

/// Virtual steering vectors on the search grid, column p = i_dod * G + i_doa.
class SteeringGrid
{
public:
    SteeringGrid(const ArrayGeometry& geom, const SearchOptions& options);

    const ArrayGeometry& geometry() const { return geom_; }
    const SearchOptions& options() const { return options_; }
    int axis_points() const { return axis_; }
    Eigen::Index points() const { return table_.cols(); }
    const CMat& table() const { return table_; }
    AnglePair angles(Eigen::Index p) const;

private:
    ArrayGeometry geom_;
    SearchOptions options_;
    int axis_;
    CMat table_;
};

/// Per-pulse cost c_l(r^2) of a whitened residual energy. The search
/// minimizes sum_l c_l(||P_perp z~(l)||^2).
class ResidualCost
{
public:
    virtual ~ResidualCost() = default;
    virtual double term(int pulse, double r2) const = 0;
    /// Used on the coarse grid only; may approximate term().
    virtual double grid_term(int pulse, double r2) const { return term(pulse, r2); }
};

/// Observations and grid whitened by one speckle covariance.
class WhitenedData
{
public:
    WhitenedData(const SteeringGrid& grid, const CMat& sigma, const CMat& z);

    const SteeringGrid& grid() const { return *grid_; }
    const Whitener& whitener() const { return whitener_; }
    const CMat& z() const { return zw_; }
    const CMat& grid_table() const { return gw_; }
    const RVec& grid_norms() const { return gnorm_; }
    int pulses() const { return static_cast<int>(zw_.cols()); }

    /// Largest ||z~(l)||^2; no residual energy can exceed it.
    double max_energy() const;

    /// ||P_perp z~(l)||^2 for every pulse; empty when cond(A~^H A~) exceeds
    /// the search option's max_condition.
    std::optional<RVec> residual_energies(const Angles& angles) const;

private:
    const SteeringGrid* grid_;
    Whitener whitener_;
    CMat zw_;
    CMat gw_;
    RVec gnorm_;
};

/// minimize_theta specialised to a residual cost: grid scans run as one
/// matrix product per block of grid points instead of per-point projections.
SearchResult minimize_residual_cost(const WhitenedData& data, const ResidualCost& cost, int targets,
                                    const Angles* incumbent = nullptr);

/// Sum of cost terms at exact residual energies; +inf when ill-conditioned.
double residual_cost_value(const WhitenedData& data, const ResidualCost& cost, const Angles& angles);

/// Reorders `angles` so that the total squared distance to `reference` is
/// smallest. Both lists must have the same length.
Angles align_to(const Angles& angles, const Angles& reference);

/// Largest per-angle absolute difference, radians. Lists must match in length.
double max_angle_change(const Angles& a, const Angles& b);

} // namespace sirp

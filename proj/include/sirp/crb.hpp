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
#include "sirp/types.hpp"

#include <span>
#include <stdexcept>
#include <utility>

namespace sirp {

/// Bound on the 2K direction parameters, ordered [DOD_1..DOD_K, DOA_1..DOA_K].
struct CrbResult
{
    RMat matrix;           // radians^2
    double kappa = 0.0;
    RVec per_angle_bound;  // diagonal of `matrix`
};

class SingularFimError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Texture-dependent information factor. Closed form for the t family;
/// half-line quadrature of the Bessel-ratio integral for the K family,
/// which converges only for a > 1.
double kappa(const TextureFamily& texture, int mn, const specfun::QuadratureSpec& spec = {});

/// Columns are d a(dod, doa) / d dod and d a / d doa for each target.
std::pair<CMat, CMat> steering_derivatives(const ArrayGeometry& geom, const Angles& angles);
std::pair<CMat, CMat> steering_derivatives(const ArrayGeometry& geom, const Scene& scene);

/// MN / (2 kappa L) (Re{(D~^H P_perp D~) o P^T})^{-1}, with D~ and A~
/// whitened by the Hermitian root of Sigma and P = (1/L) J_2 (x) sum_l v v^H.
CrbResult crb_theta(const ArrayGeometry& geom, const Scene& scene, const ClutterModel& clutter);

/// The same bound from (2 kappa / MN) Re{sum_l H(l)^H D~^H P_perp D~ H(l)},
/// H(l) = I_2 (x) diag(v(l)). Slower; kept as an independent route.
RMat crb_theta_pulse_sum(const ArrayGeometry& geom, const Scene& scene, const ClutterModel& clutter);

/// The dB convention shared by bounds and Monte Carlo errors: per-angle
/// values in degrees^2 summed over all 2K angles, then 10 log10.
double aggregate_db(std::span<const double> per_angle_deg2);

/// aggregate_db of the bound's diagonal.
double crb_db(const CrbResult& crb);

} // namespace sirp

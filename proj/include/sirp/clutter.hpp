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

#include "sirp/specfun.hpp"
#include "sirp/types.hpp"

#include <random>
#include <string_view>
#include <vector>

namespace sirp {

enum class TextureKind
{
    KDistributed,  // tau ~ Gamma(a, b)
    TDistributed,  // tau ~ Inv-Gamma(a, b)
};

std::string_view to_string(TextureKind kind);
TextureKind texture_kind_from_string(std::string_view name);

struct TextureFamily
{
    TextureKind kind = TextureKind::KDistributed;
    double shape = 1.0;  // a
    double scale = 1.0;  // b

    void validate() const;
};

/// Compound-Gaussian clutter n = sqrt(tau) x, x ~ CN(0, Sigma).
struct ClutterModel
{
    TextureFamily texture;
    CMat speckle_cov;

    void validate() const;
};

using Rng = std::mt19937_64;

/// E{tau}: ab for the K family, b/(a-1) for the t family (a > 1 required).
double texture_mean(const TextureFamily& texture);

std::vector<double> sample_texture(const TextureFamily& texture, int count, Rng& rng);

/// `count` columns of F w with F F^H = Sigma (lower Cholesky factor) and w
/// standard circular complex Gaussian.
CMat sample_speckle(const CMat& sigma, int count, Rng& rng);

/// Clutter block (MN x count). Texture draws come first from `rng`, then
/// the speckle.
CMat sample_clutter(const ClutterModel& model, int count, Rng& rng);

/// Clutter with caller-supplied textures (one per column).
CMat sample_clutter(const CMat& sigma, const std::vector<double>& textures, Rng& rng);

/// Floor on ||rho|| applied before any K-family Bessel evaluation.
inline constexpr double kRhoFloor = 1e-8;

/// ln g_MN(||rho||^2; a, b): the per-pulse marginal density kernel with
/// the texture integrated out.
double log_g(double rho_sq, const TextureFamily& texture, int mn);

/// h_MN = -(d g / d rho^2) / g, the per-pulse covariance weight.
double h_weight(double rho_sq, const TextureFamily& texture, int mn);

/// d ln g / d a. The K family integrates the texture posterior numerically.
double score_a(double rho_sq, const TextureFamily& texture, int mn,
               const specfun::QuadratureSpec& spec = {});

/// d ln g / d b. The K family uses the closed-form posterior mean of tau,
/// sqrt(b) ||rho|| K_{nu+1}(u) / K_nu(u).
double score_b(double rho_sq, const TextureFamily& texture, int mn);

/// d ln g / d b for the K family by direct quadrature of the b-derivative
/// integrand. Slower than score_b; kept as an independent route.
double score_b_quadrature(double rho_sq, const TextureFamily& texture, int mn,
                          const specfun::QuadratureSpec& spec = {});

} // namespace sirp

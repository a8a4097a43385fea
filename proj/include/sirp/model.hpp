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

#include "sirp/types.hpp"

#include <span>
#include <vector>

namespace sirp {

struct ClutterModel;

/// Linear transmit and receive arrays sharing one carrier wavelength.
/// Positions are offsets from the reference element, in meters.
struct ArrayGeometry
{
    std::vector<double> tx_positions;
    std::vector<double> rx_positions;
    double wavelength = 1.0;

    int m() const { return static_cast<int>(tx_positions.size()); }
    int n() const { return static_cast<int>(rx_positions.size()); }
    int mn() const { return m() * n(); }

    void validate() const;

    /// M-element transmit and N-element receive ULAs with the given spacing
    /// (in wavelengths).
    static ArrayGeometry uniform(int m, int n, double spacing_wavelengths = 0.5,
                                 double wavelength = 1.0);
};

/// Targets plus pulse bookkeeping. All per-target lists have length K.
struct Scene
{
    std::vector<double> dod;      // radians
    std::vector<double> doa;      // radians
    std::vector<cd> rcs;
    std::vector<double> doppler;  // cycles per pulse
    int pulses = 1;               // L
    int snapshots_per_pulse = 1;  // T

    int targets() const { return static_cast<int>(dod.size()); }
    Angles angles() const;
    void validate() const;
};

/// The L matched-filter outputs, one MN-dimensional column per pulse.
struct ObservationBlock
{
    CMat z;

    int pulses() const { return static_cast<int>(z.cols()); }
    int dim() const { return static_cast<int>(z.rows()); }
};

/// exp(j 2 pi sin(theta) d_i / lambda) for each offset d_i.
CVec steering_vector(std::span<const double> positions, double wavelength, double theta);

/// vec{a_R(doa) a_T(dod)^T}: receive index runs fastest, entry m*N + n is
/// a_T[m] * a_R[n].
CVec virtual_steering(const ArrayGeometry& geom, double dod, double doa);

/// MN x K matrix whose column k is the virtual steering vector of target k.
CMat steering_matrix(const ArrayGeometry& geom, const Angles& angles);
CMat steering_matrix(const ArrayGeometry& geom, const Scene& scene);

/// v(l) with entries sqrt(T) alpha_k exp(j 2 pi f_k l).
CVec signal_vector(const Scene& scene, int l);

/// K x L matrix of all v(l).
CMat signal_matrix(const Scene& scene);

/// z(l) = A v(l) + n(l). `clutter` is MN x L.
ObservationBlock synthesize(const ArrayGeometry& geom, const Scene& scene, const CMat& clutter);

/// Mean signal power (1/L) sum_l ||A v(l)||^2.
double mean_signal_power(const ArrayGeometry& geom, const Scene& scene);

/// Signal-to-clutter ratio in dB: mean signal power over E{tau} tr(Sigma).
/// Throws std::domain_error when the texture mean is undefined.
double scr_of(const ArrayGeometry& geom, const Scene& scene, const ClutterModel& clutter);

/// Speckle power sigma^2 = tr(Sigma)/MN that makes scr_of hit `target_scr_db`
/// when the covariance of `clutter_template` is rescaled to it.
double sigma2_for_scr(const ArrayGeometry& geom, const Scene& scene,
                      const ClutterModel& clutter_template, double target_scr_db);

/// [Sigma]_{m,n} = sigma2 * base^|m-n| * exp(j phase_step (m-n)).
CMat speckle_template(int mn, double sigma2, double base = 0.9,
                      double phase_step = std::numbers::pi / 2.0);

} // namespace sirp

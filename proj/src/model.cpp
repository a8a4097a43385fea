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

#include "sirp/model.hpp"

#include "sirp/clutter.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sirp {

void ArrayGeometry::validate() const
{
    if (tx_positions.empty() || rx_positions.empty())
        throw std::invalid_argument("ArrayGeometry: need at least one transmit and one receive sensor");
    if (!(wavelength > 0.0) || !std::isfinite(wavelength))
        throw std::domain_error("ArrayGeometry: wavelength must be finite and > 0");
    for (double d : tx_positions)
        if (!std::isfinite(d))
            throw std::invalid_argument("ArrayGeometry: non-finite transmit position");
    for (double d : rx_positions)
        if (!std::isfinite(d))
            throw std::invalid_argument("ArrayGeometry: non-finite receive position");
}

ArrayGeometry ArrayGeometry::uniform(int m, int n, double spacing_wavelengths, double wavelength)
{
    ArrayGeometry g;
    g.wavelength = wavelength;
    for (int i = 0; i < m; ++i)
        g.tx_positions.push_back(i * spacing_wavelengths * wavelength);
    for (int i = 0; i < n; ++i)
        g.rx_positions.push_back(i * spacing_wavelengths * wavelength);
    g.validate();
    return g;
}

Angles Scene::angles() const
{
    Angles out(dod.size());
    for (std::size_t k = 0; k < dod.size(); ++k)
        out[k] = {dod[k], doa[k]};
    return out;
}

void Scene::validate() const
{
    const auto k = dod.size();
    if (k == 0)
        throw std::invalid_argument("Scene: need at least one target");
    if (doa.size() != k || rcs.size() != k || doppler.size() != k)
        throw std::invalid_argument("Scene: dod, doa, rcs and doppler must have equal length");
    if (pulses < 1 || snapshots_per_pulse < 1)
        throw std::invalid_argument("Scene: pulses and snapshots_per_pulse must be >= 1");
    const double half_pi = std::numbers::pi / 2.0;
    for (std::size_t i = 0; i < k; ++i) {
        if (!(std::fabs(dod[i]) < half_pi) || !(std::fabs(doa[i]) < half_pi))
            throw std::domain_error("Scene: angles must lie in (-pi/2, pi/2)");
    }
}

CVec steering_vector(std::span<const double> positions, double wavelength, double theta)
{
    if (!(wavelength > 0.0))
        throw std::domain_error("steering_vector: wavelength must be > 0");
    const double k = 2.0 * std::numbers::pi * std::sin(theta) / wavelength;
    CVec a(static_cast<Eigen::Index>(positions.size()));
    for (std::size_t i = 0; i < positions.size(); ++i)
        a[static_cast<Eigen::Index>(i)] = std::polar(1.0, k * positions[i]);
    return a;
}

CVec virtual_steering(const ArrayGeometry& geom, double dod, double doa)
{
    const CVec at = steering_vector(geom.tx_positions, geom.wavelength, dod);
    const CVec ar = steering_vector(geom.rx_positions, geom.wavelength, doa);
    const int n = geom.n();
    CVec a(geom.mn());
    for (int m = 0; m < geom.m(); ++m)
        a.segment(m * n, n) = at[m] * ar;
    return a;
}

CMat steering_matrix(const ArrayGeometry& geom, const Angles& angles)
{
    CMat a(geom.mn(), static_cast<Eigen::Index>(angles.size()));
    for (std::size_t k = 0; k < angles.size(); ++k)
        a.col(static_cast<Eigen::Index>(k)) = virtual_steering(geom, angles[k].dod, angles[k].doa);
    return a;
}

CMat steering_matrix(const ArrayGeometry& geom, const Scene& scene)
{
    return steering_matrix(geom, scene.angles());
}

CVec signal_vector(const Scene& scene, int l)
{
    if (l < 0 || l >= scene.pulses)
        throw std::out_of_range("signal_vector: pulse index " + std::to_string(l) +
                                " outside [0, " + std::to_string(scene.pulses) + ")");
    const double amp = std::sqrt(static_cast<double>(scene.snapshots_per_pulse));
    CVec v(scene.targets());
    for (int k = 0; k < scene.targets(); ++k)
        v[k] = amp * scene.rcs[k] * std::polar(1.0, 2.0 * std::numbers::pi * scene.doppler[k] * l);
    return v;
}

CMat signal_matrix(const Scene& scene)
{
    CMat v(scene.targets(), scene.pulses);
    for (int l = 0; l < scene.pulses; ++l)
        v.col(l) = signal_vector(scene, l);
    return v;
}

ObservationBlock synthesize(const ArrayGeometry& geom, const Scene& scene, const CMat& clutter)
{
    if (clutter.rows() != geom.mn() || clutter.cols() != scene.pulses)
        throw std::invalid_argument("synthesize: clutter must be MN x L (" + std::to_string(geom.mn()) +
                                    " x " + std::to_string(scene.pulses) + "), got " +
                                    std::to_string(clutter.rows()) + " x " +
                                    std::to_string(clutter.cols()));
    return {steering_matrix(geom, scene) * signal_matrix(scene) + clutter};
}

double mean_signal_power(const ArrayGeometry& geom, const Scene& scene)
{
    const CMat s = steering_matrix(geom, scene) * signal_matrix(scene);
    return s.squaredNorm() / scene.pulses;
}

double scr_of(const ArrayGeometry& geom, const Scene& scene, const ClutterModel& clutter)
{
    const double clutter_power = texture_mean(clutter.texture) * clutter.speckle_cov.trace().real();
    return 10.0 * std::log10(mean_signal_power(geom, scene) / clutter_power);
}

double sigma2_for_scr(const ArrayGeometry& geom, const Scene& scene,
                      const ClutterModel& clutter_template, double target_scr_db)
{
    const double current_sigma2 = clutter_template.speckle_cov.trace().real() / geom.mn();
    const double current_db = scr_of(geom, scene, clutter_template);
    return current_sigma2 * std::pow(10.0, (current_db - target_scr_db) / 10.0);
}

CMat speckle_template(int mn, double sigma2, double base, double phase_step)
{
    CMat s(mn, mn);
    for (int r = 0; r < mn; ++r)
        for (int c = 0; c < mn; ++c) {
            const int d = r - c;
            s(r, c) = sigma2 * std::pow(base, std::abs(d)) * std::polar(1.0, phase_step * d);
        }
    return s;
}

} // namespace sirp

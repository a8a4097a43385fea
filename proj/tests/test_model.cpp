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


#include <doctest.h>

#include "sirp/clutter.hpp"
#include "sirp/model.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

using namespace sirp;

// Covered:
// - steering and virtual steering values, unit modulus, Kronecker ordering
// - signal vectors, synthesis identities, SCR scaling and its inversion

namespace {

const cd j{0.0, 1.0};

Scene two_target_scene()
{
    Scene s;
    s.dod = {deg2rad(18.0), deg2rad(45.0)};
    s.doa = {deg2rad(20.0), deg2rad(40.0)};
    s.rcs = {cd(2.0, 3.0), cd(1.0, -0.5)};
    s.doppler = {0.3, 0.8};
    s.pulses = 15;
    s.snapshots_per_pulse = 5;
    return s;
}

ClutterModel k_clutter(double sigma2)
{
    return {{TextureKind::KDistributed, 2.0, 10.0}, speckle_template(12, sigma2)};
}

} // namespace

TEST_CASE("steering_vector: hand-evaluated phases and unit modulus")
{
    const std::vector<double> pos{0.0, 0.5, 1.0};
    const CVec a0 = steering_vector(pos, 1.0, 0.0);
    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(a0(i) - cd(1.0)) < 1e-15);

    // Phases 0, pi/2, pi at 30 degrees.
    const CVec a30 = steering_vector(pos, 1.0, deg2rad(30.0));
    CHECK(std::abs(a30(0) - cd(1.0)) < 1e-12);
    CHECK(std::abs(a30(1) - j) < 1e-12);
    CHECK(std::abs(a30(2) - cd(-1.0)) < 1e-12);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int t = 0; t < 50; ++t) {
        const std::vector<double> p{u(rng), u(rng), u(rng), u(rng)};
        const CVec a = steering_vector(p, 0.7, u(rng));
        for (int i = 0; i < a.size(); ++i)
            CHECK(std::abs(std::abs(a(i)) - 1.0) < 1e-12);
    }
    CHECK_THROWS_AS(steering_vector(pos, 0.0, 0.1), std::domain_error);
    CHECK_THROWS_AS(steering_vector(pos, -1.0, 0.1), std::domain_error);
}

TEST_CASE("virtual_steering: ordering and special cases")
{
    // M = N = 2, dod 30 deg, doa 0: a_T = [1, j], a_R = [1, 1] -> [1, 1, j, j].
    const auto g = ArrayGeometry::uniform(2, 2);
    const CVec v = virtual_steering(g, deg2rad(30.0), 0.0);
    const CVec want = (CVec(4) << 1.0, 1.0, j, j).finished();
    CHECK((v - want).norm() < 1e-12);

    CHECK((virtual_steering(ArrayGeometry::uniform(3, 4), 0.0, 0.0) - CVec::Ones(12)).norm() < 1e-15);

    ArrayGeometry single = ArrayGeometry::uniform(1, 5);
    const CVec aR = steering_vector(single.rx_positions, 1.0, 0.3);
    CHECK((virtual_steering(single, -0.7, 0.3) - aR).norm() < 1e-15);
}

TEST_CASE("virtual_steering: equals the explicit Kronecker product, norm^2 = MN")
{
    ArrayGeometry g;
    g.tx_positions = {0.0, 0.37, 1.1};
    g.rx_positions = {0.0, 0.21, 0.55, 0.9};
    g.wavelength = 0.8;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int t = 0; t < 30; ++t) {
        const double dod = u(rng), doa = u(rng);
        const CVec aT = steering_vector(g.tx_positions, g.wavelength, dod);
        const CVec aR = steering_vector(g.rx_positions, g.wavelength, doa);
        CVec kron(12);
        for (int m = 0; m < 3; ++m)
            kron.segment(4 * m, 4) = aT(m) * aR;
        const CVec v = virtual_steering(g, dod, doa);
        CHECK((v - kron).cwiseAbs().maxCoeff() < 1e-14);
        CHECK(std::fabs(v.squaredNorm() - 12.0) < 1e-12);
    }
}

TEST_CASE("steering_matrix: columns and first entries of the two-target scene")
{
    const auto g = ArrayGeometry::uniform(3, 4);
    const Scene s = two_target_scene();
    const CMat A = steering_matrix(g, s);
    REQUIRE(A.rows() == 12);
    REQUIRE(A.cols() == 2);
    // Entry m*N + n has phase pi (m sin dod + n sin doa).
    for (int k = 0; k < 2; ++k)
        for (int m = 0; m < 3; ++m)
            for (int n = 0; n < 4; ++n) {
                const double ph = std::numbers::pi * (m * std::sin(s.dod[k]) + n * std::sin(s.doa[k]));
                CHECK(std::abs(A(4 * m + n, k) - std::polar(1.0, ph)) < 1e-12);
            }
    CHECK(std::abs(A(1, 0) - std::polar(1.0, std::numbers::pi * std::sin(deg2rad(20.0)))) < 1e-12);

    Angles same{{0.2, -0.3}, {0.2, -0.3}};
    const CMat D = steering_matrix(g, same);
    Eigen::JacobiSVD<CMat> svd(D);
    CHECK(svd.singularValues()(1) < 1e-12 * svd.singularValues()(0));
}

TEST_CASE("signal_vector: amplitudes and Doppler phases")
{
    Scene s = two_target_scene();
    const CVec v0 = signal_vector(s, 0);
    CHECK(std::abs(v0(0) - std::sqrt(5.0) * cd(2.0, 3.0)) < 1e-14);
    CHECK(std::abs(v0(1) - std::sqrt(5.0) * cd(1.0, -0.5)) < 1e-14);

    s.doppler = {0.5, 0.25};
    const CVec v1 = signal_vector(s, 1);
    CHECK(std::abs(v1(0) + std::sqrt(5.0) * cd(2.0, 3.0)) < 1e-13);
    CHECK(std::abs(v1(1) - j * std::sqrt(5.0) * cd(1.0, -0.5)) < 1e-13);

    CHECK_THROWS_AS(signal_vector(s, -1), std::out_of_range);
    CHECK_THROWS_AS(signal_vector(s, s.pulses), std::out_of_range);

    const CMat V = signal_matrix(s);
    CHECK(V.cols() == s.pulses);
    CHECK((V.col(7) - signal_vector(s, 7)).norm() < 1e-15);
}

TEST_CASE("synthesize: superposition identities")
{
    const auto g = ArrayGeometry::uniform(3, 4);
    Scene s = two_target_scene();
    Rng rng(5);
    const CMat n = sample_clutter(k_clutter(0.1), s.pulses, rng);

    const CMat clean = synthesize(g, s, CMat::Zero(12, s.pulses)).z;
    CHECK((clean - steering_matrix(g, s) * signal_matrix(s)).norm() < 1e-12);

    Scene silent = s;
    silent.rcs = {0.0, 0.0};
    CHECK((synthesize(g, silent, n).z - n).norm() == 0.0);

    Scene doubled = s;
    for (auto& a : doubled.rcs)
        a *= 2.0;
    CHECK((synthesize(g, doubled, n).z - (2.0 * clean + n)).norm() < 1e-11);

    CHECK_THROWS_AS(synthesize(g, s, CMat::Zero(11, s.pulses)), std::invalid_argument);
    CHECK_THROWS_AS(synthesize(g, s, CMat::Zero(12, s.pulses - 1)), std::invalid_argument);
}

TEST_CASE("scr_of: scaling rules and texture mean")
{
    const auto g = ArrayGeometry::uniform(3, 4);
    Scene s = two_target_scene();
    const ClutterModel c = k_clutter(1.0);

    // Independent evaluation of the ratio with E{tau} = ab = 20.
    double power = 0.0;
    for (int l = 0; l < s.pulses; ++l) {
        CVec x = CVec::Zero(12);
        for (int k = 0; k < 2; ++k)
            x += std::sqrt(5.0) * s.rcs[k] * std::polar(1.0, 2.0 * std::numbers::pi * s.doppler[k] * l) *
                 virtual_steering(g, s.dod[k], s.doa[k]);
        power += x.squaredNorm();
    }
    power /= s.pulses;
    CHECK(mean_signal_power(g, s) == doctest::Approx(power).epsilon(1e-12));
    CHECK(scr_of(g, s, c) == doctest::Approx(10.0 * std::log10(power / (20.0 * 12.0))).epsilon(1e-12));

    Scene loud = s;
    for (auto& a : loud.rcs)
        a *= 2.0;
    CHECK(scr_of(g, loud, c) - scr_of(g, s, c) == doctest::Approx(20.0 * std::log10(2.0)).epsilon(1e-10));

    ClutterModel wide = c;
    wide.speckle_cov *= 2.0;
    CHECK(scr_of(g, s, c) - scr_of(g, s, wide) == doctest::Approx(10.0 * std::log10(2.0)).epsilon(1e-10));

    Scene rotated = s;
    for (auto& a : rotated.rcs)
        a *= std::polar(1.0, 1.234);
    CHECK(scr_of(g, rotated, c) == doctest::Approx(scr_of(g, s, c)).epsilon(1e-12));

    ClutterModel heavy{{TextureKind::TDistributed, 1.0, 2.0}, c.speckle_cov};
    CHECK_THROWS_AS(scr_of(g, s, heavy), std::domain_error);
    heavy.texture.shape = 1.1;  // E{tau} = 2 / 0.1 = 20
    CHECK(scr_of(g, s, heavy) == doctest::Approx(scr_of(g, s, c)).epsilon(1e-10));
}

TEST_CASE("sigma2_for_scr: inversion and regression constant")
{
    const auto g = ArrayGeometry::uniform(3, 4);
    const Scene s = two_target_scene();
    const ClutterModel tmpl = k_clutter(0.37);

    const double current = scr_of(g, s, tmpl);
    CHECK(sigma2_for_scr(g, s, tmpl, current) == doctest::Approx(0.37).epsilon(1e-9));
    CHECK(sigma2_for_scr(g, s, tmpl, current - 10.0) == doctest::Approx(3.7).epsilon(1e-9));

    for (double target : {-5.0, 0.0, 12.5, 30.0}) {
        const double s2 = sigma2_for_scr(g, s, tmpl, target);
        CHECK(std::fabs(scr_of(g, s, k_clutter(s2)) - target) < 1e-9);
    }

    // Frozen at first run; matches P / (E{tau} MN 10^1.5) with P the mean
    // signal power of the two-target scene.
    CHECK(mean_signal_power(g, s) == doctest::Approx(858.12689986159592).epsilon(1e-12));
    CHECK(sigma2_for_scr(g, s, tmpl, 15.0) == doctest::Approx(0.11306814687591134).epsilon(1e-12));
}

TEST_CASE("speckle_template: structure")
{
    const CMat S = speckle_template(12, 2.0);
    CHECK(std::fabs(S.trace().real() - 24.0) < 1e-12);
    CHECK((S - S.adjoint()).norm() < 1e-14);
    CHECK(std::abs(S(0, 1) - 2.0 * 0.9 * std::polar(1.0, -std::numbers::pi / 2.0)) < 1e-14);
    CHECK(std::abs(S(3, 1) - 2.0 * 0.81 * std::polar(1.0, std::numbers::pi)) < 1e-14);
    Eigen::SelfAdjointEigenSolver<CMat> es(S);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("validation: geometry and scene")
{
    ArrayGeometry g;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g = ArrayGeometry::uniform(2, 2);
    g.wavelength = 0.0;
    CHECK_THROWS_AS(g.validate(), std::domain_error);

    Scene s = two_target_scene();
    CHECK_NOTHROW(s.validate());
    s.doa.pop_back();
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = two_target_scene();
    s.dod[0] = std::numbers::pi / 2.0;
    CHECK_THROWS_AS(s.validate(), std::domain_error);
    s = two_target_scene();
    s.pulses = 0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

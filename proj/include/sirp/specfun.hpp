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

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

namespace sirp::specfun {

/// Tolerances for the half-line quadrature.
struct QuadratureSpec
{
    double rel_tol = 1e-8;
    double abs_tol = 1e-300;
    int max_subdivisions = 200;

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

/// Raised when the adaptive quadrature runs out of subdivisions.
class QuadratureError : public std::runtime_error
{
public:
    QuadratureError(const std::string& what, double best_estimate, double error_bound)
        : std::runtime_error(what), best_(best_estimate), err_(error_bound) {}

    double best_estimate() const noexcept { return best_; }
    double error_bound() const noexcept { return err_; }

private:
    double best_;
    double err_;
};

// ln Gamma(x) for x > 0. Throws std::domain_error otherwise.
double log_gamma(double x);

// Psi(x) = d ln Gamma(x) / dx for x > 0.
double digamma(double x);

/// ln K_nu(x), the modified Bessel function of the second kind of real order.
///
/// Uses K_{-nu} = K_nu, so the result is bitwise symmetric in nu. Small
/// arguments go through Temme's series, x >= 2 through Steed's continued
/// fraction, and the order is raised by forward recurrence with explicit
/// rescaling, so the log-domain value stays finite where K itself would
/// overflow or underflow (x up to 1e4, |nu| up to several hundred).
double log_bessel_k(double nu, double x);

/// ln K_|nu|(x) and ln K_{|nu|+1}(x) from one recurrence pass.
std::pair<double, double> log_bessel_k_pair(double nu, double x);

/// Fixed-order evaluator. Caches the order-dependent Temme coefficients;
/// use it when the same order is evaluated at many arguments.
class LogBesselK
{
public:
    explicit LogBesselK(double nu);

    double order() const noexcept { return nu_; }
    double operator()(double x) const;

    /// ln K_|nu|(x) and ln K_{|nu|+1}(x).
    std::pair<double, double> with_next(double x) const;

private:
    double nu_;   // |nu|
    int steps_;   // number of upward recurrence steps
    double mu_;   // nu_ - steps_, in [-1/2, 1/2]
    double gam1_;
    double gam2_;
    double gampl_;
    double gammi_;
    double fact_;
};

/// Integral of f over (0, inf).
///
/// The half-line is mapped onto (-1, 1) through tau = scale * exp(t / (1 - t^2))
/// and integrated with globally adaptive 7/15-point Gauss-Kronrod panels.
/// `scale` should sit near the bulk of the integrand (e.g. the mode of a
/// texture posterior); f is never evaluated at 0 or infinity.
///
/// Throws QuadratureError when max_subdivisions is exhausted before the
/// tolerance max(abs_tol, rel_tol * |I|) is met.
double integrate_halfline(const std::function<double(double)>& f,
                          const QuadratureSpec& spec = {},
                          double scale = 1.0);

} // namespace sirp::specfun

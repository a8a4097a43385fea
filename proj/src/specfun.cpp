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

#include "sirp/specfun.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

namespace sirp::specfun {

void QuadratureSpec::validate() const
{
    if (!(rel_tol > 0.0))
        throw std::invalid_argument("QuadratureSpec: rel_tol must be > 0");
    if (!(abs_tol >= 0.0))
        throw std::invalid_argument("QuadratureSpec: abs_tol must be >= 0");
    if (max_subdivisions < 1)
        throw std::invalid_argument("QuadratureSpec: max_subdivisions must be >= 1");
}

double log_gamma(double x)
{
    if (!std::isfinite(x) || x <= 0.0)
        throw std::domain_error("log_gamma: argument must be finite and > 0");
    return boost::math::lgamma(x);
}

double digamma(double x)
{
    if (!std::isfinite(x) || x <= 0.0)
        throw std::domain_error("digamma: argument must be finite and > 0");
    return boost::math::digamma(x);
}

// ------------------------------------------------------------------------
// Bessel K of real order
// ------------------------------------------------------------------------

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 100000;

// Taylor coefficients of 1/Gamma(z) = sum_k c[k] z^(k+1) (Abramowitz & Stegun 6.1.34).
constexpr std::array<double, 26> kRecipGamma = {
    1.0000000000000000,  0.5772156649015329,  -0.6558780715202538, -0.0420026350340952,
    0.1665386113822915,  -0.0421977345555443, -0.0096219715278770, 0.0072189432466630,
    -0.0011651675918591, -0.0002152416741149, 0.0001280502823882,  -0.0000201348547807,
    -0.0000012504934821, 0.0000011330272320,  -0.0000002056338417, 0.0000000061160950,
    0.0000000050020075,  -0.0000000011812746, 0.0000000001043427,  0.0000000000077823,
    -0.0000000000036968, 0.0000000000005100,  -0.0000000000000206, -0.0000000000000054,
    0.0000000000000014,  0.0000000000000001};

void check_bessel_args(double nu, double x)
{
    if (!std::isfinite(nu))
        throw std::domain_error("log_bessel_k: order must be finite");
    if (!std::isfinite(x) || x <= 0.0)
        throw std::domain_error("log_bessel_k: argument must be finite and > 0");
}

} // namespace

LogBesselK::LogBesselK(double nu)
{
    if (!std::isfinite(nu))
        throw std::domain_error("log_bessel_k: order must be finite");
    nu_ = std::fabs(nu);
    steps_ = static_cast<int>(nu_ + 0.5);
    mu_ = nu_ - steps_;

    // gam1 = (1/G(1-mu) - 1/G(1+mu)) / (2 mu), gam2 = (1/G(1-mu) + 1/G(1+mu)) / 2,
    // both even in mu; odd/even coefficient split avoids the cancellation at mu -> 0.
    const double mu2 = mu_ * mu_;
    double g1 = 0.0;
    double g2 = 0.0;
    for (int k = static_cast<int>(kRecipGamma.size()) - 1; k >= 0; --k) {
        if (k % 2 == 1)
            g1 = g1 * mu2 + kRecipGamma[k];
        else
            g2 = g2 * mu2 + kRecipGamma[k];
    }
    gam1_ = -g1;
    gam2_ = g2;
    gampl_ = gam2_ - mu_ * gam1_;  // 1/Gamma(1+mu)
    gammi_ = gam2_ + mu_ * gam1_;  // 1/Gamma(1-mu)

    const double pimu = std::numbers::pi * mu_;
    fact_ = std::fabs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
}

std::pair<double, double> LogBesselK::with_next(double x) const
{
    check_bessel_args(nu_, x);
    const double mu = mu_;
    const double mu2 = mu * mu;
    const double xi2 = 2.0 / x;

    // ln K_mu and ratio0 = K_{mu+1} / (K_mu * 2/x); the ratio form keeps
    // tiny x (where K_{mu+1} alone overflows) representable.
    double log_kmu = 0.0;
    double ratio = 0.0;

    if (x < 2.0) {
        // Temme's series for K_mu and K_{mu+1}.
        const double x2 = 0.5 * x;
        double d = -std::log(x2);
        double e = mu * d;
        const double fact2 = std::fabs(e) < kEps ? 1.0 : std::sinh(e) / e;
        double ff = fact_ * (gam1_ * std::cosh(e) + gam2_ * fact2 * d);
        double sum = ff;
        e = std::exp(e);
        double p = 0.5 * e / gampl_;
        double q = 0.5 / (e * gammi_);
        double c = 1.0;
        d = x2 * x2;
        double sum1 = p;
        int i = 1;
        for (; i <= kMaxIter; ++i) {
            ff = (i * ff + p + q) / (i * static_cast<double>(i) - mu2);
            c *= d / i;
            p /= (i - mu);
            q /= (i + mu);
            const double del = c * ff;
            sum += del;
            const double del1 = c * (p - i * ff);
            sum1 += del1;
            if (std::fabs(del) < std::fabs(sum) * kEps)
                break;
        }
        if (i > kMaxIter)
            throw std::runtime_error("log_bessel_k: series failed to converge");
        log_kmu = std::log(sum);
        ratio = sum1 / sum;
    } else {
        // Steed's continued fraction; K_mu carried as sqrt(pi/2x)/s * exp(-x).
        double b = 2.0 * (1.0 + x);
        double d = 1.0 / b;
        double h = d;
        double delh = d;
        double q1 = 0.0;
        double q2 = 1.0;
        const double a1 = 0.25 - mu2;
        double q = a1;
        double c = a1;
        double a = -a1;
        double s = 1.0 + q * delh;
        int i = 2;
        for (; i <= kMaxIter; ++i) {
            a -= 2.0 * (i - 1);
            c = -a * c / i;
            const double qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh = (b * d - 1.0) * delh;
            h += delh;
            const double dels = q * delh;
            s += dels;
            if (std::fabs(dels / s) < kEps)
                break;
        }
        if (i > kMaxIter)
            throw std::runtime_error("log_bessel_k: continued fraction failed to converge");
        h = a1 * h;
        log_kmu = 0.5 * std::log(std::numbers::pi / (2.0 * x)) - std::log(s) - x;
        ratio = 0.5 * (mu + x + 0.5 - h);
    }

    // Upward recurrence K_{m+1} = (2m/x) K_m + K_{m-1} on the scaled ratios
    // rho_m = K_{m+1} / (K_m * 2/x): rho_{m+1} = (m+1) + (x/2)^2 / rho_m.
    const double half_x = 0.5 * x;
    // The product of the ratios is kept as mantissa * 2^exponent.
    double prod = 1.0;
    long exponent = 0;
    for (int i = 1; i <= steps_; ++i) {
        int e = 0;
        prod = std::frexp(prod * ratio, &e);
        exponent += e;
        ratio = (mu + i) + half_x * (half_x / ratio);
    }
    const double log_xi2 = std::log(xi2);
    const double log_k = log_kmu + std::log(prod) + static_cast<double>(exponent) * std::numbers::ln2 +
                         steps_ * log_xi2;
    return {log_k, log_k + log_xi2 + std::log(ratio)};
}

double LogBesselK::operator()(double x) const
{
    return with_next(x).first;
}

double log_bessel_k(double nu, double x)
{
    check_bessel_args(nu, x);
    return LogBesselK(nu)(x);
}

std::pair<double, double> log_bessel_k_pair(double nu, double x)
{
    check_bessel_args(nu, x);
    return LogBesselK(nu).with_next(x);
}

// ------------------------------------------------------------------------
// Half-line quadrature
// ------------------------------------------------------------------------

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel
{
    double lo;
    double hi;
    double result;
    double error;
};

// Exponent beyond which exp() leaves the double range; the mapped integrand is
// treated as zero there.
constexpr double kMaxExponent = 700.0;

class MappedIntegrand
{
public:
    MappedIntegrand(const std::function<double(double)>& f, double scale)
        : f_(f), log_scale_(std::log(scale)) {}

    double operator()(double t) const
    {
        const double one_minus = (1.0 - t) * (1.0 + t);
        const double s = t / one_minus;
        const double log_tau = log_scale_ + s;
        if (std::fabs(log_tau) > kMaxExponent)
            return 0.0;
        const double tau = std::exp(log_tau);
        const double value = f_(tau);
        if (!std::isfinite(value))
            throw std::domain_error("integrate_halfline: integrand is not finite");
        if (value == 0.0)
            return 0.0;
        return value * tau * (1.0 + t * t) / (one_minus * one_minus);
    }

private:
    const std::function<double(double)>& f_;
    double log_scale_;
};

Panel kronrod15(const MappedIntegrand& g, double lo, double hi)
{
    constexpr double epmach = std::numeric_limits<double>::epsilon();
    constexpr double uflow = std::numeric_limits<double>::min();

    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);

    std::array<double, 15> fv{};
    fv[7] = g(center);
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        fv[j] = g(center - dx);
        fv[14 - j] = g(center + dx);
    }

    double resk = kWgk[7] * fv[7];
    double resg = kWg[3] * fv[7];
    double resabs = std::fabs(resk);
    for (int j = 0; j < 7; ++j) {
        const double pair = fv[j] + fv[14 - j];
        resk += kWgk[j] * pair;
        resabs += kWgk[j] * (std::fabs(fv[j]) + std::fabs(fv[14 - j]));
        if (j % 2 == 1)
            resg += kWg[j / 2] * pair;
    }
    const double mean = 0.5 * resk;
    double resasc = kWgk[7] * std::fabs(fv[7] - mean);
    for (int j = 0; j < 7; ++j)
        resasc += kWgk[j] * (std::fabs(fv[j] - mean) + std::fabs(fv[14 - j] - mean));

    resk *= half;
    resg *= half;
    resabs *= std::fabs(half);
    resasc *= std::fabs(half);

    double err = std::fabs(resk - resg);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (resabs > uflow / (50.0 * epmach))
        err = std::max(epmach * 50.0 * resabs, err);
    return {lo, hi, resk, err};
}

} // namespace

double integrate_halfline(const std::function<double(double)>& f, const QuadratureSpec& spec,
                          double scale)
{
    spec.validate();
    if (!std::isfinite(scale) || scale <= 0.0)
        throw std::invalid_argument("integrate_halfline: scale must be finite and > 0");

    const MappedIntegrand g(f, scale);
    std::vector<Panel> panels;
    panels.reserve(static_cast<std::size_t>(spec.max_subdivisions) + 8);
    // Five initial panels; the middle one is centred on t = 0 (tau = scale)
    // so a peak placed there by the caller is sampled from the start.
    for (int i = 0; i < 5; ++i) {
        const double lo = -1.0 + 0.4 * i;
        panels.push_back(kronrod15(g, lo, i == 4 ? 1.0 : lo + 0.4));
    }

    int subdivisions = 0;
    for (;;) {
        double total = 0.0;
        double error = 0.0;
        for (const auto& p : panels) {
            total += p.result;
            error += p.error;
        }
        if (error <= std::max(spec.abs_tol, spec.rel_tol * std::fabs(total)))
            return total;

        auto worst = std::max_element(panels.begin(), panels.end(),
                                      [](const Panel& a, const Panel& b) { return a.error < b.error; });
        const double mid = 0.5 * (worst->lo + worst->hi);
        if (subdivisions >= spec.max_subdivisions || !(mid > worst->lo && mid < worst->hi)) {
            std::ostringstream msg;
            msg << "integrate_halfline: no convergence after " << subdivisions
                << " subdivisions (estimate " << total << ", error bound " << error << ")";
            throw QuadratureError(msg.str(), total, error);
        }
        const Panel left = kronrod15(g, worst->lo, mid);
        const Panel right = kronrod15(g, mid, worst->hi);
        *worst = left;
        panels.push_back(right);
        ++subdivisions;
    }
}

} // namespace sirp::specfun

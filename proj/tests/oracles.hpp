// Test-only reference computations. Nothing here calls into the library's
// numerical routines, so these stay independent of the code under test.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace oracle {

// ln of the integral over the real line of exp(log_f(s)), by the trapezoid
// rule with step h on [lo, hi]. Analytic integrands with negligible tails
// converge geometrically in h.
inline double log_trapezoid(const std::function<double(double)>& log_f, double lo, double hi, double h)
{
    double peak = -std::numeric_limits<double>::infinity();
    for (double s = lo; s <= hi; s += h)
        peak = std::max(peak, log_f(s));
    double sum = 0.0;
    for (double s = lo; s <= hi; s += h)
        sum += std::exp(log_f(s) - peak);
    return peak + std::log(sum * h);
}

// ln K_nu(x) = ln int_0^inf exp(-x cosh t) cosh(nu t) dt.
inline double log_bessel_k(double nu, double x)
{
    const double anu = std::fabs(nu);
    auto log_f = [&](double t) {
        const double at = std::fabs(t);
        return -x * std::cosh(t) + anu * at + std::log1p(std::exp(-2.0 * anu * at)) - std::log(2.0);
    };
    // Integrand is even in t: half of the full-line trapezoid sum. The peak
    // sits near asinh(|nu|/x); go out until the integrand drops by e^-80.
    const double peak = log_f(std::asinh(anu / x));
    double hi = std::asinh(anu / x) + 1.0;
    while (log_f(hi) > peak - 80.0)
        hi += 0.5;
    return log_trapezoid(log_f, -hi, hi, hi / 20000.0) - std::log(2.0);
}

// ln of int_0^inf tau^-MN exp(-rho_sq / tau) p(tau) dtau with p the
// Gamma(a, b) density (gamma_texture) or the inverse-gamma(a, b) density,
// by trapezoid in ln tau around the peak.
inline double log_texture_mixture(bool gamma_texture, double a, double b, double rho_sq, int mn)
{
    auto log_f = [&](double s) {
        const double tau = std::exp(s);
        const double log_p = gamma_texture ? (a - 1.0) * s - tau / b - std::lgamma(a) - a * std::log(b)
                                           : a * std::log(b) - std::lgamma(a) - (a + 1.0) * s - b / tau;
        return -mn * s - rho_sq / tau + log_p + s;  // + s: d tau = tau ds
    };
    double peak_s = 0.0, peak = -std::numeric_limits<double>::infinity();
    for (double s = -40.0; s <= 40.0; s += 0.01)
        if (log_f(s) > peak) {
            peak = log_f(s);
            peak_s = s;
        }
    double lo = peak_s, hi = peak_s;
    while (log_f(lo) > peak - 60.0)
        lo -= 0.25;
    while (log_f(hi) > peak - 60.0)
        hi += 0.25;
    return log_trapezoid(log_f, lo, hi, (hi - lo) / 40000.0);
}

// Central difference of f at x with step h.
inline double central_diff(const std::function<double(double)>& f, double x, double h)
{
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double rel_err(double got, double want)
{
    return std::fabs(got - want) / std::max(std::fabs(want), 1e-300);
}

} // namespace oracle

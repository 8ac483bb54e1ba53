#include "cqipred/specfun.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

namespace cqipred::specfun {

namespace {

constexpr double kSeriesLimit = 8.0;
constexpr double kAsymptoticLimit = 25.0;

double j0_series(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        term *= -q / (static_cast<double>(k) * k);
        sum += term;
        if (std::abs(term) < 1e-17 * std::max(1.0, std::abs(sum))) break;
    }
    return sum;
}

// Downward recurrence J_{k-1} = (2k/x) J_k - J_{k+1}, normalised with
// 1 = J_0 + 2 * sum_{k>=1} J_{2k}.
double j0_miller(double x) {
    const int start = 2 * static_cast<int>(std::ceil((x + 60.0) / 2.0));
    double next = 0.0;   // J_{k+1}
    double cur = 1e-30;  // J_k
    double norm = 0.0;   // sum over even k >= 2
    for (int k = start; k > 0; --k) {
        const double prev = (2.0 * k / x) * cur - next;
        next = cur;
        cur = prev;
        if ((k - 1) % 2 == 0 && k - 1 > 0) norm += cur;
        if (std::abs(cur) > 1e250) {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
        }
    }
    return cur / (cur + 2.0 * norm);
}

double j0_asymptotic(double x) {
    // Hankel expansion: J0 = sqrt(2/(pi x)) (P cos(x - pi/4) - Q sin(x - pi/4)).
    double p = 1.0;
    double q = 0.0;
    double term = 1.0;
    double last = 1.0;
    for (int k = 1; k < 60; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= -(odd * odd) / (8.0 * k * x);
        if (std::abs(term) > last) break;  // asymptotic series started diverging
        last = std::abs(term);
        const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
        if (k % 2 == 0) {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if (last < 1e-18) break;
    }
    const double s = std::sin(x);
    const double c = std::cos(x);
    const double cos_chi = (c + s) * std::numbers::sqrt2 * 0.5;
    const double sin_chi = (s - c) * std::numbers::sqrt2 * 0.5;
    return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * cos_chi - q * sin_chi);
}

} // namespace

double bessel_j0(double x) {
    if (!std::isfinite(x)) throw std::domain_error("bessel_j0: argument must be finite");
    const double ax = std::abs(x);
    if (ax <= kSeriesLimit) return j0_series(ax);
    if (ax < kAsymptoticLimit) return j0_miller(ax);
    return j0_asymptotic(ax);
}

double elliptic_k(double m) {
    if (!std::isfinite(m) || m >= 1.0) {
        throw std::domain_error("elliptic_k: parameter must satisfy m < 1");
    }
    // K(m) = pi / (2 AGM(1, sqrt(1 - m))); both arguments stay positive for m < 1.
    double a = 1.0;
    double b = std::sqrt(1.0 - m);
    for (int i = 0; i < 64 && std::abs(a - b) > 1e-16 * a; ++i) {
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return std::numbers::pi / (a + b);
}

double exp_weighted_mean(const std::function<double(double)>& f, double mean_interval,
                         double rel_tol) {
    if (!std::isfinite(mean_interval) || mean_interval <= 0.0) {
        throw std::domain_error("exp_weighted_mean: mean_interval must be positive");
    }
    constexpr double kTruncation = 40.0;  // in units of the mean interval
    bool finite = true;
    auto integrand = [&](double u) {
        const double v = f(u * mean_interval);
        if (!std::isfinite(v)) finite = false;
        return v * std::exp(-u);
    };
    double error = 0.0;
    double l1 = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, 0.0, kTruncation, 20, rel_tol, &error, &l1);
    if (!finite || !std::isfinite(value)) {
        throw NumericalError("exp_weighted_mean: integrand produced non-finite values");
    }
    if (error > rel_tol * std::max(std::abs(value), 1e-300) && error > 1e-15 * l1) {
        std::ostringstream msg;
        msg << "exp_weighted_mean: quadrature did not converge (mean_interval=" << mean_interval
            << ", value=" << value << ", error estimate=" << error << ", L1=" << l1
            << ", rel_tol=" << rel_tol << ")";
        throw NumericalError(msg.str());
    }
    return value;
}

} // namespace cqipred::specfun

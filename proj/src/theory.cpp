#include "cqipred/theory.hpp"

#include "cqipred/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cqipred::theory {

namespace {

using std::numbers::pi;

void require_positive_delay(double delay, const char* where) {
    if (!(delay > 0.0) || !std::isfinite(delay)) {
        throw std::domain_error(std::string(where) + ": delay must be positive");
    }
}

void require_alpha(double alpha, const char* where) {
    if (!(alpha > 0.0 && alpha < 2.0)) {
        throw std::domain_error(std::string(where) + ": alpha must lie in (0, 2)");
    }
}

void require_snr(double snr, const char* where) {
    if (!(snr > 0.0) || !std::isfinite(snr)) {
        throw std::domain_error(std::string(where) + ": snr must be positive");
    }
}

} // namespace

double rho_fixed(const fading::DopplerSpec& doppler, double ts) {
    require_positive_delay(ts, "rho_fixed");
    return specfun::bessel_j0(2.0 * pi * doppler.doppler() * ts);
}

double mean_rho_sq(const fading::DopplerSpec& doppler, double tbar) {
    require_positive_delay(tbar, "mean_rho_sq");
    const double x = 4.0 * pi * doppler.doppler() * tbar;
    return std::min(1.0, 2.0 / pi * specfun::elliptic_k(-x * x));
}

double mean_rho(const fading::DopplerSpec& doppler, double tbar) {
    require_positive_delay(tbar, "mean_rho");
    const double omega = 2.0 * pi * doppler.doppler();
    return specfun::exp_weighted_mean([omega](double t) { return specfun::bessel_j0(omega * t); },
                                      tbar);
}

double mean_rho_closed_form(const fading::DopplerSpec& doppler, double tbar) {
    require_positive_delay(tbar, "mean_rho_closed_form");
    const double x = 2.0 * pi * doppler.doppler() * tbar;
    return 1.0 / std::sqrt(1.0 + x * x);
}

CorrelationSummary correlation_summary(const fading::DopplerSpec& doppler, double delay) {
    return {rho_fixed(doppler, delay), mean_rho(doppler, delay), mean_rho_sq(doppler, delay)};
}

double mse_from_rho_sq(double alpha, double rho_sq, double snr) {
    require_alpha(alpha, "mse");
    require_snr(snr, "mse");
    if (!(rho_sq >= 0.0 && rho_sq <= 1.0)) throw std::domain_error("mse: rho^2 must lie in [0, 1]");
    return 2.0 * snr * snr * (1.0 - rho_sq) / ((2.0 - alpha) * (1.0 - rho_sq + alpha * rho_sq));
}

double mse_fixed(double alpha, double rho, double snr) {
    if (!(std::abs(rho) <= 1.0)) throw std::domain_error("mse_fixed: |rho| must be <= 1");
    return mse_from_rho_sq(alpha, rho * rho, snr);
}

double mse_random(double alpha, const fading::DopplerSpec& doppler, double tbar, double snr) {
    require_alpha(alpha, "mse_random");
    return mse_from_rho_sq(alpha, mean_rho_sq(doppler, tbar), snr);
}

double alpha_opt_from_rho_sq(double rho_sq) {
    if (!(rho_sq >= 0.0 && rho_sq <= 1.0)) throw std::domain_error("alpha_opt: rho^2 must lie in [0, 1]");
    // Negative optima are clipped: below rho^2 = 1/3 the best is the constant predictor.
    if (3.0 * rho_sq <= 1.0) return 0.0;
    return std::clamp(0.5 * (3.0 - 1.0 / rho_sq), 0.0, std::nextafter(2.0, 0.0));
}

double alpha_opt_fixed(double rho) {
    if (!(std::abs(rho) <= 1.0)) throw std::domain_error("alpha_opt_fixed: |rho| must be <= 1");
    return alpha_opt_from_rho_sq(rho * rho);
}

double alpha_opt_random(const fading::DopplerSpec& doppler, double tbar) {
    return alpha_opt_from_rho_sq(mean_rho_sq(doppler, tbar));
}

double alpha_opt_numeric(const std::function<double(double)>& mse) {
    constexpr int kGrid = 10000;
    constexpr double kLower = 1e-12;
    constexpr double kUpper = 2.0 - 1e-12;

    auto eval = [&mse](double a) {
        const double v = mse(a);
        if (!std::isfinite(v)) {
            throw specfun::NumericalError("alpha_opt_numeric: non-finite MSE at alpha=" + std::to_string(a));
        }
        return v;
    };
    auto grid_point = [](int k) {
        if (k <= 0) return kLower;
        if (k >= kGrid) return kUpper;
        return 2.0 * k / kGrid;
    };

    int best = 0;
    double best_value = eval(grid_point(0));
    for (int k = 1; k <= kGrid; ++k) {
        const double v = eval(grid_point(k));
        if (v < best_value) {
            best_value = v;
            best = k;
        }
    }

    double lo = grid_point(std::max(best - 1, 0));
    double hi = grid_point(std::min(best + 1, kGrid));
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = eval(x1);
    double f2 = eval(x2);
    while (hi - lo > 1e-7) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = eval(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = eval(x2);
        }
    }
    double arg = 0.5 * (lo + hi);
    // Keep the grid minimum if refinement wandered onto a flat shoulder.
    if (eval(arg) > best_value) arg = grid_point(best);
    return std::clamp(arg, 0.0, std::nextafter(2.0, 0.0));
}

double power_correlation(double h_corr_sq, double snr) {
    if (!(h_corr_sq >= 0.0 && h_corr_sq <= 1.0)) {
        throw std::domain_error("power_correlation: squared correlation must lie in [0, 1]");
    }
    return snr * snr * (1.0 + h_corr_sq);
}

MseCurve mse_curve(fading::Regime regime, const fading::DopplerSpec& doppler, double delay,
                   double snr, const std::vector<double>& alphas) {
    const double rho_sq = regime == fading::Regime::fixed ? std::pow(rho_fixed(doppler, delay), 2)
                                                          : mean_rho_sq(doppler, delay);
    MseCurve curve{regime, delay, snr, alphas, {}};
    curve.mse_values.reserve(alphas.size());
    for (double a : alphas) curve.mse_values.push_back(mse_from_rho_sq(a, rho_sq, snr));
    return curve;
}

} // namespace cqipred::theory

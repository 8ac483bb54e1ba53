#pragma once

#include "cqipred/fading.hpp"

#include <functional>
#include <vector>

namespace cqipred::theory {

/// Lag-1 correlation statistics at one delay value.
struct CorrelationSummary {
    double rho = 1.0;          // J0(2 pi f_d T_s), evenly spaced blocks
    double mean_rho = 1.0;     // E_tau[rho], exponential spacing with mean T
    double mean_rho_sq = 1.0;  // E_tau[rho^2]
};

struct MseCurve {
    fading::Regime regime = fading::Regime::fixed;
    double delay = 0.0;  // T_s or mean T, seconds
    double snr = 1.0;    // linear
    std::vector<double> alphas;
    std::vector<double> mse_values;  // units of snr^2
};

/// J0(2 pi f_d ts). Throws std::domain_error for ts <= 0.
double rho_fixed(const fading::DopplerSpec& doppler, double ts);

/// E_tau[J0(2 pi f_d tau)^2] = (2/pi) K(-16 pi^2 f_d^2 tbar^2) for tau ~ Exp(mean tbar).
double mean_rho_sq(const fading::DopplerSpec& doppler, double tbar);

/// E_tau[J0(2 pi f_d tau)] by quadrature.
double mean_rho(const fading::DopplerSpec& doppler, double tbar);

/// Laplace-transform closed form of mean_rho: 1 / sqrt(1 + (2 pi f_d tbar)^2).
double mean_rho_closed_form(const fading::DopplerSpec& doppler, double tbar);

CorrelationSummary correlation_summary(const fading::DopplerSpec& doppler, double delay);

/// Steady-state MSE of the single-pole power predictor when the power samples
/// have lag-k correlation coefficient rho_sq^k:
/// 2 snr^2 (1 - rho_sq) / ((2 - alpha)(1 - rho_sq + alpha rho_sq)).
/// This is the rho^-2 form rewritten so that rho_sq = 0 needs no division.
double mse_from_rho_sq(double alpha, double rho_sq, double snr);

/// MSE with evenly spaced blocks, 0 < alpha < 2, |rho| <= 1.
double mse_fixed(double alpha, double rho, double snr);

/// MSE with exponentially distributed block spacing of mean tbar.
double mse_random(double alpha, const fading::DopplerSpec& doppler, double tbar, double snr);

/// argmin of mse_from_rho_sq: (3 - 1/rho_sq)/2, clipped at 0. rho_sq <= 1/3 gives 0.
double alpha_opt_from_rho_sq(double rho_sq);
double alpha_opt_fixed(double rho);
double alpha_opt_random(const fading::DopplerSpec& doppler, double tbar);

/// Dense grid search over (0, 2) followed by golden-section refinement.
/// Returns the minimiser clipped to [0, 2). Throws specfun::NumericalError
/// if the function returns non-finite values.
double alpha_opt_numeric(const std::function<double(double)>& mse);

/// E[gamma_l gamma_{l+i}] = snr^2 (1 + |E[h_l h_{l+i}^*]|^2).
double power_correlation(double h_corr_sq, double snr);

/// Var[snr |h|^2] = snr^2: MSE of the constant mean-value predictor.
inline double variance_floor(double snr) { return snr * snr; }

MseCurve mse_curve(fading::Regime regime, const fading::DopplerSpec& doppler, double delay,
                   double snr, const std::vector<double>& alphas);

} // namespace cqipred::theory

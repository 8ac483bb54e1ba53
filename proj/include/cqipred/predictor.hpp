#pragma once

#include "cqipred/fading.hpp"

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace cqipred::predictor {

/// Single-pole IIR smoother gamma_hat <- (1 - alpha) gamma_hat + alpha gamma.
/// alpha = 0 freezes the prediction at its initial value.
class PredictorState {
public:
    PredictorState(double alpha, double initial);

    double alpha() const noexcept { return alpha_; }
    double current() const noexcept { return current_; }

    /// Folds in the newest observation and returns the next prediction.
    double update(double sample) noexcept {
        current_ = (1.0 - alpha_) * current_ + alpha_ * sample;
        return current_;
    }

private:
    double alpha_;
    double current_;
};

/// Strictly causal predictions: out[0] = init, out[l] uses powers[0..l-1].
/// Requires 0 <= alpha < 2.
std::vector<double> iir_predict(std::span<const double> powers, double alpha, double init);
std::vector<double> iir_predict(const fading::PowerTrace& powers, double alpha, double init);

/// Truncated impulse-response form,
/// out[l] = alpha * sum_{i=0}^{min(l-1, truncation)} (1-alpha)^i powers[l-1-i].
/// Requires 0 < alpha < 2 and truncation >= 1.
std::vector<double> impulse_response_predict(std::span<const double> powers, double alpha,
                                             std::size_t truncation);
std::vector<double> impulse_response_predict(const fading::PowerTrace& powers, double alpha,
                                             std::size_t truncation);

/// Runs the smoother on the complex gains and returns |h_hat_l|^2 (no snr
/// factor). out[0] = |init|^2.
std::vector<double> amplitude_predict_power(std::span<const std::complex<double>> gains,
                                            double alpha, std::complex<double> init);
std::vector<double> amplitude_predict_power(const fading::ChannelTrace& trace, double alpha,
                                            std::complex<double> init);

/// Mean squared difference over indices >= warmup.
double empirical_mse(std::span<const double> predictions, std::span<const double> actuals,
                     std::size_t warmup);

/// Stationary E[|h_hat|^2] / E[|h|^2] of amplitude-domain smoothing on an
/// AR(1) channel with lag-1 correlation rho:
/// alpha/(2-alpha) * (1 + 2 (1-alpha) rho / (1 - (1-alpha) rho)).
double bias_factor_closed_form(double alpha, double rho);

/// Transient discarded before measuring MSE: max(1000, ceil(10/alpha)).
std::size_t default_warmup(double alpha);

} // namespace cqipred::predictor

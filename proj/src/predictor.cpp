#include "cqipred/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cqipred::predictor {

namespace {

void require_closed_range(double alpha, const char* where) {
    if (!(alpha >= 0.0 && alpha < 2.0)) {
        throw std::domain_error(std::string(where) + ": alpha must lie in [0, 2)");
    }
}

void require_open_range(double alpha, const char* where) {
    if (!(alpha > 0.0 && alpha < 2.0)) {
        throw std::domain_error(std::string(where) + ": alpha must lie in (0, 2)");
    }
}

} // namespace

PredictorState::PredictorState(double alpha, double initial) : alpha_(alpha), current_(initial) {
    require_closed_range(alpha, "PredictorState");
    if (!std::isfinite(initial)) throw std::domain_error("PredictorState: initial value must be finite");
}

std::vector<double> iir_predict(std::span<const double> powers, double alpha, double init) {
    PredictorState state(alpha, init);
    std::vector<double> out(powers.size());
    for (std::size_t l = 0; l < powers.size(); ++l) {
        out[l] = state.current();
        state.update(powers[l]);
    }
    return out;
}

std::vector<double> iir_predict(const fading::PowerTrace& powers, double alpha, double init) {
    return iir_predict(std::span<const double>(powers.powers), alpha, init);
}

std::vector<double> impulse_response_predict(std::span<const double> powers, double alpha,
                                             std::size_t truncation) {
    require_open_range(alpha, "impulse_response_predict");
    if (truncation < 1) throw std::domain_error("impulse_response_predict: truncation must be >= 1");

    std::vector<double> taps(truncation + 1);
    double w = alpha;
    for (auto& tap : taps) {
        tap = w;
        w *= 1.0 - alpha;
    }

    std::vector<double> out(powers.size(), 0.0);
    for (std::size_t l = 1; l < powers.size(); ++l) {
        const std::size_t depth = std::min(l - 1, truncation);
        double acc = 0.0;
        for (std::size_t i = 0; i <= depth; ++i) acc += taps[i] * powers[l - 1 - i];
        out[l] = acc;
    }
    return out;
}

std::vector<double> impulse_response_predict(const fading::PowerTrace& powers, double alpha,
                                             std::size_t truncation) {
    return impulse_response_predict(std::span<const double>(powers.powers), alpha, truncation);
}

std::vector<double> amplitude_predict_power(std::span<const std::complex<double>> gains,
                                            double alpha, std::complex<double> init) {
    require_open_range(alpha, "amplitude_predict_power");
    std::vector<double> out(gains.size());
    std::complex<double> current = init;
    for (std::size_t l = 0; l < gains.size(); ++l) {
        out[l] = std::norm(current);
        current = (1.0 - alpha) * current + alpha * gains[l];
    }
    return out;
}

std::vector<double> amplitude_predict_power(const fading::ChannelTrace& trace, double alpha,
                                            std::complex<double> init) {
    return amplitude_predict_power(std::span<const std::complex<double>>(trace.gains), alpha, init);
}

double empirical_mse(std::span<const double> predictions, std::span<const double> actuals,
                     std::size_t warmup) {
    if (predictions.size() != actuals.size()) {
        throw std::domain_error("empirical_mse: predictions and actuals differ in length");
    }
    if (warmup >= actuals.size()) throw std::domain_error("empirical_mse: nothing left after warmup");
    double acc = 0.0;
    for (std::size_t l = warmup; l < actuals.size(); ++l) {
        const double d = predictions[l] - actuals[l];
        acc += d * d;
    }
    return acc / static_cast<double>(actuals.size() - warmup);
}

double bias_factor_closed_form(double alpha, double rho) {
    require_open_range(alpha, "bias_factor_closed_form");
    if (!(std::abs(rho) <= 1.0)) throw std::domain_error("bias_factor_closed_form: |rho| must be <= 1");
    const double r = (1.0 - alpha) * rho;
    if (!(std::abs(r) < 1.0)) throw std::domain_error("bias_factor_closed_form: series diverges");
    return alpha / (2.0 - alpha) * (1.0 + 2.0 * r / (1.0 - r));
}

std::size_t default_warmup(double alpha) {
    if (!(alpha > 0.0)) return 1000;
    return std::max<std::size_t>(1000, static_cast<std::size_t>(std::ceil(10.0 / alpha)));
}

} // namespace cqipred::predictor

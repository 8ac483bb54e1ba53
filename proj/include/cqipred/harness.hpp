#pragma once

#include "cqipred/csv.hpp"
#include "cqipred/fading.hpp"
#include "cqipred/linkadapt.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cqipred::harness {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class StrategyKind { iir_optimal_alpha, iir_fixed_alpha, previous_sample, perfect_prediction, fixed_rate };

struct Strategy {
    StrategyKind kind = StrategyKind::iir_optimal_alpha;
    double alpha = 1.0;  // only used by iir_fixed_alpha

    /// iir_optimal_alpha, iir_fixed_alpha(0.5), previous_sample, ...
    std::string name() const;
    static Strategy parse(const std::string& text);

    friend bool operator==(const Strategy&, const Strategy&) = default;
};

enum class Experiment { mse_curves, alpha_opt, throughput };

struct ExperimentConfig {
    double speed_kmh = 3.0;
    double carrier_hz = 2e9;
    std::optional<double> doppler_hz;  // overrides speed/carrier when set
    double snr_db = 0.0;
    std::vector<fading::Regime> regimes{fading::Regime::fixed, fading::Regime::random};
    std::vector<double> delays{0.01, 0.02, 0.03, 0.04};  // seconds
    std::vector<double> alphas;                          // mse-curves grid
    std::size_t blocks = 200000;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8};
    std::optional<std::filesystem::path> mcs_table;
    std::vector<Strategy> strategies;
    linkadapt::FixedRateConvention convention = linkadapt::FixedRateConvention::rayleigh;
    linkadapt::Weighting weighting = linkadapt::Weighting::per_block;
    std::vector<double> sweep_speeds_kmh{3.0, 10.0, 30.0};  // alpha-opt sweep
    std::vector<double> sweep_delays;                       // alpha-opt sweep, seconds
    unsigned threads = 0;                                   // 0: hardware concurrency

    /// Default operating points: snr 0 dB for the MSE and
    /// alpha studies, 5 dB for throughput.
    static ExperimentConfig defaults_for(Experiment experiment);

    fading::DopplerSpec doppler() const;
    double snr() const;
    linkadapt::McsTable table() const;

    /// Throws ConfigError describing the first violated constraint.
    void validate(Experiment experiment) const;
};

/// Overlays the keys present in a JSON object onto `config`. Unknown keys are
/// rejected. Delay-like keys accept seconds (`delays_s`) or milliseconds
/// (`delays_ms`).
void apply_json(ExperimentConfig& config, const std::string& json_text);
void apply_json_file(ExperimentConfig& config, const std::filesystem::path& path);

std::vector<double> linspace(double first, double last, std::size_t count);

struct MseCurveRow {
    fading::Regime regime;
    double delay;
    double alpha;
    double mse_analytic;
    double mse_empirical;
    double variance_floor;
};

struct MseMinimum {
    fading::Regime regime;
    double delay;
    double alpha_opt;   // clipped analytic optimum
    double mse_min;     // infimum of the analytic curve over (0, 2)
    double variance_floor;
};

struct MseCurveSet {
    std::vector<MseCurveRow> rows;
    std::vector<MseMinimum> minima;
};

MseCurveSet run_mse_curves(const ExperimentConfig& config);

struct AlphaOptRow {
    fading::Regime regime;
    double doppler_hz;
    double delay;
    double alpha_opt;
    double sensitivity;  // |d alpha_opt / d delay|, 1/s
};

std::vector<AlphaOptRow> run_alpha_opt_sweep(const ExperimentConfig& config);

struct ThroughputRow {
    fading::Regime regime;
    double delay;
    Strategy strategy;
    double mean;
    double ci_half_width;          // 1.96 * across-seed standard error
    std::vector<double> per_seed;  // in config.seeds order
};

std::vector<ThroughputRow> run_throughput(const ExperimentConfig& config);

csv::Table to_table(const std::vector<MseCurveRow>& rows);
csv::Table to_table(const std::vector<MseMinimum>& rows);
csv::Table to_table(const std::vector<AlphaOptRow>& rows);
csv::Table to_table(const std::vector<ThroughputRow>& rows);

void emit_csv(const csv::Table& table, const std::filesystem::path& path);

} // namespace cqipred::harness

#pragma once

#include "cqipred/fading.hpp"

#include <cstddef>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace cqipred::linkadapt {

struct McsEntry {
    double threshold;  // linear SINR
    double rate;       // bits/s/Hz
};

/// Modulation and coding schemes ordered by strictly increasing threshold and
/// rate.
class McsTable {
public:
    explicit McsTable(std::vector<McsEntry> entries);

    /// Thresholds given in dB, converted to linear.
    static McsTable from_db(std::span<const double> thresholds_db, std::span<const double> rates);

    /// 15-entry LTE CQI style table, -6.936 dB .. 19.829 dB.
    static McsTable lte_default();

    /// CSV with header `threshold_db,rate_bps_hz`.
    static McsTable load_csv(const std::filesystem::path& path);

    std::size_t size() const noexcept { return entries_.size(); }
    const McsEntry& operator[](std::size_t j) const { return entries_.at(j); }
    const std::vector<McsEntry>& entries() const noexcept { return entries_; }

private:
    std::vector<McsEntry> entries_;
};

struct BlockOutcome {
    std::size_t mcs_index = 0;
    bool success = false;
    double realized_rate = 0.0;
    double true_power = 0.0;
    double predicted_power = std::numeric_limits<double>::quiet_NaN();
};

/// Highest-rate index whose threshold is <= predicted_power; index 0 when none
/// is. Negative predictions (possible for alpha > 1) also give index 0.
std::size_t select_mcs(double predicted_power, const McsTable& table);

/// Success iff true_power > threshold (strict).
BlockOutcome evaluate_block(double true_power, std::size_t mcs_index, const McsTable& table,
                            double predicted_power = std::numeric_limits<double>::quiet_NaN());

/// paper: kappa = 2, success probability exp(-S/(2 snr)).
/// rayleigh: kappa = 1, the unit-mean exponential power model exp(-S/snr).
enum class FixedRateConvention { paper, rayleigh };

std::string to_string(FixedRateConvention convention);
FixedRateConvention parse_convention(const std::string& text);

/// argmax_j exp(-S_j / (kappa snr)) R_j, ties to the lower index.
std::size_t fixed_rate_index(double snr, const McsTable& table,
                             FixedRateConvention convention = FixedRateConvention::rayleigh);

/// Expected rate of always using `mcs_index` when |h|^2 ~ Exp(1).
double expected_fixed_rate(double snr, std::size_t mcs_index, const McsTable& table);

enum class Weighting { per_block, per_time };

/// per_block: mean realised rate (bits/s/Hz).
/// per_time: sum of realised rates over elapsed time, where N blocks spanning
/// instants t_first..t_last occupy (t_last - t_first) * N / (N - 1) seconds.
/// `instants` must align with `outcomes` for per_time and is ignored otherwise.
double throughput(std::span<const BlockOutcome> outcomes, Weighting weighting,
                  std::span<const double> instants = {});
double throughput(std::span<const BlockOutcome> outcomes, Weighting weighting,
                  const fading::ArrivalSchedule& schedule);

} // namespace cqipred::linkadapt

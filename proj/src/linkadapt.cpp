#include "cqipred/linkadapt.hpp"

#include "cqipred/csv.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace cqipred::linkadapt {

namespace {

constexpr std::array<double, 15> kLteThresholdsDb = {
    -6.936, -5.147, -3.180, -1.253, 0.761, 2.699, 4.694, 6.525,
    8.573,  10.366, 12.289, 14.173, 15.888, 17.814, 19.829};
constexpr std::array<double, 15> kLteRates = {
    0.1523, 0.2344, 0.3770, 0.6016, 0.8770, 1.1758, 1.4766, 1.9141,
    2.4063, 2.7305, 3.3223, 3.9023, 4.5234, 5.1152, 5.5547};

double parse_number(const std::string& text, const std::filesystem::path& path, std::size_t row) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) {
        throw std::runtime_error(path.string() + ": row " + std::to_string(row + 1) +
                                 ": not a number: '" + text + "'");
    }
    return value;
}

} // namespace

McsTable::McsTable(std::vector<McsEntry> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) throw std::domain_error("McsTable: at least one entry is required");
    for (std::size_t j = 0; j < entries_.size(); ++j) {
        const auto& e = entries_[j];
        if (!std::isfinite(e.threshold) || !std::isfinite(e.rate) || e.threshold < 0.0 || e.rate <= 0.0) {
            throw std::domain_error("McsTable: entry " + std::to_string(j) + " is invalid");
        }
        if (j > 0 && (e.threshold <= entries_[j - 1].threshold || e.rate <= entries_[j - 1].rate)) {
            throw std::domain_error("McsTable: thresholds and rates must be strictly increasing");
        }
    }
}

McsTable McsTable::from_db(std::span<const double> thresholds_db, std::span<const double> rates) {
    if (thresholds_db.size() != rates.size()) {
        throw std::domain_error("McsTable::from_db: thresholds and rates differ in length");
    }
    std::vector<McsEntry> entries;
    entries.reserve(rates.size());
    for (std::size_t j = 0; j < rates.size(); ++j) {
        entries.push_back({std::pow(10.0, thresholds_db[j] / 10.0), rates[j]});
    }
    return McsTable(std::move(entries));
}

McsTable McsTable::lte_default() {
    return from_db(kLteThresholdsDb, kLteRates);
}

McsTable McsTable::load_csv(const std::filesystem::path& path) {
    const auto table = csv::read(path);
    if (table.header != std::vector<std::string>{"threshold_db", "rate_bps_hz"}) {
        throw std::runtime_error(path.string() + ": expected header 'threshold_db,rate_bps_hz'");
    }
    std::vector<double> thresholds;
    std::vector<double> rates;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        if (row.size() != 2) {
            throw std::runtime_error(path.string() + ": row " + std::to_string(r + 1) + ": expected 2 fields");
        }
        thresholds.push_back(parse_number(row[0], path, r));
        rates.push_back(parse_number(row[1], path, r));
    }
    return from_db(thresholds, rates);
}

std::size_t select_mcs(double predicted_power, const McsTable& table) {
    if (std::isnan(predicted_power)) throw std::domain_error("select_mcs: prediction is NaN");
    // Equality with a threshold counts as usable.
    std::size_t chosen = 0;
    for (std::size_t j = 0; j < table.size(); ++j) {
        if (table[j].threshold <= predicted_power) chosen = j;
        else break;
    }
    return chosen;
}

BlockOutcome evaluate_block(double true_power, std::size_t mcs_index, const McsTable& table,
                            double predicted_power) {
    if (mcs_index >= table.size()) throw std::domain_error("evaluate_block: MCS index out of range");
    BlockOutcome out;
    out.mcs_index = mcs_index;
    out.success = true_power > table[mcs_index].threshold;
    out.realized_rate = out.success ? table[mcs_index].rate : 0.0;
    out.true_power = true_power;
    out.predicted_power = predicted_power;
    return out;
}

std::string to_string(FixedRateConvention convention) {
    return convention == FixedRateConvention::paper ? "paper" : "rayleigh";
}

FixedRateConvention parse_convention(const std::string& text) {
    if (text == "paper") return FixedRateConvention::paper;
    if (text == "rayleigh") return FixedRateConvention::rayleigh;
    throw std::invalid_argument("unknown fixed-rate convention '" + text + "' (expected paper or rayleigh)");
}

std::size_t fixed_rate_index(double snr, const McsTable& table, FixedRateConvention convention) {
    if (!(snr > 0.0)) throw std::domain_error("fixed_rate_index: snr must be positive");
    const double kappa = convention == FixedRateConvention::paper ? 2.0 : 1.0;
    std::size_t best = 0;
    double best_value = -1.0;
    for (std::size_t j = 0; j < table.size(); ++j) {
        const double v = std::exp(-table[j].threshold / (kappa * snr)) * table[j].rate;
        if (v > best_value) {
            best_value = v;
            best = j;
        }
    }
    return best;
}

double expected_fixed_rate(double snr, std::size_t mcs_index, const McsTable& table) {
    if (!(snr > 0.0)) throw std::domain_error("expected_fixed_rate: snr must be positive");
    return std::exp(-table[mcs_index].threshold / snr) * table[mcs_index].rate;
}

double throughput(std::span<const BlockOutcome> outcomes, Weighting weighting,
                  std::span<const double> instants) {
    if (outcomes.empty()) throw std::domain_error("throughput: no outcomes");
    double total = 0.0;
    for (const auto& o : outcomes) total += o.realized_rate;
    if (weighting == Weighting::per_block) return total / static_cast<double>(outcomes.size());

    if (instants.size() != outcomes.size()) {
        throw std::domain_error("throughput: schedule length does not match outcomes");
    }
    if (outcomes.size() < 2) throw std::domain_error("throughput: per_time needs at least two blocks");
    const double n = static_cast<double>(outcomes.size());
    const double elapsed = (instants.back() - instants.front()) * n / (n - 1.0);
    if (!(elapsed > 0.0)) throw std::domain_error("throughput: schedule spans no time");
    return total / elapsed;
}

double throughput(std::span<const BlockOutcome> outcomes, Weighting weighting,
                  const fading::ArrivalSchedule& schedule) {
    return throughput(outcomes, weighting, std::span<const double>(schedule.instants));
}

} // namespace cqipred::linkadapt

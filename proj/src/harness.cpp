#include "cqipred/harness.hpp"

#include "cqipred/predictor.hpp"
#include "cqipred/theory.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace cqipred::harness {

using fading::Regime;

namespace {

constexpr double kCi95 = 1.959963984540054;

// Runs job(i) for i in [0, count) on a small pool. Jobs write to disjoint
// slots, so results do not depend on scheduling.
template <typename Job>
void parallel_for(std::size_t count, unsigned threads, Job&& job) {
    unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        job(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        next = count;
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

double clipped_alpha_opt(Regime regime, const fading::DopplerSpec& doppler, double delay) {
    return regime == Regime::fixed ? theory::alpha_opt_fixed(theory::rho_fixed(doppler, delay))
                                   : theory::alpha_opt_random(doppler, delay);
}

double rho_sq_for(Regime regime, const fading::DopplerSpec& doppler, double delay) {
    if (regime == Regime::fixed) {
        const double rho = theory::rho_fixed(doppler, delay);
        return rho * rho;
    }
    return theory::mean_rho_sq(doppler, delay);
}

std::string format_alpha(double alpha) {
    return csv::format_double(alpha);
}

std::vector<double> require_number_list(const nlohmann::json& value, const std::string& key) {
    if (!value.is_array()) throw ConfigError("config key '" + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : value) {
        if (!v.is_number()) throw ConfigError("config key '" + key + "' must contain only numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

std::vector<double> scaled(std::vector<double> values, double factor) {
    for (auto& v : values) v *= factor;
    return values;
}

} // namespace

std::string Strategy::name() const {
    switch (kind) {
    case StrategyKind::iir_optimal_alpha: return "iir_optimal_alpha";
    case StrategyKind::iir_fixed_alpha: return "iir_fixed_alpha(" + format_alpha(alpha) + ")";
    case StrategyKind::previous_sample: return "previous_sample";
    case StrategyKind::perfect_prediction: return "perfect_prediction";
    case StrategyKind::fixed_rate: return "fixed_rate";
    }
    return "unknown";
}

Strategy Strategy::parse(const std::string& text) {
    if (text == "iir_optimal_alpha") return {StrategyKind::iir_optimal_alpha, 1.0};
    if (text == "previous_sample") return {StrategyKind::previous_sample, 1.0};
    if (text == "perfect_prediction") return {StrategyKind::perfect_prediction, 1.0};
    if (text == "fixed_rate") return {StrategyKind::fixed_rate, 1.0};
    const std::string prefix = "iir_fixed_alpha(";
    if (text.starts_with(prefix) && text.ends_with(")")) {
        const auto inner = text.substr(prefix.size(), text.size() - prefix.size() - 1);
        std::size_t used = 0;
        double alpha = 0.0;
        try {
            alpha = std::stod(inner, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != inner.size() || !(alpha >= 0.0 && alpha < 2.0)) {
            throw ConfigError("invalid alpha in strategy '" + text + "' (need 0 <= alpha < 2)");
        }
        return {StrategyKind::iir_fixed_alpha, alpha};
    }
    throw ConfigError("unknown strategy '" + text + "'");
}

std::vector<double> linspace(double first, double last, std::size_t count) {
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = first;
        return out;
    }
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = first + (last - first) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    return out;
}

ExperimentConfig ExperimentConfig::defaults_for(Experiment experiment) {
    ExperimentConfig c;
    c.alphas = linspace(0.02, 1.4, 40);
    c.sweep_delays = linspace(0.005, 0.05, 91);
    c.strategies = {Strategy::parse("perfect_prediction"), Strategy::parse("iir_optimal_alpha"),
                    Strategy::parse("previous_sample"), Strategy::parse("fixed_rate")};
    if (experiment == Experiment::throughput) c.snr_db = 5.0;
    return c;
}

fading::DopplerSpec ExperimentConfig::doppler() const {
    if (doppler_hz) return fading::DopplerSpec::from_doppler(*doppler_hz, carrier_hz);
    return fading::DopplerSpec::from_kmh(speed_kmh, carrier_hz);
}

double ExperimentConfig::snr() const { return std::pow(10.0, snr_db / 10.0); }

linkadapt::McsTable ExperimentConfig::table() const {
    if (!mcs_table) return linkadapt::McsTable::lte_default();
    try {
        return linkadapt::McsTable::load_csv(*mcs_table);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("MCS table: ") + e.what());
    }
}

void ExperimentConfig::validate(Experiment experiment) const {
    if (!(carrier_hz > 0.0)) throw ConfigError("carrier_hz must be positive");
    if (!(speed_kmh >= 0.0)) throw ConfigError("speed_kmh must be non-negative");
    if (doppler_hz && !(*doppler_hz >= 0.0)) throw ConfigError("doppler_hz must be non-negative");
    if (!std::isfinite(snr_db)) throw ConfigError("snr_db must be finite");
    if (regimes.empty()) throw ConfigError("at least one regime is required");

    if (experiment == Experiment::alpha_opt) {
        if (sweep_speeds_kmh.empty()) throw ConfigError("sweep_speeds_kmh must not be empty");
        for (double v : sweep_speeds_kmh) {
            if (!(v >= 0.0)) throw ConfigError("sweep_speeds_kmh entries must be non-negative");
        }
        if (sweep_delays.empty()) throw ConfigError("sweep_delays must not be empty");
        for (double d : sweep_delays) {
            if (!(d > 0.0)) throw ConfigError("sweep delays must be positive");
        }
        return;
    }

    if (delays.empty()) throw ConfigError("delays must not be empty");
    for (double d : delays) {
        if (!(d > 0.0) || !std::isfinite(d)) throw ConfigError("delays must be positive");
    }
    if (blocks < 10000) throw ConfigError("blocks must be at least 10000 (got " + std::to_string(blocks) + ")");
    if (seeds.empty()) throw ConfigError("seeds must not be empty");
    if (experiment == Experiment::mse_curves) {
        if (alphas.empty()) throw ConfigError("alpha grid must not be empty");
        for (double a : alphas) {
            if (!(a > 0.0 && a < 2.0)) throw ConfigError("alpha grid values must lie in (0, 2)");
        }
        for (double a : alphas) {
            if (predictor::default_warmup(a) >= blocks) {
                throw ConfigError("blocks too small for the warmup at alpha=" + format_alpha(a));
            }
        }
    }
    if (experiment == Experiment::throughput) {
        if (strategies.empty()) throw ConfigError("strategies must not be empty");
        (void)table();
    }
}

void apply_json(ExperimentConfig& config, const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");

    auto number = [](const nlohmann::json& v, const std::string& key) {
        if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
        return v.get<double>();
    };
    auto string = [](const nlohmann::json& v, const std::string& key) {
        if (!v.is_string()) throw ConfigError("config key '" + key + "' must be a string");
        return v.get<std::string>();
    };

    for (const auto& [key, value] : doc.items()) {
        try {
            if (key == "speed_kmh") config.speed_kmh = number(value, key);
            else if (key == "carrier_hz") config.carrier_hz = number(value, key);
            else if (key == "doppler_hz") config.doppler_hz = number(value, key);
            else if (key == "snr_db") config.snr_db = number(value, key);
            else if (key == "regimes") {
                if (!value.is_array()) throw ConfigError("config key 'regimes' must be an array");
                config.regimes.clear();
                for (const auto& r : value) config.regimes.push_back(fading::parse_regime(string(r, key)));
            } else if (key == "delays_s") config.delays = require_number_list(value, key);
            else if (key == "delays_ms") config.delays = scaled(require_number_list(value, key), 1e-3);
            else if (key == "alphas") config.alphas = require_number_list(value, key);
            else if (key == "alpha_grid") {
                if (!value.is_object() || !value.contains("min") || !value.contains("max") || !value.contains("count")) {
                    throw ConfigError("config key 'alpha_grid' needs min, max and count");
                }
                config.alphas = linspace(number(value["min"], key), number(value["max"], key),
                                         static_cast<std::size_t>(number(value["count"], key)));
            } else if (key == "blocks") {
                if (!value.is_number_unsigned()) throw ConfigError("config key 'blocks' must be a positive integer");
                config.blocks = value.get<std::size_t>();
            } else if (key == "seeds") {
                if (!value.is_array()) throw ConfigError("config key 'seeds' must be an array");
                config.seeds.clear();
                for (const auto& s : value) {
                    if (!s.is_number_unsigned()) throw ConfigError("seeds must be non-negative integers");
                    config.seeds.push_back(s.get<std::uint64_t>());
                }
            } else if (key == "mcs_table") config.mcs_table = string(value, key);
            else if (key == "strategies") {
                if (!value.is_array()) throw ConfigError("config key 'strategies' must be an array");
                config.strategies.clear();
                for (const auto& s : value) config.strategies.push_back(Strategy::parse(string(s, key)));
            } else if (key == "fixed_rate_convention") {
                config.convention = linkadapt::parse_convention(string(value, key));
            } else if (key == "weighting") {
                const auto w = string(value, key);
                if (w == "per_block") config.weighting = linkadapt::Weighting::per_block;
                else if (w == "per_time") config.weighting = linkadapt::Weighting::per_time;
                else throw ConfigError("weighting must be per_block or per_time");
            } else if (key == "sweep_speeds_kmh") config.sweep_speeds_kmh = require_number_list(value, key);
            else if (key == "sweep_delays_s") config.sweep_delays = require_number_list(value, key);
            else if (key == "sweep_delays_ms") config.sweep_delays = scaled(require_number_list(value, key), 1e-3);
            else if (key == "threads") {
                if (!value.is_number_unsigned()) throw ConfigError("config key 'threads' must be a non-negative integer");
                config.threads = value.get<unsigned>();
            } else throw ConfigError("unknown config key '" + key + "'");
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
}

void apply_json_file(ExperimentConfig& config, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    try {
        apply_json(config, text.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

MseCurveSet run_mse_curves(const ExperimentConfig& config) {
    config.validate(Experiment::mse_curves);
    const auto doppler = config.doppler();
    const double snr = config.snr();
    const std::size_t n_delays = config.delays.size();
    const std::size_t n_seeds = config.seeds.size();
    const std::size_t n_alphas = config.alphas.size();

    struct CellSums {
        std::vector<double> sse;
        std::vector<double> count;
    };
    const std::size_t n_cells = config.regimes.size() * n_delays * n_seeds;
    std::vector<CellSums> cells(n_cells);

    parallel_for(n_cells, config.threads, [&](std::size_t idx) {
        const std::size_t s = idx % n_seeds;
        const std::size_t d = (idx / n_seeds) % n_delays;
        const std::size_t r = idx / (n_seeds * n_delays);
        const auto seed = config.seeds[s];
        const auto schedule = fading::make_schedule(config.regimes[r], config.delays[d], config.blocks, seed);
        const auto trace = fading::generate_trace(schedule, doppler, seed);
        const auto gamma = fading::power_trace(trace, snr);

        CellSums sums{std::vector<double>(n_alphas), std::vector<double>(n_alphas)};
        for (std::size_t a = 0; a < n_alphas; ++a) {
            const double alpha = config.alphas[a];
            const auto pred = predictor::iir_predict(gamma, alpha, snr);
            const auto warmup = predictor::default_warmup(alpha);
            const double n = static_cast<double>(gamma.size() - warmup);
            sums.sse[a] = predictor::empirical_mse(pred, gamma.powers, warmup) * n;
            sums.count[a] = n;
        }
        cells[idx] = std::move(sums);
    });

    MseCurveSet out;
    for (std::size_t r = 0; r < config.regimes.size(); ++r) {
        const Regime regime = config.regimes[r];
        for (std::size_t d = 0; d < n_delays; ++d) {
            const double delay = config.delays[d];
            const auto curve = theory::mse_curve(regime, doppler, delay, snr, config.alphas);
            for (std::size_t a = 0; a < n_alphas; ++a) {
                double sse = 0.0;
                double count = 0.0;
                for (std::size_t s = 0; s < n_seeds; ++s) {
                    const auto& cell = cells[(r * n_delays + d) * n_seeds + s];
                    sse += cell.sse[a];
                    count += cell.count[a];
                }
                out.rows.push_back({regime, delay, config.alphas[a], curve.mse_values[a], sse / count,
                                    theory::variance_floor(snr)});
            }
            const double alpha_opt = clipped_alpha_opt(regime, doppler, delay);
            const double mse_min = alpha_opt > 0.0
                                       ? theory::mse_from_rho_sq(alpha_opt, rho_sq_for(regime, doppler, delay), snr)
                                       : theory::variance_floor(snr);
            out.minima.push_back({regime, delay, alpha_opt, mse_min, theory::variance_floor(snr)});
        }
    }
    return out;
}

std::vector<AlphaOptRow> run_alpha_opt_sweep(const ExperimentConfig& config) {
    config.validate(Experiment::alpha_opt);
    std::vector<AlphaOptRow> rows;
    for (const Regime regime : config.regimes) {
        for (const double speed : config.sweep_speeds_kmh) {
            const auto doppler = fading::DopplerSpec::from_kmh(speed, config.carrier_hz);
            for (const double delay : config.sweep_delays) {
                const double alpha = clipped_alpha_opt(regime, doppler, delay);
                const double h = std::min(1e-5, 0.5 * delay);
                const double slope = (clipped_alpha_opt(regime, doppler, delay + h) -
                                      clipped_alpha_opt(regime, doppler, delay - h)) /
                                     (2.0 * h);
                rows.push_back({regime, doppler.doppler(), delay, alpha, std::abs(slope)});
            }
        }
    }
    return rows;
}

std::vector<ThroughputRow> run_throughput(const ExperimentConfig& config) {
    config.validate(Experiment::throughput);
    const auto doppler = config.doppler();
    const double snr = config.snr();
    const auto table = config.table();
    const std::size_t fixed_index = linkadapt::fixed_rate_index(snr, table, config.convention);
    const std::size_t n_delays = config.delays.size();
    const std::size_t n_seeds = config.seeds.size();
    const std::size_t n_strat = config.strategies.size();
    const std::size_t n_cells = config.regimes.size() * n_delays * n_seeds;

    std::vector<std::vector<double>> cells(n_cells);
    parallel_for(n_cells, config.threads, [&](std::size_t idx) {
        const std::size_t s = idx % n_seeds;
        const std::size_t d = (idx / n_seeds) % n_delays;
        const Regime regime = config.regimes[idx / (n_seeds * n_delays)];
        const double delay = config.delays[d];
        const auto seed = config.seeds[s];
        const auto schedule = fading::make_schedule(regime, delay, config.blocks, seed);
        const auto trace = fading::generate_trace(schedule, doppler, seed);
        const auto gamma = fading::power_trace(trace, snr);
        const auto& powers = gamma.powers;
        const double alpha_opt = clipped_alpha_opt(regime, doppler, delay);

        auto alpha_of = [&](const Strategy& st) {
            switch (st.kind) {
            case StrategyKind::iir_optimal_alpha: return alpha_opt;
            case StrategyKind::iir_fixed_alpha: return st.alpha;
            default: return 1.0;
            }
        };
        // One warmup shared by every strategy so they are scored on the same blocks.
        std::size_t warmup = 1000;
        for (const auto& st : config.strategies) warmup = std::max(warmup, predictor::default_warmup(alpha_of(st)));
        if (warmup + 2 > powers.size()) throw ConfigError("blocks too small for the predictor warmup");

        std::vector<double> results(n_strat);
        std::vector<linkadapt::BlockOutcome> outcomes(powers.size() - warmup);
        for (std::size_t k = 0; k < n_strat; ++k) {
            const auto& st = config.strategies[k];
            std::vector<double> predicted;
            switch (st.kind) {
            case StrategyKind::perfect_prediction: predicted = powers; break;
            case StrategyKind::previous_sample:
                predicted.resize(powers.size());
                predicted[0] = snr;
                std::copy(powers.begin(), powers.end() - 1, predicted.begin() + 1);
                break;
            case StrategyKind::fixed_rate: break;
            default: predicted = predictor::iir_predict(gamma, alpha_of(st), snr); break;
            }
            for (std::size_t l = warmup; l < powers.size(); ++l) {
                const bool fixed = st.kind == StrategyKind::fixed_rate;
                const double p = fixed ? std::numeric_limits<double>::quiet_NaN() : predicted[l];
                const std::size_t j = fixed ? fixed_index : linkadapt::select_mcs(p, table);
                outcomes[l - warmup] = linkadapt::evaluate_block(powers[l], j, table, p);
            }
            results[k] = linkadapt::throughput(
                outcomes, config.weighting,
                std::span<const double>(schedule.instants).subspan(warmup));
        }
        cells[idx] = std::move(results);
    });

    std::vector<ThroughputRow> rows;
    for (std::size_t r = 0; r < config.regimes.size(); ++r) {
        for (std::size_t d = 0; d < n_delays; ++d) {
            for (std::size_t k = 0; k < n_strat; ++k) {
                ThroughputRow row{config.regimes[r], config.delays[d], config.strategies[k], 0.0, 0.0, {}};
                for (std::size_t s = 0; s < n_seeds; ++s) {
                    row.per_seed.push_back(cells[(r * n_delays + d) * n_seeds + s][k]);
                }
                double sum = 0.0;
                for (double v : row.per_seed) sum += v;
                const double n = static_cast<double>(n_seeds);
                row.mean = sum / n;
                if (n_seeds > 1) {
                    double ss = 0.0;
                    for (double v : row.per_seed) ss += (v - row.mean) * (v - row.mean);
                    row.ci_half_width = kCi95 * std::sqrt(ss / (n - 1.0) / n);
                } else {
                    row.ci_half_width = std::numeric_limits<double>::quiet_NaN();
                }
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

csv::Table to_table(const std::vector<MseCurveRow>& rows) {
    csv::Table t{{"regime", "delay_s", "alpha", "mse_analytic", "mse_empirical", "variance_floor"}, {}};
    for (const auto& r : rows) {
        t.rows.push_back({fading::to_string(r.regime), csv::format_double(r.delay), csv::format_double(r.alpha),
                          csv::format_double(r.mse_analytic), csv::format_double(r.mse_empirical),
                          csv::format_double(r.variance_floor)});
    }
    return t;
}

csv::Table to_table(const std::vector<MseMinimum>& rows) {
    csv::Table t{{"regime", "delay_s", "alpha_opt", "mse_min", "variance_floor"}, {}};
    for (const auto& r : rows) {
        t.rows.push_back({fading::to_string(r.regime), csv::format_double(r.delay), csv::format_double(r.alpha_opt),
                          csv::format_double(r.mse_min), csv::format_double(r.variance_floor)});
    }
    return t;
}

csv::Table to_table(const std::vector<AlphaOptRow>& rows) {
    csv::Table t{{"regime", "fd_hz", "delay_s", "alpha_opt", "sensitivity"}, {}};
    for (const auto& r : rows) {
        t.rows.push_back({fading::to_string(r.regime), csv::format_double(r.doppler_hz), csv::format_double(r.delay),
                          csv::format_double(r.alpha_opt), csv::format_double(r.sensitivity)});
    }
    return t;
}

csv::Table to_table(const std::vector<ThroughputRow>& rows) {
    csv::Table t{{"regime", "delay_s", "strategy", "throughput_mean", "ci_half_width"}, {}};
    for (const auto& r : rows) {
        t.rows.push_back({fading::to_string(r.regime), csv::format_double(r.delay), r.strategy.name(),
                          csv::format_double(r.mean), csv::format_double(r.ci_half_width)});
    }
    return t;
}

void emit_csv(const csv::Table& table, const std::filesystem::path& path) {
    csv::write(table, path);
}

} // namespace cqipred::harness

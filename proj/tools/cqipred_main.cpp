// Command-line front end: reproduces the MSE, optimum-alpha and throughput
// studies as CSV files.

#include "cqipred/fading.hpp"
#include "cqipred/harness.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

namespace {

using cqipred::harness::Experiment;
using cqipred::harness::ExperimentConfig;

struct Overrides {
    std::string config_path;
    std::vector<std::uint64_t> seeds;
    std::size_t blocks = 0;
    std::string out_dir = "results";
    unsigned threads = 0;
    bool threads_set = false;
    std::optional<double> snr_db;
    std::optional<double> speed_kmh;
    std::optional<double> carrier_hz;
    std::optional<double> doppler_hz;
    std::vector<std::string> regimes;
    std::vector<double> delays_ms;
    std::string mcs_table;
    std::string convention;
    std::string weighting;
    std::vector<std::string> strategies;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("-c,--config", o.config_path, "JSON config file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seeds, "One or more seeds");
    cmd->add_option("--blocks", o.blocks, "Blocks per trace");
    cmd->add_option("--out-dir", o.out_dir, "Output directory")->capture_default_str();
    cmd->add_option("--threads", o.threads, "Worker threads (0: all cores)");
    cmd->add_option("--snr-db", o.snr_db, "SNR in dB");
    cmd->add_option("--speed-kmh", o.speed_kmh, "Terminal speed in km/h");
    cmd->add_option("--carrier-hz", o.carrier_hz, "Carrier frequency in Hz");
    cmd->add_option("--doppler-hz", o.doppler_hz, "Doppler bandwidth in Hz (overrides speed)");
    cmd->add_option("--regime", o.regimes, "fixed and/or random");
    cmd->add_option("--delays-ms", o.delays_ms, "Block spacing values in ms");
    cmd->add_option("--mcs-table", o.mcs_table, "MCS table CSV (threshold_db,rate_bps_hz)");
    cmd->add_option("--fixed-rate-convention", o.convention, "rayleigh (default) or paper");
    cmd->add_option("--weighting", o.weighting, "per_block (default) or per_time");
    cmd->add_option("--strategy", o.strategies, "Throughput strategies");
}

ExperimentConfig build_config(Experiment experiment, const Overrides& o, const CLI::App& cmd) {
    auto config = ExperimentConfig::defaults_for(experiment);
    if (!o.config_path.empty()) cqipred::harness::apply_json_file(config, o.config_path);
    if (!o.seeds.empty()) config.seeds = o.seeds;
    if (cmd.count("--blocks")) config.blocks = o.blocks;
    if (cmd.count("--threads")) config.threads = o.threads;
    if (o.snr_db) config.snr_db = *o.snr_db;
    if (o.speed_kmh) config.speed_kmh = *o.speed_kmh;
    if (o.carrier_hz) config.carrier_hz = *o.carrier_hz;
    if (o.doppler_hz) config.doppler_hz = *o.doppler_hz;
    if (!o.regimes.empty()) {
        config.regimes.clear();
        for (const auto& r : o.regimes) config.regimes.push_back(cqipred::fading::parse_regime(r));
    }
    if (!o.delays_ms.empty()) {
        config.delays.clear();
        for (double d : o.delays_ms) config.delays.push_back(d * 1e-3);
    }
    if (!o.mcs_table.empty()) config.mcs_table = o.mcs_table;
    if (!o.convention.empty()) config.convention = cqipred::linkadapt::parse_convention(o.convention);
    if (o.weighting == "per_time") config.weighting = cqipred::linkadapt::Weighting::per_time;
    else if (o.weighting == "per_block") config.weighting = cqipred::linkadapt::Weighting::per_block;
    else if (!o.weighting.empty()) throw cqipred::harness::ConfigError("weighting must be per_block or per_time");
    if (!o.strategies.empty()) {
        config.strategies.clear();
        for (const auto& s : o.strategies) config.strategies.push_back(cqipred::harness::Strategy::parse(s));
    }
    return config;
}

void run_mse(const ExperimentConfig& config, const std::filesystem::path& out) {
    const auto result = cqipred::harness::run_mse_curves(config);
    cqipred::harness::emit_csv(cqipred::harness::to_table(result.rows), out / "mse_curves.csv");
    cqipred::harness::emit_csv(cqipred::harness::to_table(result.minima), out / "mse_minima.csv");
    std::cout << "wrote " << (out / "mse_curves.csv").string() << " and "
              << (out / "mse_minima.csv").string() << '\n';
}

void run_alpha(const ExperimentConfig& config, const std::filesystem::path& out) {
    const auto rows = cqipred::harness::run_alpha_opt_sweep(config);
    cqipred::harness::emit_csv(cqipred::harness::to_table(rows), out / "alpha_opt.csv");
    std::cout << "wrote " << (out / "alpha_opt.csv").string() << '\n';
}

void run_tput(const ExperimentConfig& config, const std::filesystem::path& out) {
    const auto rows = cqipred::harness::run_throughput(config);
    cqipred::harness::emit_csv(cqipred::harness::to_table(rows), out / "throughput.csv");
    std::cout << "wrote " << (out / "throughput.csv").string() << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Channel-power prediction under fixed and random feedback delays"};
    app.require_subcommand(1);

    Overrides mse_o, alpha_o, tput_o, all_o;
    auto* mse = app.add_subcommand("mse-curves", "Analytic and simulated MSE versus alpha");
    add_common(mse, mse_o);
    auto* alpha = app.add_subcommand("alpha-opt", "Optimum alpha versus delay for several speeds");
    add_common(alpha, alpha_o);
    auto* tput = app.add_subcommand("throughput", "Monte Carlo adaptive-MCS throughput");
    add_common(tput, tput_o);
    auto* all = app.add_subcommand("reproduce-all", "Run all three studies");
    add_common(all, all_o);

    auto* dump = app.add_subcommand("dump-trace", "Write one fading trace as CSV");
    std::string regime = "fixed";
    double interval_ms = 10.0;
    std::size_t count = 1000;
    std::uint64_t seed = 1;
    double speed_kmh = 3.0;
    double carrier_hz = 2e9;
    std::string out_file;
    dump->add_option("--regime", regime, "fixed or random")->capture_default_str();
    dump->add_option("--interval-ms", interval_ms, "T_s or mean interval in ms")->capture_default_str();
    dump->add_option("--count", count, "Number of samples")->capture_default_str();
    dump->add_option("--seed", seed)->capture_default_str();
    dump->add_option("--speed-kmh", speed_kmh)->capture_default_str();
    dump->add_option("--carrier-hz", carrier_hz)->capture_default_str();
    dump->add_option("-o,--out", out_file, "Output file (stdout when omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (mse->parsed()) {
            run_mse(build_config(Experiment::mse_curves, mse_o, *mse), mse_o.out_dir);
        } else if (alpha->parsed()) {
            run_alpha(build_config(Experiment::alpha_opt, alpha_o, *alpha), alpha_o.out_dir);
        } else if (tput->parsed()) {
            run_tput(build_config(Experiment::throughput, tput_o, *tput), tput_o.out_dir);
        } else if (all->parsed()) {
            const std::filesystem::path out = all_o.out_dir;
            run_mse(build_config(Experiment::mse_curves, all_o, *all), out);
            run_alpha(build_config(Experiment::alpha_opt, all_o, *all), out);
            run_tput(build_config(Experiment::throughput, all_o, *all), out);
        } else if (dump->parsed()) {
            const auto schedule = cqipred::fading::make_schedule(cqipred::fading::parse_regime(regime),
                                                                 interval_ms * 1e-3, count, seed);
            const auto trace = cqipred::fading::generate_trace(
                schedule, cqipred::fading::DopplerSpec::from_kmh(speed_kmh, carrier_hz), seed);
            if (out_file.empty()) {
                cqipred::fading::write_trace_csv(trace, std::cout);
            } else {
                std::ofstream out(out_file);
                if (!out) throw std::runtime_error("cannot open " + out_file + " for writing");
                cqipred::fading::write_trace_csv(trace, out);
            }
        }
    } catch (const cqipred::harness::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

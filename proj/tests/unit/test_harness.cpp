#include "cqipred/harness.hpp"
#include "cqipred/theory.hpp"

#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cqipred;
using namespace cqipred::harness;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "cqipred_harness_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

ExperimentConfig small_throughput() {
    auto c = ExperimentConfig::defaults_for(Experiment::throughput);
    c.blocks = 20000;
    c.seeds = {3, 4, 5};
    c.delays = {0.01, 0.03};
    return c;
}

const ThroughputRow& find(const std::vector<ThroughputRow>& rows, fading::Regime regime, double delay,
                          const std::string& strategy) {
    for (const auto& r : rows)
        if (r.regime == regime && r.delay == delay && r.strategy.name() == strategy) return r;
    throw std::runtime_error("row not found: " + strategy);
}

} // namespace

TEST_CASE("defaults follow the reference operating points") {
    const auto mse = ExperimentConfig::defaults_for(Experiment::mse_curves);
    CHECK(mse.snr_db == 0.0);
    CHECK(mse.blocks == 200000);
    CHECK(mse.seeds.size() == 8);
    REQUIRE(mse.alphas.size() == 40);
    CHECK(mse.alphas.front() == doctest::Approx(0.02));
    CHECK(mse.alphas.back() == doctest::Approx(1.4));
    CHECK(mse.delays == std::vector<double>{0.01, 0.02, 0.03, 0.04});
    CHECK(mse.doppler().doppler() == doctest::Approx(5.5556).epsilon(1e-5));
    CHECK_NOTHROW(mse.validate(Experiment::mse_curves));

    const auto tput = ExperimentConfig::defaults_for(Experiment::throughput);
    CHECK(tput.snr_db == 5.0);
    CHECK(tput.snr() == doctest::Approx(3.1623).epsilon(1e-4));
    CHECK(tput.strategies.size() == 4);
    CHECK(tput.table().size() == 15);
}

TEST_CASE("linspace") {
    CHECK(linspace(0.0, 1.0, 5) == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK(linspace(2.0, 3.0, 1) == std::vector<double>{2.0});
}

TEST_CASE("strategy names round-trip") {
    for (const std::string s : {"iir_optimal_alpha", "previous_sample", "perfect_prediction", "fixed_rate",
                                "iir_fixed_alpha(0.5)", "iir_fixed_alpha(1)", "iir_fixed_alpha(0.25)"}) {
        CHECK(Strategy::parse(s).name() == s);
    }
    CHECK(Strategy::parse("iir_fixed_alpha(0.5)").alpha == 0.5);
    CHECK_THROWS_AS(Strategy::parse("kalman"), ConfigError);
    CHECK_THROWS_AS(Strategy::parse("iir_fixed_alpha(2)"), ConfigError);
    CHECK_THROWS_AS(Strategy::parse("iir_fixed_alpha(x)"), ConfigError);
    CHECK_THROWS_AS(Strategy::parse("iir_fixed_alpha(0.5"), ConfigError);
}

TEST_CASE("JSON overlay") {
    auto c = ExperimentConfig::defaults_for(Experiment::mse_curves);
    apply_json(c, R"({"speed_kmh": 10, "delays_ms": [5, 15], "seeds": [9], "blocks": 50000,
                      "regimes": ["random"], "alpha_grid": {"min": 0.1, "max": 0.5, "count": 3},
                      "weighting": "per_time", "fixed_rate_convention": "paper",
                      "strategies": ["previous_sample"], "threads": 2})");
    CHECK(c.speed_kmh == 10.0);
    REQUIRE(c.delays.size() == 2);
    CHECK(c.delays[0] == doctest::Approx(0.005));
    CHECK(c.seeds == std::vector<std::uint64_t>{9});
    CHECK(c.blocks == 50000);
    CHECK(c.regimes == std::vector<fading::Regime>{fading::Regime::random});
    CHECK(c.alphas.size() == 3);
    CHECK(c.alphas[1] == doctest::Approx(0.3));
    CHECK(c.weighting == linkadapt::Weighting::per_time);
    CHECK(c.convention == linkadapt::FixedRateConvention::paper);
    CHECK(c.strategies.size() == 1);
    CHECK(c.threads == 2);

    apply_json(c, R"({"doppler_hz": 12.5, "delays_s": [0.02]})");
    CHECK(c.doppler().doppler() == doctest::Approx(12.5));
    CHECK(c.delays == std::vector<double>{0.02});
}

TEST_CASE("JSON errors are configuration errors") {
    auto c = ExperimentConfig::defaults_for(Experiment::mse_curves);
    CHECK_THROWS_AS(apply_json(c, "{"), ConfigError);
    CHECK_THROWS_AS(apply_json(c, "[1, 2]"), ConfigError);
    CHECK_THROWS_AS(apply_json(c, R"({"speed": 3})"), ConfigError);
    CHECK_THROWS_AS(apply_json(c, R"({"speed_kmh": "fast"})"), ConfigError);
    CHECK_THROWS_AS(apply_json(c, R"({"regimes": ["sometimes"]})"), ConfigError);
    CHECK_THROWS_AS(apply_json(c, R"({"blocks": -4})"), ConfigError);
    CHECK_THROWS_AS(apply_json(c, R"({"weighting": "per_symbol"})"), ConfigError);
    CHECK_THROWS_AS(apply_json_file(c, "/nonexistent/config.json"), ConfigError);
}

TEST_CASE("validation") {
    auto base = ExperimentConfig::defaults_for(Experiment::mse_curves);
    auto c = base;
    c.blocks = 9999;
    CHECK_THROWS_AS(c.validate(Experiment::mse_curves), ConfigError);
    c = base;
    c.seeds.clear();
    CHECK_THROWS_AS(c.validate(Experiment::mse_curves), ConfigError);
    c = base;
    c.delays = {0.01, 0.0};
    CHECK_THROWS_AS(c.validate(Experiment::mse_curves), ConfigError);
    c = base;
    c.alphas = {0.5, 2.0};
    CHECK_THROWS_AS(c.validate(Experiment::mse_curves), ConfigError);
    c = base;
    c.carrier_hz = 0.0;
    CHECK_THROWS_AS(c.validate(Experiment::mse_curves), ConfigError);

    auto t = ExperimentConfig::defaults_for(Experiment::throughput);
    t.mcs_table = "/nonexistent/table.csv";
    CHECK_THROWS_AS(t.table(), ConfigError);
}

TEST_CASE("mse curves agree with the closed form and report minima") {
    auto c = ExperimentConfig::defaults_for(Experiment::mse_curves);
    c.seeds = {1, 2};
    c.blocks = 100000;
    c.alphas = {0.2, 0.6, 1.0};
    c.delays = {0.01, 0.03, 0.04};
    const auto result = run_mse_curves(c);
    REQUIRE(result.rows.size() == 2 * 3 * 3);
    for (const auto& r : result.rows) {
        CAPTURE(r.delay);
        CAPTURE(r.alpha);
        CHECK(r.variance_floor == 1.0);
        CHECK(std::abs(r.mse_empirical / r.mse_analytic - 1.0) < 0.08);
    }
    REQUIRE(result.minima.size() == 6);
    for (const auto& m : result.minima) {
        if (m.regime == fading::Regime::fixed && m.delay == 0.03) CHECK(m.mse_min == doctest::Approx(0.82).epsilon(0.025));
        if (m.regime == fading::Regime::fixed && m.delay == 0.04) {
            CHECK(m.alpha_opt == 0.0);
            CHECK(m.mse_min == 1.0);
        }
        if (m.regime == fading::Regime::random && m.delay == 0.04) CHECK(m.mse_min == doctest::Approx(0.84).epsilon(0.035));
    }
}

TEST_CASE("alpha sweep") {
    auto c = ExperimentConfig::defaults_for(Experiment::alpha_opt);
    c.sweep_speeds_kmh = {3.0};
    c.sweep_delays = {0.0001, 0.03, 0.04};
    const auto rows = run_alpha_opt_sweep(c);
    REQUIRE(rows.size() == 6);
    double fixed_slope = 0.0;
    double random_slope = 0.0;
    for (const auto& r : rows) {
        if (r.delay == 0.0001) CHECK(r.alpha_opt == doctest::Approx(1.0).epsilon(1e-3));
        if (r.regime == fading::Regime::fixed && r.delay == 0.04) CHECK(r.alpha_opt == 0.0);
        if (r.delay == 0.03) (r.regime == fading::Regime::fixed ? fixed_slope : random_slope) = r.sensitivity;
        CHECK(r.doppler_hz == doctest::Approx(5.5556).epsilon(1e-5));
    }
    CHECK(fixed_slope > random_slope);
    CHECK(random_slope > 0.0);
}

TEST_CASE("previous_sample and iir_fixed_alpha(1) are the same strategy") {
    auto c = small_throughput();
    c.strategies = {Strategy::parse("previous_sample"), Strategy::parse("iir_fixed_alpha(1)")};
    const auto rows = run_throughput(c);
    REQUIRE(rows.size() == 8);
    for (std::size_t i = 0; i < rows.size(); i += 2) CHECK(rows[i].per_seed == rows[i + 1].per_seed);
}

TEST_CASE("throughput ordering at short delay") {
    const auto rows = run_throughput(small_throughput());
    REQUIRE(rows.size() == 2 * 2 * 4);
    for (auto regime : {fading::Regime::fixed, fading::Regime::random}) {
        for (double d : {0.01, 0.03}) {
            const auto& perfect = find(rows, regime, d, "perfect_prediction");
            for (const auto& r : rows) {
                if (r.regime == regime && r.delay == d) CHECK(perfect.mean >= r.mean - r.ci_half_width);
                CHECK(r.per_seed.size() == 3);
                CHECK(r.ci_half_width >= 0.0);
            }
        }
        const auto& opt = find(rows, regime, 0.01, "iir_optimal_alpha");
        const auto& prev = find(rows, regime, 0.01, "previous_sample");
        CHECK(std::abs(opt.mean / prev.mean - 1.0) < 0.03);
    }
    // Constant MCS choice: every seed gives the same index, so the ratio to
    // the closed form only reflects Monte Carlo noise.
    const auto& fixed = find(rows, fading::Regime::fixed, 0.01, "fixed_rate");
    const auto table = linkadapt::McsTable::lte_default();
    const double snr = std::pow(10.0, 0.5);
    const double expected = linkadapt::expected_fixed_rate(snr, linkadapt::fixed_rate_index(snr, table), table);
    CHECK(std::abs(fixed.mean / expected - 1.0) < 0.05);
}

TEST_CASE("per-time weighting divides by the block spacing") {
    auto c = small_throughput();
    c.regimes = {fading::Regime::fixed};
    c.delays = {0.02};
    const auto block = run_throughput(c);
    c.weighting = linkadapt::Weighting::per_time;
    const auto time = run_throughput(c);
    for (std::size_t i = 0; i < block.size(); ++i) CHECK(time[i].mean == doctest::Approx(block[i].mean / 0.02).epsilon(1e-9));
}

TEST_CASE("results are deterministic and independent of thread count") {
    auto c = small_throughput();
    c.threads = 1;
    const auto one = run_throughput(c);
    c.threads = 7;
    const auto many = run_throughput(c);
    REQUIRE(one.size() == many.size());
    for (std::size_t i = 0; i < one.size(); ++i) CHECK(one[i].per_seed == many[i].per_seed);

    const auto a = scratch("a/throughput.csv");
    const auto b = scratch("b/throughput.csv");
    emit_csv(to_table(one), a);
    emit_csv(to_table(many), b);
    CHECK(slurp(a) == slurp(b));

    auto m = ExperimentConfig::defaults_for(Experiment::mse_curves);
    m.blocks = 10000;
    m.seeds = {1, 2};
    m.alphas = {0.3, 0.9};
    m.threads = 1;
    const auto x = run_mse_curves(m);
    m.threads = 3;
    const auto y = run_mse_curves(m);
    emit_csv(to_table(x.rows), a);
    emit_csv(to_table(y.rows), b);
    CHECK(slurp(a) == slurp(b));
}

TEST_CASE("seed 1 differs from seed 2") {
    auto c = small_throughput();
    c.seeds = {1, 2};
    const auto rows = run_throughput(c);
    CHECK(rows[1].per_seed[0] != rows[1].per_seed[1]);
}

TEST_CASE("CSV schemas") {
    const auto header_of = [](const csv::Table& t) {
        std::string h;
        for (const auto& c : t.header) h += (h.empty() ? "" : ",") + c;
        return h;
    };
    CHECK(header_of(to_table(std::vector<MseCurveRow>{})) == "regime,delay_s,alpha,mse_analytic,mse_empirical,variance_floor");
    CHECK(header_of(to_table(std::vector<AlphaOptRow>{})) == "regime,fd_hz,delay_s,alpha_opt,sensitivity");
    CHECK(header_of(to_table(std::vector<ThroughputRow>{})) == "regime,delay_s,strategy,throughput_mean,ci_half_width");

    const auto empty = scratch("empty/alpha_opt.csv");
    emit_csv(to_table(std::vector<AlphaOptRow>{}), empty);
    CHECK(slurp(empty) == "regime,fd_hz,delay_s,alpha_opt,sensitivity\n");

    const std::vector<AlphaOptRow> one{{fading::Regime::random, 5.555555555555555, 0.1, 1.0 / 3.0, 0.0}};
    emit_csv(to_table(one), empty);
    const auto back = csv::read(empty);
    REQUIRE(back.rows.size() == 1);
    CHECK(back.rows[0][0] == "random");
    CHECK(std::stod(back.rows[0][3]) == 1.0 / 3.0);
    CHECK(std::stod(back.rows[0][1]) == 5.555555555555555);
}

TEST_CASE("emit_csv reports the failing path") {
    const auto blocker = scratch("blocker");
    std::ofstream(blocker) << "x";
    try {
        emit_csv(to_table(std::vector<AlphaOptRow>{}), blocker / "inner" / "out.csv");
        FAIL("expected an exception");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("blocker") != std::string::npos);
    }
}

#include "cqipred/fading.hpp"
#include "cqipred/harness.hpp"
#include "cqipred/linkadapt.hpp"
#include "cqipred/predictor.hpp"
#include "cqipred/specfun.hpp"
#include "cqipred/theory.hpp"

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace cqipred;

namespace {

template <typename T>
py::array_t<T> to_array(const std::vector<T>& v) {
    return py::array_t<T>(static_cast<py::ssize_t>(v.size()), v.data());
}

std::vector<double> as_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 1) throw std::invalid_argument("expected a one-dimensional array");
    return {a.data(), a.data() + a.size()};
}

fading::Regime regime_of(const std::string& s) { return fading::parse_regime(s); }

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Channel-power prediction under fixed and random feedback delays";

    py::register_exception<specfun::NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<harness::ConfigError>(m, "ConfigError", PyExc_ValueError);

    // specfun
    m.def("bessel_j0", &specfun::bessel_j0, py::arg("x"));
    m.def("elliptic_k", &specfun::elliptic_k, py::arg("m"));
    m.def("exp_weighted_mean", &specfun::exp_weighted_mean, py::arg("f"), py::arg("mean_interval"),
          py::arg("rel_tol") = 1e-8);

    // fading
    py::class_<fading::DopplerSpec>(m, "DopplerSpec")
        .def(py::init<double, double>(), py::arg("speed_mps"), py::arg("carrier_hz"))
        .def_static("from_kmh", &fading::DopplerSpec::from_kmh, py::arg("speed_kmh"), py::arg("carrier_hz"))
        .def_static("from_doppler", &fading::DopplerSpec::from_doppler, py::arg("doppler_hz"),
                    py::arg("carrier_hz") = 2e9)
        .def_property_readonly("speed", &fading::DopplerSpec::speed)
        .def_property_readonly("carrier", &fading::DopplerSpec::carrier)
        .def_property_readonly("doppler", &fading::DopplerSpec::doppler);

    py::class_<fading::ArrivalSchedule>(m, "ArrivalSchedule")
        .def_property_readonly("regime", [](const fading::ArrivalSchedule& s) { return fading::to_string(s.regime); })
        .def_readonly("interval", &fading::ArrivalSchedule::interval)
        .def_property_readonly("instants", [](const fading::ArrivalSchedule& s) { return to_array(s.instants); })
        .def_property_readonly("gaps", [](const fading::ArrivalSchedule& s) { return to_array(s.gaps); })
        .def("__len__", &fading::ArrivalSchedule::size);

    py::class_<fading::ChannelTrace>(m, "ChannelTrace")
        .def_readonly("schedule", &fading::ChannelTrace::schedule)
        .def_readonly("doppler", &fading::ChannelTrace::doppler)
        .def_property_readonly("gains", [](const fading::ChannelTrace& t) { return to_array(t.gains); })
        .def_property_readonly("rhos", [](const fading::ChannelTrace& t) { return to_array(t.rhos); })
        .def_property_readonly("innovations", [](const fading::ChannelTrace& t) { return to_array(t.innovations); })
        .def("__len__", &fading::ChannelTrace::size);

    py::class_<fading::PowerTrace>(m, "PowerTrace")
        .def_readonly("schedule", &fading::PowerTrace::schedule)
        .def_readonly("snr", &fading::PowerTrace::snr)
        .def_property_readonly("powers", [](const fading::PowerTrace& t) { return to_array(t.powers); })
        .def("__len__", &fading::PowerTrace::size);

    m.def("make_schedule",
          [](const std::string& regime, double interval, std::size_t count, std::uint64_t seed) {
              return fading::make_schedule(regime_of(regime), interval, count, seed);
          },
          py::arg("regime"), py::arg("interval"), py::arg("count"), py::arg("seed") = 1);
    m.def("generate_trace", &fading::generate_trace, py::arg("schedule"), py::arg("doppler"), py::arg("seed") = 1);
    m.def("power_trace", &fading::power_trace, py::arg("trace"), py::arg("snr"));
    m.def("empirical_autocorr", &fading::empirical_autocorr, py::arg("trace"), py::arg("lag"));

    // predictor
    m.def("iir_predict",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& p, double alpha, double init) {
              return to_array(predictor::iir_predict(as_vector(p), alpha, init));
          },
          py::arg("powers"), py::arg("alpha"), py::arg("init"));
    m.def("impulse_response_predict",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& p, double alpha,
             std::size_t truncation) {
              return to_array(predictor::impulse_response_predict(as_vector(p), alpha, truncation));
          },
          py::arg("powers"), py::arg("alpha"), py::arg("truncation"));
    m.def("amplitude_predict_power",
          [](const fading::ChannelTrace& t, double alpha, std::complex<double> init) {
              return to_array(predictor::amplitude_predict_power(t, alpha, init));
          },
          py::arg("trace"), py::arg("alpha"), py::arg("init") = std::complex<double>{});
    m.def("empirical_mse",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& pred,
             const py::array_t<double, py::array::c_style | py::array::forcecast>& actual, std::size_t warmup) {
              return predictor::empirical_mse(as_vector(pred), as_vector(actual), warmup);
          },
          py::arg("predictions"), py::arg("actuals"), py::arg("warmup") = 0);
    m.def("bias_factor_closed_form", &predictor::bias_factor_closed_form, py::arg("alpha"), py::arg("rho"));

    // theory
    m.def("rho_fixed", &theory::rho_fixed, py::arg("doppler"), py::arg("ts"));
    m.def("mean_rho", &theory::mean_rho, py::arg("doppler"), py::arg("tbar"));
    m.def("mean_rho_sq", &theory::mean_rho_sq, py::arg("doppler"), py::arg("tbar"));
    m.def("mse_fixed", &theory::mse_fixed, py::arg("alpha"), py::arg("rho"), py::arg("snr"));
    m.def("mse_random", &theory::mse_random, py::arg("alpha"), py::arg("doppler"), py::arg("tbar"), py::arg("snr"));
    m.def("alpha_opt_fixed", &theory::alpha_opt_fixed, py::arg("rho"));
    m.def("alpha_opt_random", &theory::alpha_opt_random, py::arg("doppler"), py::arg("tbar"));
    m.def("alpha_opt_numeric", &theory::alpha_opt_numeric, py::arg("mse"));
    m.def("power_correlation", &theory::power_correlation, py::arg("h_corr_sq"), py::arg("snr"));

    // linkadapt
    py::class_<linkadapt::McsTable>(m, "McsTable")
        .def(py::init([](const std::vector<double>& thresholds, const std::vector<double>& rates) {
                 if (thresholds.size() != rates.size()) throw std::invalid_argument("length mismatch");
                 std::vector<linkadapt::McsEntry> e;
                 for (std::size_t j = 0; j < rates.size(); ++j) e.push_back({thresholds[j], rates[j]});
                 return linkadapt::McsTable(std::move(e));
             }),
             py::arg("thresholds"), py::arg("rates"))
        .def_static("lte_default", &linkadapt::McsTable::lte_default)
        .def_static("load_csv", &linkadapt::McsTable::load_csv, py::arg("path"))
        .def("__len__", &linkadapt::McsTable::size)
        .def_property_readonly("thresholds", [](const linkadapt::McsTable& t) {
            std::vector<double> v;
            for (const auto& e : t.entries()) v.push_back(e.threshold);
            return v;
        })
        .def_property_readonly("rates", [](const linkadapt::McsTable& t) {
            std::vector<double> v;
            for (const auto& e : t.entries()) v.push_back(e.rate);
            return v;
        });

    py::class_<linkadapt::BlockOutcome>(m, "BlockOutcome")
        .def_readonly("mcs_index", &linkadapt::BlockOutcome::mcs_index)
        .def_readonly("success", &linkadapt::BlockOutcome::success)
        .def_readonly("realized_rate", &linkadapt::BlockOutcome::realized_rate)
        .def_readonly("true_power", &linkadapt::BlockOutcome::true_power)
        .def_readonly("predicted_power", &linkadapt::BlockOutcome::predicted_power);

    m.def("select_mcs", &linkadapt::select_mcs, py::arg("predicted_power"), py::arg("table"));
    m.def("evaluate_block", &linkadapt::evaluate_block, py::arg("true_power"), py::arg("mcs_index"),
          py::arg("table"), py::arg("predicted_power") = std::numeric_limits<double>::quiet_NaN());
    m.def("fixed_rate_index",
          [](double snr, const linkadapt::McsTable& table, const std::string& convention) {
              return linkadapt::fixed_rate_index(snr, table, linkadapt::parse_convention(convention));
          },
          py::arg("snr"), py::arg("table"), py::arg("convention") = "rayleigh");

    // harness
    py::class_<harness::ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init([](const std::string& experiment) {
                 if (experiment == "mse_curves") return harness::ExperimentConfig::defaults_for(harness::Experiment::mse_curves);
                 if (experiment == "alpha_opt") return harness::ExperimentConfig::defaults_for(harness::Experiment::alpha_opt);
                 if (experiment == "throughput") return harness::ExperimentConfig::defaults_for(harness::Experiment::throughput);
                 throw std::invalid_argument("experiment must be mse_curves, alpha_opt or throughput");
             }),
             py::arg("experiment") = "mse_curves")
        .def("update", &harness::apply_json, py::arg("json_text"), "Overlay settings from a JSON object string")
        .def_readwrite("blocks", &harness::ExperimentConfig::blocks)
        .def_readwrite("seeds", &harness::ExperimentConfig::seeds)
        .def_readwrite("delays", &harness::ExperimentConfig::delays)
        .def_readwrite("alphas", &harness::ExperimentConfig::alphas)
        .def_readwrite("snr_db", &harness::ExperimentConfig::snr_db)
        .def_readwrite("speed_kmh", &harness::ExperimentConfig::speed_kmh)
        .def_readwrite("threads", &harness::ExperimentConfig::threads);

    m.def("run_mse_curves", [](const harness::ExperimentConfig& c) {
        const auto r = harness::run_mse_curves(c);
        py::list rows;
        for (const auto& x : r.rows) {
            rows.append(py::dict(py::arg("regime") = fading::to_string(x.regime), py::arg("delay_s") = x.delay,
                                 py::arg("alpha") = x.alpha, py::arg("mse_analytic") = x.mse_analytic,
                                 py::arg("mse_empirical") = x.mse_empirical,
                                 py::arg("variance_floor") = x.variance_floor));
        }
        return rows;
    });
    m.def("run_alpha_opt_sweep", [](const harness::ExperimentConfig& c) {
        py::list rows;
        for (const auto& x : harness::run_alpha_opt_sweep(c)) {
            rows.append(py::dict(py::arg("regime") = fading::to_string(x.regime), py::arg("fd_hz") = x.doppler_hz,
                                 py::arg("delay_s") = x.delay, py::arg("alpha_opt") = x.alpha_opt,
                                 py::arg("sensitivity") = x.sensitivity));
        }
        return rows;
    });
    m.def("run_throughput", [](const harness::ExperimentConfig& c) {
        py::list rows;
        for (const auto& x : harness::run_throughput(c)) {
            rows.append(py::dict(py::arg("regime") = fading::to_string(x.regime), py::arg("delay_s") = x.delay,
                                 py::arg("strategy") = x.strategy.name(), py::arg("throughput_mean") = x.mean,
                                 py::arg("ci_half_width") = x.ci_half_width));
        }
        return rows;
    });
}

#include "cqipred/fading.hpp"

#include "cqipred/csv.hpp"
#include "cqipred/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace cqipred::fading {

DopplerSpec::DopplerSpec(double speed_mps, double carrier_hz)
    : speed_(speed_mps), carrier_(carrier_hz), doppler_(speed_mps * carrier_hz / kSpeedOfLight) {
    if (!(speed_mps >= 0.0) || !std::isfinite(speed_mps)) {
        throw std::domain_error("DopplerSpec: speed must be a non-negative finite number");
    }
    if (!(carrier_hz > 0.0) || !std::isfinite(carrier_hz)) {
        throw std::domain_error("DopplerSpec: carrier must be positive");
    }
}

DopplerSpec DopplerSpec::from_kmh(double speed_kmh, double carrier_hz) {
    return DopplerSpec(speed_kmh / 3.6, carrier_hz);
}

DopplerSpec DopplerSpec::from_doppler(double doppler_hz, double carrier_hz) {
    return DopplerSpec(doppler_hz * kSpeedOfLight / carrier_hz, carrier_hz);
}

std::string to_string(Regime regime) {
    return regime == Regime::fixed ? "fixed" : "random";
}

Regime parse_regime(const std::string& text) {
    if (text == "fixed") return Regime::fixed;
    if (text == "random") return Regime::random;
    throw std::invalid_argument("unknown regime '" + text + "' (expected fixed or random)");
}

std::mt19937_64 make_stream(std::uint64_t seed, Stream stream) {
    const auto lo = static_cast<std::uint32_t>(seed);
    const auto hi = static_cast<std::uint32_t>(seed >> 32);
    std::seed_seq seq{lo, hi, static_cast<std::uint32_t>(stream), 0x63716970u};
    return std::mt19937_64(seq);
}

ArrivalSchedule make_schedule(Regime regime, double interval, std::size_t count,
                              std::uint64_t seed) {
    if (!(interval > 0.0) || !std::isfinite(interval)) {
        throw std::domain_error("make_schedule: interval must be positive");
    }
    if (count < 2) throw std::domain_error("make_schedule: count must be at least 2");

    ArrivalSchedule s;
    s.regime = regime;
    s.interval = interval;
    s.instants.resize(count);
    s.gaps.resize(count - 1);
    if (regime == Regime::fixed) {
        for (std::size_t k = 0; k < count; ++k) s.instants[k] = static_cast<double>(k) * interval;
        std::fill(s.gaps.begin(), s.gaps.end(), interval);
        return s;
    }

    auto rng = make_stream(seed, Stream::arrivals);
    std::exponential_distribution<double> exp_dist(1.0 / interval);
    double t = 0.0;
    s.instants[0] = 0.0;
    for (std::size_t k = 0; k + 1 < count; ++k) {
        // Exponential draws can be exactly zero in principle; instants must increase.
        double gap = exp_dist(rng);
        while (!(gap > 0.0)) gap = exp_dist(rng);
        s.gaps[k] = gap;
        t += gap;
        s.instants[k + 1] = t;
    }
    return s;
}

ChannelTrace generate_trace(const ArrivalSchedule& schedule, const DopplerSpec& doppler,
                            std::uint64_t seed) {
    const std::size_t n = schedule.size();
    if (n < 2 || schedule.gaps.size() != n - 1) {
        throw std::domain_error("generate_trace: malformed schedule");
    }

    ChannelTrace trace;
    trace.schedule = schedule;
    trace.doppler = doppler.doppler();
    trace.gains.resize(n);
    trace.rhos.resize(n - 1);
    trace.innovations.resize(n);

    const double omega = 2.0 * std::numbers::pi * doppler.doppler();
    if (schedule.regime == Regime::fixed) {
        std::fill(trace.rhos.begin(), trace.rhos.end(), specfun::bessel_j0(omega * schedule.interval));
    } else {
        for (std::size_t l = 0; l + 1 < n; ++l) {
            trace.rhos[l] = specfun::bessel_j0(omega * schedule.gaps[l]);
        }
    }

    auto rng = make_stream(seed, Stream::innovations);
    std::normal_distribution<double> normal(0.0, std::numbers::sqrt2 / 2.0);
    for (auto& e : trace.innovations) {
        const double re = normal(rng);
        const double im = normal(rng);
        e = {re, im};
    }

    trace.gains[0] = trace.innovations[0];
    for (std::size_t l = 0; l + 1 < n; ++l) {
        const double rho = trace.rhos[l];
        trace.gains[l + 1] = rho * trace.gains[l] + std::sqrt(std::max(0.0, 1.0 - rho * rho)) * trace.innovations[l + 1];
    }
    return trace;
}

PowerTrace power_trace(const ChannelTrace& trace, double snr) {
    if (!(snr > 0.0) || !std::isfinite(snr)) throw std::domain_error("power_trace: snr must be positive");
    PowerTrace out;
    out.schedule = trace.schedule;
    out.snr = snr;
    out.powers.reserve(trace.size());
    for (const auto& h : trace.gains) out.powers.push_back(snr * std::norm(h));
    return out;
}

std::complex<double> empirical_autocorr(const ChannelTrace& trace, std::size_t lag) {
    if (lag < 1) throw std::domain_error("empirical_autocorr: lag must be at least 1");
    if (trace.size() <= lag + 10) throw std::domain_error("empirical_autocorr: trace too short for lag");
    std::complex<double> acc{0.0, 0.0};
    const std::size_t count = trace.size() - lag;
    for (std::size_t l = 0; l < count; ++l) acc += trace.gains[l + lag] * std::conj(trace.gains[l]);
    return acc / static_cast<double>(count);
}

void write_trace_csv(const ChannelTrace& trace, std::ostream& out) {
    out << "index,time_s,re,im,rho_step\n";
    for (std::size_t l = 0; l < trace.size(); ++l) {
        out << l << ',' << csv::format_double(trace.schedule.instants[l]) << ','
            << csv::format_double(trace.gains[l].real()) << ','
            << csv::format_double(trace.gains[l].imag()) << ',';
        if (l > 0) out << csv::format_double(trace.rhos[l - 1]);
        out << '\n';
    }
}

} // namespace cqipred::fading

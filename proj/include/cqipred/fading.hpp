#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace cqipred::fading {

inline constexpr double kSpeedOfLight = 3e8;  // m/s

/// Terminal speed (m/s), carrier frequency (Hz) and the derived maximum
/// Doppler shift f_d = speed * carrier / c (Hz).
class DopplerSpec {
public:
    DopplerSpec(double speed_mps, double carrier_hz);

    static DopplerSpec from_kmh(double speed_kmh, double carrier_hz);
    /// Builds the spec for a given f_d at `carrier_hz`; speed is back-derived.
    static DopplerSpec from_doppler(double doppler_hz, double carrier_hz = 2e9);

    double speed() const noexcept { return speed_; }
    double carrier() const noexcept { return carrier_; }
    double doppler() const noexcept { return doppler_; }

private:
    double speed_;
    double carrier_;
    double doppler_;
};

enum class Regime { fixed, random };

std::string to_string(Regime regime);
Regime parse_regime(const std::string& text);

/// Block arrival instants in seconds. `gaps[l]` is the interval between
/// instants l and l+1, so gaps.size() == instants.size() - 1.
struct ArrivalSchedule {
    Regime regime = Regime::fixed;
    double interval = 0.0;  // T_s (fixed) or mean T (random), seconds
    std::vector<double> instants;
    std::vector<double> gaps;

    std::size_t size() const noexcept { return instants.size(); }
};

/// Sampled AR(1) Rayleigh fading process.
///
/// gains[l+1] = rhos[l] * gains[l] + sqrt(1 - rhos[l]^2) * innovations[l+1],
/// gains[0] = innovations[0]. All innovations are standard complex normal.
struct ChannelTrace {
    ArrivalSchedule schedule;
    double doppler = 0.0;  // Hz
    std::vector<std::complex<double>> gains;
    std::vector<double> rhos;
    std::vector<std::complex<double>> innovations;

    std::size_t size() const noexcept { return gains.size(); }
};

/// gamma_l = snr * |h_l|^2 with linear snr.
struct PowerTrace {
    ArrivalSchedule schedule;
    std::vector<double> powers;
    double snr = 1.0;

    std::size_t size() const noexcept { return powers.size(); }
};

/// Random streams derived from one user seed. Arrivals and innovations never
/// share a stream, so fixed and random schedules built from the same seed see
/// identical innovation sequences.
enum class Stream : std::uint64_t { arrivals = 0, innovations = 1 };

std::mt19937_64 make_stream(std::uint64_t seed, Stream stream);

ArrivalSchedule make_schedule(Regime regime, double interval, std::size_t count,
                              std::uint64_t seed);

ChannelTrace generate_trace(const ArrivalSchedule& schedule, const DopplerSpec& doppler,
                            std::uint64_t seed);

PowerTrace power_trace(const ChannelTrace& trace, double snr);

/// Sample mean of h_{l+lag} * conj(h_l).
std::complex<double> empirical_autocorr(const ChannelTrace& trace, std::size_t lag);

/// Debug dump with columns index,time_s,re,im,rho_step. rho_step on row l is
/// the coefficient that produced h_l; it is empty on row 0.
void write_trace_csv(const ChannelTrace& trace, std::ostream& out);

} // namespace cqipred::fading

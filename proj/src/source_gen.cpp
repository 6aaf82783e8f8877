#include "ajscc/source_gen.hpp"

#include "ajscc/error.hpp"
#include "ajscc/fft.hpp"
#include "ajscc/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ajscc {
namespace {

// Sub-stream tags so the schedule, noise and events draw from independent generators.
constexpr std::uint64_t kScheduleStream = 1;
constexpr std::uint64_t kNoiseStream = 2;
constexpr std::uint64_t kDriftStream = 3;
constexpr std::uint64_t kEventStream = 4;

std::size_t sample_count(double duration, double sample_period) {
    if (!(sample_period > 0.0) || !std::isfinite(sample_period)) {
        throw PreconditionError("sample period must be positive");
    }
    if (!(duration > 0.0) || !std::isfinite(duration)) {
        throw PreconditionError("duration must be positive");
    }
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(duration / sample_period)));
}

// Zeroes every DFT bin above `cutoff` Hz.
std::vector<double> brickwall_lowpass(const std::vector<double>& x, double sample_period, double cutoff) {
    const std::size_t n = x.size();
    if (n < 2) return x;
    auto spectrum = real_forward(x);
    const double bin_hz = 1.0 / (sample_period * static_cast<double>(n));
    for (std::size_t k = 1; k < spectrum.size(); ++k) {
        if (static_cast<double>(k) * bin_hz > cutoff) spectrum[k] = 0.0;
    }
    return real_inverse(spectrum, n);
}

} // namespace

void CytometrySynthSpec::validate() const {
    if (!(pulse_width > 0.0)) throw ConfigError("cytometry pulse_width must be positive");
    if (!(pulse_rate >= 0.0)) throw ConfigError("cytometry pulse_rate must be non-negative");
    if (!(baseline >= 0.0)) throw ConfigError("cytometry baseline must be non-negative");
    if (!(peak_amplitude_mean > baseline)) throw ConfigError("cytometry peak_amplitude_mean must exceed baseline");
    if (!(peak_amplitude_sd >= 0.0) || !(noise_sd >= 0.0)) {
        throw ConfigError("cytometry standard deviations must be non-negative");
    }
    if (!(pulse_rate * pulse_width < 1.0)) throw ConfigError("cytometry pulse_rate * pulse_width must be < 1");
}

void GsrSynthSpec::validate(double sample_period) const {
    if (!(conductance_max > 0.0)) throw ConfigError("gsr conductance_max must be positive");
    if (!(tonic_level >= 0.0 && tonic_level <= conductance_max)) {
        throw ConfigError("gsr tonic_level must lie in [0, conductance_max]");
    }
    if (!(drift_sd >= 0.0) || !(event_rate >= 0.0) || !(event_amplitude >= 0.0)) {
        throw ConfigError("gsr drift_sd, event_rate and event_amplitude must be non-negative");
    }
    if (!(event_decay > 0.0)) throw ConfigError("gsr event_decay must be positive");
    if (!(drift_bandwidth >= 0.0) || !(drift_bandwidth <= 0.05 / sample_period)) {
        throw ConfigError("gsr drift_bandwidth must be in [0, 0.05 / sample_period]");
    }
}

void FrontEndSpec::validate() const {
    if (!(excitation_frequency > 0.0)) throw ConfigError("front-end excitation frequency must be positive");
    if (!(lowpass_cutoff > 0.0 && lowpass_cutoff < excitation_frequency)) {
        throw ConfigError("front-end lowpass_cutoff must be in (0, f0)");
    }
    if (!std::isfinite(gain)) throw ConfigError("front-end gain must be finite");
}

std::vector<ScheduledPulse> schedule_pulses(const CytometrySynthSpec& spec, double duration, std::uint64_t seed) {
    spec.validate();
    std::vector<ScheduledPulse> pulses;
    if (spec.pulse_rate == 0.0) return pulses;

    Rng rng(derive_seed(seed, {kScheduleStream}));
    std::exponential_distribution<double> gap(spec.pulse_rate);
    std::normal_distribution<double> amplitude(spec.peak_amplitude_mean, spec.peak_amplitude_sd);
    const double min_gap = 2.0 * spec.pulse_width;

    double t = 0.0;
    double last = -std::numeric_limits<double>::infinity();
    for (;;) {
        t += gap(rng);
        if (t >= duration) break;
        // Amplitude is drawn for every arrival so thinning does not shift later draws.
        const double peak = std::max(spec.baseline, amplitude(rng));
        if (t - last < min_gap) continue;
        pulses.push_back({t, peak});
        last = t;
    }
    return pulses;
}

SourceTrace gen_cytometry(const CytometrySynthSpec& spec, double duration, double sample_period,
                          std::uint64_t seed) {
    spec.validate();
    if (!(duration >= 10.0 * spec.pulse_width)) {
        throw PreconditionError("cytometry duration must be at least 10 pulse widths");
    }
    const std::size_t n = sample_count(duration, sample_period);
    std::vector<double> x(n, spec.baseline);

    const double sigma = spec.pulse_width / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
    const double reach = 6.0 * sigma;
    for (const auto& p : schedule_pulses(spec, duration, seed)) {
        const double height = p.peak - spec.baseline;
        const auto lo = static_cast<std::ptrdiff_t>(std::ceil((p.time - reach) / sample_period));
        const auto hi = static_cast<std::ptrdiff_t>(std::floor((p.time + reach) / sample_period));
        for (auto i = std::max<std::ptrdiff_t>(lo, 0); i <= std::min<std::ptrdiff_t>(hi, n - 1); ++i) {
            const double dt = static_cast<double>(i) * sample_period - p.time;
            x[i] += height * std::exp(-0.5 * dt * dt / (sigma * sigma));
        }
    }

    if (spec.noise_sd > 0.0) {
        Rng rng(derive_seed(seed, {kNoiseStream}));
        std::normal_distribution<double> noise(0.0, spec.noise_sd);
        for (double& v : x) v += noise(rng);
    }
    return SourceTrace(sample_period, std::move(x), "V");
}

SourceTrace gen_gsr(const GsrSynthSpec& spec, double duration, double sample_period, std::uint64_t seed) {
    const std::size_t n = sample_count(duration, sample_period);
    spec.validate(sample_period);

    std::vector<double> drift(n, 0.0);
    if (spec.drift_sd > 0.0 && spec.drift_bandwidth > 0.0 && n > 1) {
        // Random walk pinned to zero at both ends so the circular filter sees no jump.
        Rng rng(derive_seed(seed, {kDriftStream}));
        std::normal_distribution<double> step(0.0, 1.0);
        for (std::size_t i = 1; i < n; ++i) drift[i] = drift[i - 1] + step(rng);
        const double end = drift.back();
        for (std::size_t i = 0; i < n; ++i) {
            drift[i] -= end * static_cast<double>(i) / static_cast<double>(n - 1);
        }
        drift = brickwall_lowpass(drift, sample_period, spec.drift_bandwidth);
        double mean = 0.0;
        for (double v : drift) mean += v;
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (double& v : drift) {
            v -= mean;
            var += v * v;
        }
        const double sd = std::sqrt(var / static_cast<double>(n));
        if (sd > 0.0) {
            for (double& v : drift) v *= spec.drift_sd / sd;
        }
    }

    std::vector<double> events(n, 0.0);
    if (spec.event_rate > 0.0 && spec.event_amplitude > 0.0) {
        Rng rng(derive_seed(seed, {kEventStream}));
        std::exponential_distribution<double> gap(spec.event_rate);
        std::uniform_real_distribution<double> scale(0.5, 1.5);
        const double decay_per_sample = std::exp(-sample_period / spec.event_decay);
        double t = gap(rng);
        while (t < duration) {
            const double a = spec.event_amplitude * scale(rng);
            auto i = static_cast<std::size_t>(std::ceil(t / sample_period));
            double v = a * std::exp(-(static_cast<double>(i) * sample_period - t) / spec.event_decay);
            for (; i < n && v > 1e-9 * a; ++i, v *= decay_per_sample) events[i] += v;
            t += gap(rng);
        }
        events = brickwall_lowpass(events, sample_period, spec.drift_bandwidth);
    }

    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = std::clamp(spec.tonic_level + drift[i] + events[i], 0.0, spec.conductance_max);
    }
    return SourceTrace(sample_period, std::move(g), "uS");
}

SourceTrace lockin_frontend(const SourceTrace& trace, const FrontEndSpec& spec, std::size_t decimation) {
    spec.validate();
    if (trace.sample_rate() < 4.0 * spec.excitation_frequency * (1.0 - 1e-12)) {
        throw PreconditionError("lock-in input sample rate must be at least 4 * f0");
    }
    if (decimation == 0) throw PreconditionError("decimation factor must be >= 1");

    // Second-order Butterworth low-pass, bilinear transform with pre-warping.
    const double k = std::tan(std::numbers::pi * spec.lowpass_cutoff * trace.sample_period());
    const double norm = 1.0 / (1.0 + std::numbers::sqrt2 * k + k * k);
    const double b0 = k * k * norm;
    const double b1 = 2.0 * b0;
    const double b2 = b0;
    const double a1 = 2.0 * (k * k - 1.0) * norm;
    const double a2 = (1.0 - std::numbers::sqrt2 * k + k * k) * norm;

    const double w0 = 2.0 * std::numbers::pi * spec.excitation_frequency * trace.sample_period();
    double z1 = 0.0;
    double z2 = 0.0;
    std::vector<double> out;
    out.reserve(trace.size() / decimation + 1);
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const double carrier = std::cos(w0 * static_cast<double>(i));
        const double excited = spec.gain * trace[i] * carrier;
        const double mixed = excited * carrier;
        const double y = b0 * mixed + z1;
        z1 = b1 * mixed - a1 * y + z2;
        z2 = b2 * mixed - a2 * y;
        if (i % decimation == 0) out.push_back(y);
    }
    return SourceTrace(trace.sample_period() * static_cast<double>(decimation), std::move(out),
                       trace.unit_label());
}

double rescale_value(double v, double in_lo, double in_hi, double out_lo, double out_hi) {
    const double c = std::clamp(v, in_lo, in_hi);
    if (in_lo == out_lo && in_hi == out_hi) return c;
    return out_lo + (c - in_lo) * (out_hi - out_lo) / (in_hi - in_lo);
}

SourceTrace rescale(const SourceTrace& trace, double in_lo, double in_hi, double out_lo, double out_hi) {
    if (!(in_hi > in_lo) || !std::isfinite(in_lo) || !std::isfinite(in_hi)) {
        throw ConfigError("rescale input range is degenerate");
    }
    if (!(out_hi > out_lo) || !std::isfinite(out_lo) || !std::isfinite(out_hi)) {
        throw ConfigError("rescale output range is degenerate");
    }
    std::vector<double> y(trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) {
        y[i] = rescale_value(trace[i], in_lo, in_hi, out_lo, out_hi);
    }
    return SourceTrace(trace.sample_period(), std::move(y), "V");
}

} // namespace ajscc

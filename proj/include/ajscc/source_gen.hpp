#pragma once

#include "ajscc/trace.hpp"

#include <cstdint>
#include <vector>

namespace ajscc {

// Synthetic impedance-cytometry pulse train: Gaussian pulses on a baseline.
struct CytometrySynthSpec {
    double pulse_rate = 8.0;            // events / s
    double pulse_width = 4e-3;          // FWHM, s
    double peak_amplitude_mean = 1.0;   // absolute peak level, V
    double peak_amplitude_sd = 0.15;    // V
    double baseline = 0.1;              // V
    double noise_sd = 0.01;             // V, white

    void validate() const;
    friend bool operator==(const CytometrySynthSpec&, const CytometrySynthSpec&) = default;
};

// Synthetic skin-conductance trace (inverse megaohm).
struct GsrSynthSpec {
    double conductance_max = 2.6;
    double tonic_level = 1.3;
    double drift_sd = 0.35;
    double drift_bandwidth = 0.2;       // Hz
    double event_rate = 0.05;           // events / s
    double event_amplitude = 0.3;
    double event_decay = 3.0;           // s

    void validate(double sample_period) const;
    friend bool operator==(const GsrSynthSpec&, const GsrSynthSpec&) = default;
};

// Behavioural lock-in amplifier: carrier excitation, synchronous mixing, low-pass.
struct FrontEndSpec {
    double excitation_frequency = 500e3; // f0, Hz
    double lowpass_cutoff = 2e3;         // Hz
    double gain = 1.0;

    void validate() const;
    friend bool operator==(const FrontEndSpec&, const FrontEndSpec&) = default;
};

struct ScheduledPulse {
    double time;  // s, pulse centre
    double peak;  // absolute peak level, V
};

// Arrival schedule used by gen_cytometry for the same (spec, duration, seed):
// Poisson arrivals thinned so neighbours are at least 2 * pulse_width apart.
std::vector<ScheduledPulse> schedule_pulses(const CytometrySynthSpec& spec, double duration,
                                            std::uint64_t seed);

SourceTrace gen_cytometry(const CytometrySynthSpec& spec, double duration, double sample_period,
                          std::uint64_t seed);

SourceTrace gen_gsr(const GsrSynthSpec& spec, double duration, double sample_period, std::uint64_t seed);

// `trace` is the resistance-change envelope sampled at >= 4 * f0. The output is
// decimated by `decimation` (1 keeps every sample).
SourceTrace lockin_frontend(const SourceTrace& trace, const FrontEndSpec& spec, std::size_t decimation = 1);

double rescale_value(double v, double in_lo, double in_hi, double out_lo, double out_hi);
SourceTrace rescale(const SourceTrace& trace, double in_lo, double in_hi, double out_lo, double out_hi);

} // namespace ajscc

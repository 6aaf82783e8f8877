#pragma once

#include "ajscc/channel.hpp"
#include "ajscc/codec.hpp"
#include "ajscc/modem.hpp"
#include "ajscc/source_gen.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace ajscc {

enum class ReceiverProfile { fast, slow };
enum class EncoderDesign { design2, design1 };

const char* to_string(ReceiverProfile p);
const char* to_string(EncoderDesign d);
ReceiverProfile profile_from_string(const std::string& s);
EncoderDesign design_from_string(const std::string& s);

struct SourceConfig {
    double sample_period = 1e-3;
    CytometrySynthSpec cytometry;
    GsrSynthSpec gsr;
    // Optional recorded traces (CSV `t_seconds,value`) replacing the synthetic sources.
    std::optional<std::string> cytometry_trace;
    std::optional<std::string> gsr_trace;
    // Raw ranges mapped linearly onto [0, x1_max] and [0, x2_max].
    double cytometry_in_lo = 0.0;
    double cytometry_in_hi = 2.0;
    double gsr_in_lo = 0.0;
    double gsr_in_hi = 2.6;

    friend bool operator==(const SourceConfig&, const SourceConfig&) = default;
};

struct ModemSettings {
    ReceiverProfile profile = ReceiverProfile::fast;
    double f_min = 500e3;
    double f_max = 4e6;
    PeakInterpolation interpolation = PeakInterpolation::complex_ratio;

    ModemConfig resolve() const;
    friend bool operator==(const ModemSettings&, const ModemSettings&) = default;
};

// Switches profile and resets the band to that profile's defaults.
ModemSettings modem_settings_for(ReceiverProfile profile);

struct ChannelSettings {
    ChannelFamily family = ChannelFamily::awgn;
    double csnr_db = 0.0;
    double doppler_hz = 0.0;
    // Empty means the shipped profile for the family.
    std::optional<std::string> tap_profile_path;

    friend bool operator==(const ChannelSettings&, const ChannelSettings&) = default;
};

// Switches family and applies its default Doppler.
ChannelSettings channel_settings_for(ChannelFamily family, double csnr_db);

struct AnalysisSettings {
    double threshold = 0.3;       // V, applied to decoded x1 before peak picking
    double min_height = 0.5;      // V
    double min_separation = 8e-3; // s
    int median_order = 200;       // applied to decoded x2; 0 disables

    friend bool operator==(const AnalysisSettings&, const AnalysisSettings&) = default;
};

struct RunConfig {
    std::uint64_t seed = 7;
    double duration = 20.0;
    SourceConfig source;
    EncoderDesign design = EncoderDesign::design2;
    AjsccParams codec;
    ModemSettings modem;
    ChannelSettings channel;
    AnalysisSettings analysis;

    void validate() const;
    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// JSON text mirroring RunConfig. Parsing fills defaults, rejects unknown keys and validates.
std::string to_json_text(const RunConfig& cfg);
RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::filesystem::path& path);

} // namespace ajscc

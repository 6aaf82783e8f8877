#include "ajscc/config.hpp"

#include "ajscc/error.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <json.hpp>
#include <sstream>

namespace ajscc {

using nlohmann::json;

const char* to_string(ReceiverProfile p) { return p == ReceiverProfile::fast ? "fast" : "slow"; }
const char* to_string(EncoderDesign d) { return d == EncoderDesign::design2 ? "design2" : "design1"; }

ReceiverProfile profile_from_string(const std::string& s) {
    if (s == "fast") return ReceiverProfile::fast;
    if (s == "slow") return ReceiverProfile::slow;
    throw ConfigError("unknown receiver profile '" + s + "' (expected fast|slow)");
}

EncoderDesign design_from_string(const std::string& s) {
    if (s == "design2") return EncoderDesign::design2;
    if (s == "design1") return EncoderDesign::design1;
    throw ConfigError("unknown encoder design '" + s + "' (expected design2|design1)");
}

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& ctx) {
    if (!obj.is_object()) throw ConfigError(ctx + " must be a JSON object");
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || item.key() == a;
        if (!ok) throw ConfigError("unknown key '" + item.key() + "' in " + ctx);
    }
}

void read(const json& obj, const char* key, double& out, const std::string& ctx) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(ctx + "." + key + " must be a number");
    out = v.get<double>();
}

void read(const json& obj, const char* key, int& out, const std::string& ctx) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError(ctx + "." + key + " must be an integer");
    out = v.get<int>();
}

void read(const json& obj, const char* key, std::optional<std::string>& out, const std::string& ctx) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (v.is_null()) {
        out.reset();
    } else if (v.is_string()) {
        out = v.get<std::string>();
    } else {
        throw ConfigError(ctx + "." + key + " must be a string or null");
    }
}

std::string read_string(const json& obj, const char* key, const std::string& fallback, const std::string& ctx) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) throw ConfigError(ctx + "." + key + " must be a string");
    return v.get<std::string>();
}

void read_range(const json& obj, const char* key, double& lo, double& hi, const std::string& ctx) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw ConfigError(ctx + "." + key + " must be a [lo, hi] pair");
    }
    lo = v[0].get<double>();
    hi = v[1].get<double>();
}

json csnr_to_json(double csnr) {
    if (csnr == std::numeric_limits<double>::infinity()) return "inf";
    return csnr;
}

double csnr_from_json(const json& v) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string() && v.get<std::string>() == "inf") return kNoNoise;
    throw ConfigError("channel.csnr_db must be a number or \"inf\"");
}

json optional_string(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

} // namespace

ModemConfig ModemSettings::resolve() const {
    ModemConfig cfg = profile == ReceiverProfile::fast ? ModemConfig::fast() : ModemConfig::slow();
    cfg.f_min = f_min;
    cfg.f_max = f_max;
    cfg.interpolation = interpolation;
    return cfg;
}

ModemSettings modem_settings_for(ReceiverProfile profile) {
    const ModemConfig base = profile == ReceiverProfile::fast ? ModemConfig::fast() : ModemConfig::slow();
    return {profile, base.f_min, base.f_max, PeakInterpolation::complex_ratio};
}

ChannelSettings channel_settings_for(ChannelFamily family, double csnr_db) {
    return {family, csnr_db, default_doppler(family), std::nullopt};
}

void RunConfig::validate() const {
    if (!(duration > 0.0) || !std::isfinite(duration)) throw ConfigError("duration must be positive");
    if (!(source.sample_period > 0.0)) throw ConfigError("source sample period must be positive");
    if (!source.cytometry_trace) source.cytometry.validate();
    if (!source.gsr_trace) source.gsr.validate(source.sample_period);
    if (!(source.cytometry_in_hi > source.cytometry_in_lo)) throw ConfigError("cytometry_range is degenerate");
    if (!(source.gsr_in_hi > source.gsr_in_lo)) throw ConfigError("gsr_range is degenerate");
    codec.validate();
    if (design == EncoderDesign::design1 && codec.levels != kDesign1Levels) {
        throw ConfigError("design1 encoder requires levels = 11");
    }
    const ModemConfig m = modem.resolve();
    m.validate();
    const double ratio = m.block_duration() / source.sample_period;
    if (ratio < 1.0 - 1e-9 || std::abs(ratio - std::round(ratio)) > 1e-6 * ratio) {
        throw ConfigError("receiver block duration must be a whole number of source samples");
    }
    ChannelSpec spec{channel.family, channel.csnr_db, channel.doppler_hz, std::nullopt, seed};
    if (is_multipath(channel.family)) spec.tap_profile = TapProfile{};
    spec.validate();
    if (analysis.median_order < 0 || analysis.median_order % 2 != 0) {
        throw ConfigError("median_order must be 0 (off) or a positive even integer");
    }
    if (!std::isfinite(analysis.threshold) || !std::isfinite(analysis.min_height)) {
        throw ConfigError("analysis thresholds must be finite");
    }
    if (!(analysis.min_separation > 0.0)) throw ConfigError("min_separation must be positive");
    for (const auto* path : {&source.cytometry_trace, &source.gsr_trace, &channel.tap_profile_path}) {
        if (*path && !std::filesystem::exists(**path)) throw ConfigError("referenced file not found: " + **path);
    }
}

std::string to_json_text(const RunConfig& c) {
    const auto& cy = c.source.cytometry;
    const auto& g = c.source.gsr;
    json j;
    j["seed"] = c.seed;
    j["duration_s"] = c.duration;
    j["source"] = {
        {"sample_period_s", c.source.sample_period},
        {"cytometry",
         {{"pulse_rate", cy.pulse_rate},
          {"pulse_width_s", cy.pulse_width},
          {"peak_amplitude_mean", cy.peak_amplitude_mean},
          {"peak_amplitude_sd", cy.peak_amplitude_sd},
          {"baseline", cy.baseline},
          {"noise_sd", cy.noise_sd}}},
        {"gsr",
         {{"conductance_max", g.conductance_max},
          {"tonic_level", g.tonic_level},
          {"drift_sd", g.drift_sd},
          {"drift_bandwidth_hz", g.drift_bandwidth},
          {"event_rate", g.event_rate},
          {"event_amplitude", g.event_amplitude},
          {"event_decay_s", g.event_decay}}},
        {"cytometry_trace", optional_string(c.source.cytometry_trace)},
        {"gsr_trace", optional_string(c.source.gsr_trace)},
        {"cytometry_range", {c.source.cytometry_in_lo, c.source.cytometry_in_hi}},
        {"gsr_range", {c.source.gsr_in_lo, c.source.gsr_in_hi}},
    };
    j["codec"] = {
        {"design", to_string(c.design)},
        {"levels", c.codec.levels},
        {"x1_max", c.codec.x1_max},
        {"x2_max", c.codec.x2_max},
        {"level_height", c.codec.level_height ? json(*c.codec.level_height) : json(nullptr)},
        {"design1_bias", c.codec.design1_bias},
    };
    j["modem"] = {
        {"profile", to_string(c.modem.profile)},
        {"f_min_hz", c.modem.f_min},
        {"f_max_hz", c.modem.f_max},
        {"interpolation", to_string(c.modem.interpolation)},
    };
    j["channel"] = {
        {"family", to_string(c.channel.family)},
        {"csnr_db", csnr_to_json(c.channel.csnr_db)},
        {"doppler_hz", c.channel.doppler_hz},
        {"tap_profile", optional_string(c.channel.tap_profile_path)},
    };
    j["analysis"] = {
        {"threshold", c.analysis.threshold},
        {"min_height", c.analysis.min_height},
        {"min_separation_s", c.analysis.min_separation},
        {"median_order", c.analysis.median_order},
    };
    return j.dump(2) + "\n";
}

RunConfig parse_run_config(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(j, {"seed", "duration_s", "source", "codec", "modem", "channel", "analysis"}, "config");

    RunConfig c;
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) {
            throw ConfigError("seed must be a non-negative integer");
        }
        if (j["seed"].is_number_integer() && j["seed"].get<long long>() < 0) {
            throw ConfigError("seed must be a non-negative integer");
        }
        c.seed = j["seed"].get<std::uint64_t>();
    }
    read(j, "duration_s", c.duration, "config");

    if (j.contains("source")) {
        const json& s = j["source"];
        check_keys(s, {"sample_period_s", "cytometry", "gsr", "cytometry_trace", "gsr_trace", "cytometry_range",
                       "gsr_range"},
                   "source");
        read(s, "sample_period_s", c.source.sample_period, "source");
        if (s.contains("cytometry")) {
            const json& cy = s["cytometry"];
            const std::string ctx = "source.cytometry";
            check_keys(cy, {"pulse_rate", "pulse_width_s", "peak_amplitude_mean", "peak_amplitude_sd", "baseline",
                            "noise_sd"},
                       ctx);
            auto& d = c.source.cytometry;
            read(cy, "pulse_rate", d.pulse_rate, ctx);
            read(cy, "pulse_width_s", d.pulse_width, ctx);
            read(cy, "peak_amplitude_mean", d.peak_amplitude_mean, ctx);
            read(cy, "peak_amplitude_sd", d.peak_amplitude_sd, ctx);
            read(cy, "baseline", d.baseline, ctx);
            read(cy, "noise_sd", d.noise_sd, ctx);
        }
        if (s.contains("gsr")) {
            const json& gs = s["gsr"];
            const std::string ctx = "source.gsr";
            check_keys(gs, {"conductance_max", "tonic_level", "drift_sd", "drift_bandwidth_hz", "event_rate",
                            "event_amplitude", "event_decay_s"},
                       ctx);
            auto& d = c.source.gsr;
            read(gs, "conductance_max", d.conductance_max, ctx);
            read(gs, "tonic_level", d.tonic_level, ctx);
            read(gs, "drift_sd", d.drift_sd, ctx);
            read(gs, "drift_bandwidth_hz", d.drift_bandwidth, ctx);
            read(gs, "event_rate", d.event_rate, ctx);
            read(gs, "event_amplitude", d.event_amplitude, ctx);
            read(gs, "event_decay_s", d.event_decay, ctx);
        }
        read(s, "cytometry_trace", c.source.cytometry_trace, "source");
        read(s, "gsr_trace", c.source.gsr_trace, "source");
        read_range(s, "cytometry_range", c.source.cytometry_in_lo, c.source.cytometry_in_hi, "source");
        read_range(s, "gsr_range", c.source.gsr_in_lo, c.source.gsr_in_hi, "source");
    }

    if (j.contains("codec")) {
        const json& k = j["codec"];
        check_keys(k, {"design", "levels", "x1_max", "x2_max", "level_height", "design1_bias"}, "codec");
        c.design = design_from_string(read_string(k, "design", to_string(c.design), "codec"));
        if (c.design == EncoderDesign::design1) c.codec.levels = kDesign1Levels;
        read(k, "levels", c.codec.levels, "codec");
        read(k, "x1_max", c.codec.x1_max, "codec");
        read(k, "x2_max", c.codec.x2_max, "codec");
        if (k.contains("level_height")) {
            if (k["level_height"].is_null()) {
                c.codec.level_height.reset();
            } else if (k["level_height"].is_number()) {
                c.codec.level_height = k["level_height"].get<double>();
            } else {
                throw ConfigError("codec.level_height must be a number or null");
            }
        }
        read(k, "design1_bias", c.codec.design1_bias, "codec");
    }

    if (j.contains("modem")) {
        const json& m = j["modem"];
        check_keys(m, {"profile", "f_min_hz", "f_max_hz", "interpolation"}, "modem");
        c.modem = modem_settings_for(profile_from_string(read_string(m, "profile", "fast", "modem")));
        read(m, "f_min_hz", c.modem.f_min, "modem");
        read(m, "f_max_hz", c.modem.f_max, "modem");
        c.modem.interpolation = peak_interpolation_from_string(
            read_string(m, "interpolation", to_string(c.modem.interpolation), "modem"));
    }

    if (j.contains("channel")) {
        const json& ch = j["channel"];
        check_keys(ch, {"family", "csnr_db", "doppler_hz", "tap_profile"}, "channel");
        const double csnr = ch.contains("csnr_db") ? csnr_from_json(ch["csnr_db"]) : c.channel.csnr_db;
        c.channel = channel_settings_for(channel_family_from_string(read_string(ch, "family", "awgn", "channel")),
                                         csnr);
        read(ch, "doppler_hz", c.channel.doppler_hz, "channel");
        read(ch, "tap_profile", c.channel.tap_profile_path, "channel");
    }

    if (j.contains("analysis")) {
        const json& a = j["analysis"];
        check_keys(a, {"threshold", "min_height", "min_separation_s", "median_order"}, "analysis");
        read(a, "threshold", c.analysis.threshold, "analysis");
        read(a, "min_height", c.analysis.min_height, "analysis");
        read(a, "min_separation_s", c.analysis.min_separation, "analysis");
        read(a, "median_order", c.analysis.median_order, "analysis");
    }
    c.validate();
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str());
}

} // namespace ajscc

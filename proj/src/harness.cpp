#include "ajscc/harness.hpp"

#include "ajscc/error.hpp"
#include "ajscc/random.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <thread>

namespace ajscc {

using nlohmann::json;

const char* const kSyntheticSourceNote =
    "Sources are synthetic stand-ins (Gaussian pulse train for impedance cytometry, "
    "band-limited random walk with decay events for GSR); recorded datasets are not used.";

const char* code_version() noexcept { return AJSCC_VERSION; }

namespace {

std::string context_of(const RunConfig& c) {
    std::ostringstream os;
    os << "[design=" << to_string(c.design) << " levels=" << c.codec.levels << " profile=" << to_string(c.modem.profile)
       << " channel=" << to_string(c.channel.family) << " csnr_db=" << format_double(c.channel.csnr_db)
       << " seed=" << c.seed << "]";
    return os.str();
}

// Runs one pipeline stage, tagging failures with the stage name and run context.
template <class F>
auto stage(const char* name, const std::string& ctx, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const ConfigError& e) {
        throw ConfigError(std::string(name) + ": " + e.what() + " " + ctx);
    } catch (const std::exception& e) {
        throw StageError(name, std::string(e.what()) + " " + ctx);
    }
}

std::vector<double> truncated(const std::vector<double>& v, std::size_t n) {
    return {v.begin(), v.begin() + static_cast<std::ptrdiff_t>(std::min(n, v.size()))};
}

ChannelSpec channel_spec_for(const RunConfig& cfg, std::uint64_t seed) {
    ChannelSpec spec{cfg.channel.family, cfg.channel.csnr_db, cfg.channel.doppler_hz, std::nullopt, seed};
    if (is_multipath(cfg.channel.family)) {
        spec.tap_profile = load_profile(cfg.channel.tap_profile_path ? std::filesystem::path(*cfg.channel.tap_profile_path)
                                                                     : default_profile_path(cfg.channel.family));
    }
    return spec;
}

json peaks_json(const std::vector<PulseEvent>& events) {
    json arr = json::array();
    for (const auto& e : events) arr.push_back({e.time, e.peak_value});
    return arr;
}

} // namespace

std::uint64_t run_seed(std::uint64_t master, int levels, ChannelFamily family) {
    return derive_seed(master, {static_cast<std::uint64_t>(levels), hash_tag(to_string(family))});
}

SourcePair make_sources(const RunConfig& cfg) {
    const double dt = cfg.source.sample_period;
    auto load = [&](const std::string& path, const char* what) {
        SourceTrace t = read_trace_csv(path);
        if (std::abs(t.sample_period() - dt) > 1e-9 * dt) {
            throw ConfigError(std::string(what) + " trace sample period does not match source.sample_period_s");
        }
        return t;
    };
    SourceTrace cyto = cfg.source.cytometry_trace
                           ? load(*cfg.source.cytometry_trace, "cytometry")
                           : gen_cytometry(cfg.source.cytometry, cfg.duration, dt,
                                           derive_seed(cfg.seed, {hash_tag("cytometry")}));
    SourceTrace gsr = cfg.source.gsr_trace
                          ? load(*cfg.source.gsr_trace, "gsr")
                          : gen_gsr(cfg.source.gsr, cfg.duration, dt, derive_seed(cfg.seed, {hash_tag("gsr")}));
    const std::size_t n = std::min(cyto.size(), gsr.size());
    return {cyto.with_samples(truncated(cyto.samples(), n)), gsr.with_samples(truncated(gsr.samples(), n))};
}

RunReport run_link(const RunConfig& cfg) {
    const std::string ctx = context_of(cfg);
    SourcePair sources = stage("generate", ctx, [&] {
        cfg.validate();
        return make_sources(cfg);
    });
    return run_link(cfg, sources);
}

RunReport run_link(const RunConfig& cfg, const SourcePair& sources) { return run_link(cfg, sources, nullptr); }

RunReport run_link(const RunConfig& cfg, const SourcePair& sources, BlockDumpWriter* dump) {
    const auto started = std::chrono::steady_clock::now();
    const std::string ctx = context_of(cfg);
    cfg.validate();

    RunReport report;
    report.config = cfg;
    report.code_version = code_version();
    report.run_seed = run_seed(cfg.seed, cfg.codec.levels, cfg.channel.family);

    const AjsccParams& p = cfg.codec;
    const ModemConfig modem = cfg.modem.resolve();
    const double full_scale = p.full_scale();

    auto [x1, x2] = stage("rescale", ctx, [&] {
        if (sources.cytometry.size() != sources.gsr.size()) throw InputError("source traces differ in length");
        return std::pair{rescale(sources.cytometry, cfg.source.cytometry_in_lo, cfg.source.cytometry_in_hi, 0.0,
                                 p.x1_max),
                         rescale(sources.gsr, cfg.source.gsr_in_lo, cfg.source.gsr_in_hi, 0.0, p.x2_max)};
    });

    const auto per_block =
        static_cast<std::size_t>(std::llround(modem.block_duration() / sources.cytometry.sample_period()));
    const std::size_t blocks = x1.size() / per_block;
    if (blocks == 0) throw ConfigError("source is shorter than one receiver block " + ctx);
    report.blocks = blocks;

    Modulator modulator = stage("modulate", ctx, [&] { return Modulator(modem, full_scale); });
    auto channel = stage("channel", ctx, [&] {
        return make_channel(channel_spec_for(cfg, report.run_seed), modem.sample_rate, modem.fft_size, 1.0);
    });
    Demodulator demodulator = stage("demodulate", ctx, [&] { return Demodulator(modem, full_scale); });

    std::vector<double> x1_hat(blocks);
    std::vector<double> x2_hat(blocks);
    BasebandBlock block;
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t i = b * per_block;
        const EncodedSample s = stage("encode", ctx, [&] {
            return cfg.design == EncoderDesign::design1 ? encode_design1(x1[i], x2[i], p) : encode(x1[i], x2[i], p);
        });
        modulator.next(s, block);
        stage("channel", ctx, [&] {
            channel->apply(block);
            if (dump) dump->write(block);
            return 0;
        });
        const EncodedSample r = stage("demodulate", ctx, [&] { return demodulator.demodulate(block); });
        const DecodedPair d = decode(r, p);
        x1_hat[b] = d.x1;
        x2_hat[b] = d.x2;
    }

    const double block_period = x1.sample_period() * static_cast<double>(per_block);
    SourceTrace x1_ref = decimate_hold(x1, per_block);
    SourceTrace x2_ref = decimate_hold(x2, per_block);
    x1_ref = x1_ref.with_samples(truncated(x1_ref.samples(), blocks));
    x2_ref = x2_ref.with_samples(truncated(x2_ref.samples(), blocks));
    SourceTrace x1_dec(block_period, std::move(x1_hat), "V");
    SourceTrace x2_dec(block_period, std::move(x2_hat), "V");

    const AnalysisSettings& a = cfg.analysis;
    auto [x1_filt, x2_filt] = stage("filter", ctx, [&] {
        SourceTrace f1 = threshold_filter(x1_dec, a.threshold);
        SourceTrace f2 = a.median_order > 0 && x2_dec.size() > static_cast<std::size_t>(a.median_order)
                             ? median_filter(x2_dec, a.median_order)
                             : x2_dec;
        return std::pair{std::move(f1), std::move(f2)};
    });

    stage("metrics", ctx, [&] {
        report.mse = make_mse_pair(mse(x1_ref, x1_dec), mse(x2_ref, x2_dec));
        const double min_sep = std::max(a.min_separation, block_period);
        report.source_peaks = detect_peaks(threshold_filter(x1_ref, a.threshold), a.min_height, min_sep);
        report.receiver_peaks = detect_peaks(x1_filt, a.min_height, min_sep);
        if (report.source_peaks.size() >= 5 && report.receiver_peaks.size() >= 5) {
            report.ks = ks_two_sample(peak_values(report.source_peaks), peak_values(report.receiver_peaks));
        }
        return 0;
    });

    report.x1_reference = std::move(x1_ref);
    report.x2_reference = std::move(x2_ref);
    report.x1_decoded = std::move(x1_dec);
    report.x2_decoded = std::move(x2_dec);
    report.x1_filtered = std::move(x1_filt);
    report.x2_filtered = std::move(x2_filt);
    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

std::vector<RunReport> sweep_levels(const RunConfig& cfg, const std::vector<int>& levels, unsigned workers) {
    for (int l : levels) {
        if (l < 2) throw ConfigError("sweep levels must all be >= 2");
    }
    if (levels.empty()) return {};
    cfg.validate();
    const SourcePair sources = make_sources(cfg);

    std::vector<std::optional<RunReport>> results(levels.size());
    std::vector<std::exception_ptr> errors(levels.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < levels.size(); i = next++) {
            try {
                RunConfig point = cfg;
                point.codec.levels = levels[i];
                results[i] = run_link(point, sources);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(levels.size()));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    std::vector<RunReport> out;
    out.reserve(results.size());
    for (auto& r : results) out.push_back(std::move(*r));
    return out;
}

std::vector<int> parse_level_spec(const std::string& spec) {
    auto to_int = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("bad level specification '" + spec + "'");
        }
    };
    std::vector<int> out;
    if (spec.find(':') != std::string::npos) {
        std::vector<int> parts;
        std::stringstream ss(spec);
        std::string item;
        while (std::getline(ss, item, ':')) parts.push_back(to_int(item));
        if (parts.size() != 3 || parts[2] <= 0 || parts[1] < parts[0]) {
            throw ConfigError("level range must be start:stop:step with step > 0");
        }
        for (int l = parts[0]; l <= parts[1]; l += parts[2]) out.push_back(l);
    } else {
        std::stringstream ss(spec);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (!item.empty()) out.push_back(to_int(item));
        }
    }
    for (int l : out) {
        if (l < 2) throw ConfigError("level counts must be >= 2");
    }
    return out;
}

std::string report_to_json(const RunReport& r, bool include_wall_time) {
    json j;
    j["header"] = kSyntheticSourceNote;
    j["code_version"] = r.code_version;
    j["config"] = json::parse(to_json_text(r.config));
    j["run_seed"] = r.run_seed;
    j["blocks"] = r.blocks;
    j["mse"] = {{"mse_x1", r.mse.mse_x1}, {"mse_x2", r.mse.mse_x2}, {"sum", r.mse.sum}};
    j["peaks"] = {{"source", peaks_json(r.source_peaks)}, {"receiver", peaks_json(r.receiver_peaks)}};
    if (r.ks) {
        j["ks"] = {{"statistic", r.ks->statistic}, {"p_value", r.ks->p_value}, {"reject_at_5pct", r.ks->reject_at_5pct}};
    } else {
        j["ks"] = nullptr;
    }
    if (include_wall_time) j["wall_time_s"] = r.wall_time_s;
    return j.dump(2) + "\n";
}

void write_run_outputs(const RunReport& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "report.json", std::ios::binary);
        out << report_to_json(r);
    }
    {
        std::ofstream out(dir / "config.json", std::ios::binary);
        out << to_json_text(r.config);
    }
    write_peaks_csv(dir / "peaks_source.csv", r.source_peaks);
    write_peaks_csv(dir / "peaks_receiver.csv", r.receiver_peaks);
    if (!r.source_peaks.empty()) write_cdf_csv(dir / "cdf_source.csv", empirical_cdf(peak_values(r.source_peaks)));
    if (!r.receiver_peaks.empty()) {
        write_cdf_csv(dir / "cdf_receiver.csv", empirical_cdf(peak_values(r.receiver_peaks)));
    }
    const std::pair<const char*, const std::optional<SourceTrace>*> traces[] = {
        {"x1_reference.csv", &r.x1_reference}, {"x2_reference.csv", &r.x2_reference},
        {"x1_decoded.csv", &r.x1_decoded},     {"x2_decoded.csv", &r.x2_decoded},
        {"x1_filtered.csv", &r.x1_filtered},   {"x2_filtered.csv", &r.x2_filtered},
    };
    for (const auto& [name, trace] : traces) {
        if (*trace) write_trace_csv(dir / name, **trace);
    }
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<RunReport>& reports) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << "L,mse_x1,mse_x2,sum\n";
    for (const auto& r : reports) {
        out << r.config.codec.levels << ',' << format_double(r.mse.mse_x1) << ',' << format_double(r.mse.mse_x2)
            << ',' << format_double(r.mse.sum) << '\n';
    }
}

RunConfig experiment_config(const ReproduceOptions& opt, ReceiverProfile profile, ChannelFamily family,
                            double csnr_db, double default_duration) {
    RunConfig cfg;
    cfg.seed = opt.seed;
    cfg.duration = opt.duration > 0.0 ? opt.duration : default_duration;
    cfg.modem = modem_settings_for(profile);
    cfg.modem.interpolation = opt.interpolation;
    cfg.channel = channel_settings_for(family, csnr_db);
    return cfg;
}

namespace {

struct ChannelCase {
    ChannelFamily family;
    double csnr_db;
};

// AWGN and flat fading at 0 dB, the multipath channels at 10 dB.
constexpr ChannelCase kPeakCases[] = {
    {ChannelFamily::awgn, 0.0},
    {ChannelFamily::flat_rayleigh, 0.0},
    {ChannelFamily::jtc_indoor_a, 10.0},
    {ChannelFamily::jtc_outdoor_low_a, 10.0},
};

constexpr double kSweepDuration = 10.0;
constexpr double kPeakDuration = 20.0;

std::vector<int> default_grid() {
    std::vector<int> grid;
    for (int l = 5; l <= 100; l += 5) grid.push_back(l);
    return grid;
}

struct SweepExperiment {
    const char* id;
    ReceiverProfile profile;
    ChannelFamily family;
    double csnr_db;
};

constexpr SweepExperiment kSweeps[] = {
    {"fig6a", ReceiverProfile::fast, ChannelFamily::awgn, 0.0},
    {"fig6b", ReceiverProfile::slow, ChannelFamily::awgn, 0.0},
    {"fig6c", ReceiverProfile::fast, ChannelFamily::flat_rayleigh, 0.0},
    {"fig7a", ReceiverProfile::fast, ChannelFamily::jtc_indoor_a, 0.0},
    {"fig7b", ReceiverProfile::fast, ChannelFamily::jtc_outdoor_low_a, 0.0},
    {"fig7c", ReceiverProfile::fast, ChannelFamily::jtc_outdoor_low_a, 10.0},
};

} // namespace

std::vector<Table1Row> run_table1(const ReproduceOptions& opt) {
    std::vector<Table1Row> rows;
    int case_id = 1;
    for (const auto& c : kPeakCases) {
        for (int levels : {30, 50}) {
            RunConfig cfg = experiment_config(opt, ReceiverProfile::fast, c.family, c.csnr_db, kPeakDuration);
            cfg.codec.levels = levels;
            RunReport r = run_link(cfg);
            if (!r.ks) throw Error("table1: too few peaks for a K-S test " + context_of(cfg));
            rows.push_back({case_id++, c.family, c.csnr_db, cfg.channel.doppler_hz, levels, r.source_peaks.size(),
                            r.receiver_peaks.size(), *r.ks});
        }
    }
    return rows;
}

void write_table1_csv(const std::filesystem::path& path, const std::vector<Table1Row>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << "case,channel,csnr_db,doppler_hz,levels,source_peaks,receiver_peaks,ks_statistic,p_value,reject_5pct\n";
    for (const auto& r : rows) {
        out << r.case_id << ',' << to_string(r.family) << ',' << format_double(r.csnr_db) << ','
            << format_double(r.doppler_hz) << ',' << r.levels << ',' << r.source_peaks << ',' << r.receiver_peaks
            << ',' << format_double(r.ks.statistic) << ',' << format_double(r.ks.p_value) << ','
            << (r.ks.reject_at_5pct ? 1 : 0) << '\n';
    }
}

std::vector<std::filesystem::path> reproduce(const std::string& id, const std::filesystem::path& out_dir,
                                             const ReproduceOptions& opt) {
    if (std::find(kExperimentIds.begin(), kExperimentIds.end(), id) == kExperimentIds.end()) {
        throw ConfigError("unknown experiment id '" + id + "'");
    }
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;

    if (id == "fig4") {
        AjsccParams p;
        p.levels = 16;
        const auto curve = staircase(p, p.x1_max / 2.0, 1601);
        const auto path = out_dir / "fig4_staircase.csv";
        std::ofstream out(path, std::ios::binary);
        out << "x2,encoded\n";
        for (const auto& [x2, y] : curve) out << format_double(x2) << ',' << format_double(y) << '\n';
        written.push_back(path);

        const auto plateau_path = out_dir / "fig4_plateaus.csv";
        std::ofstream pout(plateau_path, std::ios::binary);
        pout << "level,encoded\n";
        const auto plateaus = plateau_values(curve);
        for (std::size_t i = 0; i < plateaus.size(); ++i) pout << i << ',' << format_double(plateaus[i]) << '\n';
        written.push_back(plateau_path);
    } else if (id == "fig5cdf") {
        bool source_written = false;
        for (const auto& c : kPeakCases) {
            RunConfig cfg = experiment_config(opt, ReceiverProfile::fast, c.family, c.csnr_db, kPeakDuration);
            cfg.codec.levels = 30;
            RunReport r = run_link(cfg);
            if (!source_written && !r.source_peaks.empty()) {
                written.push_back(out_dir / "fig5_cdf_source.csv");
                write_cdf_csv(written.back(), empirical_cdf(peak_values(r.source_peaks)));
                source_written = true;
            }
            if (!r.receiver_peaks.empty()) {
                written.push_back(out_dir / (std::string("fig5_cdf_") + to_string(c.family) + ".csv"));
                write_cdf_csv(written.back(), empirical_cdf(peak_values(r.receiver_peaks)));
            }
        }
    } else if (id == "table1") {
        written.push_back(out_dir / "table1.csv");
        write_table1_csv(written.back(), run_table1(opt));
    } else {
        for (const auto& s : kSweeps) {
            if (id != s.id) continue;
            RunConfig cfg = experiment_config(opt, s.profile, s.family, s.csnr_db, kSweepDuration);
            const auto reports = sweep_levels(cfg, opt.levels.empty() ? default_grid() : opt.levels, opt.workers);
            written.push_back(out_dir / (std::string(s.id) + "_mse.csv"));
            write_sweep_csv(written.back(), reports);
        }
    }

    json manifest;
    manifest["experiment"] = id;
    manifest["header"] = kSyntheticSourceNote;
    manifest["code_version"] = code_version();
    manifest["seed"] = opt.seed;
    manifest["interpolation"] = to_string(opt.interpolation);
    json files = json::array();
    for (const auto& f : written) files.push_back(f.filename().string());
    manifest["files"] = files;
    const auto manifest_path = out_dir / (id + "_manifest.json");
    std::ofstream(manifest_path, std::ios::binary) << manifest.dump(2) << "\n";
    written.push_back(manifest_path);
    return written;
}

} // namespace ajscc

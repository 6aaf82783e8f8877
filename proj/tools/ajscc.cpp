// Command-line front end: simulate, sweep, reproduce, staircase.

#include "ajscc/codec.hpp"
#include "ajscc/error.hpp"
#include "ajscc/harness.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

// Overrides shared by simulate and sweep, applied on top of the config file.
struct LinkFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<double> duration;
    std::optional<int> levels;
    std::optional<std::string> profile;
    std::optional<std::string> channel;
    std::optional<std::string> csnr_db;
    std::optional<double> doppler_hz;
    bool no_interp = false;

    void add_to(CLI::App& app, bool with_levels) {
        app.add_option("--config", config_path, "RunConfig JSON file");
        app.add_option("--seed", seed, "Master seed");
        app.add_option("--duration", duration, "Source duration in seconds");
        if (with_levels) app.add_option("--levels", levels, "Number of AJSCC levels");
        app.add_option("--profile", profile, "Receiver profile: fast|slow");
        app.add_option("--channel", channel, "Channel: awgn|flat|jtc-indoor|jtc-outdoor");
        app.add_option("--csnr-db", csnr_db, "Channel SNR in dB, or inf");
        app.add_option("--doppler-hz", doppler_hz, "Doppler spread for multipath channels");
        app.add_flag("--no-interp", no_interp, "Use the raw FFT bin (no peak interpolation)");
    }

    ajscc::RunConfig resolve() const {
        ajscc::RunConfig cfg = config_path.empty() ? ajscc::RunConfig{} : ajscc::load_run_config(config_path);
        if (seed) cfg.seed = *seed;
        if (duration) cfg.duration = *duration;
        if (levels) cfg.codec.levels = *levels;
        if (profile) {
            const auto interp = cfg.modem.interpolation;
            cfg.modem = ajscc::modem_settings_for(ajscc::profile_from_string(*profile));
            cfg.modem.interpolation = interp;
        }
        if (channel) {
            const auto path = cfg.channel.tap_profile_path;
            cfg.channel = ajscc::channel_settings_for(ajscc::channel_family_from_string(*channel), cfg.channel.csnr_db);
            cfg.channel.tap_profile_path = path;
        }
        if (csnr_db) cfg.channel.csnr_db = parse_csnr(*csnr_db);
        if (doppler_hz) cfg.channel.doppler_hz = *doppler_hz;
        if (no_interp) cfg.modem.interpolation = ajscc::PeakInterpolation::none;
        cfg.validate();
        return cfg;
    }

    static double parse_csnr(const std::string& s) {
        if (s == "inf" || s == "+inf") return ajscc::kNoNoise;
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (end == s.c_str() || *end != '\0' || !std::isfinite(v)) {
            throw ajscc::ConfigError("--csnr-db expects a number or inf, got '" + s + "'");
        }
        return v;
    }
};

int simulate(const LinkFlags& flags, const std::string& out_dir, const std::string& dump_path) {
    const ajscc::RunConfig cfg = flags.resolve();
    const ajscc::SourcePair sources = ajscc::make_sources(cfg);
    std::optional<ajscc::BlockDumpWriter> dump;
    if (!dump_path.empty()) dump.emplace(dump_path);
    const ajscc::RunReport report = ajscc::run_link(cfg, sources, dump ? &*dump : nullptr);
    ajscc::write_run_outputs(report, out_dir);
    std::cout << "blocks=" << report.blocks << " mse_x1=" << ajscc::format_double(report.mse.mse_x1)
              << " mse_x2=" << ajscc::format_double(report.mse.mse_x2) << " peaks=" << report.source_peaks.size()
              << "/" << report.receiver_peaks.size();
    if (report.ks) std::cout << " ks_p=" << ajscc::format_double(report.ks->p_value);
    std::cout << "\n";
    return 0;
}

int sweep(const LinkFlags& flags, const std::string& level_spec, const std::string& out_dir, unsigned workers) {
    const ajscc::RunConfig cfg = flags.resolve();
    const auto levels = ajscc::parse_level_spec(level_spec);
    const auto reports = ajscc::sweep_levels(cfg, levels, workers);
    std::filesystem::create_directories(out_dir);
    ajscc::write_sweep_csv(std::filesystem::path(out_dir) / "sweep.csv", reports);
    for (const auto& r : reports) {
        std::ofstream(std::filesystem::path(out_dir) / ("report_L" + std::to_string(r.config.codec.levels) + ".json"),
                      std::ios::binary)
            << ajscc::report_to_json(r);
    }
    std::cout << "wrote " << reports.size() << " sweep points to " << out_dir << "\n";
    return 0;
}

int staircase(int levels, std::optional<double> x1, int points, const std::string& out_path) {
    ajscc::AjsccParams p;
    p.levels = levels;
    p.validate();
    const auto curve = ajscc::staircase(p, x1.value_or(p.x1_max / 2.0), points > 0 ? points : 100 * levels + 1);
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path, std::ios::binary);
        if (!file) throw ajscc::Error("cannot open " + out_path + " for writing");
    }
    std::ostream& out = out_path.empty() ? std::cout : file;
    out << "x2,encoded\n";
    for (const auto& [a, b] : curve) out << ajscc::format_double(a) << ',' << ajscc::format_double(b) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"AJSCC biosignal link simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(ajscc::code_version()));

    LinkFlags sim_flags;
    std::string sim_out;
    std::string dump_path;
    auto* sim = app.add_subcommand("simulate", "Run one link simulation");
    sim_flags.add_to(*sim, true);
    sim->add_option("--out", sim_out, "Output directory")->required();
    sim->add_option("--dump-blocks", dump_path, "Write received baseband blocks (float64 re/im) to this file");

    LinkFlags sweep_flags;
    std::string level_spec = "5:100:5";
    std::string sweep_out;
    unsigned sweep_workers = 0;
    auto* sw = app.add_subcommand("sweep", "Sweep the number of levels");
    sweep_flags.add_to(*sw, false);
    sw->add_option("--levels", level_spec, "start:stop:step or comma list");
    sw->add_option("--out", sweep_out, "Output directory")->required();
    sw->add_option("--workers", sweep_workers, "Worker threads (0: hardware concurrency)");

    std::string repro_id;
    std::string repro_out;
    ajscc::ReproduceOptions repro;
    std::string repro_levels;
    std::string repro_interp = "none";
    auto* rep = app.add_subcommand("reproduce", "Regenerate a figure or table dataset");
    rep->add_option("--id", repro_id, "fig4|fig5cdf|fig6a|fig6b|fig6c|fig7a|fig7b|fig7c|table1")->required();
    rep->add_option("--out", repro_out, "Output directory")->required();
    rep->add_option("--seed", repro.seed, "Master seed");
    rep->add_option("--duration", repro.duration, "Seconds per run (0: experiment default)");
    rep->add_option("--levels", repro_levels, "Override the level grid for sweeps");
    rep->add_option("--interp", repro_interp, "Peak interpolation: none|log_parabolic|complex_ratio");
    rep->add_option("--workers", repro.workers, "Worker threads (0: hardware concurrency)");

    int st_levels = 16;
    std::optional<double> st_x1;
    int st_points = 0;
    std::string st_out;
    auto* st = app.add_subcommand("staircase", "Encoded output against x2 at fixed x1");
    st->add_option("--levels", st_levels, "Number of levels");
    st->add_option("--x1", st_x1, "Fixed x1 in volts (default mid-scale)");
    st->add_option("--points", st_points, "Number of x2 samples (default 100 per level)");
    st->add_option("--out", st_out, "CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*sim) return simulate(sim_flags, sim_out, dump_path);
        if (*sw) return sweep(sweep_flags, level_spec, sweep_out, sweep_workers);
        if (*rep) {
            if (!repro_levels.empty()) repro.levels = ajscc::parse_level_spec(repro_levels);
            repro.interpolation = ajscc::peak_interpolation_from_string(repro_interp);
            for (const auto& f : ajscc::reproduce(repro_id, repro_out, repro)) std::cout << f.string() << "\n";
            return 0;
        }
        if (*st) return staircase(st_levels, st_x1, st_points, st_out);
    } catch (const ajscc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}

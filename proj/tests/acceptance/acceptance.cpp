// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "ajscc/analysis.hpp"
#include "ajscc/channel.hpp"
#include "ajscc/codec.hpp"
#include "ajscc/harness.hpp"
#include "ajscc/random.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace ajscc;

namespace {

constexpr std::uint64_t kMasterSeed = 7;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::filesystem::path work_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "ajscc_acceptance" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Synthetic cytometry with an x2 source uniform over the GSR input range.
SourcePair uniform_gsr_sources(const RunConfig& cfg) {
    SourcePair s = make_sources(cfg);
    Rng rng(derive_seed(cfg.seed, {hash_tag("uniform-gsr")}));
    std::uniform_real_distribution<double> u(cfg.source.gsr_in_lo, cfg.source.gsr_in_hi);
    std::vector<double> g(s.gsr.size());
    for (double& v : g) v = u(rng);
    s.gsr = s.gsr.with_samples(std::move(g));
    return s;
}

RunConfig noiseless_config(int levels) {
    RunConfig cfg;
    cfg.seed = kMasterSeed;
    cfg.duration = 10.0;
    cfg.codec.levels = levels;
    cfg.channel.csnr_db = kNoNoise;
    return cfg;
}

std::vector<double> column(const std::vector<RunReport>& reports, double MsePair::*field) {
    std::vector<double> out;
    for (const auto& r : reports) out.push_back(r.mse.*field);
    return out;
}

// 1. Codec round trip over 10^6 random pairs per level count.
Outcome codec_round_trip() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(derive_seed(kMasterSeed, {1}));
    double worst_x1 = 0.0, worst_x2_margin = -1.0;
    for (int levels : {2, 11, 16, 30, 50}) {
        AjsccParams p;
        p.levels = levels;
        std::uniform_real_distribution<double> u1(0.0, p.x1_max), u2(0.0, p.x2_max);
        for (int i = 0; i < 1000000; ++i) {
            const double x1 = u1(rng), x2 = u2(rng);
            const auto d = decode(encode(x1, x2, p), p);
            worst_x1 = std::max(worst_x1, std::abs(d.x1 - x1));
            worst_x2_margin = std::max(worst_x2_margin, std::abs(d.x2 - x2) - p.spacing() / 2);
        }
    }
    const double elapsed = seconds_since(t0);
    o.detail << "max |x1 err| = " << worst_x1 << " V, max (|x2 err| - delta/2) = " << worst_x2_margin
             << " V, " << elapsed << " s";
    o.require(worst_x1 <= 1e-9, "x1 within 1e-9 V");
    o.require(worst_x2_margin <= 1e-12, "x2 within delta/2");
    o.require(elapsed < 10.0, "runtime < 10 s");
    return o;
}

// 2. Noiseless end-to-end x2 error against delta^2 / 12.
Outcome quantization_law(std::vector<RunReport>& runs) {
    Outcome o;
    double prev = 0.0;
    for (int levels : {8, 16, 32}) {
        const RunConfig cfg = noiseless_config(levels);
        RunReport r = run_link(cfg, uniform_gsr_sources(cfg));
        const double expected = cfg.codec.spacing() * cfg.codec.spacing() / 12.0;
        const double rel = r.mse.mse_x2 / expected - 1.0;
        o.detail << "L=" << levels << " mse_x2/(delta^2/12)-1 = " << rel << "; ";
        o.require(std::abs(rel) <= 0.05, "L=" + std::to_string(levels) + " within 5%");
        if (prev > 0.0) {
            const double ratio = r.mse.mse_x2 / prev;
            o.detail << "ratio " << ratio << "; ";
            // Two 5% bounds compose to about 10% on the ratio.
            o.require(std::abs(ratio / 0.25 - 1.0) <= 0.1025, "doubling L quarters mse_x2");
        }
        prev = r.mse.mse_x2;
        runs.push_back(std::move(r));
    }
    return o;
}

// 3. Staircase at mid-scale x1.
Outcome staircase_shape() {
    Outcome o;
    AjsccParams p;
    p.levels = 16;
    const auto plateaus = plateau_values(staircase(p, p.x1_max / 2, 1601));
    o.detail << plateaus.size() << " plateaus";
    o.require(plateaus.size() == 16, "16 plateaus");
    double worst = 0.0;
    bool increasing = true;
    for (std::size_t i = 1; i < plateaus.size(); ++i) {
        worst = std::max(worst, std::abs(plateaus[i] - plateaus[i - 1] - p.vr()));
        increasing = increasing && plateaus[i] > plateaus[i - 1];
    }
    o.detail << ", max |step - V_R| = " << worst;
    o.require(worst <= 1e-9, "steps equal V_R");
    o.require(increasing, "strictly increasing");
    return o;
}

// 4. Trade-off between the two sources over the default level grid.
Outcome tradeoff_shape() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    ReproduceOptions opt;
    opt.seed = kMasterSeed;
    const RunConfig cfg = experiment_config(opt, ReceiverProfile::fast, ChannelFamily::awgn, 0.0, 10.0);
    std::vector<int> grid;
    for (int l = 5; l <= 100; l += 5) grid.push_back(l);
    const auto reports = sweep_levels(cfg, grid);
    const double elapsed = seconds_since(t0);

    std::vector<double> ls(grid.begin(), grid.end());
    const auto x1 = column(reports, &MsePair::mse_x1);
    const auto x2 = column(reports, &MsePair::mse_x2);
    const auto sum = column(reports, &MsePair::sum);
    const double tau_x2 = kendall_tau(ls, x2);
    const std::size_t half = grid.size() / 2;
    const double tau_x1 = kendall_tau(std::span(ls).subspan(half), std::span(x1).subspan(half));
    const auto best = static_cast<std::size_t>(std::min_element(sum.begin(), sum.end()) - sum.begin());
    o.detail << "tau(mse_x2) = " << tau_x2 << ", tau(mse_x1, L>=" << grid[half] << ") = " << tau_x1
             << ", sum-MSE minimum at L=" << grid[best] << ", " << elapsed << " s";
    o.require(tau_x2 <= -0.8, "mse_x2 decreasing");
    o.require(tau_x1 >= 0.6, "mse_x1 increasing beyond knee");
    o.require(best > 0 && best + 1 < grid.size(), "interior minimum");
    o.require(elapsed < 300.0, "runtime < 5 min");
    return o;
}

// 5. Fast receiver beats the slow one on cytometry for small L.
Outcome profile_comparison(std::vector<RunReport>& slow_runs) {
    Outcome o;
    ReproduceOptions opt;
    opt.seed = kMasterSeed;
    const std::vector<int> levels = {5, 10, 15, 20};
    const auto fast = sweep_levels(experiment_config(opt, ReceiverProfile::fast, ChannelFamily::awgn, 0.0, 10.0), levels);
    const auto slow = sweep_levels(experiment_config(opt, ReceiverProfile::slow, ChannelFamily::awgn, 0.0, 10.0), levels);
    for (std::size_t i = 0; i < levels.size(); ++i) {
        o.detail << "L=" << levels[i] << " fast " << fast[i].mse.mse_x1 << " vs slow " << slow[i].mse.mse_x1 << "; ";
        o.require(fast[i].mse.mse_x1 < slow[i].mse.mse_x1, "L=" + std::to_string(levels[i]));
    }
    slow_runs = slow;
    return o;
}

// 6. K-S comparison of source and receiver peak distributions.
Outcome table1_analogue() {
    Outcome o;
    ReproduceOptions opt;
    opt.seed = kMasterSeed;
    const auto rows = run_table1(opt);
    o.require(rows.size() == 8, "8 configurations");
    for (const auto& r : rows) {
        o.detail << to_string(r.family) << "/L" << r.levels << ": n=" << r.source_peaks << "/" << r.receiver_peaks
                 << " p=" << r.ks.p_value << "; ";
        o.require(r.source_peaks >= 100 && r.receiver_peaks >= 100, "at least 100 peaks");
        o.require(!r.ks.reject_at_5pct && r.ks.p_value > 0.05, "no rejection");
    }
    return o;
}

// 7. Channel statistics.
Outcome channel_statistics() {
    Outcome o;
    {
        std::vector<BasebandBlock> blocks(128);
        for (auto& b : blocks) b.samples.assign(8192, Complex(1.0, 0.0));
        const auto noisy = apply_awgn(blocks, 0.0, derive_seed(kMasterSeed, {7, 1}));
        double var = 0.0;
        std::size_t n = 0;
        for (const auto& b : noisy) {
            for (const auto& z : b.samples) var += std::norm(z - 1.0);
            n += b.samples.size();
        }
        var /= static_cast<double>(n);
        o.detail << "AWGN variance " << var << " over " << n << " samples; ";
        o.require(std::abs(var - 1.0) <= 0.02, "AWGN variance within 2%");
    }
    {
        FlatRayleighChannel ch(kNoNoise, 1.0, derive_seed(kMasterSeed, {7, 2}));
        std::vector<double> mags;
        BasebandBlock b;
        for (int i = 0; i < 100000; ++i) {
            b.samples.assign(1, Complex(1.0, 0.0));
            ch.apply(b);
            mags.push_back(std::abs(ch.last_gain()));
        }
        const auto ks = ks_one_sample(mags, [](double r) { return 1.0 - std::exp(-r * r); });
        o.detail << "flat |h| K-S p = " << ks.p_value << "; ";
        o.require(ks.p_value > 0.01, "flat fading magnitude is Rayleigh");
    }
    const auto single = TapProfile::from_db("single", {{0.0, 0.0}});
    for (double fd : {5.0, 20.0}) {
        const int realizations = 400;
        const double dt = 1e-3;
        const int lags = 51;
        std::vector<Complex> acc(lags);
        double power = 0.0;
        for (int r = 0; r < realizations; ++r) {
            MultipathChannel ch(single, fd, kNoNoise, 1.0, 8.192e6, 8192,
                                derive_seed(kMasterSeed, {7, 3, static_cast<std::uint64_t>(r)}));
            std::vector<Complex> h(1000 + lags);
            for (std::size_t i = 0; i < h.size(); ++i) h[i] = ch.tap_gain(0, static_cast<double>(i) * dt);
            for (int t = 0; t < 1000; t += 10) {
                power += std::norm(h[t]);
                for (int l = 0; l < lags; ++l) acc[l] += h[t + l] * std::conj(h[t]);
            }
        }
        double worst = 0.0;
        for (int l = 0; l < lags; ++l) {
            const double expected = std::cyl_bessel_j(0.0, 2 * std::numbers::pi * fd * l * dt);
            worst = std::max(worst, std::abs(acc[l].real() / power - expected));
        }
        o.detail << "fD=" << fd << " Hz max |rho - J0| = " << worst << "; ";
        o.require(worst <= 0.05, "Jakes autocorrelation at " + std::to_string(fd) + " Hz");
    }
    return o;
}

// Every CSV artefact of a batch of runs, concatenated in a fixed order.
std::string csv_fingerprint(const std::vector<RunReport>& runs, const std::filesystem::path& dir) {
    std::string all;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto sub = dir / std::to_string(i);
        write_run_outputs(runs[i], sub);
        std::vector<std::filesystem::path> files;
        for (const auto& e : std::filesystem::directory_iterator(sub)) {
            if (e.path().extension() == ".csv") files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) all += f.filename().string() + "\n" + slurp(f);
    }
    write_sweep_csv(dir / "sweep.csv", runs);
    return all + slurp(dir / "sweep.csv");
}

// 8. Re-running acceptance workloads with the same master seed.
Outcome determinism(const std::vector<RunReport>& quant_runs, const std::vector<RunReport>& slow_runs) {
    Outcome o;
    std::vector<RunReport> quant_again;
    for (int levels : {8, 16, 32}) {
        const RunConfig cfg = noiseless_config(levels);
        quant_again.push_back(run_link(cfg, uniform_gsr_sources(cfg)));
    }
    ReproduceOptions opt;
    opt.seed = kMasterSeed;
    const auto slow_again =
        sweep_levels(experiment_config(opt, ReceiverProfile::slow, ChannelFamily::awgn, 0.0, 10.0), {5, 10, 15, 20});

    // Fading channels, run twice here.
    std::vector<RunReport> fading[2];
    for (auto& batch : fading) {
        for (auto family : {ChannelFamily::flat_rayleigh, ChannelFamily::jtc_indoor_a, ChannelFamily::jtc_outdoor_low_a}) {
            RunConfig cfg = experiment_config(opt, ReceiverProfile::fast, family, 10.0, 3.0);
            cfg.codec.levels = 30;
            batch.push_back(run_link(cfg));
        }
    }
    const bool quant_same = csv_fingerprint(quant_runs, work_dir("det_q1")) ==
                            csv_fingerprint(quant_again, work_dir("det_q2"));
    const bool slow_same = csv_fingerprint(slow_runs, work_dir("det_s1")) ==
                           csv_fingerprint(slow_again, work_dir("det_s2"));
    const bool fading_same = csv_fingerprint(fading[0], work_dir("det_f1")) ==
                             csv_fingerprint(fading[1], work_dir("det_f2"));
    const auto fig_a = reproduce("fig4", work_dir("det_fig4a"), opt);
    const auto fig_b = reproduce("fig4", work_dir("det_fig4b"), opt);
    bool fig_same = fig_a.size() == fig_b.size();
    for (std::size_t i = 0; fig_same && i < fig_a.size(); ++i) fig_same = slurp(fig_a[i]) == slurp(fig_b[i]);

    o.detail << "noiseless sweep " << (quant_same ? "identical" : "differs") << ", slow-profile sweep "
             << (slow_same ? "identical" : "differs") << ", fading runs " << (fading_same ? "identical" : "differs")
             << ", staircase " << (fig_same ? "identical" : "differs");
    o.require(quant_same && slow_same && fading_same && fig_same, "byte-identical CSV outputs");
    return o;
}

// 9. Error floor removed by the threshold, isolated spikes removed by the median.
Outcome filter_behavior() {
    Outcome o;
    {
        RunConfig cfg;
        cfg.seed = kMasterSeed;
        cfg.duration = 10.0;
        cfg.design = EncoderDesign::design1;
        cfg.codec.levels = kDesign1Levels;
        cfg.codec.design1_bias = 5e-4;
        cfg.channel.csnr_db = kNoNoise;
        cfg.source.cytometry.baseline = 0.0;
        cfg.source.cytometry.noise_sd = 0.0;
        // Largest floor: the top active stage contributes (L - 1) biases.
        const double max_floor = cfg.codec.x1_max * (kDesign1Levels - 1) * cfg.codec.design1_bias / cfg.codec.vr();
        cfg.analysis.threshold = 1.05 * max_floor;
        const auto r = run_link(cfg);
        std::size_t gaps = 0, floored = 0, survived = 0;
        for (std::size_t i = 0; i < r.blocks; ++i) {
            if ((*r.x1_reference)[i] > 1e-9) continue; // inside a pulse
            ++gaps;
            if ((*r.x1_decoded)[i] > 1e-6) ++floored;
            if ((*r.x1_filtered)[i] != 0.0) ++survived;
        }
        o.detail << "design-1 floor: " << floored << "/" << gaps << " inter-pulse samples nonzero before, "
                 << survived << " after threshold " << cfg.analysis.threshold << " V; ";
        o.require(gaps > 0 && floored > 0, "nonzero inter-pulse floor");
        o.require(survived == 0, "threshold zeroes the floor");
        o.require(r.receiver_peaks.size() == r.source_peaks.size(), "pulses survive the threshold");
    }
    {
        RunConfig cfg;
        cfg.seed = kMasterSeed;
        cfg.duration = 10.0;
        cfg.codec.levels = 30;
        cfg.channel = channel_settings_for(ChannelFamily::flat_rayleigh, 0.0);
        cfg.modem.interpolation = PeakInterpolation::none;
        const auto r = run_link(cfg);
        const double gross = 1.5 * cfg.codec.spacing();
        std::size_t before = 0, after = 0;
        for (std::size_t i = 0; i < r.blocks; ++i) {
            if (std::abs((*r.x2_decoded)[i] - (*r.x2_reference)[i]) > gross) ++before;
            if (std::abs((*r.x2_filtered)[i] - (*r.x2_reference)[i]) > gross) ++after;
        }
        o.detail << "GSR spikes beyond 1.5 delta: " << before << " before, " << after << " after order-"
                 << cfg.analysis.median_order << " median";
        o.require(before > 0, "decoded GSR has spikes");
        o.require(after == 0, "median filter removes them");
    }
    return o;
}

} // namespace

int main() {
    std::vector<RunReport> quant_runs, slow_runs;
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"codec round-trip", codec_round_trip},
        {"quantization law", [&] { return quantization_law(quant_runs); }},
        {"staircase", staircase_shape},
        {"trade-off shape", tradeoff_shape},
        {"profile comparison", [&] { return profile_comparison(slow_runs); }},
        {"K-S table", table1_analogue},
        {"channel statistics", channel_statistics},
        {"determinism", [&] { return determinism(quant_runs, slow_runs); }},
        {"filter behavior", filter_behavior},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        if (!o.pass) ++failures;
        std::cout << "criterion " << i + 1 << " (" << criteria[i].first << "): " << (o.pass ? "PASS" : "FAIL") << " - "
                  << o.detail.str() << std::endl;
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}

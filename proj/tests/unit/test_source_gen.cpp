#include "ajscc/analysis.hpp"
#include "ajscc/error.hpp"
#include "ajscc/fft.hpp"
#include "ajscc/source_gen.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace ajscc;

TEST_CASE("cytometry spec validation") {
    CytometrySynthSpec s;
    CHECK_NOTHROW(s.validate());
    s.pulse_width = 0.0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = {};
    s.pulse_rate = -1.0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = {};
    s.peak_amplitude_mean = 0.05;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = {};
    s.pulse_rate = 300.0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    CHECK_THROWS_AS(gen_cytometry(CytometrySynthSpec{}, 0.03, 1e-3, 1), PreconditionError);
}

TEST_CASE("no events and no noise gives a constant baseline") {
    CytometrySynthSpec s;
    s.pulse_rate = 0.0;
    s.noise_sd = 0.0;
    s.baseline = 0.1;
    const auto t = gen_cytometry(s, 1.0, 1e-3, 4);
    REQUIRE(t.size() == 1000);
    for (double v : t.samples()) CHECK(v == 0.1);
}

TEST_CASE("cytometry generation is deterministic per seed") {
    const CytometrySynthSpec s;
    const auto a = gen_cytometry(s, 5.0, 1e-3, 17);
    const auto b = gen_cytometry(s, 5.0, 1e-3, 17);
    const auto c = gen_cytometry(s, 5.0, 1e-3, 18);
    CHECK(a.samples() == b.samples());
    CHECK(a.samples() != c.samples());
}

TEST_CASE("schedule respects the minimum spacing and the Poisson rate") {
    CytometrySynthSpec s;
    s.pulse_rate = 5.0;
    double total = 0.0;
    const int runs = 200;
    for (int seed = 0; seed < runs; ++seed) {
        const auto pulses = schedule_pulses(s, 10.0, seed);
        for (std::size_t i = 1; i < pulses.size(); ++i) {
            CHECK(pulses[i].time - pulses[i - 1].time >= 2 * s.pulse_width);
        }
        total += static_cast<double>(pulses.size());
    }
    // 50 expected arrivals per run; thinning removes about rate * 2 * width of them.
    const double mean = total / runs;
    const double expected = 50.0 * std::exp(-5.0 * 2 * s.pulse_width);
    CHECK(std::abs(mean - expected) < 3.0 * std::sqrt(50.0 / runs));
}

TEST_CASE("detected pulse count equals the scheduled count") {
    CytometrySynthSpec s;
    s.pulse_rate = 5.0;
    s.noise_sd = 0.0;
    s.peak_amplitude_sd = 0.0;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto schedule = schedule_pulses(s, 10.0, seed);
        const auto trace = gen_cytometry(s, 10.0, 1e-3, seed);
        const auto events = detect_peaks(trace, 0.5, 2 * s.pulse_width);
        REQUIRE(events.size() == schedule.size());
        for (std::size_t i = 0; i < events.size(); ++i) {
            CHECK(std::abs(events[i].time - schedule[i].time) <= 1e-3 + 1e-12);
        }
        CHECK(std::abs(static_cast<double>(schedule.size()) - 50.0) <= 3 * std::sqrt(50.0));
    }
}

TEST_CASE("gsr stays in range and is constant without drift or events") {
    GsrSynthSpec s;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto t = gen_gsr(s, 60.0, 1e-3, seed);
        for (double v : t.samples()) {
            CHECK(v >= 0.0);
            CHECK(v <= 2.6);
        }
    }
    s.drift_bandwidth = 0.0;
    s.event_rate = 0.0;
    const auto flat = gen_gsr(s, 10.0, 1e-3, 1);
    for (double v : flat.samples()) CHECK(v == s.tonic_level);

    GsrSynthSpec bad;
    bad.conductance_max = 0.0;
    CHECK_THROWS_AS(gen_gsr(bad, 1.0, 1e-3, 1), ConfigError);
}

TEST_CASE("gsr spectrum is confined below twice the drift bandwidth") {
    const GsrSynthSpec s;
    const auto t = gen_gsr(s, 200.0, 1e-3, 23);
    std::vector<double> x = t.samples();
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    for (double& v : x) v -= mean;
    const auto spectrum = real_forward(x);
    const double bin_hz = 1.0 / t.duration();
    double total = 0.0, high = 0.0;
    for (std::size_t k = 1; k < spectrum.size(); ++k) {
        const double p = std::norm(spectrum[k]);
        total += p;
        if (k * bin_hz > 2 * s.drift_bandwidth) high += p;
    }
    CHECK(high / total < 0.01);
}

TEST_CASE("gsr generation is deterministic per seed") {
    const GsrSynthSpec s;
    CHECK(gen_gsr(s, 20.0, 1e-3, 3).samples() == gen_gsr(s, 20.0, 1e-3, 3).samples());
    CHECK(gen_gsr(s, 20.0, 1e-3, 3).samples() != gen_gsr(s, 20.0, 1e-3, 4).samples());
}

namespace {

constexpr double kFs = 2.0e6; // 4 * f0

SourceTrace envelope(std::size_t n, const auto& f) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = f(static_cast<double>(i) / kFs);
    return SourceTrace(1.0 / kFs, std::move(x));
}

} // namespace

TEST_CASE("lock-in rejects undersampled input and passes zero") {
    const FrontEndSpec fe;
    CHECK_THROWS_AS(lockin_frontend(SourceTrace(1e-6, std::vector<double>(100, 1.0)), fe), PreconditionError);
    const auto out = lockin_frontend(envelope(1000, [](double) { return 0.0; }), fe);
    for (double v : out.samples()) CHECK(v == 0.0);
}

TEST_CASE("lock-in recovers a rectangular pulse at half the gain") {
    FrontEndSpec fe;
    fe.gain = 3.0;
    const double h = 0.4;
    const auto in = envelope(40000, [&](double t) { return t >= 2e-3 && t < 16e-3 ? h : 0.0; });
    const auto out = lockin_frontend(in, fe);
    // Average over the settled plateau, well after the filter transient.
    double acc = 0.0;
    int count = 0;
    for (std::size_t i = 20000; i < 30000; ++i, ++count) acc += out[i];
    CHECK(acc / count == doctest::Approx(fe.gain * h / 2).epsilon(0.02));
}

TEST_CASE("lock-in passband follows the Butterworth magnitude") {
    const FrontEndSpec fe;
    for (double fe_hz : {200.0, 1000.0}) {
        const double a = 0.5;
        const auto in = envelope(80000, [&](double t) { return a * std::sin(2 * std::numbers::pi * fe_hz * t); });
        const auto out = lockin_frontend(in, fe);
        // Amplitude by projection onto sin/cos over the last 20 ms (whole periods).
        double s = 0.0, c = 0.0;
        const std::size_t start = 40000;
        for (std::size_t i = start; i < out.size(); ++i) {
            const double w = 2 * std::numbers::pi * fe_hz * static_cast<double>(i) / kFs;
            s += out[i] * std::sin(w);
            c += out[i] * std::cos(w);
        }
        const double n = static_cast<double>(out.size() - start);
        const double amp = 2.0 * std::hypot(s, c) / n;
        const double expected = fe.gain * a / 2 / std::sqrt(1 + std::pow(fe_hz / fe.lowpass_cutoff, 4));
        CHECK(amp == doctest::Approx(expected).epsilon(0.02));
    }
}

TEST_CASE("lock-in is linear") {
    const FrontEndSpec fe;
    const auto p1 = envelope(20000, [](double t) { return t > 1e-3 && t < 3e-3 ? 1.0 : 0.0; });
    const auto p2 = envelope(20000, [](double t) { return std::sin(2 * std::numbers::pi * 300 * t); });
    std::vector<double> mix(p1.size());
    for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = 2.0 * p1[i] - 0.7 * p2[i];
    const auto o1 = lockin_frontend(p1, fe), o2 = lockin_frontend(p2, fe);
    const auto om = lockin_frontend(p1.with_samples(mix), fe);
    for (std::size_t i = 0; i < om.size(); ++i) {
        CHECK(om[i] == doctest::Approx(2.0 * o1[i] - 0.7 * o2[i]).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("lock-in decimation keeps every k-th sample") {
    const FrontEndSpec fe;
    const auto in = envelope(4000, [](double t) { return t > 1e-4 ? 1.0 : 0.0; });
    const auto full = lockin_frontend(in, fe);
    const auto dec = lockin_frontend(in, fe, 10);
    REQUIRE(dec.size() == 400);
    CHECK(dec.sample_period() == doctest::Approx(10.0 / kFs));
    for (std::size_t i = 0; i < dec.size(); ++i) CHECK(dec[i] == full[10 * i]);
}

TEST_CASE("rescale is an order-preserving clamped affine map") {
    const SourceTrace t(1e-3, {-1.0, 0.0, 1.3, 2.6, 4.0});
    const auto y = rescale(t, 0.0, 2.6, 1.0, 3.0);
    CHECK(y[0] == 1.0);
    CHECK(y[1] == 1.0);
    CHECK(y[2] == doctest::Approx(2.0));
    CHECK(y[3] == doctest::Approx(3.0));
    CHECK(y[4] == 3.0);
    CHECK(rescale(t, -5.0, 5.0, -5.0, 5.0).samples() == t.samples());
    CHECK_THROWS_AS(rescale(t, 1.0, 1.0, 0.0, 1.0), ConfigError);
    CHECK_THROWS_AS(rescale(t, 0.0, 1.0, 2.0, 1.0), ConfigError);
    for (double v = 0.0; v <= 2.6; v += 0.01) {
        const double fwd = rescale_value(v, 0.0, 2.6, 1.0, 3.0);
        CHECK(rescale_value(fwd, 1.0, 3.0, 0.0, 2.6) == doctest::Approx(v).epsilon(1e-12).scale(1.0));
    }
}

#include "ajscc/channel.hpp"

#include "ajscc/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>

namespace ajscc {
namespace {

constexpr std::uint64_t kGainStream = 0x6761696e; // "gain"
constexpr std::uint64_t kTapStream = 0x746170;    // "tap"

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double parse_number(const std::string& text, const std::string& where) {
    double v = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw ConfigError(where + ": cannot parse number '" + text + "'");
    }
    return v;
}

} // namespace

const char* to_string(ChannelFamily f) {
    switch (f) {
    case ChannelFamily::awgn: return "awgn";
    case ChannelFamily::flat_rayleigh: return "flat";
    case ChannelFamily::jtc_indoor_a: return "jtc-indoor";
    case ChannelFamily::jtc_outdoor_low_a: return "jtc-outdoor";
    }
    return "?";
}

ChannelFamily channel_family_from_string(const std::string& s) {
    if (s == "awgn") return ChannelFamily::awgn;
    if (s == "flat" || s == "flat_rayleigh") return ChannelFamily::flat_rayleigh;
    if (s == "jtc-indoor" || s == "jtc_indoor_a") return ChannelFamily::jtc_indoor_a;
    if (s == "jtc-outdoor" || s == "jtc_outdoor_low_a") return ChannelFamily::jtc_outdoor_low_a;
    throw ConfigError("unknown channel family '" + s + "'");
}

bool is_multipath(ChannelFamily f) noexcept {
    return f == ChannelFamily::jtc_indoor_a || f == ChannelFamily::jtc_outdoor_low_a;
}

double default_doppler(ChannelFamily f) noexcept {
    switch (f) {
    case ChannelFamily::jtc_indoor_a: return 5.0;
    case ChannelFamily::jtc_outdoor_low_a: return 20.0;
    default: return 0.0;
    }
}

TapProfile TapProfile::from_db(std::string name, const std::vector<std::pair<double, double>>& delay_db) {
    if (delay_db.empty()) throw ConfigError("tap profile '" + name + "' has no taps");
    TapProfile p{std::move(name), {}};
    double total = 0.0;
    for (std::size_t i = 0; i < delay_db.size(); ++i) {
        const auto [delay, db] = delay_db[i];
        if (!std::isfinite(delay) || delay < 0.0) throw ConfigError("tap delays must be non-negative");
        if (i == 0 && delay != 0.0) throw ConfigError("first tap delay must be 0");
        if (i > 0 && !(delay > delay_db[i - 1].first)) {
            throw ConfigError("tap delays must be strictly increasing");
        }
        if (std::isnan(db) || db == std::numeric_limits<double>::infinity()) {
            throw ConfigError("tap power must be a finite dB value or -inf");
        }
        const double lin = std::pow(10.0, db / 10.0);
        total += lin;
        p.taps.push_back({delay, db, lin});
    }
    if (!(total > 0.0)) throw ConfigError("tap profile '" + p.name + "' cannot be normalised (all taps -inf dB)");
    for (auto& t : p.taps) t.linear_power /= total;
    return p;
}

TapProfile load_profile(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open tap profile " + path.string());
    std::vector<std::pair<double, double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto comma = body.find(',');
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (comma == std::string::npos) throw ConfigError(where + ": expected `delay_seconds,power_db`");
        rows.emplace_back(parse_number(trim(body.substr(0, comma)), where),
                          parse_number(trim(body.substr(comma + 1)), where));
    }
    return TapProfile::from_db(path.stem().string(), rows);
}

std::filesystem::path default_profile_path(ChannelFamily f) {
    const std::filesystem::path dir = AJSCC_PROFILE_DIR;
    switch (f) {
    case ChannelFamily::jtc_indoor_a: return dir / "jtc_indoor_residential_a.csv";
    case ChannelFamily::jtc_outdoor_low_a: return dir / "jtc_outdoor_residential_low_antenna_a.csv";
    default: throw ConfigError(std::string("channel family ") + to_string(f) + " has no tap profile");
    }
}

void ChannelSpec::validate() const {
    if (std::isnan(csnr_db) || csnr_db == -std::numeric_limits<double>::infinity()) {
        throw ConfigError("csnr_db must be a number or +inf");
    }
    if (!(doppler_hz >= 0.0) || !std::isfinite(doppler_hz)) throw ConfigError("doppler_hz must be >= 0");
    if (!is_multipath(family) && doppler_hz != 0.0) {
        throw ConfigError(std::string(to_string(family)) + " channel has no Doppler; doppler_hz must be 0");
    }
    if (is_multipath(family) && !tap_profile) {
        throw ConfigError("multipath channel requires a tap profile");
    }
}

double noise_variance(double csnr_db, double signal_power, double mean_channel_gain) {
    if (csnr_db == std::numeric_limits<double>::infinity()) return 0.0;
    return mean_channel_gain * signal_power / std::pow(10.0, csnr_db / 10.0);
}

double measure_power(const std::vector<BasebandBlock>& blocks) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& b : blocks) {
        for (const Complex& z : b.samples) sum += std::norm(z);
        count += b.samples.size();
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

JakesProcess::JakesProcess(double doppler_hz, double power, Rng& rng, int oscillators)
    : amplitude_(std::sqrt(power / static_cast<double>(oscillators))) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    omega_.reserve(static_cast<std::size_t>(oscillators));
    phase_.reserve(static_cast<std::size_t>(oscillators));
    for (int n = 0; n < oscillators; ++n) {
        omega_.push_back(2.0 * std::numbers::pi * doppler_hz * std::cos(angle(rng)));
        phase_.push_back(angle(rng));
    }
}

Complex JakesProcess::at(double t) const {
    Complex sum{0.0, 0.0};
    for (std::size_t n = 0; n < omega_.size(); ++n) sum += std::polar(1.0, omega_[n] * t + phase_[n]);
    return amplitude_ * sum;
}

AwgnChannel::AwgnChannel(double csnr_db, double signal_power, std::uint64_t seed)
    : variance_(ajscc::noise_variance(csnr_db, signal_power)), rng_(seed) {}

void AwgnChannel::apply(BasebandBlock& block) {
    if (variance_ == 0.0) return;
    std::normal_distribution<double> component(0.0, std::sqrt(variance_ / 2.0));
    for (Complex& z : block.samples) {
        const double re = component(rng_);
        const double im = component(rng_);
        z += Complex(re, im);
    }
}

FlatRayleighChannel::FlatRayleighChannel(double csnr_db, double signal_power, std::uint64_t seed,
                                         bool force_unit_gain)
    : force_unit_gain_(force_unit_gain), gain_rng_(derive_seed(seed, {kGainStream})),
      noise_(csnr_db, signal_power, seed) {}

void FlatRayleighChannel::apply(BasebandBlock& block) {
    if (force_unit_gain_) {
        last_gain_ = {1.0, 0.0};
    } else {
        std::normal_distribution<double> component(0.0, std::sqrt(0.5));
        const double re = component(gain_rng_);
        const double im = component(gain_rng_);
        last_gain_ = {re, im};
        for (Complex& z : block.samples) z *= last_gain_;
    }
    noise_.apply(block);
}

MultipathChannel::MultipathChannel(const TapProfile& profile, double doppler_hz, double csnr_db,
                                   double signal_power, double sample_rate, std::size_t block_length,
                                   std::uint64_t seed)
    : sample_rate_(sample_rate), block_length_(block_length), noise_(csnr_db, signal_power, seed) {
    if (profile.taps.empty()) throw ConfigError("tap profile is empty");
    const double block_duration = static_cast<double>(block_length) / sample_rate;
    std::size_t max_delay = 0;
    for (std::size_t k = 0; k < profile.taps.size(); ++k) {
        const Tap& tap = profile.taps[k];
        if (!(tap.delay < block_duration / 4.0)) {
            throw PreconditionError("tap delay must be shorter than a quarter of the block duration");
        }
        const auto d = static_cast<std::size_t>(std::llround(tap.delay * sample_rate));
        delays_.push_back(d);
        max_delay = std::max(max_delay, d);
        Rng rng(derive_seed(seed, {kTapStream, k}));
        processes_.emplace_back(doppler_hz, tap.linear_power, rng);
    }
    history_.assign(max_delay, Complex{0.0, 0.0});
}

void MultipathChannel::apply(BasebandBlock& block) {
    const std::size_t n = block.samples.size();
    if (n != block_length_) throw PreconditionError("block length does not match channel configuration");
    const double t0 = static_cast<double>(blocks_seen_) * static_cast<double>(n) / sample_rate_;
    const double t1 = static_cast<double>(blocks_seen_ + 1) * static_cast<double>(n) / sample_rate_;
    ++blocks_seen_;

    // Input extended on the left by the tail of the previous block.
    const std::size_t h = history_.size();
    std::vector<Complex> x(h + n);
    std::copy(history_.begin(), history_.end(), x.begin());
    std::copy(block.samples.begin(), block.samples.end(), x.begin() + static_cast<std::ptrdiff_t>(h));

    std::vector<Complex> y(n, Complex{0.0, 0.0});
    for (std::size_t k = 0; k < processes_.size(); ++k) {
        const Complex c0 = processes_[k].at(t0);
        const Complex step = (processes_[k].at(t1) - c0) / static_cast<double>(n);
        const std::size_t offset = h - delays_[k];
        for (std::size_t i = 0; i < n; ++i) {
            y[i] += (c0 + step * static_cast<double>(i)) * x[offset + i];
        }
    }
    if (h > 0) std::copy(x.end() - static_cast<std::ptrdiff_t>(h), x.end(), history_.begin());
    block.samples = std::move(y);
    noise_.apply(block);
}

std::unique_ptr<ChannelModel> make_channel(const ChannelSpec& spec, double sample_rate, std::size_t block_length,
                                           double signal_power) {
    spec.validate();
    switch (spec.family) {
    case ChannelFamily::awgn:
        return std::make_unique<AwgnChannel>(spec.csnr_db, signal_power, spec.seed);
    case ChannelFamily::flat_rayleigh:
        return std::make_unique<FlatRayleighChannel>(spec.csnr_db, signal_power, spec.seed);
    case ChannelFamily::jtc_indoor_a:
    case ChannelFamily::jtc_outdoor_low_a:
        return std::make_unique<MultipathChannel>(*spec.tap_profile, spec.doppler_hz, spec.csnr_db, signal_power,
                                                  sample_rate, block_length, spec.seed);
    }
    throw ConfigError("unhandled channel family");
}

std::vector<BasebandBlock> apply_awgn(std::vector<BasebandBlock> blocks, double csnr_db, std::uint64_t seed) {
    if (blocks.empty()) throw PreconditionError("no blocks to process");
    AwgnChannel ch(csnr_db, measure_power(blocks), seed);
    for (auto& b : blocks) ch.apply(b);
    return blocks;
}

std::vector<BasebandBlock> apply_flat_rayleigh(std::vector<BasebandBlock> blocks, double csnr_db,
                                               std::uint64_t seed) {
    if (blocks.empty()) throw PreconditionError("no blocks to process");
    FlatRayleighChannel ch(csnr_db, measure_power(blocks), seed);
    for (auto& b : blocks) ch.apply(b);
    return blocks;
}

std::vector<BasebandBlock> apply_multipath(std::vector<BasebandBlock> blocks, const ChannelSpec& spec,
                                           double sample_rate) {
    if (blocks.empty()) throw PreconditionError("no blocks to process");
    if (!spec.tap_profile) throw ConfigError("multipath channel requires a tap profile");
    if (!(spec.doppler_hz >= 0.0)) throw ConfigError("doppler_hz must be >= 0");
    MultipathChannel ch(*spec.tap_profile, spec.doppler_hz, spec.csnr_db, measure_power(blocks), sample_rate,
                        blocks.front().samples.size(), spec.seed);
    for (auto& b : blocks) ch.apply(b);
    return blocks;
}

} // namespace ajscc

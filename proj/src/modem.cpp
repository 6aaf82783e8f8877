#include "ajscc/modem.hpp"

#include "ajscc/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numbers>

namespace ajscc {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void put_le(std::ofstream& out, double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(bytes), 8);
}

double get_le(const unsigned char* bytes) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

} // namespace

ModemConfig ModemConfig::fast() { return ModemConfig{}; }

ModemConfig ModemConfig::slow() {
    ModemConfig cfg;
    cfg.f_min = 25e3;
    cfg.f_max = 225e3;
    cfg.sample_rate = 500e3;
    cfg.fft_size = 5000;
    return cfg;
}

void ModemConfig::validate() const {
    if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) throw ConfigError("sample_rate must be positive");
    if (fft_size < 2) throw ConfigError("fft_size must be >= 2");
    if (!(f_min >= 0.0 && f_min < f_max && f_max <= 0.98 * sample_rate / 2.0)) {
        throw ConfigError("modem band must satisfy 0 <= f_min < f_max <= 0.49 * sample_rate");
    }
}

double voltage_to_frequency(double v, double full_scale, const ModemConfig& cfg) {
    const double c = std::clamp(v, 0.0, full_scale);
    return cfg.f_min + (cfg.f_max - cfg.f_min) * c / full_scale;
}

double frequency_to_voltage(double f, double full_scale, const ModemConfig& cfg) {
    const double c = std::clamp(f, cfg.f_min, cfg.f_max);
    return full_scale * (c - cfg.f_min) / (cfg.f_max - cfg.f_min);
}

Modulator::Modulator(const ModemConfig& cfg, double full_scale) : cfg_(cfg), full_scale_(full_scale) {
    cfg_.validate();
    if (!(full_scale > 0.0)) throw ConfigError("modulator full scale must be positive");
}

void Modulator::next(EncodedSample s, BasebandBlock& out) {
    const double f = voltage_to_frequency(s.value, full_scale_, cfg_);
    const double cycles_per_sample = f / cfg_.sample_rate;
    const std::size_t n = cfg_.fft_size;
    out.samples.resize(n);
    out.block_index = index_++;
    for (std::size_t i = 0; i < n; ++i) {
        const double phase = phase_cycles_ + cycles_per_sample * static_cast<double>(i);
        out.samples[i] = std::polar(1.0, kTwoPi * (phase - std::floor(phase)));
    }
    const double end = phase_cycles_ + cycles_per_sample * static_cast<double>(n);
    phase_cycles_ = end - std::floor(end);
}

BasebandBlock Modulator::next(EncodedSample s) {
    BasebandBlock b;
    next(s, b);
    return b;
}

std::vector<BasebandBlock> modulate(std::span<const EncodedSample> encoded, double full_scale,
                                    const ModemConfig& cfg) {
    if (encoded.empty()) throw PreconditionError("nothing to modulate");
    Modulator mod(cfg, full_scale);
    std::vector<BasebandBlock> blocks(encoded.size());
    for (std::size_t i = 0; i < encoded.size(); ++i) mod.next(encoded[i], blocks[i]);
    return blocks;
}

Demodulator::Demodulator(const ModemConfig& cfg, double full_scale)
    : cfg_(cfg), full_scale_(full_scale), fft_(cfg.fft_size) {
    cfg_.validate();
    if (!(full_scale > 0.0)) throw ConfigError("demodulator full scale must be positive");
    const double bin = cfg_.bin_hz();
    k_lo_ = static_cast<std::size_t>(std::floor(cfg_.f_min / bin));
    k_hi_ = std::min(static_cast<std::size_t>(std::ceil(cfg_.f_max / bin)), cfg_.fft_size / 2);
}

double Demodulator::estimate_frequency(const BasebandBlock& block) {
    const std::size_t n = cfg_.fft_size;
    if (block.samples.size() != n) throw PreconditionError("block length does not match fft_size");
    auto spectrum = fft_.forward(block.samples);

    std::size_t best = k_lo_;
    double best_mag = -1.0;
    for (std::size_t k = k_lo_; k <= k_hi_; ++k) {
        const double m = std::norm(spectrum[k]);
        if (m > best_mag) {
            best_mag = m;
            best = k;
        }
    }
    if (!(best_mag > 0.0)) throw DemodulationError("no spectral peak in an all-zero block");

    const Complex left = spectrum[(best + n - 1) % n];
    const Complex mid = spectrum[best];
    const Complex right = spectrum[(best + 1) % n];
    double delta = 0.0;
    switch (cfg_.interpolation) {
    case PeakInterpolation::none:
        break;
    case PeakInterpolation::log_parabolic: {
        const double a = std::abs(left);
        const double c = std::abs(right);
        if (a > 0.0 && c > 0.0) {
            const double la = std::log(a);
            const double lb = std::log(std::abs(mid));
            const double lc = std::log(c);
            const double denom = la - 2.0 * lb + lc;
            if (denom != 0.0) delta = 0.5 * (la - lc) / denom;
        }
        break;
    }
    case PeakInterpolation::complex_ratio: {
        const Complex denom = 2.0 * mid - left - right;
        if (std::norm(denom) > 0.0) {
            const double x = std::numbers::pi / static_cast<double>(n);
            delta = std::tan(x) / x * ((left - right) / denom).real();
        }
        break;
    }
    }
    delta = std::clamp(delta, -0.5, 0.5);
    const double f = (static_cast<double>(best) + delta) * cfg_.bin_hz();
    return std::clamp(f, cfg_.f_min, cfg_.f_max);
}

EncodedSample Demodulator::demodulate(const BasebandBlock& block) {
    return {frequency_to_voltage(estimate_frequency(block), full_scale_, cfg_)};
}

EncodedSample demodulate(const BasebandBlock& block, double full_scale, const ModemConfig& cfg) {
    Demodulator d(cfg, full_scale);
    return d.demodulate(block);
}

BlockDumpWriter::BlockDumpWriter(const std::filesystem::path& path) : out_(path, std::ios::binary) {
    if (!out_) throw Error("cannot open " + path.string() + " for writing");
}

void BlockDumpWriter::write(const BasebandBlock& block) {
    for (const Complex& z : block.samples) {
        put_le(out_, z.real());
        put_le(out_, z.imag());
    }
}

std::vector<BasebandBlock> read_block_dump(const std::filesystem::path& path, std::size_t fft_size) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const std::size_t block_bytes = fft_size * 16;
    if (fft_size == 0 || bytes.size() % block_bytes != 0) {
        throw ConfigError(path.string() + ": size is not a whole number of blocks");
    }
    std::vector<BasebandBlock> blocks(bytes.size() / block_bytes);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        blocks[b].block_index = static_cast<std::int64_t>(b);
        blocks[b].samples.resize(fft_size);
        for (std::size_t i = 0; i < fft_size; ++i) {
            const unsigned char* p = bytes.data() + b * block_bytes + i * 16;
            blocks[b].samples[i] = {get_le(p), get_le(p + 8)};
        }
    }
    return blocks;
}

const char* to_string(PeakInterpolation p) {
    switch (p) {
    case PeakInterpolation::none: return "none";
    case PeakInterpolation::log_parabolic: return "log_parabolic";
    case PeakInterpolation::complex_ratio: return "complex_ratio";
    }
    return "?";
}

PeakInterpolation peak_interpolation_from_string(const std::string& s) {
    if (s == "none") return PeakInterpolation::none;
    if (s == "log_parabolic") return PeakInterpolation::log_parabolic;
    if (s == "complex_ratio") return PeakInterpolation::complex_ratio;
    throw ConfigError("unknown peak interpolation '" + s + "'");
}

} // namespace ajscc

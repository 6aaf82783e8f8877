#pragma once

#include "ajscc/codec.hpp"
#include "ajscc/fft.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

namespace ajscc {

enum class PeakInterpolation {
    none,          // raw FFT bin
    log_parabolic, // 3-point parabola through log-magnitudes
    complex_ratio, // 3-point complex-spectrum ratio with tan(pi/N) correction
};

enum class WindowPolicy { none, rectangular };

struct ModemConfig {
    double f_min = 500e3;
    double f_max = 4e6;
    double sample_rate = 8.192e6;
    std::size_t fft_size = 8192;
    WindowPolicy window = WindowPolicy::rectangular;
    PeakInterpolation interpolation = PeakInterpolation::complex_ratio;

    // 8.192 MHz / 8192-point receiver, one encoded sample per 1 ms.
    static ModemConfig fast();
    // 500 kHz / 5000-point receiver, one encoded sample per 10 ms.
    static ModemConfig slow();

    double bin_hz() const noexcept { return sample_rate / static_cast<double>(fft_size); }
    double block_duration() const noexcept { return static_cast<double>(fft_size) / sample_rate; }

    void validate() const;
    friend bool operator==(const ModemConfig&, const ModemConfig&) = default;
};

struct BasebandBlock {
    std::vector<Complex> samples;
    std::int64_t block_index = 0;
};

// Affine [0, full_scale] <-> [f_min, f_max]; out-of-range inputs clamp.
double voltage_to_frequency(double v, double full_scale, const ModemConfig& cfg);
double frequency_to_voltage(double f, double full_scale, const ModemConfig& cfg);

// Phase-continuous tone-per-block FM source. One instance per stream.
class Modulator {
public:
    Modulator(const ModemConfig& cfg, double full_scale);

    void next(EncodedSample s, BasebandBlock& out);
    BasebandBlock next(EncodedSample s);

private:
    ModemConfig cfg_;
    double full_scale_;
    double phase_cycles_ = 0.0;
    std::int64_t index_ = 0;
};

std::vector<BasebandBlock> modulate(std::span<const EncodedSample> encoded, double full_scale,
                                    const ModemConfig& cfg);

// FFT peak-picking receiver. Holds an FFT plan; not shareable between threads.
class Demodulator {
public:
    Demodulator(const ModemConfig& cfg, double full_scale);

    // Frequency estimate in Hz, clamped to [f_min, f_max].
    double estimate_frequency(const BasebandBlock& block);
    EncodedSample demodulate(const BasebandBlock& block);

private:
    ModemConfig cfg_;
    double full_scale_;
    ComplexFft fft_;
    std::size_t k_lo_;
    std::size_t k_hi_;
};

EncodedSample demodulate(const BasebandBlock& block, double full_scale, const ModemConfig& cfg);

// Raw dump: little-endian float64 (re, im) pairs, fft_size pairs per block.
class BlockDumpWriter {
public:
    explicit BlockDumpWriter(const std::filesystem::path& path);
    void write(const BasebandBlock& block);

private:
    std::ofstream out_;
};

std::vector<BasebandBlock> read_block_dump(const std::filesystem::path& path, std::size_t fft_size);

const char* to_string(PeakInterpolation p);
PeakInterpolation peak_interpolation_from_string(const std::string& s);

} // namespace ajscc

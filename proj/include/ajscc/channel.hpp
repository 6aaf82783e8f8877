#pragma once

#include "ajscc/fft.hpp"
#include "ajscc/modem.hpp"
#include "ajscc/random.hpp"

#include <cstdint>
#include <filesystem>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ajscc {

enum class ChannelFamily { awgn, flat_rayleigh, jtc_indoor_a, jtc_outdoor_low_a };

const char* to_string(ChannelFamily f);
ChannelFamily channel_family_from_string(const std::string& s);
bool is_multipath(ChannelFamily f) noexcept;

// Noise injection is disabled when csnr_db is +inf.
inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

struct Tap {
    double delay = 0.0;        // s
    double power_db = 0.0;     // as loaded
    double linear_power = 0.0; // normalised so all taps sum to 1
    friend bool operator==(const Tap&, const Tap&) = default;
};

struct TapProfile {
    std::string name;
    std::vector<Tap> taps;

    // Validates ordering and normalises linear powers.
    static TapProfile from_db(std::string name, const std::vector<std::pair<double, double>>& delay_db);
    friend bool operator==(const TapProfile&, const TapProfile&) = default;
};

// CSV lines `delay_seconds,power_db`; `#` starts a comment.
TapProfile load_profile(const std::filesystem::path& path);
std::filesystem::path default_profile_path(ChannelFamily f);
// Default Doppler spread for a family: 5 Hz indoor, 20 Hz outdoor, 0 otherwise.
double default_doppler(ChannelFamily f) noexcept;

struct ChannelSpec {
    ChannelFamily family = ChannelFamily::awgn;
    double csnr_db = 0.0;
    double doppler_hz = 0.0;
    std::optional<TapProfile> tap_profile;
    std::uint64_t seed = 1;

    void validate() const;
};

// Complex noise variance for a given CSNR; zero when noise is disabled.
double noise_variance(double csnr_db, double signal_power, double mean_channel_gain = 1.0);

// Mean |x|^2 over all samples of all blocks.
double measure_power(const std::vector<BasebandBlock>& blocks);

// Rayleigh tap with a Jakes Doppler spectrum, realised as a sum of sinusoids
// with random arrival angles and phases: h(t) = sqrt(P/M) sum e^{j(2 pi fD cos(a_n) t + phi_n)}.
class JakesProcess {
public:
    JakesProcess(double doppler_hz, double power, Rng& rng, int oscillators = kDefaultOscillators);
    Complex at(double t) const;

    static constexpr int kDefaultOscillators = 64;

private:
    double amplitude_;
    std::vector<double> omega_;
    std::vector<double> phase_;
};

// Streaming channel: blocks must be fed in order.
class ChannelModel {
public:
    virtual ~ChannelModel() = default;
    virtual void apply(BasebandBlock& block) = 0;
};

class AwgnChannel : public ChannelModel {
public:
    AwgnChannel(double csnr_db, double signal_power, std::uint64_t seed);
    void apply(BasebandBlock& block) override;
    double noise_variance() const noexcept { return variance_; }

private:
    double variance_;
    Rng rng_;
};

// Independent block fading: one CN(0,1) gain per block, then AWGN.
class FlatRayleighChannel : public ChannelModel {
public:
    FlatRayleighChannel(double csnr_db, double signal_power, std::uint64_t seed, bool force_unit_gain = false);
    void apply(BasebandBlock& block) override;
    Complex last_gain() const noexcept { return last_gain_; }

private:
    bool force_unit_gain_;
    Rng gain_rng_;
    AwgnChannel noise_;
    Complex last_gain_{1.0, 0.0};
};

// Tapped delay line, one Jakes process per tap, delays rounded to whole samples.
class MultipathChannel : public ChannelModel {
public:
    MultipathChannel(const TapProfile& profile, double doppler_hz, double csnr_db, double signal_power,
                     double sample_rate, std::size_t block_length, std::uint64_t seed);
    void apply(BasebandBlock& block) override;

    // Coefficient of tap k at time t (seconds since the first block).
    Complex tap_gain(std::size_t k, double t) const { return processes_.at(k).at(t); }
    const std::vector<std::size_t>& delays_in_samples() const noexcept { return delays_; }
    std::size_t tap_count() const noexcept { return processes_.size(); }

private:
    double sample_rate_;
    std::size_t block_length_;
    std::vector<std::size_t> delays_;
    std::vector<JakesProcess> processes_;
    std::vector<Complex> history_;
    std::int64_t blocks_seen_ = 0;
    AwgnChannel noise_;
};

std::unique_ptr<ChannelModel> make_channel(const ChannelSpec& spec, double sample_rate, std::size_t block_length,
                                           double signal_power);

std::vector<BasebandBlock> apply_awgn(std::vector<BasebandBlock> blocks, double csnr_db, std::uint64_t seed);
std::vector<BasebandBlock> apply_flat_rayleigh(std::vector<BasebandBlock> blocks, double csnr_db,
                                               std::uint64_t seed);
std::vector<BasebandBlock> apply_multipath(std::vector<BasebandBlock> blocks, const ChannelSpec& spec,
                                           double sample_rate);

} // namespace ajscc

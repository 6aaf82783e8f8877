#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace ajscc {

// Uniformly sampled real-valued signal.
class SourceTrace {
public:
    SourceTrace(double sample_period, std::vector<double> samples, std::string unit_label = "V");

    double sample_period() const noexcept { return sample_period_; }
    double sample_rate() const noexcept { return 1.0 / sample_period_; }
    const std::vector<double>& samples() const noexcept { return samples_; }
    std::vector<double>& samples() noexcept { return samples_; }
    const std::string& unit_label() const noexcept { return unit_label_; }
    std::size_t size() const noexcept { return samples_.size(); }
    double operator[](std::size_t i) const { return samples_[i]; }
    double duration() const noexcept { return sample_period_ * static_cast<double>(samples_.size()); }

    // Same time base, new values.
    SourceTrace with_samples(std::vector<double> samples) const;

    friend bool operator==(const SourceTrace&, const SourceTrace&) = default;

private:
    double sample_period_;
    std::vector<double> samples_;
    std::string unit_label_;
};

// CSV with header `t_seconds,value`, LF line endings, shortest round-trip decimal.
void write_trace_csv(const std::filesystem::path& path, const SourceTrace& trace);
SourceTrace read_trace_csv(const std::filesystem::path& path, std::string unit_label = "V");

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

} // namespace ajscc

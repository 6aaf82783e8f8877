#pragma once

#include "ajscc/trace.hpp"

#include <filesystem>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace ajscc {

struct PulseEvent {
    double time = 0.0;       // s
    double peak_value = 0.0; // V
    friend bool operator==(const PulseEvent&, const PulseEvent&) = default;
};

struct KsResult {
    double statistic = 0.0; // D
    double p_value = 1.0;
    bool reject_at_5pct = false;
    friend bool operator==(const KsResult&, const KsResult&) = default;
};

struct MsePair {
    double mse_x1 = 0.0;
    double mse_x2 = 0.0;
    double sum = 0.0;
    friend bool operator==(const MsePair&, const MsePair&) = default;
};

MsePair make_mse_pair(double mse_x1, double mse_x2);

// Values below `threshold` become 0; the rest pass unchanged.
SourceTrace threshold_filter(const SourceTrace& trace, double threshold);

// Running median over a centred window of order + 1 samples, with
// half-sample symmetric reflection at both ends. `order` must be even.
SourceTrace median_filter(const SourceTrace& trace, int order);

// Interior local maxima >= min_height; among peaks closer than min_separation
// the larger one is kept. Result is sorted by time.
std::vector<PulseEvent> detect_peaks(const SourceTrace& trace, double min_height, double min_separation);

double mse(std::span<const double> reference, std::span<const double> estimate);
double mse(const SourceTrace& reference, const SourceTrace& estimate);

// Keeps every `factor`-th sample starting with the first (sample-and-hold at block start).
SourceTrace decimate_hold(const SourceTrace& trace, std::size_t factor);

// Right-continuous step function: one (value, P[X <= value]) pair per distinct value.
std::vector<std::pair<double, double>> empirical_cdf(std::span<const double> values);

// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum (-1)^{i-1} exp(-2 i^2 lambda^2).
double kolmogorov_survival(double lambda);

// Two-sample K-S with the small-sample corrected asymptotic p-value.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b, double alpha = 0.05);

// One-sample K-S against a continuous reference CDF.
KsResult ks_one_sample(std::span<const double> values, const std::function<double(double)>& cdf,
                       double alpha = 0.05);

// Kendall rank correlation (tau-b).
double kendall_tau(std::span<const double> x, std::span<const double> y);

std::vector<double> peak_values(const std::vector<PulseEvent>& events);

// CSV: `time,peak` and `value,cdf`.
void write_peaks_csv(const std::filesystem::path& path, const std::vector<PulseEvent>& events);
void write_cdf_csv(const std::filesystem::path& path, const std::vector<std::pair<double, double>>& cdf);

} // namespace ajscc

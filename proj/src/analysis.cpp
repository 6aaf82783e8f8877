#include "ajscc/analysis.hpp"

#include "ajscc/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

namespace ajscc {

MsePair make_mse_pair(double mse_x1, double mse_x2) { return {mse_x1, mse_x2, mse_x1 + mse_x2}; }

SourceTrace threshold_filter(const SourceTrace& trace, double threshold) {
    if (!std::isfinite(threshold)) throw InputError("threshold must be finite");
    std::vector<double> y = trace.samples();
    for (double& v : y) {
        if (v < threshold) v = 0.0;
    }
    return trace.with_samples(std::move(y));
}

SourceTrace median_filter(const SourceTrace& trace, int order) {
    if (order < 2 || order % 2 != 0) throw PreconditionError("median filter order must be even and >= 2");
    const auto n = static_cast<std::ptrdiff_t>(trace.size());
    if (n <= order) throw PreconditionError("trace is shorter than the median window");
    const std::ptrdiff_t half = order / 2;
    const auto& x = trace.samples();
    auto at = [&](std::ptrdiff_t i) {
        if (i < 0) return x[static_cast<std::size_t>(-i - 1)];
        if (i >= n) return x[static_cast<std::size_t>(2 * n - i - 1)];
        return x[static_cast<std::size_t>(i)];
    };
    std::vector<double> window(static_cast<std::size_t>(order + 1));
    std::vector<double> y(static_cast<std::size_t>(n));
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        for (std::ptrdiff_t k = -half; k <= half; ++k) window[static_cast<std::size_t>(k + half)] = at(i + k);
        auto mid = window.begin() + half;
        std::nth_element(window.begin(), mid, window.end());
        y[static_cast<std::size_t>(i)] = *mid;
    }
    return trace.with_samples(std::move(y));
}

std::vector<PulseEvent> detect_peaks(const SourceTrace& trace, double min_height, double min_separation) {
    if (!(min_separation >= trace.sample_period() * (1.0 - 1e-12))) {
        throw PreconditionError("min_separation must be at least one sample period");
    }
    const auto& x = trace.samples();
    std::vector<std::size_t> candidates;
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        if (x[i] >= min_height && x[i] > x[i - 1] && x[i] >= x[i + 1]) candidates.push_back(i);
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](std::size_t a, std::size_t b) { return x[a] > x[b]; });

    const double dt = trace.sample_period();
    std::set<std::size_t> kept;
    for (std::size_t i : candidates) {
        auto next = kept.lower_bound(i);
        if (next != kept.end() && static_cast<double>(*next - i) * dt < min_separation) continue;
        if (next != kept.begin() && static_cast<double>(i - *std::prev(next)) * dt < min_separation) continue;
        kept.insert(i);
    }
    std::vector<PulseEvent> events;
    events.reserve(kept.size());
    for (std::size_t i : kept) events.push_back({static_cast<double>(i) * dt, x[i]});
    return events;
}

double mse(std::span<const double> reference, std::span<const double> estimate) {
    if (reference.size() != estimate.size()) throw Error("mse: reference and estimate lengths differ");
    if (reference.empty()) throw Error("mse: empty input");
    double acc = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        const double d = estimate[i] - reference[i];
        acc += d * d;
    }
    return acc / static_cast<double>(reference.size());
}

double mse(const SourceTrace& reference, const SourceTrace& estimate) {
    return mse(std::span<const double>(reference.samples()), std::span<const double>(estimate.samples()));
}

SourceTrace decimate_hold(const SourceTrace& trace, std::size_t factor) {
    if (factor == 0) throw PreconditionError("decimation factor must be >= 1");
    std::vector<double> y;
    y.reserve(trace.size() / factor + 1);
    for (std::size_t i = 0; i < trace.size(); i += factor) y.push_back(trace[i]);
    return SourceTrace(trace.sample_period() * static_cast<double>(factor), std::move(y), trace.unit_label());
}

std::vector<std::pair<double, double>> empirical_cdf(std::span<const double> values) {
    if (values.empty()) throw InputError("empirical CDF of an empty sample");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    std::vector<std::pair<double, double>> cdf;
    const double n = static_cast<double>(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i + 1 < v.size() && v[i + 1] == v[i]) continue;
        cdf.emplace_back(v[i], static_cast<double>(i + 1) / n);
    }
    return cdf;
}

double kolmogorov_survival(double lambda) {
    if (!(lambda > 0.0)) return 1.0;
    constexpr double pi = std::numbers::pi;
    if (lambda < 1.18) {
        // Dual (theta-function) series converges fast for small lambda.
        const double y = std::exp(-pi * pi / (8.0 * lambda * lambda));
        double sum = 0.0;
        for (int k = 1; k <= 50; ++k) {
            const double term = std::pow(y, static_cast<double>((2 * k - 1) * (2 * k - 1)));
            sum += term;
            if (term < 1e-17 * sum) break;
        }
        return std::clamp(1.0 - std::sqrt(2.0 * pi) / lambda * sum, 0.0, 1.0);
    }
    double sum = 0.0;
    for (int i = 1; i <= 100; ++i) {
        const double term = std::exp(-2.0 * i * i * lambda * lambda);
        sum += (i % 2 == 1 ? term : -term);
        if (term < 1e-17) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

KsResult finish(double d, double n_eff, double alpha) {
    const double sq = std::sqrt(n_eff);
    const double lambda = (sq + 0.12 + 0.11 / sq) * d;
    const double p = d == 0.0 ? 1.0 : kolmogorov_survival(lambda);
    return {d, p, p < alpha};
}

} // namespace

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b, double alpha) {
    if (a.size() < 5 || b.size() < 5) throw InputError("K-S test needs at least 5 samples per group");
    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    const double na = static_cast<double>(sa.size());
    const double nb = static_cast<double>(sb.size());

    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < sa.size() && j < sb.size()) {
        const double v = std::min(sa[i], sb[j]);
        while (i < sa.size() && sa[i] == v) ++i;
        while (j < sb.size() && sb[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return finish(d, na * nb / (na + nb), alpha);
}

KsResult ks_one_sample(std::span<const double> values, const std::function<double(double)>& cdf, double alpha) {
    if (values.empty()) throw InputError("K-S test of an empty sample");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double f = cdf(v[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return finish(d, n, alpha);
}

double kendall_tau(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw InputError("kendall_tau needs two equal-length series");
    long long concordant = 0;
    long long discordant = 0;
    long long ties_x = 0;
    long long ties_y = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            const double dx = x[j] - x[i];
            const double dy = y[j] - y[i];
            if (dx == 0.0 && dy == 0.0) continue;
            if (dx == 0.0) {
                ++ties_x;
            } else if (dy == 0.0) {
                ++ties_y;
            } else if ((dx > 0.0) == (dy > 0.0)) {
                ++concordant;
            } else {
                ++discordant;
            }
        }
    }
    const double denom = std::sqrt(static_cast<double>(concordant + discordant + ties_x) *
                                   static_cast<double>(concordant + discordant + ties_y));
    return denom == 0.0 ? 0.0 : static_cast<double>(concordant - discordant) / denom;
}

std::vector<double> peak_values(const std::vector<PulseEvent>& events) {
    std::vector<double> v;
    v.reserve(events.size());
    for (const auto& e : events) v.push_back(e.peak_value);
    return v;
}

void write_peaks_csv(const std::filesystem::path& path, const std::vector<PulseEvent>& events) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << "time,peak\n";
    for (const auto& e : events) out << format_double(e.time) << ',' << format_double(e.peak_value) << '\n';
}

void write_cdf_csv(const std::filesystem::path& path, const std::vector<std::pair<double, double>>& cdf) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << "value,cdf\n";
    for (const auto& [v, p] : cdf) out << format_double(v) << ',' << format_double(p) << '\n';
}

} // namespace ajscc

#include "ajscc/codec.hpp"

#include "ajscc/error.hpp"

#include <algorithm>
#include <cmath>

namespace ajscc {
namespace {

// floor(v / step) where the boundaries are the doubles k * step themselves,
// so a value produced as k * step always lands in interval k.
int interval_index(double v, double step, int count) {
    auto k = static_cast<long long>(std::floor(v / step));
    if (static_cast<double>(k + 1) * step <= v) ++k;
    if (static_cast<double>(k) * step > v) --k;
    return static_cast<int>(std::clamp<long long>(k, 0, count - 1));
}

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw InputError(std::string(name) + " is not finite");
}

} // namespace

void AjsccParams::validate() const {
    if (levels < 2) throw ConfigError("AJSCC levels must be >= 2");
    if (!(x1_max > 0.0) || !std::isfinite(x1_max)) throw ConfigError("x1_max must be positive");
    if (!(x2_max > 0.0) || !std::isfinite(x2_max)) throw ConfigError("x2_max must be positive");
    if (level_height && (!(*level_height > 0.0) || !std::isfinite(*level_height))) {
        throw ConfigError("level_height must be positive");
    }
    if (!std::isfinite(design1_bias)) throw ConfigError("design1_bias must be finite");
}

int level_of(double x2, const AjsccParams& p) {
    return interval_index(std::clamp(x2, 0.0, p.x2_max), p.spacing(), p.levels);
}

EncodedSample encode(double x1, double x2, const AjsccParams& p) {
    require_finite(x1, "x1");
    require_finite(x2, "x2");
    const int q = level_of(x2, p);
    const double vr = p.vr();
    const double g = vr * std::clamp(x1, 0.0, p.x1_max) / p.x1_max;
    const double base = static_cast<double>(q) * vr;
    return {q % 2 == 0 ? base + g : base + (vr - g)};
}

DecodedPair decode(EncodedSample s, const AjsccParams& p) {
    require_finite(s.value, "encoded sample");
    const double vr = p.vr();
    const double v = std::clamp(s.value, 0.0, p.full_scale());
    const int q = interval_index(v, vr, p.levels);
    const double r = std::clamp(v - static_cast<double>(q) * vr, 0.0, vr);
    const double x1 = q % 2 == 0 ? p.x1_max * r / vr : p.x1_max * (vr - r) / vr;
    return {x1, (static_cast<double>(q) + 0.5) * p.spacing()};
}

EncodedSample encode_design1(double x1, double x2, const AjsccParams& p) {
    if (p.levels != kDesign1Levels) {
        throw ConfigError("Design 1 encoder is fixed at 11 levels");
    }
    const EncodedSample ideal = encode(x1, x2, p);
    return {ideal.value + static_cast<double>(level_of(x2, p)) * p.design1_bias};
}

std::vector<std::pair<double, double>> staircase(const AjsccParams& p, double x1_fixed, int n_points) {
    if (n_points < 2 * p.levels) {
        throw PreconditionError("staircase needs at least 2 * levels points");
    }
    std::vector<std::pair<double, double>> curve;
    curve.reserve(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) {
        const double x2 = p.x2_max * static_cast<double>(i) / static_cast<double>(n_points - 1);
        curve.emplace_back(x2, encode(x1_fixed, x2, p).value);
    }
    return curve;
}

std::vector<double> plateau_values(const std::vector<std::pair<double, double>>& curve, double tol) {
    std::vector<double> out;
    for (const auto& [x2, y] : curve) {
        if (out.empty() || std::abs(y - out.back()) > tol) out.push_back(y);
    }
    return out;
}

} // namespace ajscc

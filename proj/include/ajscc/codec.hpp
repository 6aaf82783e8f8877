#pragma once

#include <optional>
#include <utility>
#include <vector>

namespace ajscc {

// Geometry of the rectangular AJSCC mapping: x2 picks one of `levels` parallel
// lines (spacing x2_max / levels), x1 moves along the line, and the scan
// direction alternates between even (increasing) and odd (decreasing) lines.
struct AjsccParams {
    int levels = 16;
    double x1_max = 2.25;
    double x2_max = 3.0;
    // Per-level output span V_R; defaults to 1 / levels so the encoded range is [0, 1].
    std::optional<double> level_height;
    // Hardware-style offset added once per active stage (Design 1 only).
    double design1_bias = 0.0;

    double spacing() const noexcept { return x2_max / static_cast<double>(levels); }
    double vr() const noexcept { return level_height.value_or(1.0 / static_cast<double>(levels)); }
    double full_scale() const noexcept { return static_cast<double>(levels) * vr(); }

    void validate() const;
    friend bool operator==(const AjsccParams&, const AjsccParams&) = default;
};

struct EncodedSample {
    double value = 0.0;
    friend bool operator==(const EncodedSample&, const EncodedSample&) = default;
};

struct DecodedPair {
    double x1 = 0.0;
    double x2 = 0.0;
};

// Level index of x2 over half-open intervals [k*spacing, (k+1)*spacing), with
// x2 == x2_max assigned to the top level. Input is clamped first.
int level_of(double x2, const AjsccParams& p);

EncodedSample encode(double x1, double x2, const AjsccParams& p);

// Total on finite input: `s` is clamped to [0, full_scale]. An encoded value
// exactly on a level boundary decodes to the upper level.
DecodedPair decode(EncodedSample s, const AjsccParams& p);

// Stacked-VCVS variant with a fixed 11 levels; adds design1_bias per active stage.
EncodedSample encode_design1(double x1, double x2, const AjsccParams& p);
inline constexpr int kDesign1Levels = 11;

// Dense sweep of x2 over [0, x2_max] at fixed x1. Returns (x2, encoded) pairs.
std::vector<std::pair<double, double>> staircase(const AjsccParams& p, double x1_fixed, int n_points);

// Collapses runs of equal encoded values (within `tol`) into one value each.
std::vector<double> plateau_values(const std::vector<std::pair<double, double>>& curve, double tol = 1e-12);

} // namespace ajscc

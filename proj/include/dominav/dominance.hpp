// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "dominav/motion_params.hpp"

namespace dominav {

// Normalization used by the dominance model: each parameter is shifted by its
// default and divided by half of its range.
struct NormalizationSpec {
    std::array<double, 5> defaults{15.0, 10.0, 24.0, 0.8, 1.4};
    std::array<double, 5> half_ranges{13.5, 19.5, 11.5, 0.85, 0.5};

    bool operator==(const NormalizationSpec&) const = default;
};

inline std::array<double, 5> normalize(const MotionParams& p, const NormalizationSpec& norm) {
    const auto a = p.as_array();
    std::array<double, 5> out{};
    for (int k = 0; k < 5; ++k) out[k] = (a[k] - norm.defaults[k]) / norm.half_ranges[k];
    return out;
}

inline MotionParams denormalize(const std::array<double, 5>& vec, const NormalizationSpec& norm,
                                bool clamp = false) {
    std::array<double, 5> a{};
    for (int k = 0; k < 5; ++k) {
        if (!std::isfinite(vec[k])) throw std::invalid_argument("denormalize: non-finite input");
        a[k] = norm.defaults[k] + norm.half_ranges[k] * vec[k];
    }
    MotionParams p = MotionParams::from_array(a);
    if (clamp) return p.clamped();
    if (!p.in_bounds()) throw std::domain_error("denormalize: result out of parameter bounds");
    return p;
}

struct DominanceScore {
    double raw = 0.0;
    double clamped = 0.0;

    static DominanceScore from_raw(double raw) {
        return {raw, std::min(1.0, std::max(0.0, raw))};
    }
};

// Linear map from normalized motion parameters to a dominance scalar.
struct DominanceModel {
    std::array<double, 5> coeffs{0.01, -0.07, -0.41, 0.05, 0.14};
    NormalizationSpec norm{};

    static DominanceModel fitted() { return {}; }

    double raw(const std::array<double, 5>& normalized) const {
        double d = 0.0;
        for (int k = 0; k < 5; ++k) d += coeffs[k] * normalized[k];
        return d;
    }

    DominanceScore evaluate(const MotionParams& p) const {
        return DominanceScore::from_raw(raw(normalize(p, norm)));
    }

    // Range of raw scores attainable inside the parameter box.
    std::pair<double, double> attainable_range() const {
        double lo = 0.0, hi = 0.0;
        for (int k = 0; k < 5; ++k) {
            const double a = (MotionParams::kMin[k] - norm.defaults[k]) / norm.half_ranges[k];
            const double b = (MotionParams::kMax[k] - norm.defaults[k]) / norm.half_ranges[k];
            lo += std::min(coeffs[k] * a, coeffs[k] * b);
            hi += std::max(coeffs[k] * a, coeffs[k] * b);
        }
        return {lo, hi};
    }
};

// Mean Likert responses (1-5) for the four dominance adjectives.
struct SurveyResponse {
    double v_sub = 3.0;
    double v_with = 3.0;
    double v_dom = 3.0;
    double v_conf = 3.0;
};

// Collapses the four adjective means into a single dominance label in [0, 1].
inline double aggregate_survey(const SurveyResponse& r) {
    for (double v : {r.v_sub, r.v_with, r.v_dom, r.v_conf}) {
        if (!(v >= 1.0 && v <= 5.0)) throw std::invalid_argument("Likert mean outside [1, 5]");
    }
    return ((r.v_dom + r.v_conf + 6.0 - r.v_sub + 6.0 - r.v_with) - 4.0) / 16.0;
}

}  // namespace dominav

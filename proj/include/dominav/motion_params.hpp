// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dominav {

// The five RVO behavior parameters that drive an agent's local navigation.
// max_neighbors is integer-valued in simulation but is carried as a double so
// estimators can treat it as a continuous quantity and round at readout time.
struct MotionParams {
    double neighbor_dist = 15.0;   // m
    double max_neighbors = 10.0;   // count
    double planning_horizon = 24.0;  // s
    double radius = 0.8;           // m
    double pref_speed = 1.4;       // m/s

    static constexpr std::array<double, 5> kMin{3.0, 1.0, 1.0, 0.3, 1.2};
    static constexpr std::array<double, 5> kMax{30.0, 40.0, 24.0, 2.0, 2.2};

    static MotionParams defaults() { return {}; }

    std::array<double, 5> as_array() const {
        return {neighbor_dist, max_neighbors, planning_horizon, radius, pref_speed};
    }

    static MotionParams from_array(const std::array<double, 5>& a) {
        return {a[0], a[1], a[2], a[3], a[4]};
    }

    double max_speed() const { return 1.25 * pref_speed; }

    bool in_bounds() const {
        const auto a = as_array();
        for (int k = 0; k < 5; ++k) {
            if (!std::isfinite(a[k]) || a[k] < kMin[k] || a[k] > kMax[k]) return false;
        }
        return true;
    }

    // Clips every component to its range and rounds max_neighbors to the
    // nearest integer.
    MotionParams clamped() const {
        auto a = as_array();
        a[1] = std::round(a[1]);
        for (int k = 0; k < 5; ++k) {
            if (!std::isfinite(a[k])) throw std::invalid_argument("MotionParams: non-finite component");
            a[k] = std::min(kMax[k], std::max(kMin[k], a[k]));
        }
        return from_array(a);
    }

    // Validating constructor: rejects out-of-range values unless clamp is set.
    static MotionParams checked(double nd, double mn, double ph, double r, double ps,
                                bool clamp = false) {
        MotionParams p{nd, mn, ph, r, ps};
        if (clamp) return p.clamped();
        if (!p.in_bounds()) {
            throw std::invalid_argument("MotionParams out of range: (" +
                                        std::to_string(nd) + ", " + std::to_string(mn) + ", " +
                                        std::to_string(ph) + ", " + std::to_string(r) + ", " +
                                        std::to_string(ps) + ")");
        }
        return p;
    }

    bool operator==(const MotionParams&) const = default;
};

}  // namespace dominav

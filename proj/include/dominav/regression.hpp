// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "dominav/dominance.hpp"

namespace dominav {

struct LabeledSample {
    MotionParams params;
    double label = 0.0;  // dominance in [0, 1]
};

struct RankDeficiencyError : std::runtime_error {
    std::vector<int> deficient_columns;
    explicit RankDeficiencyError(std::vector<int> cols)
        : std::runtime_error("regression: rank-deficient design matrix"),
          deficient_columns(std::move(cols)) {}
};

namespace detail {

// Solves the 5x5 symmetric system A x = b by Gaussian elimination with
// partial pivoting. Throws RankDeficiencyError naming the dead columns.
inline std::array<double, 5> solve5(std::array<std::array<double, 5>, 5> a,
                                    std::array<double, 5> b) {
    std::array<int, 5> col{0, 1, 2, 3, 4};
    for (int i = 0; i < 5; ++i) {
        int pivot = i;
        for (int r = i + 1; r < 5; ++r) {
            if (std::fabs(a[r][i]) > std::fabs(a[pivot][i])) pivot = r;
        }
        if (std::fabs(a[pivot][i]) < 1e-12) {
            std::vector<int> dead;
            for (int k = i; k < 5; ++k) dead.push_back(col[k]);
            throw RankDeficiencyError(std::move(dead));
        }
        std::swap(a[i], a[pivot]);
        std::swap(b[i], b[pivot]);
        for (int r = i + 1; r < 5; ++r) {
            const double f = a[r][i] / a[i][i];
            for (int c = i; c < 5; ++c) a[r][c] -= f * a[i][c];
            b[r] -= f * b[i];
        }
    }
    std::array<double, 5> x{};
    for (int i = 4; i >= 0; --i) {
        double s = b[i];
        for (int c = i + 1; c < 5; ++c) s -= a[i][c] * x[c];
        x[i] = s / a[i][i];
    }
    return x;
}

}  // namespace detail

// Least-squares fit of the dominance coefficients, no intercept term.
inline DominanceModel fit(const std::vector<LabeledSample>& samples,
                          const NormalizationSpec& norm) {
    if (samples.size() < 5) throw std::invalid_argument("fit: need at least 5 samples");
    std::array<std::array<double, 5>, 5> xtx{};
    std::array<double, 5> xty{};
    for (const auto& s : samples) {
        const auto x = normalize(s.params, norm);
        for (int i = 0; i < 5; ++i) {
            xty[i] += x[i] * s.label;
            for (int j = 0; j < 5; ++j) xtx[i][j] += x[i] * x[j];
        }
    }
    DominanceModel model;
    model.coeffs = detail::solve5(xtx, xty);
    model.norm = norm;
    return model;
}

// Leave-one-out cross-validation, returning the mean absolute held-out error.
inline double loocv(const std::vector<LabeledSample>& samples, const NormalizationSpec& norm) {
    if (samples.size() < 6) throw std::invalid_argument("loocv: need at least 6 samples");
    double total = 0.0;
    std::vector<LabeledSample> fold;
    fold.reserve(samples.size() - 1);
    for (size_t held = 0; held < samples.size(); ++held) {
        fold.clear();
        for (size_t i = 0; i < samples.size(); ++i) {
            if (i != held) fold.push_back(samples[i]);
        }
        const DominanceModel m = fit(fold, norm);
        total += std::fabs(samples[held].label - m.raw(normalize(samples[held].params, norm)));
    }
    return total / static_cast<double>(samples.size());
}

}  // namespace dominav

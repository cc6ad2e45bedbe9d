// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "dominav/dominance.hpp"
#include "dominav/regression.hpp"

using namespace dominav;

TEST_CASE("normalize maps defaults to the zero vector") {
    const auto v = normalize(MotionParams::defaults(), NormalizationSpec{});
    for (double x : v) CHECK(x == 0.0);
}

TEST_CASE("normalize point values") {
    const NormalizationSpec norm;
    const auto a = normalize(MotionParams{15, 10, 1, 0.8, 2.2}, norm);
    CHECK(a[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(a[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(a[2] == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(a[3] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(a[4] == doctest::Approx(1.6).epsilon(1e-12));

    const auto b = normalize(MotionParams{3, 40, 24, 0.3, 1.2}, norm);
    CHECK(b[0] == doctest::Approx(-0.8889).epsilon(1e-3));
    CHECK(b[1] == doctest::Approx(1.5385).epsilon(1e-3));
    CHECK(b[2] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(b[3] == doctest::Approx(-0.5882).epsilon(1e-3));
    CHECK(b[4] == doctest::Approx(-0.4).epsilon(1e-12));
}

TEST_CASE("denormalize inverts normalize inside the box") {
    const NormalizationSpec norm;
    std::mt19937_64 rng(12);
    for (int i = 0; i < 50; ++i) {
        std::array<double, 5> a{};
        for (int k = 0; k < 5; ++k) {
            std::uniform_real_distribution<double> u(MotionParams::kMin[k], MotionParams::kMax[k]);
            a[k] = u(rng);
        }
        const MotionParams p = MotionParams::from_array(a);
        const MotionParams q = denormalize(normalize(p, norm), norm);
        const auto pa = p.as_array(), qa = q.as_array();
        for (int k = 0; k < 5; ++k) CHECK(qa[k] == doctest::Approx(pa[k]).epsilon(1e-12));
    }
}

TEST_CASE("denormalize rejects out-of-box results without clamp") {
    const NormalizationSpec norm;
    CHECK_THROWS_AS(denormalize({0, 0, 0, 0, 5.0}, norm), std::domain_error);
    const MotionParams clamped = denormalize({0, 0, 0, 0, 5.0}, norm, true);
    CHECK(clamped.pref_speed == 2.2);
}

TEST_CASE("dominance evaluation point checks") {
    const DominanceModel model;
    CHECK(model.evaluate(MotionParams::defaults()).raw == 0.0);
    CHECK(model.evaluate(MotionParams::defaults()).clamped == 0.0);

    const auto dominant = model.evaluate(MotionParams{15, 10, 1, 0.8, 2.2});
    CHECK(dominant.raw == doctest::Approx(1.044).epsilon(1e-9));
    CHECK(dominant.clamped == 1.0);

    const auto submissive = model.evaluate(MotionParams{3, 40, 24, 0.3, 1.2});
    CHECK(submissive.raw == doctest::Approx(-0.2020).epsilon(1e-3));
    CHECK(submissive.clamped == 0.0);
}

TEST_CASE("attainable range brackets every in-box score") {
    const DominanceModel model;
    const auto [lo, hi] = model.attainable_range();
    CHECK(lo < 0.0);
    CHECK(hi > 1.0);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
        std::array<double, 5> a{};
        for (int k = 0; k < 5; ++k) {
            std::uniform_real_distribution<double> u(MotionParams::kMin[k], MotionParams::kMax[k]);
            a[k] = u(rng);
        }
        const double d = model.evaluate(MotionParams::from_array(a)).raw;
        CHECK(d >= lo - 1e-12);
        CHECK(d <= hi + 1e-12);
    }
}

TEST_CASE("survey aggregation") {
    CHECK(aggregate_survey({3, 3, 3, 3}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(aggregate_survey({1, 1, 5, 5}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(aggregate_survey({5, 5, 1, 1}) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(aggregate_survey({0.5, 3, 3, 3}), std::invalid_argument);
    CHECK_THROWS_AS(aggregate_survey({3, 3, 5.5, 3}), std::invalid_argument);
}

namespace {

std::vector<LabeledSample> make_samples(int n, std::uint64_t seed, double noise,
                                        const DominanceModel& model) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, noise);
    std::vector<LabeledSample> out;
    for (int i = 0; i < n; ++i) {
        std::array<double, 5> a{};
        for (int k = 0; k < 5; ++k) {
            std::uniform_real_distribution<double> u(MotionParams::kMin[k], MotionParams::kMax[k]);
            a[k] = u(rng);
        }
        const MotionParams p = MotionParams::from_array(a);
        double label = model.raw(normalize(p, model.norm));
        if (noise > 0.0) label += gauss(rng);
        out.push_back({p, label});
    }
    return out;
}

}  // namespace

TEST_CASE("fit recovers exact coefficients from clean samples") {
    const DominanceModel truth;
    const auto samples = make_samples(48, 21, 0.0, truth);
    const DominanceModel fitted = fit(samples, truth.norm);
    for (int k = 0; k < 5; ++k) {
        CHECK(fitted.coeffs[k] == doctest::Approx(truth.coeffs[k]).epsilon(1e-10));
    }
}

TEST_CASE("fit requires five samples and full rank") {
    const DominanceModel truth;
    auto four = make_samples(4, 1, 0.0, truth);
    CHECK_THROWS_AS(fit(four, truth.norm), std::invalid_argument);

    // Every sample identical: the design matrix has rank 1.
    std::vector<LabeledSample> degenerate(8, LabeledSample{MotionParams{10, 5, 12, 1, 1.5}, 0.3});
    CHECK_THROWS_AS(fit(degenerate, truth.norm), RankDeficiencyError);
    try {
        fit(degenerate, truth.norm);
    } catch (const RankDeficiencyError& e) {
        CHECK(!e.deficient_columns.empty());
    }
}

TEST_CASE("loocv error stays in the noise band") {
    const DominanceModel truth;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto samples = make_samples(48, seed, 0.15, truth);
        const double mae = loocv(samples, truth.norm);
        CHECK(mae >= 0.075);
        CHECK(mae <= 0.30);
    }
}

TEST_CASE("loocv needs six samples") {
    const DominanceModel truth;
    auto five = make_samples(5, 2, 0.0, truth);
    CHECK_THROWS_AS(loocv(five, truth.norm), std::invalid_argument);
}

TEST_CASE("params validation") {
    CHECK_THROWS_AS(MotionParams::checked(2.0, 10, 24, 0.8, 1.4), std::invalid_argument);
    const MotionParams clamped = MotionParams::checked(2.0, 10, 24, 0.8, 1.4, true);
    CHECK(clamped.neighbor_dist == 3.0);
    CHECK(MotionParams::checked(15, 10, 24, 0.8, 1.4) == MotionParams::defaults());
}

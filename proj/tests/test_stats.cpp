// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
//
// Statistical instruments: hand-computable distances, exact-fit regressions,
// seeded bootstrap determinism, and calibration self-tests for the KS layer.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "conewalk/cone.hpp"
#include "conewalk/lattice_dp.hpp"
#include "conewalk/rng.hpp"
#include "conewalk/specfun.hpp"
#include "conewalk/stats.hpp"
#include "conewalk/steps.hpp"

using namespace conewalk;

namespace {

std::vector<double> chi_samples(double k, std::size_t count, std::uint64_t seed,
                                std::uint64_t idx)
{
    // chi(k) radius via sqrt of a sum of squared gaussians for integer k.
    RngStream rs(make_key(seed), stream_id(StreamTag::Generic, idx));
    std::vector<double> out(count);
    auto ik = static_cast<int>(k);
    for (auto& v : out) {
        double s = 0;
        for (int j = 0; j < ik; ++j) {
            double g = rs.next_gaussian();
            s += g * g;
        }
        v = std::sqrt(s);
    }
    return out;
}

}  // namespace

TEST_CASE("one-sample KS distance on hand cases")
{
    auto unif = [](double x) { return std::min(1.0, std::max(0.0, x)); };
    auto one = stats::ks_one_sample({0.5}, unif);
    CHECK(one.statistic == doctest::Approx(0.5).epsilon(1e-15));

    // Quantile construction keeps D below 1/(N+1) + eps.
    std::size_t const n = 1000;
    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i)
        q[i] = static_cast<double>(i + 1) / static_cast<double>(n + 1);
    auto fit = stats::ks_one_sample(q, unif);
    CHECK(fit.statistic <= 1.0 / static_cast<double>(n + 1) + 1e-12);
    CHECK(fit.p_value > 0.99);

    // Constant samples against a continuous law: mass collapses on an atom.
    std::vector<double> consts(200, 0.7);
    auto bad = stats::ks_one_sample(consts, unif);
    CHECK(bad.statistic >= 0.5);
    CHECK(bad.p_value < 1e-12);

    CHECK_THROWS_AS(stats::ks_one_sample({}, unif), ValidationError);
}

TEST_CASE("one-sample KS accepts its own law and rejects a wrong one")
{
    auto samples = chi_samples(3, 20000, 314, 0);
    auto chi3 = [](double x) { return sf::chi_cdf(3, x); };
    auto chi4 = [](double x) { return sf::chi_cdf(4, x); };
    CHECK(stats::ks_one_sample(samples, chi3).p_value > 0.01);
    CHECK(stats::ks_one_sample(samples, chi4).p_value < 1e-10);
}

TEST_CASE("two-sample KS: identical, disjoint and calibrated inputs")
{
    std::vector<double> a = {1.0, 2.0, 3.0, 4.0};
    auto same = stats::ks_two_sample(a, a);
    CHECK(same.statistic == 0.0);
    CHECK(same.pass);

    std::vector<double> b = {10.0, 11.0, 12.0};
    auto far = stats::ks_two_sample(a, b);
    CHECK(far.statistic == 1.0);
    // With samples this small the threshold exceeds 1, so use real sizes for
    // the rejection check.
    std::vector<double> lo(200), hi(200);
    for (int i = 0; i < 200; ++i) {
        lo[static_cast<std::size_t>(i)] = i;
        hi[static_cast<std::size_t>(i)] = i + 1000.0;
    }
    auto split = stats::ks_two_sample(lo, hi);
    CHECK(split.statistic == 1.0);
    CHECK_FALSE(split.pass);

    // Two independent chi(3) ensembles of 1e5 pass at the 1% threshold.
    auto s1 = chi_samples(3, 100000, 2718, 1);
    auto s2 = chi_samples(3, 100000, 2718, 2);
    auto cal = stats::ks_two_sample(s1, s2, 0.01);
    CHECK(cal.threshold ==
          doctest::Approx(1.6276 * std::sqrt(2.0 / 100000.0)).epsilon(1e-3));
    CHECK(cal.pass);

    // chi(3) against chi(4) of the same size must fail decisively.
    auto s3 = chi_samples(4, 100000, 2718, 3);
    CHECK_FALSE(stats::ks_two_sample(s1, s3, 0.01).pass);

    CHECK_THROWS_AS(stats::ks_two_sample({}, a), ValidationError);
}

TEST_CASE("total variation distance on vectors and lattice maps")
{
    std::vector<double> const half = {0.5, 0.5};
    CHECK(stats::tv_distance(half, half) == 0.0);
    CHECK(stats::tv_distance(std::vector<double>{1.0, 0.0},
                             std::vector<double>{0.0, 1.0}) == 1.0);
    CHECK(stats::tv_distance(std::vector<double>{0.2, 0.8},
                             std::vector<double>{0.4, 0.6}) == doctest::Approx(0.2));
    CHECK_THROWS_AS(stats::tv_distance(std::vector<double>{-0.1, 1.1}, half),
                    ValidationError);
    CHECK_THROWS_AS(stats::tv_distance(std::vector<double>{1.0}, half),
                    ValidationError);

    std::map<std::vector<long>, double> p{{{1, 2}, 0.5}, {{2, 1}, 0.5}};
    std::map<std::vector<long>, double> q{{{1, 2}, 0.25}, {{3, 3}, 0.75}};
    CHECK(stats::tv_distance(p, p) == 0.0);
    CHECK(stats::tv_distance(p, q) == doctest::Approx(0.75));
}

TEST_CASE("exponent fit recovers exact power laws and DP survival slopes")
{
    std::vector<std::pair<double, double>> synth;
    for (double n : {100.0, 200.0, 400.0, 800.0, 1600.0, 3200.0, 6400.0})
        synth.emplace_back(n, std::pow(n, -1.5));
    auto fit = stats::exponent_fit(synth);
    CHECK(fit.slope == doctest::Approx(-1.5).epsilon(1e-12));
    CHECK(fit.slope_stderr < 1e-10);

    // Half-line simple walk: P(tau > n) ~ V(x) n^{-1/2}.
    Cone cone = Cone::half_line();
    auto srw = StepDistribution::parse("lattice:srw", 1);
    auto curve = dp::survival_curve(cone, srw, {1.0}, 10000);
    std::vector<std::pair<double, double>> surv;
    for (double n : {100.0, 215.0, 464.0, 1000.0, 2154.0, 4641.0, 10000.0})
        surv.emplace_back(n, curve[static_cast<std::size_t>(n) - 1]);
    auto sfit = stats::exponent_fit(surv);
    CHECK(std::abs(sfit.slope + 0.5) < 0.02);

    CHECK_THROWS_AS(stats::exponent_fit({{100.0, 0.5}, {200.0, 0.4}}), ValidationError);
    std::vector<std::pair<double, double>> flat;
    for (double n : {100.0, 120.0, 140.0, 160.0, 180.0})
        flat.emplace_back(n, 0.5);
    CHECK_THROWS_AS(stats::exponent_fit(flat), ValidationError);  // < 1.5 decades
    auto bad = synth;
    bad.back().second = 0.0;
    CHECK_THROWS_AS(stats::exponent_fit(bad), ValidationError);
}

TEST_CASE("chi-square statistic and p-value")
{
    CHECK(stats::chi_square_stat({10, 20, 30}, {10, 20, 30}) == 0.0);
    // Hand value: (12-10)^2/10 + (18-20)^2/20 = 0.4 + 0.2
    CHECK(stats::chi_square_stat({12, 18}, {10, 20}) == doctest::Approx(0.6));
    CHECK(stats::chi_square_pvalue(0.0, 3) == doctest::Approx(1.0));
    CHECK(stats::chi_square_pvalue(11.345, 3) == doctest::Approx(0.01).epsilon(1e-3));
    CHECK_THROWS_AS(stats::chi_square_stat({1.0}, {0.0}), ValidationError);
}

TEST_CASE("bootstrap bands are seeded, deterministic and sane")
{
    std::vector<double> consts(50, 2.5);
    auto degenerate = stats::bootstrap_mean(consts, 0.01, 7);
    CHECK(degenerate.lo == 2.5);
    CHECK(degenerate.hi == 2.5);

    RngStream rs(make_key(99), stream_id(StreamTag::Generic, 9));
    std::vector<double> gauss(4000);
    for (auto& v : gauss)
        v = 1.0 + rs.next_gaussian();
    auto band = stats::bootstrap_mean(gauss, 0.01, 11);
    CHECK(band.lo < 1.0);
    CHECK(band.hi > 1.0);
    CHECK(band.hi - band.lo < 0.2);
    auto band2 = stats::bootstrap_mean(gauss, 0.01, 11);
    CHECK(band.lo == band2.lo);
    CHECK(band.hi == band2.hi);

    std::vector<double> unit(gauss.size(), 1.0);
    auto wband = stats::bootstrap_weighted_mean(gauss, unit, 0.01, 12);
    CHECK(wband.point == doctest::Approx(band.point).epsilon(1e-12));
    CHECK(wband.lo < wband.point);
    CHECK(wband.hi > wband.point);

    // Weighted mean honours the weights: concentrate all mass on one value.
    std::vector<double> vals = {5.0, 1.0};
    std::vector<double> wts = {1.0, 0.0};
    auto onept = stats::bootstrap_weighted_mean(vals, wts, 0.05, 13);
    CHECK(onept.point == 5.0);
}

TEST_CASE("jittered radii stay within half a cell of the lattice radius")
{
    std::vector<double> rows = {3.0, 4.0, 6.0, 8.0};  // two 2D points
    Vec cell = {0.5, 0.5};
    auto radii = stats::jittered_radii(rows, 2, cell, 21);
    REQUIRE(radii.size() == 2);
    CHECK(std::abs(radii[0] - 5.0) < 0.5);
    CHECK(std::abs(radii[1] - 10.0) < 0.5);
    auto again = stats::jittered_radii(rows, 2, cell, 21);
    CHECK(radii[0] == again[0]);
    auto other = stats::jittered_radii(rows, 2, cell, 22);
    CHECK(radii[0] != other[0]);
    CHECK_THROWS_AS(stats::jittered_radii({1.0, 2.0, 3.0}, 2, cell, 1),
                    ValidationError);
}

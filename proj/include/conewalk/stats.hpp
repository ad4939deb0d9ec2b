// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
//
// Statistical instruments: Kolmogorov-Smirnov distances, total variation,
// log-log exponent fits, binned chi-square, seeded bootstrap bands, lattice
// jitter, and the TestReport record every experiment emits.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "conewalk/common.hpp"

namespace conewalk::stats {

struct TestReport {
    std::string experiment;
    double statistic = 0;
    double threshold = 0;
    bool pass = false;  // statistic <= threshold
    std::vector<std::pair<std::string, double>> details;
    std::map<std::string, std::string> metadata;

    void finalize() { pass = statistic <= threshold; }
};

struct KsOneResult {
    double statistic = 0;
    double p_value = 0;  // asymptotic Kolmogorov approximation Q(sqrt(N) D)
    std::size_t n = 0;
};

// Sup distance between the empirical CDF of `samples` and `cdf`.
KsOneResult ks_one_sample(std::vector<double> samples,
                          std::function<double(double)> const& cdf);

struct KsTwoResult {
    double statistic = 0;
    double threshold = 0;  // c(alpha) sqrt((m+n)/(m n))
    double p_value = 0;
    double alpha = 0;
    std::size_t n1 = 0, n2 = 0;
    bool pass = false;  // statistic <= threshold
};

KsTwoResult ks_two_sample(std::vector<double> a, std::vector<double> b,
                          double alpha = 0.01);

// 0.5 * sum |p - q| over a shared universe (throws on negative mass).
double tv_distance(std::vector<double> const& p, std::vector<double> const& q);
double tv_distance(std::map<std::vector<long>, double> const& p,
                   std::map<std::vector<long>, double> const& q);

struct ExponentFit {
    double slope = 0;
    double intercept = 0;
    double slope_stderr = 0;
    std::size_t points_used = 0;  // tail half of the horizon grid
};

// OLS slope of log P versus log n over the tail half (n above the geometric
// midpoint of the grid). Needs >= 5 horizons spanning >= 1.5 decades.
ExponentFit exponent_fit(std::vector<std::pair<double, double>> const& survivals);

// Pearson statistic sum (O-E)^2 / E over aligned cells (every E must be > 0).
double chi_square_stat(std::vector<double> const& observed,
                       std::vector<double> const& expected);
double chi_square_pvalue(double stat, double dof);

struct Band {
    double lo = 0;
    double hi = 0;
    double point = 0;
};

// Percentile bootstrap bands (two-sided at level alpha), seeded and
// deterministic; 400 resamples by default.
Band bootstrap_mean(std::vector<double> const& samples, double alpha,
                    std::uint64_t seed, int resamples = 400);
// Self-normalised weighted mean sum(w g)/sum(w), resampling index pairs.
Band bootstrap_weighted_mean(std::vector<double> const& values,
                             std::vector<double> const& weights, double alpha,
                             std::uint64_t seed, int resamples = 400);

// Adds independent U(-w_j/2, w_j/2) noise per coordinate to flattened d-column
// rows and returns the resulting radii; used to compare lattice endpoint laws
// against continuous radial densities without discretisation plateaus.
std::vector<double> jittered_radii(std::vector<double> const& rows, int d,
                                   Vec const& cell_widths, std::uint64_t seed);

}  // namespace conewalk::stats

// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
//
// Trajectory simulation, exit detection, scaled paths, survival-probability
// estimation (Monte Carlo and exact DP) and the maximal-inequality bound.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "conewalk/common.hpp"
#include "conewalk/cone.hpp"
#include "conewalk/rng.hpp"
#include "conewalk/steps.hpp"

namespace conewalk {

struct PathSample {
    Vec start;
    std::vector<Vec> positions;  // x+S(1), ..., stopping at exit unless full
    std::optional<std::int64_t> exit_index;  // first k with x+S(k) outside
};

struct SurvivalEstimate {
    std::int64_t n = 0;
    Vec x;
    double probability = 0;
    double std_error = 0;
    std::int64_t replicas = 0;
    std::string method;  // "monte-carlo" or "exact-dp"
};

// Simulates x + S(1..n) with exit detection after every step. Generation
// stops at the exit unless full_path is set, in which case all n positions
// are produced and exit_index still marks the first outside position.
PathSample simulate_path(Cone const& cone, StepDistribution const& dist, Vec const& x,
                         std::int64_t n, RngStream& rs, bool full_path = false);

// Piecewise-constant scaled path t -> (x + S(floor(n t))) / sqrt(n) on [0,1],
// with S(0) = 0. Paths that stopped at their exit stay frozen there.
class ScaledPath {
  public:
    ScaledPath(PathSample path, std::int64_t n);
    Vec operator()(double t) const;
    std::int64_t horizon() const { return n_; }

  private:
    PathSample path_;
    std::int64_t n_;
    double scale_;
};

// Maximum of |S(k)| = |position - start| over the recorded steps (0 if none).
double max_norm(PathSample const& path);

// Unbiased Monte Carlo estimate of P(tau_x > n). Deterministic for fixed
// (seed, replicas) independently of the worker count; replica r draws from
// the stream (SurvivalMc, r). +/-1 product laws on the half-line, half-space
// (marginal reduction), orthant and weyl-a chambers run on the batched
// kernels; everything else takes the generic per-replica path.
SurvivalEstimate survival_probability_mc(Cone const& cone, StepDistribution const& dist,
                                         Vec const& x, std::int64_t n,
                                         std::int64_t replicas, std::uint64_t seed,
                                         int threads = 0);

// Exact P(tau_x > n) by lattice dynamic programming (finite-support laws).
SurvivalEstimate survival_probability_exact(Cone const& cone,
                                            StepDistribution const& dist, Vec const& x,
                                            std::int64_t n);

// Maximal-inequality bound 2 d exp(r) (sqrt(d) n / (x y))^r with r = x/(sqrt(d) y).
double fuk_nagaev_bound(std::int64_t n, double x_level, double y_level, int d);

// Same bound plus the tail term n P(|X(1)| > y), computed exactly for every
// shipped step kind (finite support by summation, gaussian via the chi tail,
// sphere by its fixed radius).
double fuk_nagaev_bound_with_tail(std::int64_t n, double x_level, double y_level,
                                  StepDistribution const& dist);

}  // namespace conewalk

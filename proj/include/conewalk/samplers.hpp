// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
//
// Samplers for the three conditioned laws: the walk conditioned to stay in
// the cone up to n (meander, by exact rejection or multilevel splitting), the
// V-transformed chain (exact Doob h-transform for lattice walks), and the
// bridge conditioned on both staying in the cone and hitting a target point.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "conewalk/common.hpp"
#include "conewalk/cone.hpp"
#include "conewalk/harmonic.hpp"
#include "conewalk/steps.hpp"
#include "conewalk/walk.hpp"

namespace conewalk::smp {

enum class LawKind { Meander, HTransform, Bridge };

struct ConditionedEnsemble {
    LawKind law = LawKind::Meander;
    std::int64_t n = 0;
    Vec y;  // bridge target (empty otherwise)
    std::vector<PathSample> paths;
    std::int64_t attempts = 0;
    double acceptance = 1.0;  // (count-1)/(attempts-1) for rejection laws
    Vec start;
    std::string cone_name;
    std::string dist_name;
    std::uint64_t seed = 0;
    bool approximate = false;  // true for multilevel splitting output
    double ess = 0;            // splitting diagnostic: min level survivors
    std::vector<std::string> notes;
};

// Exact rejection: keep full paths with tau_x > n. The acceptance estimate
// (count-1)/(attempts-1) is unbiased for P(tau_x > n).
ConditionedEnsemble sample_meander(Cone const& cone, StepDistribution const& dist,
                                   Vec const& x, std::int64_t n, std::int64_t count,
                                   std::uint64_t seed, int threads = 0);

// Fixed-population multilevel splitting over the horizon grid `levels`
// (strictly increasing, ending at n): survivors are resampled with
// replacement at each level, so the output is approximate unless a single
// level degenerates to plain rejection.
ConditionedEnsemble sample_meander_split(Cone const& cone, StepDistribution const& dist,
                                         Vec const& x, std::int64_t n,
                                         std::int64_t count,
                                         std::vector<std::int64_t> const& levels,
                                         std::uint64_t seed, int threads = 0);

// Exact Doob h-transform chain for lattice walks: steps w are drawn with
// probability P(X=w) V(x+w) / V(x) restricted to the cone. The first overload
// reads V from a numeric table and aborts if the walk would consult a state
// outside the table window; the second requires a closed-form V.
ConditionedEnsemble sample_htransform(Cone const& cone, StepDistribution const& dist,
                                      HarmonicTable const& vtable, Vec const& x,
                                      std::int64_t n, std::int64_t count,
                                      std::uint64_t seed, int threads = 0);
ConditionedEnsemble sample_htransform(Cone const& cone, StepDistribution const& dist,
                                      Vec const& x, std::int64_t n, std::int64_t count,
                                      std::uint64_t seed, int threads = 0);

// Exact bridge law by rejection against {tau_x > n, x + S(n) = y}; y must be
// reachable (lattice parity/range DP check).
ConditionedEnsemble sample_bridge(Cone const& cone, StepDistribution const& dist,
                                  Vec const& x, std::int64_t n, Vec const& y,
                                  std::int64_t count, std::uint64_t seed,
                                  int threads = 0);

// Heuristic stand-in for the K_+ membership condition: true iff within
// `probe_budget` simulated steps some surviving path reaches |pos| >= 10
// with distance to the boundary >= 0.1 |pos|. Never blocks a run; callers
// only annotate reports with the outcome.
bool check_kplus(Cone const& cone, StepDistribution const& dist, Vec const& x,
                 std::int64_t probe_budget, std::uint64_t seed = 2026);

// True iff an n-step lattice walk can move from x to y ignoring the cone
// (parity and range only). Throws ValidationError for non-lattice laws or
// non-integral points.
bool bridge_reachable(StepDistribution const& dist, Vec const& x, Vec const& y,
                      std::int64_t n);

// Streaming collectors for large-n law checks: same conditioned laws and the
// same per-replica stream protocol as the full samplers, but only endpoint /
// mid-path / running-max records are kept, so count * n is not bounded by
// ensemble memory. Lattice +/-1 product laws use the block kernels.
struct MeanderSummary {
    int d = 1;
    std::int64_t n = 0;
    std::vector<double> endpoints;  // count x d
    std::vector<double> mids;       // count x d, at step max(1, n/2)
    std::vector<double> max_norms;  // running max of |x + S(k)|, k <= n
    std::int64_t attempts = 0;
    double acceptance = 0;
};
MeanderSummary sample_meander_summary(Cone const& cone, StepDistribution const& dist,
                                      Vec const& x, std::int64_t n, std::int64_t count,
                                      std::uint64_t seed, int threads = 0);

struct HTransformSummary {
    int d = 1;
    std::int64_t n = 0;
    std::vector<double> endpoints;  // count x d
    std::vector<double> quarter;    // count x d, X(max(1, n/4)) unscaled
    std::vector<double> half;       // count x d, X(max(1, n/2))
};
HTransformSummary sample_htransform_summary(Cone const& cone,
                                            StepDistribution const& dist, Vec const& x,
                                            std::int64_t n, std::int64_t count,
                                            std::uint64_t seed, int threads = 0);

}  // namespace conewalk::smp

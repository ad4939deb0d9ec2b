// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
//
// Reference limit objects: grid Brownian meanders in a cone, the u-weighted
// (h-transformed) Brownian motion, the entrance law started at the apex, the
// radial Bessel reduction (density evaluator and exact-transition sampler),
// the bridge weight, and a wedge-only full-series heat kernel.
#pragma once

#include <cstdint>
#include <vector>

#include "conewalk/common.hpp"
#include "conewalk/cone.hpp"
#include "conewalk/stats.hpp"

namespace conewalk::ref {

struct RadialLaw {
    double degrees = 0;  // delta = 2p + d
    double index = 0;    // a1 = p + d/2 - 1 = delta/2 - 1
    static RadialLaw for_cone(Cone const& cone);
};

// Grid-path ensemble summary: per-path endpoint and mid-time positions
// (row-major, count x d), running maximum of |B(t)| over all grid times, and
// importance weights (empty for plain meander ensembles).
struct GridEnsemble {
    int d = 1;
    std::int64_t m = 0;   // grid steps
    double T = 1.0;       // horizon
    double eps = 0;       // meander start scale (0 when started from a point)
    std::vector<double> endpoints;
    std::vector<double> mid;
    std::vector<double> max_norms;
    std::vector<double> weights;
    std::int64_t attempts = 0;
    double acceptance = 0;
};

// Rejection-sampled grid Brownian meander started at eps * x0 (the cone's
// catalogue interior direction): every grid point must stay in the cone.
// Orthant ensembles glue independent per-coordinate 1D meanders (the
// conditioning factorises exactly); half-space ensembles combine free
// coordinates with a 1D meander in the last one.
GridEnsemble sample_bm_meander(Cone const& cone, std::int64_t m, double eps,
                               std::int64_t count, std::uint64_t seed,
                               int threads = 0);

// Surviving grid Brownian paths from x over [0, T] carrying the importance
// weight u(x + B(T)) / u(x); downstream statistics self-normalise.
GridEnsemble sample_h_bm(Cone const& cone, Vec const& x, double T, std::int64_t m,
                         std::int64_t count, std::uint64_t seed, int threads = 0);

// Radial density of the apex entrance law at time t: with k = 2p + d,
// f_t(r) = r^{k-1} e^{-r^2/2t} / (t^{k/2} 2^{k/2-1} Gamma(k/2)).
double entrance_law_density(Cone const& cone, double t, double r);
double entrance_law_cdf(Cone const& cone, double t, double r);

// Bessel(delta) transition density over time h:
// q_h(r1, r2) = (r2/r1)^{a1} (r2/h) e^{-(r1^2+r2^2)/2h} I_{a1}(r1 r2 / h).
double radial_transition_density(RadialLaw const& law, double h, double r1, double r2);

struct RadialPaths {
    std::vector<double> times;  // shared grid, starts at 0
    std::vector<double> radii;  // count x times.size(), row-major
};

// Exact-transition Bessel sampler: squared radii follow the noncentral
// chi-square mixture (Poisson-mixed Gamma), so paths are Markov with kernel
// q_h with no discretisation bias.
RadialPaths sample_bessel(RadialLaw const& law, double r0, std::vector<double> times,
                          std::int64_t count, std::uint64_t seed);

// Unnormalised bridge weight t^{-p/2} (1-t)^{-p/2-d/2} u(w) e^{-|w|^2/2(1-t)}
// (the normaliser is eliminated downstream by self-normalisation).
double bridge_weight(Cone const& cone, double t, Vec const& w);

// Killed-BM transition density in a planar wedge (w.r.t. Lebesgue area),
// by the full eigenfunction series over sin(j pi theta / alpha).
double wedge_kernel(Cone const& wedge, double h, Vec const& x, Vec const& z);

// Compares self-normalised h-BM estimates started at eps*x0 against
// u(M(1))-reweighted meander estimates over a panel of bounded functionals;
// statistic = max over the panel of |difference| / (sum of bootstrap 1%
// half-widths), threshold 1.
stats::TestReport htransform_limit_identity_check(Cone const& cone, double eps,
                                                  std::int64_t samples,
                                                  std::uint64_t seed);

}  // namespace conewalk::ref

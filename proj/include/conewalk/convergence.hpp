// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
//
// Convergence experiments tying the conditioned walks to their scaling
// limits: meander functionals against the grid Brownian meander and the
// radial endpoint law, h-transformed walks against the chi(2p+d) entrance
// law and exact Bessel transitions, bridge functionals against the
// weight-reweighted meander representation, and the Weyl-chamber maximum
// functionals used for universality checks.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "conewalk/common.hpp"
#include "conewalk/cone.hpp"
#include "conewalk/harmonic.hpp"
#include "conewalk/samplers.hpp"
#include "conewalk/stats.hpp"
#include "conewalk/steps.hpp"

namespace conewalk::cvg {

// Raw functional samples behind a report, for CSV dumps and overlay plots.
// Columns are independent series and may have different lengths.
struct SampleDump {
    std::vector<std::pair<std::string, std::vector<double>>> columns;
};

// Three legs: scaled endpoint radius vs the r^{p+d-1} e^{-r^2/2} law
// (one-sample KS, lattice marginals jittered by one cell), running max and
// mid-time radius vs a grid Brownian meander ensemble (two-sample KS). The
// report statistic is the worst leg's distance over its 1% threshold.
stats::TestReport meander_convergence_test(Cone const& cone,
                                           StepDistribution const& dist, Vec const& x,
                                           std::int64_t n, std::int64_t count,
                                           std::uint64_t seed,
                                           SampleDump* dump = nullptr);

// Three legs: scaled endpoint radius vs chi(2p+d); radii at t in {1/4, 1/2, 1}
// vs exact Bessel marginals started at 0 (two-sample KS); and the conditional
// radius transition from t = 1/2 to t = 1, checked by mapping each sampled
// pair through the radial transition CDF and binning the resulting
// probability transforms against the uniform law (chi-square, 20 bins).
// The first overload requires a closed-form V; the second runs the
// table-driven chain and stores full paths, so count * n is memory-bounded.
stats::TestReport htransform_convergence_test(Cone const& cone,
                                              StepDistribution const& dist,
                                              Vec const& x, std::int64_t n,
                                              std::int64_t count, std::uint64_t seed,
                                              SampleDump* dump = nullptr);
stats::TestReport htransform_convergence_test(Cone const& cone,
                                              StepDistribution const& dist,
                                              HarmonicTable const& vtable, Vec const& x,
                                              std::int64_t n, std::int64_t count,
                                              std::uint64_t seed,
                                              SampleDump* dump = nullptr);

// Compares bridge-prefix functionals (radius at t, running max over [0, t])
// against the weight-reweighted Brownian meander within joint bootstrap 1%
// bands. The discrete side never samples bridges by rejection: meander
// prefixes of m = t n steps are reweighted by the exact absorbing-walk
// arrival mass G(w) = P_w(stay in K, reach y in n - m steps) computed by a
// rolling backward DP, which reproduces the bridge-prefix law identically.
// For 1D cones the radius leg is also checked against the exact bridge
// marginal mean.
stats::TestReport bridge_convergence_test(Cone const& cone, StepDistribution const& dist,
                                          Vec const& x, Vec const& y, std::int64_t n,
                                          double t, std::int64_t count,
                                          std::uint64_t seed,
                                          SampleDump* dump = nullptr);

// Per-path maximum functionals over Weyl-chamber bridges, rescaled by
// sqrt(n): the running maximum of the top coordinate, or of the top-bottom
// coordinate range. Downstream two-sample tests compare step laws.
enum class FeierlKind { MaxTop, MaxRange };
std::vector<double> feierl_functional(smp::ConditionedEnsemble const& ens,
                                      FeierlKind kind);

}  // namespace conewalk::cvg

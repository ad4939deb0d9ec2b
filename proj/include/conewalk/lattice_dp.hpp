// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
//
// Exact dynamic-programming oracles for finite-support lattice walks killed at
// the cone boundary: survival curves, endpoint laws, bridge marginals and
// exact bridge/free-bridge samplers. All computations are plain sums over
// occupation measures -- no approximation beyond double rounding.
#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "conewalk/cone.hpp"
#include "conewalk/rng.hpp"
#include "conewalk/steps.hpp"

namespace conewalk::dp {

// Integer-lattice view of a finite-support law (throws if the support is not
// integer-valued).
struct IntLaw {
    int d = 0;
    std::vector<std::vector<long>> moves;
    std::vector<double> probs;
};
IntLaw int_law(StepDistribution const& dist);

// Per-coordinate (values, probs) if the law is an exact product measure.
using Marginals = std::vector<std::pair<std::vector<long>, std::vector<double>>>;
std::optional<Marginals> factorize_product(IntLaw const& law);

// True for the +/-1-per-coordinate product law (the kernel fast path).
bool is_pm1_product(IntLaw const& law);

// survival[k-1] = P(tau_x > k) for k = 1..n, exact.
// Dispatch: dense 1D for half-line / half-space marginal / weyl-a:2
// difference walk; per-coordinate product for orthants with product laws;
// dedicated 2D difference DP for weyl-a:3 with the +/-1 product law; dense
// window DP otherwise (guarded by |support| * window <= 1e8).
std::vector<double> survival_curve(Cone const& cone, StepDistribution const& dist,
                                   Vec const& x, std::int64_t n);

// Endpoint law on the event {tau_x > n} for 1D cones: mass[i] = P(tau > n,
// x + S(n) = lo + i); survival = sum(mass).
struct EndpointLaw1D {
    long lo = 0;
    std::vector<double> mass;
    double survival = 0;
};
EndpointLaw1D endpoint_law_1d(Cone const& cone, StepDistribution const& dist,
                              Vec const& x, std::int64_t n);

// Generic endpoint law (any catalogue cone, dense window DP, small n).
struct EndpointLawND {
    std::vector<std::vector<long>> points;
    std::vector<double> mass;
    double survival = 0;
};
EndpointLawND endpoint_law(Cone const& cone, StepDistribution const& dist,
                           Vec const& x, std::int64_t n);

// Law of W(k) under the bridge {tau_x > n, x + S(n) = y} on the half-line,
// computed by one forward and one backward rolling pass (O(window) memory).
// mass is normalized; survival = P(tau_x > n, x + S(n) = y).
EndpointLaw1D bridge_marginal_1d(Cone const& cone, StepDistribution const& dist,
                                 Vec const& x, Vec const& y, std::int64_t n,
                                 std::int64_t k);

// Exact sequential bridge sampler for the half-line: backward tables
// G_k(w) = P_w(stay in K for times k+1..n, arrive at y), then step k -> k+1
// with probability p_a G_{k+1}(w+a) / G_k(w).
class BridgeTable1D {
  public:
    BridgeTable1D(Cone const& cone, StepDistribution const& dist, double x, double y,
                  std::int64_t n);
    double mass() const { return mass_; }           // P(tau_x > n, W(n) = y)
    double level_value(std::int64_t k, long w) const;  // G_k(w)
    std::vector<long> sample_path(RngStream& rs) const;  // W(1..n)

  private:
    std::vector<long> moves_;
    std::vector<double> probs_;
    long x_ = 0;
    std::int64_t n_ = 0;
    std::vector<long> level_lo_;
    std::vector<std::vector<double>> levels_;  // G_k over [lo_k, ...]
    double mass_ = 0;
};

// Free-walk tables for one integer coordinate from 0: P(S(j) = w) for all
// j <= n, plus exact sampling of a free bridge conditioned on S(n) = dx.
class FreeWalk1D {
  public:
    FreeWalk1D(std::vector<long> moves, std::vector<double> probs, std::int64_t n);
    double endpoint_mass(long dx) const;  // P(S(n) = dx)
    // Partial sums S(1..n) with S(n) = dx, drawn from the exact bridge law.
    void sample_bridge(long dx, RngStream& rs, std::vector<long>& out) const;

  private:
    double level_mass(std::int64_t j, long w) const;

    std::vector<long> moves_;
    std::vector<double> probs_;
    std::int64_t n_ = 0;
    std::vector<long> level_lo_;
    std::vector<std::vector<double>> levels_;
};

// Exhaustive enumeration of surviving paths (atom-index sequences), for small
// n: |support|^n <= 2e7. probs are unconditional path probabilities.
struct PathLaw {
    std::vector<std::vector<int>> paths;
    std::vector<double> probs;
    double total = 0;  // P(tau_x > n)
};
PathLaw enumerate_paths(Cone const& cone, StepDistribution const& dist, Vec const& x,
                        std::int64_t n);

}  // namespace conewalk::dp

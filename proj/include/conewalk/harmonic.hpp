// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
//
// Discrete harmonic function V for a lattice walk killed on leaving the cone:
// exact fixed-point construction on a truncated window with a far-field
// anchor V = u, plus the Monte Carlo limit approximation E[u(x+S(n)); tau>n].
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "conewalk/common.hpp"
#include "conewalk/cone.hpp"
#include "conewalk/steps.hpp"

namespace conewalk {

struct HarmonicBuildOptions {
    double tol = 1e-10;              // relative sweep-update tolerance
    std::int64_t max_sweeps = 1'000'000;
    double damping = 1.0;            // 1.0 = plain Jacobi
    double anchor_scale = 1.0;       // Dirichlet data = anchor_scale * u
    int threads = 0;
};

class HarmonicTable {
  public:
    Cone const& cone() const { return cone_; }
    double window_radius() const { return radius_; }
    double residual() const { return residual_; }
    std::int64_t sweeps() const { return sweeps_; }
    double anchor_scale() const { return anchor_scale_; }

    // V-hat at a lattice point: table value inside the window, anchor u
    // outside it, 0 outside the cone. The point must be integral.
    double value(Vec const& x) const;
    // V-hat(to) / V-hat(from); 0 when `to` left the cone; `from` needs V > 0.
    double v_ratio(Vec const& from, Vec const& to) const;
    // Interior entries in deterministic (lexicographic) order, for dumps.
    std::vector<std::pair<std::vector<long>, double>> entries() const;

  private:
    friend HarmonicTable build_v_exact(Cone const& cone, StepDistribution const& dist,
                                       double window_radius,
                                       HarmonicBuildOptions const& opts);
    friend HarmonicTable make_v_table(
        Cone const& cone, double window_radius,
        std::vector<std::pair<std::vector<long>, double>> const& entries,
        double residual, double anchor_scale);
    Cone cone_ = Cone::half_line();
    double radius_ = 0;
    double residual_ = 0;
    std::int64_t sweeps_ = 0;
    double anchor_scale_ = 1.0;
    std::map<std::vector<long>, std::size_t> index_;
    std::vector<double> values_;
};

// Solves V = E[V(.+X); .+X in K] on interior lattice points |x| <= R with
// Dirichlet data anchor_scale*u beyond the window, by damped Jacobi sweeps.
HarmonicTable build_v_exact(Cone const& cone, StepDistribution const& dist,
                            double window_radius,
                            HarmonicBuildOptions const& opts = {});

// Reassembles a table from dumped entries (the inverse of entries(), used by
// the CSV loader). No solve happens; residual is carried as metadata.
HarmonicTable make_v_table(
    Cone const& cone, double window_radius,
    std::vector<std::pair<std::vector<long>, double>> const& entries,
    double residual = 0.0, double anchor_scale = 1.0);

struct VEstimate {
    double value = 0;
    double std_error = 0;
    std::int64_t replicas = 0;
};

// Monte Carlo estimate of E[u(x+S(n)); tau_x > n], which tends to V(x) under
// the catalogue normalisation of u. n = 0 returns u(x) exactly.
VEstimate estimate_v_mc(Cone const& cone, StepDistribution const& dist, Vec const& x,
                        std::int64_t n, std::int64_t replicas, std::uint64_t seed,
                        int threads = 0);

// Exact closed-form V for +/-1 product laws on the half-line, half-space and
// orthant: u itself is killed-harmonic there because every reachable exit
// position has u = 0. Integer interior starts only; nullopt otherwise.
std::optional<double> closed_form_v(Cone const& cone, StepDistribution const& dist,
                                    Vec const& x);

}  // namespace conewalk

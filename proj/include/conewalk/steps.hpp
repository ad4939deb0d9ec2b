// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
//
// Increment distributions under the normalisation assumption: zero mean and
// identity covariance. Finite-support (lattice) kinds carry their atoms and
// have exact moments; continuous kinds are checked by Monte Carlo.
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "conewalk/common.hpp"
#include "conewalk/rng.hpp"

namespace conewalk {

enum class StepKind { GaussianIsotropic, RademacherProduct, SphereUniformScaled, LatticeGeneral };

struct LatticeAtom {
    Vec x;
    double p = 0;
};

struct MomentReport {
    bool exact = false;   // computed from the support rather than sampled
    Vec mean;             // length d
    std::vector<Vec> cov; // d x d
    double max_mean_dev = 0;
    double max_cov_dev = 0;  // vs identity
    double mass_dev = 0;     // |sum p - 1| for finite support
    bool pass = false;
};

class StepDistribution {
  public:
    static StepDistribution gaussian(int d);
    static StepDistribution rademacher(int d);
    static StepDistribution sphere(int d);
    // Validates mass, mean and covariance to 1e-12 and throws on violation.
    static StepDistribution lattice(int d, std::vector<LatticeAtom> atoms);
    // CLI names: "gaussian", "rademacher", "sphere", "lattice:<path>" plus the
    // built-in laws "lattice:srw" (+/-1 per coordinate) and "lattice:mix2"
    // (P(+-1)=1/4, P(+-2)=1/16, P(0)=3/8 per coordinate, unit variance).
    static StepDistribution parse(std::string_view name, int d);

    StepKind kind() const { return kind_; }
    int dimension() const { return d_; }
    std::string name() const { return name_; }
    // All shipped laws have every moment finite.
    double moment_order() const;
    bool is_lattice() const;
    // Finite-support kinds only (throws otherwise).
    std::vector<LatticeAtom> const& atoms() const;
    // Per-coordinate lattice cell width: gcd of support differences (the walk
    // lives on a fixed coset of spacing * Z per coordinate). Finite kinds only.
    Vec lattice_spacing() const;

    Vec sample_step(RngStream& rs) const;

  private:
    StepDistribution(StepKind kind, int d, std::string name)
        : kind_(kind), d_(d), name_(std::move(name))
    {
    }

    StepKind kind_;
    int d_;
    std::string name_;
    std::vector<LatticeAtom> atoms_;  // finite-support kinds
    Vec cum_;                         // cumulative probabilities for sampling
};

// Exact moments for finite support; Monte Carlo otherwise (4 SE flag).
MomentReport check_normalisation(StepDistribution const& dist, std::uint64_t seed = 1,
                                 std::size_t nsamples = 1000000);

// Parse a support file: one atom per line, "p x1 ... xd"; '#' comments and
// blank lines allowed.
std::vector<LatticeAtom> read_support_file(std::string const& path, int d);

}  // namespace conewalk

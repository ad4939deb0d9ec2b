// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
//
// Catalogue of cones with closed-form positive harmonic function u, homogeneity
// exponent p and Dirichlet eigenvalue lambda1 = p(p+d-2). Membership always
// refers to the open cone: boundary points count as exited.
#pragma once

#include <string>
#include <string_view>

#include "conewalk/common.hpp"

namespace conewalk {

enum class ConeKind { HalfLine, HalfSpace, Orthant, Wedge2D, WeylA, WeylB };

class Cone {
  public:
    static Cone half_line();
    static Cone half_space(int d);
    static Cone orthant(int d);
    static Cone wedge(double alpha);  // opening angle in (0, 2*pi)
    static Cone weyl_a(int d);        // x_1 < x_2 < ... < x_d, d >= 2
    static Cone weyl_b(int d);        // 0 < x_1 < ... < x_d, d >= 2
    // CLI names: "half-line", "half-space:d", "orthant:d", "wedge:alpha",
    // "weyl-a:d", "weyl-b:d".
    static Cone parse(std::string_view name);

    ConeKind kind() const { return kind_; }
    int dimension() const { return d_; }
    double alpha() const { return alpha_; }  // Wedge2D only
    std::string name() const;

    double exponent() const;  // p
    double lambda1() const;   // p(p+d-2); throws for d == 1 (S^0 degenerate)

    bool contains(Vec const& x) const;
    // Closed-form u; positive inside, zero on the boundary, homogeneous of
    // degree p. The multiplicative normalisation is fixed by these forms.
    double u_value(Vec const& x) const;
    // Euclidean distance to the boundary from inside; 0 for points not in the
    // open cone.
    double dist_to_boundary(Vec const& x) const;
    // Unit vector on the central axis, used to place start points well inside.
    Vec interior_direction() const;

  private:
    Cone(ConeKind kind, int d, double alpha) : kind_(kind), d_(d), alpha_(alpha) {}
    void check_dim(Vec const& x) const;

    ConeKind kind_;
    int d_;
    double alpha_ = 0;
};

}  // namespace conewalk

// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "conewalk/cone.hpp"
#include "conewalk/rng.hpp"

using namespace conewalk;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Random point near radius scale inside the cone (rejection from a jittered
// axis point).
Vec interior_point(Cone const& cone, RngStream& rs, double scale)
{
    int const d = cone.dimension();
    Vec dir = cone.interior_direction();
    for (;;) {
        Vec x(d);
        double stretch = 0.5 + rs.next_unit();
        for (int j = 0; j < d; ++j)
            x[j] = scale * stretch * dir[j] +
                   scale * (rs.next_unit() - 0.5) / (2.0 * d);
        if (cone.contains(x) && cone.dist_to_boundary(x) > 0.02 * scale)
            return x;
    }
}

double fd_laplacian_rel(Cone const& cone, Vec const& x, double h)
{
    int const d = cone.dimension();
    double lap = 0;
    double scale = std::abs(cone.u_value(x));
    Vec y = x;
    for (int j = 0; j < d; ++j) {
        y[j] = x[j] + h;
        double up = cone.u_value(y);
        y[j] = x[j] - h;
        double um = cone.u_value(y);
        y[j] = x[j];
        lap += (up - 2 * cone.u_value(x) + um) / (h * h);
        scale = std::max(scale, std::max(std::abs(up), std::abs(um)));
    }
    return std::abs(lap) / std::max(scale, 1e-300);
}

std::vector<Cone> catalogue()
{
    return {Cone::half_line(),     Cone::half_space(2), Cone::half_space(3),
            Cone::orthant(2),      Cone::orthant(3),    Cone::wedge(kPi / 2),
            Cone::wedge(2.0),      Cone::wedge(4.7),    Cone::weyl_a(2),
            Cone::weyl_a(3),       Cone::weyl_a(4),     Cone::weyl_b(2),
            Cone::weyl_b(3)};
}

}  // namespace

TEST_CASE("membership examples")
{
    CHECK(Cone::orthant(2).contains({1, 1}));
    CHECK_FALSE(Cone::weyl_a(3).contains({1, 1, 2}));  // tie on the boundary
    CHECK_FALSE(Cone::wedge(kPi / 2).contains({1, -0.1}));
    CHECK_FALSE(Cone::orthant(2).contains({1, 0}));  // open cone: boundary out
    CHECK_FALSE(Cone::half_line().contains({0}));
    CHECK(Cone::half_space(3).contains({-5, 9, 0.1}));
    CHECK(Cone::weyl_b(2).contains({0.5, 1}));
    CHECK_FALSE(Cone::weyl_b(2).contains({-0.5, 1}));
    CHECK(Cone::wedge(1.5 * kPi).contains({-1, -0.1}));  // non-convex wedge
    CHECK_THROWS_AS(Cone::orthant(2).contains({1, 2, 3}), ValidationError);
}

TEST_CASE("u closed-form examples")
{
    CHECK(Cone::orthant(2).u_value({1, 1}) == 1.0);
    CHECK(Cone::orthant(2).u_value({2, 2}) == 4.0);
    CHECK(Cone::half_space(3).u_value({0.3, -4.0, 2.0}) == 2.0);
    CHECK(Cone::weyl_a(3).u_value({0, 1, 3}) == 6.0);
    CHECK(Cone::weyl_b(2).u_value({1, 2}) == doctest::Approx(1 * 2 * 3).epsilon(1e-15));
    CHECK(Cone::half_line().u_value({2.5}) == 2.5);
    // Wedge pi/2: r^2 sin(2 theta) = 2xy.
    CHECK(Cone::wedge(kPi / 2).u_value({1, 1}) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("exponent catalogue and eigenvalue identity")
{
    CHECK(Cone::half_line().exponent() == 1.0);
    CHECK(Cone::half_space(7).exponent() == 1.0);
    CHECK(Cone::orthant(3).exponent() == 3.0);
    CHECK(Cone::wedge(kPi / 2).exponent() == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(Cone::weyl_a(4).exponent() == 6.0);
    CHECK(Cone::weyl_b(3).exponent() == 9.0);

    CHECK(Cone::wedge(kPi / 2).lambda1() == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(Cone::half_space(3).lambda1() == 2.0);
    CHECK(Cone::orthant(2).lambda1() == 4.0);
    CHECK(Cone::weyl_a(3).lambda1() == 12.0);
    CHECK(Cone::weyl_b(2).lambda1() == 16.0);
    CHECK_THROWS_AS(Cone::half_line().lambda1(), ValidationError);
    CHECK_THROWS_AS(Cone::half_space(1).lambda1(), ValidationError);

    // lambda1 = p(p+d-2) is an exact algebraic identity on the catalogue.
    for (auto const& cone : catalogue()) {
        if (cone.dimension() == 1)
            continue;
        double p = cone.exponent();
        CHECK(cone.lambda1() == p * (p + cone.dimension() - 2));
    }
}

TEST_CASE("distance to boundary")
{
    CHECK(Cone::orthant(2).dist_to_boundary({3, 1}) == 1.0);
    CHECK(Cone::half_space(2).dist_to_boundary({5, 0.25}) == 0.25);
    CHECK(Cone::weyl_a(2).dist_to_boundary({0, 2}) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(Cone::wedge(kPi / 2).dist_to_boundary({1, 1}) ==
          doctest::Approx(1.0).epsilon(1e-12));
    // Non-convex wedge, point "behind" both rays: nearest boundary is the apex.
    {
        double a = 1.5 * kPi, t = 0.75 * kPi, r = 2;
        CHECK(Cone::wedge(a).dist_to_boundary({r * std::cos(t), r * std::sin(t)}) ==
              doctest::Approx(2.0).epsilon(1e-12));
    }
    CHECK(Cone::orthant(2).dist_to_boundary({-1, 2}) == 0.0);  // outside
    CHECK(Cone::weyl_b(3).dist_to_boundary({1, 2, 4}) ==
          doctest::Approx(std::min(1.0, 1.0 / std::sqrt(2.0))).epsilon(1e-14));
}

TEST_CASE("interior direction lies inside every catalogue cone")
{
    for (auto const& cone : catalogue()) {
        Vec dir = cone.interior_direction();
        double n2 = 0;
        for (double v : dir)
            n2 += v * v;
        CHECK(std::abs(n2 - 1.0) < 1e-12);
        CHECK(cone.contains(dir));
        CHECK(cone.u_value(dir) > 0);
    }
}

TEST_CASE("homogeneity u(cx) = c^p u(x)")
{
    RngStream rs(make_key(101), StreamTag::Generic, 0);
    for (auto const& cone : catalogue()) {
        double p = cone.exponent();
        for (int rep = 0; rep < 1000 / 13 + 5; ++rep) {
            Vec x = interior_point(cone, rs, 3.0);
            double ux = cone.u_value(x);
            for (double c : {0.5, 2.0, 7.0}) {
                Vec cx = x;
                for (auto& v : cx)
                    v *= c;
                double target = std::pow(c, p) * ux;
                CHECK(std::abs(cone.u_value(cx) - target) <=
                      1e-9 * std::max(1.0, std::abs(target)));
            }
        }
    }
}

TEST_CASE("finite-difference harmonicity of u")
{
    RngStream rs(make_key(102), StreamTag::Generic, 0);
    // Radius per cone keeps the O(h^2) truncation term of the discrete
    // Laplacian below the 1e-5 relative threshold for the high-degree kinds.
    struct Entry {
        Cone cone;
        double radius;
    };
    std::vector<Entry> entries = {
        {Cone::half_line(), 5},    {Cone::half_space(3), 5},
        {Cone::orthant(2), 6},     {Cone::orthant(3), 6},
        {Cone::wedge(kPi / 2), 6}, {Cone::wedge(2.0), 8},
        {Cone::wedge(0.3), 40},    {Cone::wedge(4.7), 6},
        {Cone::weyl_a(2), 6},      {Cone::weyl_a(3), 8},
        {Cone::weyl_a(4), 10},     {Cone::weyl_b(2), 8},
        {Cone::weyl_b(3), 12},     {Cone::weyl_b(4), 60},
    };
    for (auto const& e : entries) {
        for (int rep = 0; rep < 25; ++rep) {
            Vec x = interior_point(e.cone, rs, e.radius);
            CHECK(fd_laplacian_rel(e.cone, x, 1e-3) < 1e-5);
        }
    }
}

TEST_CASE("u vanishes on the boundary")
{
    RngStream rs(make_key(103), StreamTag::Generic, 0);
    auto ru = [&] { return 0.2 + 2.0 * rs.next_unit(); };
    for (int rep = 0; rep < 1000; ++rep) {
        // Polynomial kinds: exactly zero on a face.
        {
            Vec x = {ru(), ru(), ru()};
            x[rep % 3] = 0.0;
            CHECK(Cone::orthant(3).u_value(x) == 0.0);
        }
        {
            Vec x = {ru(), 0.0, ru()};
            x[1] = x[0];  // tie x1 = x2
            CHECK(Cone::weyl_a(3).u_value({x[0], x[1], x[0] + ru()}) == 0.0);
        }
        {
            double a = ru();
            CHECK(Cone::weyl_b(2).u_value({0.0, a}) == 0.0);
            CHECK(Cone::weyl_b(2).u_value({a, a}) == 0.0);
        }
        CHECK(Cone::half_space(2).u_value({ru(), 0.0}) == 0.0);
        // Wedge: trigonometric form, zero up to rounding on both rays.
        for (double alpha : {kPi / 2, 2.0, 1.5 * kPi}) {
            double r = 0.1 + 1.1 * rs.next_unit();
            CHECK(std::abs(Cone::wedge(alpha).u_value({r, 0.0})) < 1e-12);
            CHECK(std::abs(Cone::wedge(alpha).u_value(
                      {r * std::cos(alpha), r * std::sin(alpha)})) < 1e-12);
        }
    }
}

TEST_CASE("orthant(2) and wedge(pi/2) encode the same cone")
{
    RngStream rs(make_key(104), StreamTag::Generic, 0);
    Cone q = Cone::orthant(2);
    Cone w = Cone::wedge(kPi / 2);
    CHECK(q.exponent() == doctest::Approx(w.exponent()).epsilon(1e-15));
    int inside = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        Vec x = {4 * (rs.next_unit() - 0.5), 4 * (rs.next_unit() - 0.5)};
        CHECK(q.contains(x) == w.contains(x));
        if (q.contains(x)) {
            ++inside;
            // Same u up to the fixed normalisation of the trig form:
            // r^2 sin(2 theta) = 2xy.
            CHECK(w.u_value(x) == doctest::Approx(2.0 * q.u_value(x)).epsilon(1e-10));
        }
    }
    CHECK(inside > 100);
}

TEST_CASE("cone string parsing")
{
    CHECK(Cone::parse("half-line").kind() == ConeKind::HalfLine);
    CHECK(Cone::parse("half-space:3").dimension() == 3);
    CHECK(Cone::parse("orthant:2").exponent() == 2.0);
    CHECK(Cone::parse("wedge:1.5707963267948966").exponent() ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(Cone::parse("weyl-a:3").exponent() == 3.0);
    CHECK(Cone::parse("weyl-b:2").exponent() == 4.0);
    for (auto const& cone : catalogue())
        CHECK(Cone::parse(cone.name()).exponent() == cone.exponent());

    CHECK_THROWS_AS(Cone::parse("banana"), ValidationError);
    CHECK_THROWS_AS(Cone::parse("orthant:0"), ValidationError);
    CHECK_THROWS_AS(Cone::parse("orthant:-2"), ValidationError);
    CHECK_THROWS_AS(Cone::parse("wedge:7.0"), ValidationError);  // > 2*pi
    CHECK_THROWS_AS(Cone::parse("wedge:0"), ValidationError);
    CHECK_THROWS_AS(Cone::parse("weyl-a:1"), ValidationError);
    CHECK_THROWS_AS(Cone::parse("half-line:3"), ValidationError);
    CHECK_THROWS_AS(Cone::parse("orthant:two"), ValidationError);
}

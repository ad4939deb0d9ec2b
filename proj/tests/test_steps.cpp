// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "conewalk/steps.hpp"

using namespace conewalk;

TEST_CASE("rademacher product atoms and frequencies")
{
    auto dist = StepDistribution::rademacher(2);
    CHECK(dist.atoms().size() == 4);
    for (auto const& a : dist.atoms()) {
        CHECK(a.p == 0.25);
        CHECK(std::abs(a.x[0]) == 1.0);
        CHECK(std::abs(a.x[1]) == 1.0);
    }
    RngStream rs(make_key(1), StreamTag::Generic, 0);
    std::map<std::pair<int, int>, int> freq;
    int const n = 100000;
    for (int i = 0; i < n; ++i) {
        Vec x = dist.sample_step(rs);
        freq[{static_cast<int>(x[0]), static_cast<int>(x[1])}]++;
    }
    CHECK(freq.size() == 4);
    for (auto const& [k, c] : freq)
        CHECK(std::abs(c / static_cast<double>(n) - 0.25) < 0.006);  // ~4 sigma
}

TEST_CASE("builtin lattice laws have exact unit moments")
{
    for (char const* name : {"lattice:srw", "lattice:mix2"}) {
        auto dist = StepDistribution::parse(name, 1);
        auto rep = check_normalisation(dist);
        CHECK(rep.exact);
        CHECK(rep.pass);
        CHECK(rep.max_mean_dev == 0.0);
        CHECK(rep.max_cov_dev <= 1e-15);
        CHECK(rep.mass_dev <= 1e-15);
    }
    auto srw = StepDistribution::parse("lattice:srw", 1);
    CHECK(srw.atoms().size() == 2);
    auto mix2 = StepDistribution::parse("lattice:mix2", 1);
    CHECK(mix2.atoms().size() == 5);
    double p0 = 0;
    for (auto const& a : mix2.atoms())
        if (a.x[0] == 0.0)
            p0 = a.p;
    CHECK(p0 == 0.375);
    // Product versions in d = 2.
    auto mix2d2 = StepDistribution::parse("lattice:mix2", 2);
    CHECK(mix2d2.atoms().size() == 25);
    CHECK(check_normalisation(mix2d2).pass);
}

TEST_CASE("lattice spacing from the support")
{
    auto srw = StepDistribution::parse("lattice:srw", 1);
    CHECK(srw.lattice_spacing()[0] == doctest::Approx(2.0).epsilon(1e-12));
    auto mix2 = StepDistribution::parse("lattice:mix2", 1);
    CHECK(mix2.lattice_spacing()[0] == doctest::Approx(1.0).epsilon(1e-12));
    auto rad = StepDistribution::rademacher(3);
    for (double s : rad.lattice_spacing())
        CHECK(s == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("sphere samples sit on the radius-sqrt(d) sphere")
{
    auto dist = StepDistribution::sphere(3);
    RngStream rs(make_key(2), StreamTag::Generic, 0);
    for (int i = 0; i < 1000; ++i) {
        Vec x = dist.sample_step(rs);
        double n2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        CHECK(std::abs(n2 - 3.0) < 1e-12);
    }
    auto rep = check_normalisation(dist, 7, 200000);
    CHECK_FALSE(rep.exact);
    CHECK(rep.pass);
}

TEST_CASE("gaussian normalisation by Monte Carlo")
{
    auto rep = check_normalisation(StepDistribution::gaussian(5), 11, 200000);
    CHECK_FALSE(rep.exact);
    CHECK(rep.pass);
    CHECK(rep.max_mean_dev < 0.02);
    CHECK(rep.max_cov_dev < 0.03);
}

TEST_CASE("support files parse and validate")
{
    std::string path = "test_steps_support.txt";
    {
        std::ofstream out(path);
        out << "# simple random walk\n";
        out << "0.5 1\n";
        out << "\n";
        out << "0.5 -1  # down step\n";
    }
    auto dist = StepDistribution::parse("lattice:" + path, 1);
    CHECK(dist.atoms().size() == 2);
    CHECK(check_normalisation(dist).pass);

    {
        std::ofstream out(path);
        out << "0.45 1\n0.45 -1\n";  // mass deficit
    }
    CHECK_THROWS_AS(StepDistribution::parse("lattice:" + path, 1), ValidationError);

    {
        std::ofstream out(path);
        out << "0.6 1\n0.4 -1\n";  // biased mean
    }
    CHECK_THROWS_AS(StepDistribution::parse("lattice:" + path, 1), ValidationError);

    {
        std::ofstream out(path);
        out << "0.5 0.5\n0.5 -0.5\n";  // variance 1/4
    }
    CHECK_THROWS_AS(StepDistribution::parse("lattice:" + path, 1), ValidationError);

    {
        std::ofstream out(path);
        out << "0.5 1 1\n0.5 -1 -1\n";  // wrong dimension for d=1
    }
    CHECK_THROWS_AS(StepDistribution::parse("lattice:" + path, 1), ValidationError);

    CHECK_THROWS_AS(StepDistribution::parse("lattice:/no/such/file", 1),
                    ValidationError);
    CHECK_THROWS_AS(StepDistribution::parse("bogus", 1), ValidationError);
    std::remove(path.c_str());
}

TEST_CASE("correlated lattice laws are rejected")
{
    // Two coordinates moving in lockstep: covariance off-diagonal = 1.
    std::vector<LatticeAtom> atoms = {{{1, 1}, 0.5}, {{-1, -1}, 0.5}};
    CHECK_THROWS_AS(StepDistribution::lattice(2, atoms), ValidationError);
}

TEST_CASE("seeded reproducibility of sampling")
{
    for (char const* name : {"gaussian", "rademacher", "sphere", "lattice:mix2"}) {
        auto dist = StepDistribution::parse(name, 2);
        RngStream a(make_key(5), StreamTag::Generic, 9);
        RngStream b(make_key(5), StreamTag::Generic, 9);
        for (int i = 0; i < 100; ++i) {
            Vec xa = dist.sample_step(a);
            Vec xb = dist.sample_step(b);
            CHECK(xa == xb);
        }
    }
}

TEST_CASE("moment order reported as finite-everything")
{
    CHECK(std::isinf(StepDistribution::gaussian(2).moment_order()));
    CHECK(std::isinf(StepDistribution::parse("lattice:srw", 1).moment_order()));
}

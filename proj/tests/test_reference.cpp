// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
//
// Reference limit objects: Rayleigh/chi endpoint laws for grid meanders and
// u-weighted Brownian paths, product-strategy vs generic-strategy agreement,
// entrance-law and radial-kernel quadrature identities, exact Bessel
// transitions, bridge-weight arithmetic, and wedge-series reflection oracles.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "conewalk/cone.hpp"
#include "conewalk/reference.hpp"
#include "conewalk/rng.hpp"
#include "conewalk/specfun.hpp"
#include "conewalk/stats.hpp"

using namespace conewalk;

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

double simpson(std::function<double(double)> const& f, double a, double b, int n)
{
    // n subintervals, n even.
    double const h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i)
        s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3;
}

std::vector<double> endpoint_radii(ref::GridEnsemble const& ens)
{
    std::vector<double> out(ens.max_norms.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        double s = 0;
        for (int j = 0; j < ens.d; ++j) {
            double const v = ens.endpoints[i * ens.d + j];
            s += v * v;
        }
        out[i] = std::sqrt(s);
    }
    return out;
}

std::vector<double> mid_radii(ref::GridEnsemble const& ens)
{
    std::vector<double> out(ens.max_norms.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        double s = 0;
        for (int j = 0; j < ens.d; ++j) {
            double const v = ens.mid[i * ens.d + j];
            s += v * v;
        }
        out[i] = std::sqrt(s);
    }
    return out;
}

// Importance resampling: k i.i.d. draws from the weighted atoms, turning a
// weighted ensemble into a plain sample for the unweighted KS instruments.
std::vector<double> weighted_resample(std::vector<double> const& values,
                                      std::vector<double> const& weights,
                                      std::size_t k, std::uint64_t seed)
{
    REQUIRE(values.size() == weights.size());
    std::vector<double> cum(weights.size());
    double total = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        total += weights[i];
        cum[i] = total;
    }
    REQUIRE(total > 0);
    RngStream rs(make_key(seed, "resample"), StreamTag::Generic, 0);
    std::vector<double> out(k);
    for (std::size_t i = 0; i < k; ++i) {
        double const u = rs.next_unit() * total;
        auto it = std::upper_bound(cum.begin(), cum.end(), u);
        if (it == cum.end())
            --it;
        out[i] = values[static_cast<std::size_t>(it - cum.begin())];
    }
    return out;
}

double chi_cdf3(double r) { return sf::chi_cdf(3, r); }

}  // namespace

TEST_CASE("radial law parameters follow the cone catalogue")
{
    struct Case {
        Cone cone;
        double degrees;
    };
    std::vector<Case> const cases = {
        {Cone::half_line(), 3.0},          {Cone::half_space(3), 5.0},
        {Cone::orthant(2), 6.0},           {Cone::orthant(3), 9.0},
        {Cone::wedge(2.0), kPi + 2.0},     {Cone::weyl_a(3), 9.0},
        {Cone::weyl_b(2), 10.0},
    };
    for (auto const& c : cases) {
        auto const law = ref::RadialLaw::for_cone(c.cone);
        CHECK(law.degrees == doctest::Approx(c.degrees).epsilon(1e-15));
        CHECK(law.degrees > 1);
        CHECK(law.index ==
              doctest::Approx(law.degrees / 2 - 1).epsilon(1e-15));
    }
}

TEST_CASE("half-line grid meander endpoint is Rayleigh")
{
    // Killing only at grid points shifts the effective barrier by about
    // 0.58 sigma = 0.0091 for m = 4096, a first-order endpoint-law bias of
    // ~0.0055 in sup-CDF. The KS noise floor must sit above it, which caps
    // the usable sample size: at N = 2e4 the 1% critical value is 0.0115.
    auto const ens = ref::sample_bm_meander(Cone::half_line(), 4096, 0.01, 20000, 71);
    CHECK(ens.d == 1);
    CHECK(ens.m == 4096);
    CHECK(ens.T == 1.0);
    CHECK(ens.eps == 0.01);
    CHECK(ens.weights.empty());
    CHECK(ens.attempts > 20000);
    CHECK(ens.acceptance > 0.005);
    CHECK(ens.acceptance < 0.05);

    auto const ks =
        stats::ks_one_sample(ens.endpoints, [](double r) { return sf::chi_cdf(2, r); });
    CHECK(ks.p_value > 0.01);
    // Negative control: the same endpoints are not chi(3).
    auto const bad = stats::ks_one_sample(ens.endpoints, chi_cdf3);
    CHECK(bad.p_value < 1e-6);

    // Path maxima dominate endpoints and mid-time values pointwise.
    auto const mids = mid_radii(ens);
    for (std::size_t i = 0; i < 1000; ++i) {
        CHECK(ens.max_norms[i] >= ens.endpoints[i]);
        CHECK(ens.max_norms[i] >= mids[i]);
        CHECK(ens.endpoints[i] > 0);
        CHECK(mids[i] > 0);
    }
}

TEST_CASE("quadrant grid meander endpoint radius is chi(4)")
{
    // Two killed coordinates roughly double the grid-barrier bias (see the
    // Rayleigh case): measured sup-CDF error ~0.016 at m = 4096, scaling as
    // 1/sqrt(m). m = 16384 brings it to ~0.008, under the 1% critical value
    // 0.0163 at N = 1e4.
    auto const ens =
        ref::sample_bm_meander(Cone::orthant(2), 16384, 0.01, 10000, 72);
    auto const radii = endpoint_radii(ens);
    auto const ks =
        stats::ks_one_sample(radii, [](double r) { return sf::chi_cdf(4, r); });
    CHECK(ks.p_value > 0.01);
}

TEST_CASE("wedge(pi/2) generic rejection matches orthant(2) product gluing")
{
    // The open quadrant appears twice in the catalogue: as orthant:2 (sampled
    // coordinate by coordinate) and as wedge:pi/2 (sampled by joint
    // rejection). All path functionals must agree in law.
    auto const prod = ref::sample_bm_meander(Cone::orthant(2), 512, 0.02, 20000, 73);
    auto const gen = ref::sample_bm_meander(Cone::wedge(kPi / 2), 512, 0.02, 20000, 74);

    auto const end_ks = stats::ks_two_sample(endpoint_radii(prod), endpoint_radii(gen));
    CHECK(end_ks.pass);
    auto const max_ks = stats::ks_two_sample(prod.max_norms, gen.max_norms);
    CHECK(max_ks.pass);
    auto const mid_ks = stats::ks_two_sample(mid_radii(prod), mid_radii(gen));
    CHECK(mid_ks.pass);
}

TEST_CASE("weighted h-BM endpoint radii match the Bessel entrance law")
{
    // As the start point approaches the apex, the u-weighted endpoint radius
    // converges to chi(2p + d) == the Bessel(delta) point at t = 1 started
    // from 0. Both sides sampled, compared by two-sample KS after importance
    // resampling of the weighted side.
    struct Leg {
        Cone cone;
        std::uint64_t seed;
    };
    std::vector<Leg> const legs = {
        {Cone::half_line(), 81}, {Cone::orthant(2), 82}, {Cone::half_space(3), 83}};
    for (auto const& leg : legs) {
        Vec x = leg.cone.interior_direction();
        for (double& v : x)
            v *= 0.01;
        auto const ens = ref::sample_h_bm(leg.cone, x, 1.0, 4096, 100000, leg.seed);
        REQUIRE(ens.weights.size() == 100000);
        auto const law = ref::RadialLaw::for_cone(leg.cone);
        auto const bes = ref::sample_bessel(law, 0.0, {0.0, 1.0}, 100000, leg.seed + 10);
        std::vector<double> bessel_end(100000);
        for (std::size_t i = 0; i < bessel_end.size(); ++i)
            bessel_end[i] = bes.radii[i * 2 + 1];
        auto const lhs =
            weighted_resample(endpoint_radii(ens), ens.weights, 5000, leg.seed + 20);
        auto const ks = stats::ks_two_sample(lhs, bessel_end);
        INFO("cone ", leg.cone.name(), " D=", ks.statistic, " thr=", ks.threshold);
        CHECK(ks.pass);
    }
}

TEST_CASE("h-BM from a near-apex point has chi(3) weighted endpoint law")
{
    auto const ens = ref::sample_h_bm(Cone::half_line(), {0.01}, 1.0, 4096, 100000, 91);
    auto const sample = weighted_resample(ens.endpoints, ens.weights, 5000, 92);
    auto const ks = stats::ks_one_sample(sample, chi_cdf3);
    CHECK(ks.p_value > 0.01);
    // Unweighted survivors stay Rayleigh-like: chi(3) must be rejected.
    auto const raw = stats::ks_one_sample(ens.endpoints, chi_cdf3);
    CHECK(raw.p_value < 1e-6);
}

TEST_CASE("meander acceptance decreases as the grid refines")
{
    double last = 1.0;
    for (std::int64_t m : {256, 1024, 4096}) {
        auto const ens = ref::sample_bm_meander(Cone::half_line(), m, 0.01, 3000, 95);
        CHECK(ens.acceptance < last);
        last = ens.acceptance;
    }
}

TEST_CASE("grid ensembles are deterministic and thread independent")
{
    auto const a = ref::sample_bm_meander(Cone::orthant(2), 256, 0.05, 2000, 11, 1);
    auto const b = ref::sample_bm_meander(Cone::orthant(2), 256, 0.05, 2000, 11, 4);
    CHECK(a.endpoints == b.endpoints);
    CHECK(a.mid == b.mid);
    CHECK(a.max_norms == b.max_norms);
    CHECK(a.attempts == b.attempts);
    CHECK(a.acceptance == b.acceptance);

    auto const c = ref::sample_h_bm(Cone::wedge(2.5), {0.5, 0.9}, 1.0, 256, 1000, 12, 1);
    auto const d = ref::sample_h_bm(Cone::wedge(2.5), {0.5, 0.9}, 1.0, 256, 1000, 12, 3);
    CHECK(c.endpoints == d.endpoints);
    CHECK(c.weights == d.weights);
    CHECK(c.attempts == d.attempts);

    auto const e = ref::sample_bm_meander(Cone::orthant(2), 256, 0.05, 2000, 13, 1);
    CHECK(a.endpoints != e.endpoints);
}

TEST_CASE("sampler input validation and acceptance underflow")
{
    CHECK_THROWS_AS(ref::sample_bm_meander(Cone::half_line(), 255, 0.01, 100, 1),
                    ValidationError);
    CHECK_THROWS_AS(ref::sample_bm_meander(Cone::half_line(), 0, 0.01, 100, 1),
                    ValidationError);
    CHECK_THROWS_AS(ref::sample_bm_meander(Cone::half_line(), 256, -0.5, 100, 1),
                    ValidationError);
    CHECK_THROWS_AS(ref::sample_bm_meander(Cone::half_line(), 256, 0.01, 0, 1),
                    ValidationError);
    CHECK_THROWS_AS(ref::sample_h_bm(Cone::half_line(), {-1.0}, 1.0, 256, 100, 1),
                    ValidationError);
    CHECK_THROWS_AS(ref::sample_h_bm(Cone::half_line(), {1.0}, 0.0, 256, 100, 1),
                    ValidationError);
    CHECK_THROWS_AS(ref::sample_h_bm(Cone::half_line(), {1.0, 2.0}, 1.0, 256, 100, 1),
                    ValidationError);
    // A razor-thin wedge kills essentially every grid path: the per-sample
    // attempt budget must trip the underflow error.
    CHECK_THROWS_AS(ref::sample_bm_meander(Cone::wedge(0.05), 4096, 0.01, 10, 1),
                    SimulationError);
}

TEST_CASE("entrance law density and cdf")
{
    Cone const hl = Cone::half_line();
    // k = 3: f_1(1) = e^{-1/2} / (sqrt(2) Gamma(3/2)).
    CHECK(ref::entrance_law_density(hl, 1.0, 1.0) ==
          doctest::Approx(0.4839414490382867).epsilon(1e-12));

    std::vector<Cone> const cones = {Cone::half_line(), Cone::orthant(2),
                                     Cone::weyl_a(3)};
    for (auto const& cone : cones) {
        for (double t : {0.25, 1.0, 3.5}) {
            // Scaling: f_t(r) = f_1(r / sqrt t) / sqrt t, exactly.
            for (double r : {0.3, 1.0, 2.5}) {
                double const lhs = ref::entrance_law_density(cone, t, r);
                double const rhs =
                    ref::entrance_law_density(cone, 1.0, r / std::sqrt(t)) /
                    std::sqrt(t);
                CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
            }
            // Normalisation and cdf consistency by quadrature.
            double const upper = 14 * std::sqrt(t);
            double const total = simpson(
                [&](double r) { return ref::entrance_law_density(cone, t, r); }, 0.0,
                upper, 20000);
            CHECK(total == doctest::Approx(1.0).epsilon(1e-7));
            double const mid = 1.3 * std::sqrt(t);
            double const part = simpson(
                [&](double r) { return ref::entrance_law_density(cone, t, r); }, 0.0,
                mid, 20000);
            CHECK(ref::entrance_law_cdf(cone, t, mid) ==
                  doctest::Approx(part).epsilon(1e-9));
        }
    }
    CHECK(ref::entrance_law_cdf(hl, 2.0, 50.0) == doctest::Approx(1.0));
    CHECK(ref::entrance_law_density(hl, 1.0, -1.0) == 0.0);
    CHECK(ref::entrance_law_cdf(hl, 1.0, 0.0) == 0.0);
    CHECK_THROWS_AS(ref::entrance_law_density(hl, 0.0, 1.0), ValidationError);
}

TEST_CASE("radial transition density: normalisation, semigroup, closed form")
{
    for (double degrees : {3.0, 4.0, 7.0}) {
        ref::RadialLaw const law{degrees, degrees / 2 - 1};
        for (double h : {0.1, 1.0}) {
            for (double r1 : {0.5, 2.0}) {
                double const upper = r1 + 16 * std::sqrt(h) + 2;
                double const total = simpson(
                    [&](double r2) {
                        return ref::radial_transition_density(law, h, r1, r2);
                    },
                    0.0, upper, 40000);
                CHECK(total == doctest::Approx(1.0).epsilon(1e-7));
            }
        }
    }

    // Chapman-Kolmogorov: integrating q_s against q_t reproduces q_{s+t}.
    struct Ck {
        double degrees, s, t, r1, r2;
    };
    for (auto const& c : std::vector<Ck>{{3.0, 0.3, 0.7, 0.8, 1.3},
                                         {7.0, 0.5, 0.5, 0.5, 2.0}}) {
        ref::RadialLaw const law{c.degrees, c.degrees / 2 - 1};
        double const conv = simpson(
            [&](double m) {
                return ref::radial_transition_density(law, c.s, c.r1, m) *
                       ref::radial_transition_density(law, c.t, m, c.r2);
            },
            0.0, 12.0, 40000);
        double const direct = ref::radial_transition_density(law, c.s + c.t, c.r1, c.r2);
        CHECK(conv == doctest::Approx(direct).epsilon(1e-6));
    }

    // degrees = 3: I_{1/2}(z) = sqrt(2/(pi z)) sinh(z) gives an elementary form.
    ref::RadialLaw const law3{3.0, 0.5};
    for (double h : {0.4, 1.0}) {
        for (double r1 : {0.6, 1.0}) {
            for (double r2 : {0.9, 2.1}) {
                double const z = r1 * r2 / h;
                double const closed = std::sqrt(2 / (kPi * z)) * std::sinh(z) *
                                      std::sqrt(r2 / r1) * (r2 / h) *
                                      std::exp(-(r1 * r1 + r2 * r2) / (2 * h));
                CHECK(ref::radial_transition_density(law3, h, r1, r2) ==
                      doctest::Approx(closed).epsilon(1e-12));
            }
        }
    }

    // Entrance limit r1 -> 0 is continuous and equals the entrance law.
    ref::RadialLaw const law5{5.0, 1.5};
    double const lim = ref::radial_transition_density(law5, 0.7, 0.0, 1.2);
    CHECK(ref::radial_transition_density(law5, 0.7, 1e-6, 1.2) ==
          doctest::Approx(lim).epsilon(1e-5));
    CHECK(lim == doctest::Approx(ref::entrance_law_density(Cone::half_space(3), 0.7,
                                                           1.2))
                     .epsilon(1e-12));

    // Detailed balance w.r.t. the speed measure r^{degrees-1} dr.
    for (double r1 : {0.5, 1.7}) {
        for (double r2 : {0.8, 2.4}) {
            double const lhs = ref::radial_transition_density(law5, 0.9, r1, r2) *
                               std::pow(r1, 4.0);
            double const rhs = ref::radial_transition_density(law5, 0.9, r2, r1) *
                               std::pow(r2, 4.0);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
    }

    CHECK(ref::radial_transition_density(law3, 1.0, 1.0, 0.0) == 0.0);
    CHECK_THROWS_AS(ref::radial_transition_density(law3, 0.0, 1.0, 1.0),
                    ValidationError);
    CHECK_THROWS_AS(ref::radial_transition_density(law3, 1.0, -1.0, 1.0),
                    ValidationError);
}

TEST_CASE("Bessel sampler: exact transitions, chi endpoint, Markov composition")
{
    ref::RadialLaw const law3{3.0, 0.5};
    auto const one = ref::sample_bessel(law3, 0.0, {0.0, 1.0}, 100000, 31);
    REQUIRE(one.radii.size() == 200000);
    std::vector<double> end(100000);
    double mean = 0;
    for (std::size_t i = 0; i < end.size(); ++i) {
        CHECK(one.radii[i * 2] == 0.0);
        end[i] = one.radii[i * 2 + 1];
        mean += end[i];
    }
    mean /= static_cast<double>(end.size());
    auto const ks = stats::ks_one_sample(end, chi_cdf3);
    CHECK(ks.p_value > 0.01);
    // E chi(3) = 2 sqrt(2/pi); SE = sqrt((3 - 8/pi)/n).
    double const target = 2 * std::sqrt(2 / kPi);
    double const se = std::sqrt((3 - 8 / kPi) / static_cast<double>(end.size()));
    CHECK(std::abs(mean - target) < 4 * se);

    // Composing two half-steps gives the same t = 1 law as one step.
    auto const two = ref::sample_bessel(law3, 0.0, {0.0, 0.5, 1.0}, 100000, 32);
    std::vector<double> end2(100000);
    for (std::size_t i = 0; i < end2.size(); ++i)
        end2[i] = two.radii[i * 3 + 2];
    CHECK(stats::ks_two_sample(end, end2).pass);

    // One transition from r0 = 2 binned against the density evaluator.
    ref::RadialLaw const law6{6.0, 2.0};
    auto const hop = ref::sample_bessel(law6, 2.0, {0.0, 0.7}, 100000, 33);
    std::vector<double> hop_end(100000);
    for (std::size_t i = 0; i < hop_end.size(); ++i)
        hop_end[i] = hop.radii[i * 2 + 1];
    std::sort(hop_end.begin(), hop_end.end());
    int const nbins = 40;
    std::vector<double> observed(nbins, 0.0), expected(nbins, 0.0);
    std::vector<double> edges(nbins + 1);
    edges[0] = 0.0;
    for (int b = 1; b < nbins; ++b)
        edges[b] = hop_end[hop_end.size() * b / nbins];
    edges[nbins] = hop_end.back() + 1.0;
    for (double r : hop_end)
        ++observed[static_cast<std::size_t>(
            std::upper_bound(edges.begin(), edges.end(), r) - edges.begin() - 1)];
    for (int b = 0; b < nbins; ++b)
        expected[b] = 100000 * simpson(
                                   [&](double r) {
                                       return ref::radial_transition_density(
                                           law6, 0.7, 2.0, r);
                                   },
                                   edges[b], std::min(edges[b + 1], 12.0), 2000);
    double const stat = stats::chi_square_stat(observed, expected);
    CHECK(stats::chi_square_pvalue(stat, nbins - 1) > 0.01);

    // Determinism and validation.
    auto const rep = ref::sample_bessel(law3, 0.0, {0.0, 1.0}, 1000, 31);
    for (std::size_t i = 0; i < 2000; ++i)
        CHECK(rep.radii[i] == one.radii[i]);
    CHECK_THROWS_AS(ref::sample_bessel(law3, 0.0, {0.5, 1.0}, 10, 1), ValidationError);
    CHECK_THROWS_AS(ref::sample_bessel(law3, 0.0, {0.0, 1.0, 1.0}, 10, 1),
                    ValidationError);
    CHECK_THROWS_AS(ref::sample_bessel(law3, -1.0, {0.0, 1.0}, 10, 1), ValidationError);
    CHECK_THROWS_AS(ref::sample_bessel({1.0, -0.5}, 0.0, {0.0, 1.0}, 10, 1),
                    ValidationError);
}

TEST_CASE("bridge weight arithmetic and invariances")
{
    Cone const hl = Cone::half_line();
    double const w1 = ref::bridge_weight(hl, 0.5, {1.0});
    double const w2 = ref::bridge_weight(hl, 0.5, {2.0});
    CHECK(w1 / w2 == doctest::Approx(0.5 * std::exp(3.0)).epsilon(1e-12));
    CHECK(w1 / w2 == doctest::Approx(10.042768461593834).epsilon(1e-10));
    CHECK(ref::bridge_weight(hl, 0.5, {0.0}) == 0.0);
    CHECK(ref::bridge_weight(hl, 0.5, {-1.0}) == 0.0);

    // Swapping orthant coordinates and rotating the free coordinates of a
    // half-space are isometries fixing u and |w|.
    Cone const quad = Cone::orthant(2);
    CHECK(ref::bridge_weight(quad, 0.3, {0.4, 1.1}) ==
          doctest::Approx(ref::bridge_weight(quad, 0.3, {1.1, 0.4})).epsilon(1e-14));
    Cone const hs = Cone::half_space(3);
    CHECK(ref::bridge_weight(hs, 0.7, {0.3, 0.4, 1.2}) ==
          doctest::Approx(ref::bridge_weight(hs, 0.7, {0.5, 0.0, 1.2}))
              .epsilon(1e-14));

    CHECK_THROWS_AS(ref::bridge_weight(hl, 0.0, {1.0}), ValidationError);
    CHECK_THROWS_AS(ref::bridge_weight(hl, 1.0, {1.0}), ValidationError);
    CHECK_THROWS_AS(ref::bridge_weight(hl, 0.5, {1.0, 2.0}), ValidationError);
}

TEST_CASE("wedge kernel matches reflection closed forms")
{
    auto gauss2 = [](Vec const& a, Vec const& b, double h) {
        double const dx = a[0] - b[0];
        double const dy = a[1] - b[1];
        return std::exp(-(dx * dx + dy * dy) / (2 * h)) / (2 * kPi * h);
    };

    // Half-plane (alpha = pi): one mirror image.
    Cone const half = Cone::wedge(kPi);
    for (double h : {0.3, 1.0}) {
        Vec const x = {0.3, 0.7};
        Vec const z = {-0.4, 1.1};
        double const expect = gauss2(x, z, h) - gauss2(x, {z[0], -z[1]}, h);
        CHECK(ref::wedge_kernel(half, h, x, z) ==
              doctest::Approx(expect).epsilon(1e-10));
    }

    // Quadrant (alpha = pi/2): three mirror images with alternating signs.
    Cone const quad = Cone::wedge(kPi / 2);
    {
        double const h = 0.5;
        Vec const x = {0.5, 0.8};
        Vec const z = {1.1, 0.4};
        double const expect = gauss2(x, z, h) - gauss2(x, {z[0], -z[1]}, h) -
                              gauss2(x, {-z[0], z[1]}, h) +
                              gauss2(x, {-z[0], -z[1]}, h);
        CHECK(ref::wedge_kernel(quad, h, x, z) ==
              doctest::Approx(expect).epsilon(1e-10));
    }

    // Symmetry in its arguments for a generic opening angle.
    Cone const wedge = Cone::wedge(2.2);
    Vec const a = {0.9 * std::cos(0.8), 0.9 * std::sin(0.8)};
    Vec const b = {1.4 * std::cos(1.7), 1.4 * std::sin(1.7)};
    CHECK(ref::wedge_kernel(wedge, 0.6, a, b) ==
          doctest::Approx(ref::wedge_kernel(wedge, 0.6, b, a)).epsilon(1e-12));

    // Projecting the angular part onto sin(p phi) reproduces the radial
    // kernel: r2 Int_0^alpha k((r1,theta),(r2,phi)) sin(p phi) dphi
    //         = q_h(r1, r2) (r1/r2)^p sin(p theta).
    {
        Cone const w2 = Cone::wedge(2.0);
        double const p = w2.exponent();
        double const r1 = 0.9, r2 = 1.4, theta = 0.7, h = 0.8;
        auto const law = ref::RadialLaw::for_cone(w2);
        double const integral = simpson(
            [&](double phi) {
                Vec const xx = {r1 * std::cos(theta), r1 * std::sin(theta)};
                Vec const zz = {r2 * std::cos(phi), r2 * std::sin(phi)};
                return ref::wedge_kernel(w2, h, xx, zz) * std::sin(p * phi);
            },
            1e-9, 2.0 - 1e-9, 4000);
        double const lhs = r2 * integral;
        double const rhs = ref::radial_transition_density(law, h, r1, r2) *
                           std::pow(r1 / r2, p) * std::sin(p * theta);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
    }

    // Boundary and domain handling.
    CHECK(ref::wedge_kernel(quad, 1.0, {1.0, 0.0}, {0.5, 0.5}) == 0.0);
    CHECK(ref::wedge_kernel(quad, 1.0, {0.5, 0.5}, {-1.0, 0.5}) == 0.0);
    CHECK_THROWS_AS(ref::wedge_kernel(Cone::orthant(2), 1.0, {0.5, 0.5}, {1.0, 1.0}),
                    ValidationError);
    CHECK_THROWS_AS(ref::wedge_kernel(quad, 0.0, {0.5, 0.5}, {1.0, 1.0}),
                    ValidationError);
    CHECK_THROWS_AS(ref::wedge_kernel(quad, 1.0, {0.5}, {1.0, 1.0}), ValidationError);
}

TEST_CASE("h-transform limit identity holds on the half-line")
{
    auto const rep = ref::htransform_limit_identity_check(Cone::half_line(), 0.01,
                                                          20000, 404);
    CHECK(rep.experiment == "htransform-limit-identity");
    CHECK(rep.threshold == 1.0);
    CHECK(rep.pass);
    CHECK(rep.statistic <= 1.0);
    CHECK(rep.details.size() == 9);  // (d + 2) functionals x 3 entries
    CHECK(rep.metadata.at("cone") == "half-line");
    CHECK(rep.metadata.at("grid_steps") == "4096");

    // The trivial functional f == 1 is exactly 1 on both sides.
    auto const ens = ref::sample_h_bm(Cone::half_line(), {0.01}, 1.0, 256, 500, 17);
    std::vector<double> const ones(500, 1.0);
    auto const band = stats::bootstrap_weighted_mean(ones, ens.weights, 0.01, 3);
    CHECK(band.point == 1.0);
    CHECK(band.lo == 1.0);
    CHECK(band.hi == 1.0);
}

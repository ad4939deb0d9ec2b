// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "conewalk/common.hpp"
#include "conewalk/rng.hpp"

using namespace conewalk;

TEST_CASE("philox4x32 known-answer vectors")
{
    // Published Philox-4x32-10 vectors (counter, key -> output).
    auto r0 = philox4x32({0u, 0u, 0u, 0u}, {0u, 0u});
    CHECK(r0[0] == 0x6627e8d5u);
    CHECK(r0[1] == 0xe169c58du);
    CHECK(r0[2] == 0xbc57ac4cu);
    CHECK(r0[3] == 0x9b00dbd8u);

    auto r1 = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                         {0xffffffffu, 0xffffffffu});
    CHECK(r1[0] == 0x408f276du);
    CHECK(r1[1] == 0x41c83b0eu);
    CHECK(r1[2] == 0xa20bc7c6u);
    CHECK(r1[3] == 0x6d5451fdu);

    auto r2 = philox4x32({0x243F6A88u, 0x85A308D3u, 0x13198A2Eu, 0x03707344u},
                         {0xA4093822u, 0x299F31D0u});
    CHECK(r2[0] == 0xd16cfe09u);
    CHECK(r2[1] == 0x94fdccebu);
    CHECK(r2[2] == 0x5001e420u);
    CHECK(r2[3] == 0x24126ea1u);
}

TEST_CASE("splitmix64 reference sequence")
{
    std::uint64_t s = 0;
    CHECK(splitmix64(s) == 0xE220A8397B1DCDAFull);
    CHECK(splitmix64(s) == 0x6E789E6AA1B965F4ull);
    CHECK(splitmix64(s) == 0x06C45D188009454Full);
}

TEST_CASE("key derivation is deterministic and label-sensitive")
{
    PhiloxKey a = make_key(42);
    PhiloxKey b = make_key(42);
    CHECK(a.k0 == b.k0);
    CHECK(a.k1 == b.k1);
    PhiloxKey c = make_key(43);
    CHECK((a.k0 != c.k0 || a.k1 != c.k1));
    PhiloxKey l1 = make_key(42, "meander");
    PhiloxKey l2 = make_key(42, "bridge");
    PhiloxKey l3 = make_key(42, "meander");
    CHECK((l1.k0 != l2.k0 || l1.k1 != l2.k1));
    CHECK(l1.k0 == l3.k0);
    CHECK(l1.k1 == l3.k1);
    CHECK((l1.k0 != a.k0 || l1.k1 != a.k1));
}

TEST_CASE("stream ids pack tag and index")
{
    CHECK(stream_id(StreamTag::SurvivalMc, 0) == (1ull << 48));
    CHECK(stream_id(StreamTag::Generic, 7) == ((15ull << 48) | 7));
    CHECK(stream_id(StreamTag::Bessel, (1ull << 48) - 1) ==
          ((9ull << 48) | ((1ull << 48) - 1)));
    CHECK_THROWS_AS(stream_id(StreamTag::Generic, 1ull << 48), ValidationError);
}

TEST_CASE("RngStream words follow the (block, stream) counter layout")
{
    PhiloxKey key = make_key(7);
    std::uint64_t const stream = stream_id(StreamTag::Generic, 12345);
    RngStream rs(key, stream);
    for (std::uint64_t block = 0; block < 3; ++block) {
        auto expect = philox4x32({static_cast<std::uint32_t>(block), 0u,
                                  static_cast<std::uint32_t>(stream),
                                  static_cast<std::uint32_t>(stream >> 32)},
                                 key);
        for (int j = 0; j < 4; ++j)
            CHECK(rs.next_u32() == expect[j]);
    }
}

TEST_CASE("RngStream is reproducible and streams are distinct")
{
    PhiloxKey key = make_key(99);
    RngStream a(key, StreamTag::Generic, 1);
    RngStream b(key, StreamTag::Generic, 1);
    for (int i = 0; i < 64; ++i)
        CHECK(a.next_u64() == b.next_u64());

    std::set<std::uint64_t> firsts;
    for (std::uint64_t idx = 0; idx < 256; ++idx) {
        RngStream s(key, StreamTag::Generic, idx);
        firsts.insert(s.next_u64());
    }
    CHECK(firsts.size() == 256);
}

TEST_CASE("next_unit stays inside the open interval")
{
    RngStream rs(make_key(3), StreamTag::Generic, 0);
    double mn = 1.0, mx = 0.0, sum = 0.0;
    int const n = 200000;
    for (int i = 0; i < n; ++i) {
        double u = rs.next_unit();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
        mn = std::min(mn, u);
        mx = std::max(mx, u);
        sum += u;
    }
    CHECK(mn < 0.001);
    CHECK(mx > 0.999);
    CHECK(std::abs(sum / n - 0.5) < 0.004);
}

TEST_CASE("next_gaussian moments")
{
    RngStream rs(make_key(4), StreamTag::Generic, 0);
    int const n = 200000;
    double s1 = 0, s2 = 0, s4 = 0;
    for (int i = 0; i < n; ++i) {
        double g = rs.next_gaussian();
        s1 += g;
        s2 += g * g;
        s4 += g * g * g * g;
    }
    CHECK(std::abs(s1 / n) < 0.01);
    CHECK(std::abs(s2 / n - 1.0) < 0.02);
    CHECK(std::abs(s4 / n - 3.0) < 0.15);
}

TEST_CASE("next_gamma moments across the shape boundary")
{
    RngStream rs(make_key(5), StreamTag::Generic, 0);
    int const n = 200000;
    for (double shape : {0.7, 1.0, 3.5}) {
        double s1 = 0, s2 = 0;
        for (int i = 0; i < n; ++i) {
            double g = rs.next_gamma(shape);
            s1 += g;
            s2 += g * g;
        }
        double mean = s1 / n;
        double var = s2 / n - mean * mean;
        CHECK(std::abs(mean - shape) < 0.05 * std::max(1.0, shape));
        CHECK(std::abs(var - shape) < 0.1 * std::max(1.0, shape));
    }
    CHECK_THROWS_AS(rs.next_gamma(0.0), ValidationError);
}

TEST_CASE("next_poisson mean and variance, small and split regimes")
{
    RngStream rs(make_key(6), StreamTag::Generic, 0);
    int const n = 50000;
    for (double mean : {0.3, 4.2, 100.0}) {
        double s1 = 0, s2 = 0;
        for (int i = 0; i < n; ++i) {
            double k = static_cast<double>(rs.next_poisson(mean));
            s1 += k;
            s2 += k * k;
        }
        double m = s1 / n;
        double v = s2 / n - m * m;
        double se = std::sqrt(mean / n);
        CHECK(std::abs(m - mean) < 6 * se);
        CHECK(std::abs(v - mean) < 0.05 * mean + 0.1);
    }
    CHECK(rs.next_poisson(0.0) == 0);
    CHECK_THROWS_AS(rs.next_poisson(-1.0), ValidationError);
}

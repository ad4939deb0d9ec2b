// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <string>
#include <vector>

#include "conewalk/common.hpp"
#include "conewalk/kernels.hpp"
#include "conewalk/rng.hpp"

using namespace conewalk;
using namespace conewalk::kern;

namespace {

// Independent reference for the rademacher block, written directly against the
// documented bit-consumption contract: per step take the low d bits of the
// current stream word (LSB first); fetch the next word when fewer than d bits
// remain, discarding the leftovers.
struct RefLane {
    std::int64_t survived;
    std::vector<std::int32_t> final_pos;
    std::vector<std::vector<std::int32_t>> checkpoint_pos;
    std::int64_t max_sqnorm;
};

bool ref_inside(int code, std::vector<std::int32_t> const& p)
{
    if (code == 0)
        return p[0] > 0;
    if (code == 1) {
        for (auto v : p)
            if (v <= 0)
                return false;
        return true;
    }
    for (std::size_t j = 0; j + 1 < p.size(); ++j)
        if (p[j + 1] <= p[j])
            return false;
    return true;
}

RefLane ref_walk(PhiloxKey key, std::uint64_t stream, int code, int d,
                 std::vector<std::int32_t> start, std::int64_t nsteps,
                 std::vector<std::int64_t> const& cks)
{
    RngStream rs(key, stream);
    RefLane out;
    out.survived = nsteps;
    out.max_sqnorm = 0;
    std::vector<std::int32_t> pos = start;
    std::uint32_t word = 0;
    int bits = 0;
    std::size_t next_ck = 0;
    for (std::int64_t step = 1; step <= nsteps; ++step) {
        if (bits < d) {
            word = rs.next_u32();
            bits = 32;
        }
        for (int j = 0; j < d; ++j) {
            pos[j] += (word & 1u) ? 1 : -1;
            word >>= 1;
        }
        bits -= d;
        std::int64_t s = 0;
        for (int j = 0; j < d; ++j)
            s += static_cast<std::int64_t>(pos[j]) * pos[j];
        out.max_sqnorm = std::max(out.max_sqnorm, s);
        bool dead = !ref_inside(code, pos);
        while (next_ck < cks.size() && cks[next_ck] == step) {
            out.checkpoint_pos.push_back(pos);
            ++next_ck;
        }
        if (dead) {
            out.survived = step - 1;
            break;
        }
    }
    out.final_pos = pos;
    return out;
}

struct BlockResult {
    std::int64_t survived[8];
    std::vector<std::int32_t> final_pos;
    std::vector<std::int32_t> checkpoint_pos;
    std::int64_t max_sqnorm[8];
};

BlockResult run_block(Ops const& o, PhiloxKey key, int code, int d,
                      std::vector<std::int32_t> const& start, std::int64_t nsteps,
                      std::vector<std::int64_t> const& cks, bool want_max)
{
    std::uint64_t streams[8];
    for (int lane = 0; lane < 8; ++lane)
        streams[lane] = stream_id(StreamTag::Generic, 100 + lane);
    BlockResult res;
    res.final_pos.assign(8 * d, 0);
    res.checkpoint_pos.assign(cks.size() * 8 * d, 0);
    RademacherSpec spec;
    spec.key = key;
    spec.streams = streams;
    spec.cone_code = code;
    spec.d = d;
    spec.start = start.data();
    spec.nsteps = nsteps;
    spec.checkpoints = cks.data();
    spec.ncheck = static_cast<int>(cks.size());
    spec.want_max = want_max;
    RademacherOut out;
    out.final_pos = res.final_pos.data();
    out.checkpoint_pos = res.checkpoint_pos.data();
    o.rademacher_block(spec, out);
    for (int lane = 0; lane < 8; ++lane) {
        res.survived[lane] = out.survived[lane];
        res.max_sqnorm[lane] = out.max_sqnorm[lane];
    }
    return res;
}

}  // namespace

TEST_CASE("philox8 agrees with single-block philox across backends")
{
    PhiloxKey key = make_key(2024);
    std::uint64_t streams[8], blocks[8];
    for (int i = 0; i < 8; ++i) {
        streams[i] = stream_id(StreamTag::Generic, 31 * i + 1);
        blocks[i] = static_cast<std::uint64_t>(i) * 0x100000007ull;
    }
    std::uint32_t a[32], b[32];
    scalar_ops().philox8(key, streams, blocks, a);
    for (int lane = 0; lane < 8; ++lane) {
        auto expect = philox4x32({static_cast<std::uint32_t>(blocks[lane]),
                                  static_cast<std::uint32_t>(blocks[lane] >> 32),
                                  static_cast<std::uint32_t>(streams[lane]),
                                  static_cast<std::uint32_t>(streams[lane] >> 32)},
                                 key);
        for (int j = 0; j < 4; ++j)
            CHECK(a[lane * 4 + j] == expect[j]);
    }
    if (avx2_supported()) {
        set_backend(Backend::Avx2);
        ops().philox8(key, streams, blocks, b);
        CHECK(std::memcmp(a, b, sizeof a) == 0);
        set_backend(Backend::Auto);
    }
}

TEST_CASE("axpy backends are bitwise identical")
{
    if (!avx2_supported())
        return;
    RngStream rs(make_key(11), StreamTag::Generic, 0);
    for (std::size_t len : {0u, 1u, 3u, 4u, 7u, 8u, 31u, 100u}) {
        std::vector<double> src(len), d1(len), d2(len);
        for (std::size_t i = 0; i < len; ++i) {
            src[i] = rs.next_gaussian() * 1e3;
            d1[i] = rs.next_gaussian();
            d2[i] = d1[i];
        }
        double w = rs.next_gaussian();
        scalar_ops().axpy(src.data(), d1.data(), w, len);
        set_backend(Backend::Avx2);
        ops().axpy(src.data(), d2.data(), w, len);
        set_backend(Backend::Auto);
        CHECK(std::memcmp(d1.data(), d2.data(), len * sizeof(double)) == 0);
    }
}

TEST_CASE("row reductions are bitwise identical across backends")
{
    if (!avx2_supported())
        return;
    RngStream rs(make_key(12), StreamTag::Generic, 0);
    for (std::size_t rows : {0u, 1u, 4u, 5u, 9u, 33u}) {
        for (std::size_t d : {1u, 2u, 3u, 6u}) {
            std::vector<double> pts(rows * d);
            for (auto& v : pts)
                v = rs.next_gaussian();
            std::vector<double> s1(rows), s2(rows), p1(rows), p2(rows);
            scalar_ops().sqnorm_rows(pts.data(), rows, d, s1.data());
            scalar_ops().prod_rows(pts.data(), rows, d, p1.data());
            set_backend(Backend::Avx2);
            ops().sqnorm_rows(pts.data(), rows, d, s2.data());
            ops().prod_rows(pts.data(), rows, d, p2.data());
            set_backend(Backend::Auto);
            CHECK(std::memcmp(s1.data(), s2.data(), rows * sizeof(double)) == 0);
            CHECK(std::memcmp(p1.data(), p2.data(), rows * sizeof(double)) == 0);
        }
    }
}

TEST_CASE("rademacher block matches the independent reference walker")
{
    PhiloxKey key = make_key(77);
    struct Case {
        int code, d;
        std::vector<std::int32_t> start1;  // one lane's start, replicated
    };
    std::vector<Case> cases = {
        {0, 1, {1}},
        {0, 1, {5}},
        {1, 2, {1, 1}},
        {1, 3, {2, 1, 3}},
        {2, 3, {0, 2, 4}},
        {2, 4, {0, 2, 4, 6}},
    };
    std::vector<std::int64_t> cks = {1, 2, 7, 40, 200};
    for (auto const& c : cases) {
        std::vector<std::int32_t> start(8 * c.d);
        for (int lane = 0; lane < 8; ++lane)
            for (int j = 0; j < c.d; ++j)
                start[lane * c.d + j] = c.start1[j];
        auto got = run_block(scalar_ops(), key, c.code, c.d, start, 200, cks, true);
        for (int lane = 0; lane < 8; ++lane) {
            auto ref = ref_walk(key, stream_id(StreamTag::Generic, 100 + lane),
                                c.code, c.d, c.start1, 200, cks);
            CHECK(got.survived[lane] == ref.survived);
            CHECK(got.max_sqnorm[lane] == ref.max_sqnorm);
            for (int j = 0; j < c.d; ++j)
                CHECK(got.final_pos[lane * c.d + j] == ref.final_pos[j]);
            // Only checkpoints at or before the exit step are contractual.
            for (std::size_t ck = 0; ck < ref.checkpoint_pos.size(); ++ck) {
                if (cks[ck] > ref.survived && ref.survived != 200)
                    continue;
                for (int j = 0; j < c.d; ++j)
                    CHECK(got.checkpoint_pos[(ck * 8 + lane) * c.d + j] ==
                          ref.checkpoint_pos[ck][j]);
            }
        }
    }
}

TEST_CASE("rademacher block is bitwise identical across backends")
{
    if (!avx2_supported())
        return;
    PhiloxKey key = make_key(31337);
    struct Case {
        int code, d;
        std::vector<std::int32_t> start1;
    };
    std::vector<Case> cases = {
        {0, 1, {1}},
        {0, 1, {40}},
        {1, 2, {1, 2}},
        {1, 3, {1, 1, 1}},
        {2, 2, {0, 2}},
        {2, 3, {0, 2, 4}},
    };
    std::vector<std::int64_t> cks = {1, 3, 16, 128, 512, 1000};
    for (auto const& c : cases) {
        for (bool want_max : {false, true}) {
            std::vector<std::int32_t> start(8 * c.d);
            for (int lane = 0; lane < 8; ++lane)
                for (int j = 0; j < c.d; ++j)
                    start[lane * c.d + j] = c.start1[j] + (j == 0 ? lane % 2 : 0);
            auto a = run_block(scalar_ops(), key, c.code, c.d, start, 1000, cks,
                               want_max);
            set_backend(Backend::Avx2);
            auto b = run_block(ops(), key, c.code, c.d, start, 1000, cks, want_max);
            set_backend(Backend::Auto);
            for (int lane = 0; lane < 8; ++lane) {
                CHECK(a.survived[lane] == b.survived[lane]);
                CHECK(a.max_sqnorm[lane] == b.max_sqnorm[lane]);
            }
            CHECK(a.final_pos == b.final_pos);
            CHECK(a.checkpoint_pos == b.checkpoint_pos);
        }
    }
}

TEST_CASE("rademacher survived semantics at the boundary")
{
    // From 1 on the half-line the first -1 step exits immediately:
    // survived == 0 and the recorded exit position is 0.
    PhiloxKey key = make_key(5);
    std::vector<std::int32_t> start(8, 1);
    std::vector<std::int64_t> cks = {1};
    auto res = run_block(scalar_ops(), key, 0, 1, start, 50, cks, false);
    bool saw_immediate = false;
    for (int lane = 0; lane < 8; ++lane) {
        if (res.survived[lane] == 0) {
            saw_immediate = true;
            CHECK(res.final_pos[lane] == 0);
            CHECK(res.checkpoint_pos[lane] == 0);
        }
        CHECK(res.survived[lane] >= 0);
        CHECK(res.survived[lane] <= 50);
        // Walk parity: position after k steps differs from start by k mod 2.
        if (res.survived[lane] == 50)
            CHECK(((res.final_pos[lane] - 1) % 2 + 2) % 2 == 0);
    }
    CHECK(saw_immediate);  // with 8 lanes, P(no immediate exit) = 2^-8
}

TEST_CASE("backend dispatch honours explicit selection")
{
    set_backend(Backend::Scalar);
    CHECK(std::string(backend_name()) == "scalar");
    if (avx2_supported()) {
        set_backend(Backend::Avx2);
        CHECK(std::string(backend_name()) == "avx2");
    } else {
        CHECK_THROWS_AS(set_backend(Backend::Avx2), ValidationError);
    }
    set_backend(Backend::Auto);
    CHECK((std::string(backend_name()) == "scalar" ||
           std::string(backend_name()) == "avx2"));
}

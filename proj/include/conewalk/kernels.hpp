// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
//
// Hot-loop kernels with a scalar reference implementation and an AVX2 variant
// selected at runtime. Every kernel is lane-elementwise (no cross-lane float
// arithmetic, no FMA), so both backends produce bit-identical results; the
// unit tests assert that exactly.
#pragma once

#include <cstddef>
#include <cstdint>

#include "conewalk/rng.hpp"

namespace conewalk::kern {

enum class Backend { Auto, Scalar, Avx2 };

// Batched +/-1-per-coordinate lattice walk with cone killing, 8 lanes.
// Lane bit consumption: words of the lane's Philox stream in block order;
// per step the low d bits of the current word (LSB first), moving to the next
// word when fewer than d bits remain.
struct RademacherSpec {
    PhiloxKey key{};
    std::uint64_t const* streams = nullptr;  // 8 stream ids
    int cone_code = 0;                       // 0 half-line, 1 orthant, 2 weyl-a
    int d = 1;
    std::int32_t const* start = nullptr;     // 8*d, lane-major
    std::int64_t nsteps = 0;
    std::int64_t const* checkpoints = nullptr;  // ascending, in [1, nsteps]
    int ncheck = 0;
    bool want_max = false;
};

struct RademacherOut {
    // Steps survived inside the cone (== nsteps means the lane never exited).
    std::int64_t survived[8];
    std::int32_t* final_pos = nullptr;       // 8*d; exit position for dead lanes
    std::int32_t* checkpoint_pos = nullptr;  // ncheck*8*d; valid if survived>=ck
    std::int64_t max_sqnorm[8];              // max |position|^2 while alive
};

struct Ops {
    char const* name;
    // 8 Philox blocks for (streams[i], blocks[i]); out lane-major, 4 words/lane.
    void (*philox8)(PhiloxKey key,
                    std::uint64_t const* streams,
                    std::uint64_t const* blocks,
                    std::uint32_t* out);
    // dst[i] += w * src[i]
    void (*axpy)(double const* src, double* dst, double w, std::size_t len);
    // out[r] = sum_j pts[r*d+j]^2
    void (*sqnorm_rows)(double const* pts, std::size_t rows, std::size_t d, double* out);
    // out[r] = prod_j pts[r*d+j]
    void (*prod_rows)(double const* pts, std::size_t rows, std::size_t d, double* out);
    void (*rademacher_block)(RademacherSpec const& spec, RademacherOut& out);
};

Ops const& scalar_ops();
#if defined(CONEWALK_HAVE_AVX2)
Ops const& avx2_ops();
#endif

bool avx2_supported();
// Active backend: Auto resolves to AVX2 when supported, else scalar; the
// CONEWALK_BACKEND environment variable ("scalar"/"avx2"/"auto") is read once.
Ops const& ops();
void set_backend(Backend b);
char const* backend_name();

}  // namespace conewalk::kern

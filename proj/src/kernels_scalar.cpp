// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
#include <cstring>

#include "conewalk/kernels.hpp"

namespace conewalk::kern {

namespace {

void philox8_scalar(PhiloxKey key,
                    std::uint64_t const* streams,
                    std::uint64_t const* blocks,
                    std::uint32_t* out)
{
    for (int lane = 0; lane < 8; ++lane) {
        auto words = philox4x32({static_cast<std::uint32_t>(blocks[lane]),
                                 static_cast<std::uint32_t>(blocks[lane] >> 32),
                                 static_cast<std::uint32_t>(streams[lane]),
                                 static_cast<std::uint32_t>(streams[lane] >> 32)},
                                key);
        for (int j = 0; j < 4; ++j)
            out[lane * 4 + j] = words[j];
    }
}

void axpy_scalar(double const* src, double* dst, double w, std::size_t len)
{
    for (std::size_t i = 0; i < len; ++i)
        dst[i] += w * src[i];
}

void sqnorm_rows_scalar(double const* pts, std::size_t rows, std::size_t d, double* out)
{
    for (std::size_t r = 0; r < rows; ++r) {
        double s = 0;
        for (std::size_t j = 0; j < d; ++j) {
            double v = pts[r * d + j];
            s += v * v;
        }
        out[r] = s;
    }
}

void prod_rows_scalar(double const* pts, std::size_t rows, std::size_t d, double* out)
{
    for (std::size_t r = 0; r < rows; ++r) {
        double s = 1;
        for (std::size_t j = 0; j < d; ++j)
            s *= pts[r * d + j];
        out[r] = s;
    }
}

bool inside_cone(int cone_code, int d, std::int32_t const* pos)
{
    switch (cone_code) {
        case 0:
            return pos[0] > 0;
        case 1:
            for (int j = 0; j < d; ++j)
                if (pos[j] <= 0)
                    return false;
            return true;
        default:
            for (int j = 0; j + 1 < d; ++j)
                if (pos[j + 1] <= pos[j])
                    return false;
            return true;
    }
}

void rademacher_scalar(RademacherSpec const& spec, RademacherOut& out)
{
    int const d = spec.d;
    for (int lane = 0; lane < 8; ++lane) {
        RngStream rs(spec.key, spec.streams[lane]);
        std::int32_t pos[8];
        for (int j = 0; j < d; ++j)
            pos[j] = spec.start[lane * d + j];
        std::int64_t survived = spec.nsteps;
        std::int64_t max_sq = 0;
        std::uint32_t word = 0;
        int bits_left = 0;
        int next_ck = 0;
        for (std::int64_t step = 1; step <= spec.nsteps; ++step) {
            if (bits_left < d) {
                word = rs.next_u32();
                bits_left = 32;
            }
            for (int j = 0; j < d; ++j) {
                pos[j] += (word & 1u) ? 1 : -1;
                word >>= 1;
            }
            bits_left -= d;
            if (spec.want_max) {
                std::int64_t s = 0;
                for (int j = 0; j < d; ++j)
                    s += static_cast<std::int64_t>(pos[j]) * pos[j];
                if (s > max_sq)
                    max_sq = s;
            }
            bool dead = !inside_cone(spec.cone_code, d, pos);
            while (next_ck < spec.ncheck && spec.checkpoints[next_ck] == step) {
                for (int j = 0; j < d; ++j)
                    out.checkpoint_pos[(next_ck * 8 + lane) * d + j] = pos[j];
                ++next_ck;
            }
            if (dead) {
                survived = step - 1;
                break;
            }
        }
        // Checkpoints past the exit step record the frozen exit position so
        // both backends emit identical bytes; callers only read checkpoints
        // with survived >= checkpoint anyway.
        while (next_ck < spec.ncheck) {
            for (int j = 0; j < d; ++j)
                out.checkpoint_pos[(next_ck * 8 + lane) * d + j] = pos[j];
            ++next_ck;
        }
        out.survived[lane] = survived;
        out.max_sqnorm[lane] = max_sq;
        for (int j = 0; j < d; ++j)
            out.final_pos[lane * d + j] = pos[j];
    }
}

}  // namespace

Ops const& scalar_ops()
{
    static Ops const table{
        "scalar", philox8_scalar, axpy_scalar, sqnorm_rows_scalar,
        prod_rows_scalar, rademacher_scalar,
    };
    return table;
}

}  // namespace conewalk::kern

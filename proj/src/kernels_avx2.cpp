// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
//
// AVX2 backend. Integer-only SIMD plus elementwise double ops, so results are
// bit-identical to the scalar reference (asserted by the equivalence tests).
#include <immintrin.h>

#include "conewalk/kernels.hpp"

namespace conewalk::kern {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

// 32x32->64 per 32-bit lane: hi and lo words of m * a.
inline void mulhilo8(__m256i a, std::uint32_t m, __m256i& hi, __m256i& lo)
{
    __m256i const mv = _mm256_set1_epi32(static_cast<int>(m));
    __m256i pe = _mm256_mul_epu32(a, mv);
    __m256i po = _mm256_mul_epu32(_mm256_srli_epi64(a, 32), mv);
    lo = _mm256_blend_epi32(pe, _mm256_slli_epi64(po, 32), 0xAA);
    hi = _mm256_blend_epi32(_mm256_srli_epi64(pe, 32), po, 0xAA);
}

// One Philox block per lane; counters given as SoA vectors, result in place.
inline void philox8_rounds(__m256i& c0, __m256i& c1, __m256i& c2, __m256i& c3, PhiloxKey key)
{
    __m256i k0 = _mm256_set1_epi32(static_cast<int>(key.k0));
    __m256i k1 = _mm256_set1_epi32(static_cast<int>(key.k1));
    __m256i const w0 = _mm256_set1_epi32(static_cast<int>(kW0));
    __m256i const w1 = _mm256_set1_epi32(static_cast<int>(kW1));
    for (int round = 0; round < 10; ++round) {
        __m256i hi0, lo0, hi1, lo1;
        mulhilo8(c0, kM0, hi0, lo0);
        mulhilo8(c2, kM1, hi1, lo1);
        __m256i n0 = _mm256_xor_si256(_mm256_xor_si256(hi1, c1), k0);
        __m256i n2 = _mm256_xor_si256(_mm256_xor_si256(hi0, c3), k1);
        c0 = n0;
        c1 = lo1;
        c2 = n2;
        c3 = lo0;
        k0 = _mm256_add_epi32(k0, w0);
        k1 = _mm256_add_epi32(k1, w1);
    }
}

inline __m256i load_lo32(std::uint64_t const* v)
{
    alignas(32) std::int32_t tmp[8];
    for (int i = 0; i < 8; ++i)
        tmp[i] = static_cast<std::int32_t>(static_cast<std::uint32_t>(v[i]));
    return _mm256_load_si256(reinterpret_cast<__m256i const*>(tmp));
}

inline __m256i load_hi32(std::uint64_t const* v)
{
    alignas(32) std::int32_t tmp[8];
    for (int i = 0; i < 8; ++i)
        tmp[i] = static_cast<std::int32_t>(static_cast<std::uint32_t>(v[i] >> 32));
    return _mm256_load_si256(reinterpret_cast<__m256i const*>(tmp));
}

void philox8_avx2(PhiloxKey key,
                  std::uint64_t const* streams,
                  std::uint64_t const* blocks,
                  std::uint32_t* out)
{
    __m256i c0 = load_lo32(blocks);
    __m256i c1 = load_hi32(blocks);
    __m256i c2 = load_lo32(streams);
    __m256i c3 = load_hi32(streams);
    philox8_rounds(c0, c1, c2, c3, key);
    alignas(32) std::uint32_t w[4][8];
    _mm256_store_si256(reinterpret_cast<__m256i*>(w[0]), c0);
    _mm256_store_si256(reinterpret_cast<__m256i*>(w[1]), c1);
    _mm256_store_si256(reinterpret_cast<__m256i*>(w[2]), c2);
    _mm256_store_si256(reinterpret_cast<__m256i*>(w[3]), c3);
    for (int lane = 0; lane < 8; ++lane)
        for (int j = 0; j < 4; ++j)
            out[lane * 4 + j] = w[j][lane];
}

void axpy_avx2(double const* src, double* dst, double w, std::size_t len)
{
    __m256d const wv = _mm256_set1_pd(w);
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
        __m256d s = _mm256_loadu_pd(src + i);
        __m256d t = _mm256_loadu_pd(dst + i);
        // mul+add kept separate; -ffp-contract=off forbids fusing them.
        t = _mm256_add_pd(t, _mm256_mul_pd(s, wv));
        _mm256_storeu_pd(dst + i, t);
    }
    for (; i < len; ++i)
        dst[i] += w * src[i];
}

void sqnorm_rows_avx2(double const* pts, std::size_t rows, std::size_t d, double* out)
{
    std::size_t r = 0;
    for (; r + 4 <= rows; r += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t j = 0; j < d; ++j) {
            __m256d v = _mm256_setr_pd(pts[(r + 0) * d + j], pts[(r + 1) * d + j],
                                       pts[(r + 2) * d + j], pts[(r + 3) * d + j]);
            acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
        }
        _mm256_storeu_pd(out + r, acc);
    }
    for (; r < rows; ++r) {
        double s = 0;
        for (std::size_t j = 0; j < d; ++j) {
            double v = pts[r * d + j];
            s += v * v;
        }
        out[r] = s;
    }
}

void prod_rows_avx2(double const* pts, std::size_t rows, std::size_t d, double* out)
{
    std::size_t r = 0;
    for (; r + 4 <= rows; r += 4) {
        __m256d acc = _mm256_set1_pd(1.0);
        for (std::size_t j = 0; j < d; ++j) {
            __m256d v = _mm256_setr_pd(pts[(r + 0) * d + j], pts[(r + 1) * d + j],
                                       pts[(r + 2) * d + j], pts[(r + 3) * d + j]);
            acc = _mm256_mul_pd(acc, v);
        }
        _mm256_storeu_pd(out + r, acc);
    }
    for (; r < rows; ++r) {
        double s = 1;
        for (std::size_t j = 0; j < d; ++j)
            s *= pts[r * d + j];
        out[r] = s;
    }
}

void rademacher_avx2(RademacherSpec const& spec, RademacherOut& out)
{
    int const d = spec.d;
    __m256i P[8];
    alignas(32) std::int32_t tmp[8];
    for (int j = 0; j < d; ++j) {
        for (int lane = 0; lane < 8; ++lane)
            tmp[lane] = spec.start[lane * d + j];
        P[j] = _mm256_load_si256(reinterpret_cast<__m256i const*>(tmp));
    }
    __m256i const zero = _mm256_setzero_si256();
    __m256i const one = _mm256_set1_epi32(1);
    __m256i alive = _mm256_cmpeq_epi32(zero, zero);  // all ones
    __m256i c2 = load_lo32(spec.streams);
    __m256i c3 = load_hi32(spec.streams);
    std::uint64_t block = 0;
    __m256i pool[4];
    int pool_idx = 4;
    __m256i W = zero;
    int bits_left = 0;
    int next_ck = 0;
    for (int lane = 0; lane < 8; ++lane) {
        out.survived[lane] = spec.nsteps;
        out.max_sqnorm[lane] = 0;
    }
    alignas(32) std::int32_t posbuf[8][8];
    auto dump_positions = [&] {
        for (int j = 0; j < d; ++j)
            _mm256_store_si256(reinterpret_cast<__m256i*>(posbuf[j]), P[j]);
    };
    auto record_checkpoint = [&](int ck) {
        dump_positions();
        for (int lane = 0; lane < 8; ++lane)
            for (int j = 0; j < d; ++j)
                out.checkpoint_pos[(ck * 8 + lane) * d + j] = posbuf[j][lane];
    };
    for (std::int64_t step = 1; step <= spec.nsteps; ++step) {
        if (bits_left < d) {
            if (pool_idx == 4) {
                __m256i b0 = _mm256_set1_epi32(static_cast<int>(static_cast<std::uint32_t>(block)));
                __m256i b1 = _mm256_set1_epi32(static_cast<int>(static_cast<std::uint32_t>(block >> 32)));
                __m256i r0 = b0, r1 = b1, r2 = c2, r3 = c3;
                philox8_rounds(r0, r1, r2, r3, spec.key);
                pool[0] = r0;
                pool[1] = r1;
                pool[2] = r2;
                pool[3] = r3;
                ++block;
                pool_idx = 0;
            }
            W = pool[pool_idx++];
            bits_left = 32;
        }
        for (int j = 0; j < d; ++j) {
            __m256i bit = _mm256_and_si256(W, one);
            __m256i delta = _mm256_sub_epi32(_mm256_slli_epi32(bit, 1), one);
            P[j] = _mm256_add_epi32(P[j], _mm256_and_si256(delta, alive));
            W = _mm256_srli_epi32(W, 1);
        }
        bits_left -= d;
        if (spec.want_max) {
            dump_positions();
            for (int lane = 0; lane < 8; ++lane) {
                std::int64_t s = 0;
                for (int j = 0; j < d; ++j)
                    s += static_cast<std::int64_t>(posbuf[j][lane]) * posbuf[j][lane];
                if (s > out.max_sqnorm[lane])
                    out.max_sqnorm[lane] = s;
            }
        }
        __m256i inside;
        if (spec.cone_code == 0) {
            inside = _mm256_cmpgt_epi32(P[0], zero);
        } else if (spec.cone_code == 1) {
            inside = _mm256_cmpgt_epi32(P[0], zero);
            for (int j = 1; j < d; ++j)
                inside = _mm256_and_si256(inside, _mm256_cmpgt_epi32(P[j], zero));
        } else {
            inside = _mm256_cmpgt_epi32(P[1], P[0]);
            for (int j = 1; j + 1 < d; ++j)
                inside = _mm256_and_si256(inside, _mm256_cmpgt_epi32(P[j + 1], P[j]));
        }
        __m256i alive_new = _mm256_and_si256(alive, inside);
        int newly = _mm256_movemask_ps(_mm256_castsi256_ps(_mm256_andnot_si256(alive_new, alive)));
        while (newly) {
            int lane = __builtin_ctz(static_cast<unsigned>(newly));
            newly &= newly - 1;
            out.survived[lane] = step - 1;
        }
        alive = alive_new;
        while (next_ck < spec.ncheck && spec.checkpoints[next_ck] == step)
            record_checkpoint(next_ck++);
        if (_mm256_movemask_ps(_mm256_castsi256_ps(alive)) == 0)
            break;
    }
    while (next_ck < spec.ncheck)
        record_checkpoint(next_ck++);
    dump_positions();
    for (int lane = 0; lane < 8; ++lane)
        for (int j = 0; j < d; ++j)
            out.final_pos[lane * d + j] = posbuf[j][lane];
}

}  // namespace

Ops const& avx2_ops()
{
    static Ops const table{
        "avx2", philox8_avx2, axpy_avx2, sqnorm_rows_avx2,
        prod_rows_avx2, rademacher_avx2,
    };
    return table;
}

}  // namespace conewalk::kern

// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
#include "conewalk/rng.hpp"

#include <cmath>

#include "conewalk/common.hpp"

namespace conewalk {

namespace {
constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

constexpr double kTwoPi = 6.283185307179586476925286766559;
}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> const& ctr,
                                        PhiloxKey key) noexcept
{
    std::uint32_t c0 = ctr[0], c1 = ctr[1], c2 = ctr[2], c3 = ctr[3];
    std::uint32_t k0 = key.k0, k1 = key.k1;
    for (int round = 0; round < 10; ++round) {
        std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c0;
        std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c2;
        std::uint32_t n0 = static_cast<std::uint32_t>(p1 >> 32) ^ c1 ^ k0;
        std::uint32_t n1 = static_cast<std::uint32_t>(p1);
        std::uint32_t n2 = static_cast<std::uint32_t>(p0 >> 32) ^ c3 ^ k1;
        std::uint32_t n3 = static_cast<std::uint32_t>(p0);
        c0 = n0;
        c1 = n1;
        c2 = n2;
        c3 = n3;
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
    }
    return {c0, c1, c2, c3};
}

std::uint64_t splitmix64(std::uint64_t& state) noexcept
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

PhiloxKey make_key(std::uint64_t seed) noexcept
{
    std::uint64_t s = seed;
    std::uint64_t k = splitmix64(s);
    return {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

PhiloxKey make_key(std::uint64_t seed, std::string_view label) noexcept
{
    // FNV-1a over the label, folded into the seed before key extraction.
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    std::uint64_t s = seed ^ h;
    (void)splitmix64(s);  // decorrelate from plain make_key(seed ^ h)
    std::uint64_t k = splitmix64(s);
    return {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

std::uint64_t stream_id(StreamTag tag, std::uint64_t index)
{
    if (index >> 48)
        throw ValidationError("stream index exceeds 48 bits");
    return (static_cast<std::uint64_t>(tag) << 48) | index;
}

void RngStream::refill()
{
    buf_ = philox4x32({static_cast<std::uint32_t>(block_),
                       static_cast<std::uint32_t>(block_ >> 32),
                       static_cast<std::uint32_t>(stream_),
                       static_cast<std::uint32_t>(stream_ >> 32)},
                      key_);
    ++block_;
    pos_ = 0;
}

std::uint32_t RngStream::next_u32()
{
    if (pos_ == 4)
        refill();
    return buf_[pos_++];
}

std::uint64_t RngStream::next_u64()
{
    std::uint64_t lo = next_u32();
    std::uint64_t hi = next_u32();
    return lo | (hi << 32);
}

double RngStream::next_unit()
{
    // (k + 0.5) * 2^-53 with k uniform on [0, 2^53): open interval, exact.
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::next_gaussian()
{
    if (have_gauss_) {
        have_gauss_ = false;
        return gauss_;
    }
    double u1 = next_unit();
    double u2 = next_unit();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = kTwoPi * u2;
    gauss_ = r * std::sin(a);
    have_gauss_ = true;
    return r * std::cos(a);
}

double RngStream::next_gamma(double shape)
{
    if (!(shape > 0))
        throw ValidationError("gamma shape must be positive");
    if (shape < 1.0) {
        // Boost to shape+1 and shrink by U^{1/shape}.
        double g = next_gamma(shape + 1.0);
        return g * std::pow(next_unit(), 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = next_gaussian();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        double u = next_unit();
        if (u < 1.0 - 0.0331 * x * x * x * x)
            return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
            return d * v;
    }
}

std::uint64_t RngStream::next_poisson(double mean)
{
    if (!(mean >= 0))
        throw ValidationError("poisson mean must be nonnegative");
    if (mean == 0)
        return 0;
    if (mean < 30.0) {
        double limit = std::exp(-mean);
        std::uint64_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= next_unit();
        } while (p > limit);
        return k - 1;
    }
    // Exact binary splitting: Poisson(m) = Poisson(m/2) + Poisson(m - m/2).
    double half = mean / 2.0;
    return next_poisson(half) + next_poisson(mean - half);
}

}  // namespace conewalk

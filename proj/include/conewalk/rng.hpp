// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
//
// Counter-based RNG (Philox-4x32-10) with explicit stream ids. Every logical
// unit of randomness (replica, rejection attempt, resampling pass, jitter
// draw) owns a distinct 64-bit stream, so results never depend on worker
// scheduling and any stream can be regenerated in isolation.
#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace conewalk {

struct PhiloxKey {
    std::uint32_t k0 = 0;
    std::uint32_t k1 = 0;
};

// One 10-round Philox-4x32 block. Verified against the published test vectors.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> const& ctr,
                                        PhiloxKey key) noexcept;

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

// Key for a master seed; all streams of a run share the key.
PhiloxKey make_key(std::uint64_t seed) noexcept;

// Key for a named sub-experiment, derived deterministically from seed + label.
PhiloxKey make_key(std::uint64_t seed, std::string_view label) noexcept;

// Stream id layout: high 16 bits = purpose tag, low 48 bits = index.
enum class StreamTag : std::uint64_t {
    SurvivalMc = 1,
    MeanderAttempt = 2,
    SplitAdvance = 3,
    SplitResample = 4,
    HTransform = 5,
    BridgeAttempt = 6,
    BridgeDraw = 7,
    BmAttempt = 8,
    Bessel = 9,
    VMc = 10,
    MomentCheck = 11,
    Bootstrap = 12,
    Jitter = 13,
    KPlusProbe = 14,
    Generic = 15,
};

std::uint64_t stream_id(StreamTag tag, std::uint64_t index);

// Buffered generator over one (key, stream) pair; counter = (block, stream).
class RngStream {
  public:
    RngStream(PhiloxKey key, std::uint64_t stream) : key_(key), stream_(stream) {}
    RngStream(PhiloxKey key, StreamTag tag, std::uint64_t index)
        : RngStream(key, stream_id(tag, index))
    {
    }

    std::uint32_t next_u32();
    std::uint64_t next_u64();
    // Uniform on the open interval (0, 1); 53-bit resolution, never 0 or 1.
    double next_unit();
    // Standard normal via Box-Muller (pairs cached per stream).
    double next_gaussian();
    // Gamma(shape, 1), shape > 0, Marsaglia-Tsang squeeze.
    double next_gamma(double shape);
    // Exact Poisson; inversion for small means, binary splitting for large.
    std::uint64_t next_poisson(double mean);

    std::uint64_t stream() const { return stream_; }

  private:
    void refill();

    PhiloxKey key_;
    std::uint64_t stream_ = 0;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
    bool have_gauss_ = false;
    double gauss_ = 0;
};

}  // namespace conewalk

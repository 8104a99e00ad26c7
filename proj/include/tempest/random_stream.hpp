#pragma once

// Counter-based random stream built on Philox4x32-10.
//
// Layout of the 128-bit counter: words 0-1 hold a 62-bit block index plus a
// 2-bit lane tag in the top bits of word 1; words 2-3 hold the 64-bit stream
// id. The 64-bit seed is the key. Each block yields two 64-bit outputs
// (word0 | word1 << 32, then word2 | word3 << 32), so a (seed, stream_id,
// lane) triple fixes the whole sequence on every platform.
//
// Derived variates:
//   uniform()       (u >> 11) * 2^-53 in [0, 1)
//   uniform_open()  ((u >> 11) + 0.5) * 2^-53 in (0, 1)
//   exponential()   -log(1 - uniform()), never log 0
//   normal()        Box-Muller cosine branch from two uniforms, no caching

#include <array>
#include <cstdint>

namespace tempest {

using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Ten-round Philox4x32 bijection.
PhiloxBlock philox4x32_10(PhiloxBlock counter, PhiloxKey key) noexcept;

class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0) noexcept;

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }
    unsigned lane_id() const noexcept { return lane_; }

    /// A sibling sequence sharing (seed, stream_id) but disjoint in counter space.
    /// Lanes 1-3 are free for callers that need fixed child streams.
    RandomStream lane(unsigned lane) const;

    std::uint64_t next_u64() noexcept;
    double uniform() noexcept;
    double uniform_open() noexcept;
    double exponential() noexcept;
    double normal() noexcept;

private:
    void refill() noexcept;

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    unsigned lane_ = 0;
    std::uint64_t block_ = 0;
    PhiloxBlock buffer_{};
    int used_ = 2;  // 64-bit halves of buffer_ already consumed
};

}  // namespace tempest

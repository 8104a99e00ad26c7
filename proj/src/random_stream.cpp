#include "tempest/random_stream.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tempest {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
constexpr std::uint64_t kBlockMask = (std::uint64_t{1} << 62) - 1;
constexpr double kTwoPow53 = 1.0 / 9007199254740992.0;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
    const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(prod >> 32);
    lo = static_cast<std::uint32_t>(prod);
}

}  // namespace

PhiloxBlock philox4x32_10(PhiloxBlock c, PhiloxKey k) noexcept {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            k[0] += kWeyl0;
            k[1] += kWeyl1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, c[0], hi0, lo0);
        mulhilo(kMul1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
    return c;
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
    : seed_(seed), stream_id_(stream_id) {}

RandomStream RandomStream::lane(unsigned lane) const {
    if (lane > 3) throw std::out_of_range("lane must be 0..3");
    RandomStream child(seed_, stream_id_);
    child.lane_ = lane;
    return child;
}

void RandomStream::refill() noexcept {
    const std::uint64_t word01 = (block_ & kBlockMask) | (static_cast<std::uint64_t>(lane_) << 62);
    const PhiloxBlock counter = {static_cast<std::uint32_t>(word01), static_cast<std::uint32_t>(word01 >> 32),
                                 static_cast<std::uint32_t>(stream_id_),
                                 static_cast<std::uint32_t>(stream_id_ >> 32)};
    const PhiloxKey key = {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
    buffer_ = philox4x32_10(counter, key);
    ++block_;
    used_ = 0;
}

std::uint64_t RandomStream::next_u64() noexcept {
    if (used_ == 2) refill();
    const int i = 2 * used_++;
    return static_cast<std::uint64_t>(buffer_[i]) | (static_cast<std::uint64_t>(buffer_[i + 1]) << 32);
}

double RandomStream::uniform() noexcept { return static_cast<double>(next_u64() >> 11) * kTwoPow53; }

double RandomStream::uniform_open() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * kTwoPow53;
}

double RandomStream::exponential() noexcept { return -std::log1p(-uniform()); }

double RandomStream::normal() noexcept {
    const double radius = std::sqrt(-2.0 * std::log(uniform_open()));
    return radius * std::cos(2.0 * std::numbers::pi * uniform());
}

}  // namespace tempest

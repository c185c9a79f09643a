#pragma once

// Counter-based Philox4x32-10 generator. Each Monte Carlo iteration owns the
// stream with counter (iteration lo, iteration hi, block lo, block hi) and
// key = seed, so results do not depend on how iterations are split across
// threads.

#include <array>
#include <cstdint>
#include <limits>

namespace mgfml {

namespace detail {

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

}  // namespace detail

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// One Philox4x32 block with 10 rounds.
constexpr PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key)
{
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += detail::kPhiloxW0;
            key[1] += detail::kPhiloxW1;
        }
        const std::uint64_t p0 = std::uint64_t{detail::kPhiloxM0} * ctr[0];
        const std::uint64_t p1 = std::uint64_t{detail::kPhiloxM1} * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

/// UniformRandomBitGenerator over the Philox stream of one iteration.
class PhiloxStream {
public:
    using result_type = std::uint32_t;

    PhiloxStream(std::uint64_t seed, std::uint64_t iteration)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          iteration_(iteration)
    {
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()()
    {
        if (used_ == 4) {
            const PhiloxCounter ctr = {static_cast<std::uint32_t>(iteration_),
                                       static_cast<std::uint32_t>(iteration_ >> 32),
                                       static_cast<std::uint32_t>(block_),
                                       static_cast<std::uint32_t>(block_ >> 32)};
            buffer_ = philox4x32_10(ctr, key_);
            ++block_;
            used_ = 0;
        }
        return buffer_[used_++];
    }

    /// Uniform double in (0, 1) with 53 random bits.
    double uniform()
    {
        const std::uint64_t hi = (*this)() >> 5;
        const std::uint64_t lo = (*this)() >> 6;
        return (static_cast<double>(hi * 67108864u + lo) + 0.5) / 9007199254740992.0;
    }

private:
    PhiloxKey key_;
    std::uint64_t iteration_;
    std::uint64_t block_ = 0;
    PhiloxCounter buffer_{};
    int used_ = 4;
};

}  // namespace mgfml

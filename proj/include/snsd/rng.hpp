#pragma once

#include <cmath>
#include <cstdint>

namespace snsd {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline void philox_round(std::uint32_t ctr[4], const std::uint32_t key[2]) {
    const std::uint64_t p0 = 0xD2511F53ULL * ctr[0];
    const std::uint64_t p1 = 0xCD9E8D57ULL * ctr[2];
    const std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
    const std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
    ctr[0] = hi1 ^ ctr[1] ^ key[0];
    ctr[1] = lo1;
    ctr[2] = hi0 ^ ctr[3] ^ key[1];
    ctr[3] = lo0;
}

/// Philox4x32-10 block function: 128-bit counter, 64-bit key -> 128 random bits.
inline void philox4x32(std::uint64_t ctr_hi, std::uint64_t ctr_lo,
                       std::uint64_t key64, std::uint32_t out[4]) {
    std::uint32_t c[4] = {std::uint32_t(ctr_lo), std::uint32_t(ctr_lo >> 32),
                          std::uint32_t(ctr_hi), std::uint32_t(ctr_hi >> 32)};
    std::uint32_t k[2] = {std::uint32_t(key64), std::uint32_t(key64 >> 32)};
    for (int r = 0; r < 10; ++r) {
        philox_round(c, k);
        k[0] += 0x9E3779B9u;
        k[1] += 0xBB67AE85u;
    }
    out[0] = c[0]; out[1] = c[1]; out[2] = c[2]; out[3] = c[3];
}

} // namespace detail

/// Counter-based random stream. Draws are a pure function of
/// (seed, stream_id, block, draw index), so independent trajectories and
/// steps produce identical values no matter how work is scheduled.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : key_(detail::splitmix64(seed ^ detail::splitmix64(stream_id ^ 0x5851F42D4C957F2DULL))) {}

    /// Position the stream at a named block (e.g. a time-step index).
    /// Resets the intra-block draw counter and any cached Gaussian.
    void begin_block(std::uint64_t block) {
        block_ = block;
        draw_ = 0;
        have_spare_ = false;
    }

    std::uint64_t next_u64() {
        std::uint32_t out[4];
        detail::philox4x32(block_, draw_++, key_, out);
        return (std::uint64_t(out[0]) << 32) | out[1];
    }

    /// Uniform on (0,1]; never returns 0 so it is safe under log().
    double next_unit() {
        return (double(next_u64() >> 11) + 1.0) * 0x1p-53;
    }

    /// Standard normal via Box-Muller (second value cached within the block).
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_unit();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t key_;
    std::uint64_t block_ = 0;
    std::uint64_t draw_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace snsd

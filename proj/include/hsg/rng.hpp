#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>

namespace hsg {

// Philox4x32-10 counter-based generator.  A (key, counter) pair maps to four
// 32-bit words through ten rounds; distinct counters give independent draws,
// so streams can be sampled in any order and in parallel.
struct Philox4x32 {
    static constexpr std::uint32_t M0 = 0xD2511F53u;
    static constexpr std::uint32_t M1 = 0xCD9E8D57u;
    static constexpr std::uint32_t W0 = 0x9E3779B9u;
    static constexpr std::uint32_t W1 = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += W0;
                key[1] += W1;
            }
            const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Stream id for a lattice mode; mixing keeps adjacent modes decorrelated.
inline std::uint64_t mode_stream(int n1, int n2) {
    const auto a = static_cast<std::uint32_t>(n1);
    const auto b = static_cast<std::uint32_t>(n2);
    return splitmix64((static_cast<std::uint64_t>(a) << 32) | b);
}

// One logical random stream: key = seed, counter = (stream, position).
// normal() produces standard Gaussians via Box-Muller on 53-bit uniforms.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t pos0 = 0)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream), pos_(pos0) {}

    std::uint64_t next_u64() {
        if (have_spare_u64_) {
            have_spare_u64_ = false;
            return spare_u64_;
        }
        const std::array<std::uint32_t, 4> ctr = {
            static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32),
            static_cast<std::uint32_t>(pos_), static_cast<std::uint32_t>(pos_ >> 32)};
        const auto out = Philox4x32::block(ctr, key_);
        ++pos_;
        spare_u64_ = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
        have_spare_u64_ = true;
        return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    }

    // Uniform on (0, 1].
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_normal_) {
            have_spare_normal_ = false;
            return spare_normal_;
        }
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_normal_ = r * std::sin(a);
        have_spare_normal_ = true;
        return r * std::cos(a);
    }

    // Complex Gaussian with E|z|^2 = var (independent re/im of variance var/2).
    std::complex<double> cnormal(double var) {
        const double s = std::sqrt(0.5 * var);
        return {s * normal(), s * normal()};
    }

private:
    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t pos_ = 0;
    std::uint64_t spare_u64_ = 0;
    bool have_spare_u64_ = false;
    bool have_spare_normal_ = false;
    double spare_normal_ = 0.0;
};

} // namespace hsg

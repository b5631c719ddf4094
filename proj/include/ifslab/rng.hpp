#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace ifslab {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
// Stateless: 128-bit counter + 64-bit key -> 128 random bits.
namespace philox {

constexpr std::uint32_t kW32A = 0x9E3779B9u;
constexpr std::uint32_t kW32B = 0xBB67AE85u;
constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
    std::uint64_t p = std::uint64_t(a) * b;
    lo = std::uint32_t(p);
    hi = std::uint32_t(p >> 32);
}

inline std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                          std::array<std::uint32_t, 2> key) {
    for (int round = 0;; ++round) {
        std::uint32_t lo0, hi0, lo1, hi1;
        mulhilo(kM0, ctr[0], lo0, hi0);
        mulhilo(kM1, ctr[2], lo1, hi1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        if (round == 9) break;
        key[0] += kW32A;
        key[1] += kW32B;
    }
    return ctr;
}

}  // namespace philox

// splitmix64 finalizer; used to key streams and to salt per-operation seeds.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Derives an operation-local master seed so different operations sharing one
// user seed draw decorrelated streams.
inline std::uint64_t salt_seed(std::uint64_t seed, std::uint64_t op_salt) {
    return mix64(seed ^ mix64(op_salt));
}

// One independent stream of randomness, addressed by (seed, stream id).
// Output at position t depends only on (seed, stream, t), so partitioning
// work over streams yields identical numbers for any worker count.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream) : stream_(stream) {
        std::uint64_t k = mix64(seed);
        key_ = {std::uint32_t(k), std::uint32_t(k >> 32)};
    }

    std::uint64_t next_u64() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        auto out = philox::block({std::uint32_t(step_), std::uint32_t(step_ >> 32),
                                  std::uint32_t(stream_), std::uint32_t(stream_ >> 32)},
                                 key_);
        ++step_;
        spare_ = std::uint64_t(out[2]) | (std::uint64_t(out[3]) << 32);
        have_spare_ = true;
        return std::uint64_t(out[0]) | (std::uint64_t(out[1]) << 32);
    }

    // Uniform on [0,1) with 53 random bits.
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on {0,...,k-1} via 128-bit multiply-shift.
    std::uint32_t next_below(std::uint32_t k) {
        return std::uint32_t((unsigned __int128)(next_u64())*k >> 64);
    }

    // Standard normal draw (Box-Muller; one value per call).
    double next_normal() {
        double u = next_double();
        double v = next_double();
        while (u <= 0.0) u = next_double();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925286766559 * v);
    }

private:
    std::array<std::uint32_t, 2> key_{};
    std::uint64_t stream_ = 0;
    std::uint64_t step_ = 0;
    std::uint64_t spare_ = 0;
    bool have_spare_ = false;
};

}  // namespace ifslab

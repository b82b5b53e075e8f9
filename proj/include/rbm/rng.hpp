#pragma once

#include <cmath>
#include <cstdint>

namespace rbm {

// Counter-based RNG (Philox-2x64, 10 rounds).  Each stream is identified by
// (seed, stream_id); draws depend only on the stream key and a 64-bit counter,
// so chains can be advanced in parallel or serially with identical results.
class RngStream {
public:
    RngStream() : RngStream(0, 0) {}

    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : key_(mix(seed ^ mix(stream_id + 0x9E3779B97F4A7C15ull))), ctr_(0) {}

    std::uint64_t next_u64() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        std::uint64_t x0 = ctr_++;
        std::uint64_t x1 = 0xB5297A4D3A2D9FEBull;
        std::uint64_t k = key_;
        for (int r = 0; r < 10; ++r) {
            const unsigned __int128 prod =
                static_cast<unsigned __int128>(0xD2B74407B1CE6E93ull) * x0;
            const std::uint64_t hi = static_cast<std::uint64_t>(prod >> 64);
            const std::uint64_t lo = static_cast<std::uint64_t>(prod);
            x0 = hi ^ k ^ x1;
            x1 = lo;
            k += 0x9E3779B97F4A7C15ull;
        }
        spare_ = x1;
        have_spare_ = true;
        return x0;
    }

    // Uniform in [0, 1), 53-bit resolution.
    double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return u01() < p; }

    // Standard normal via Box-Muller (second value cached).
    double normal() {
        if (have_normal_) {
            have_normal_ = false;
            return normal_spare_;
        }
        double u1 = u01(), u2 = u01();
        while (u1 <= 0.0) u1 = u01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.28318530717958647692 * u2;
        normal_spare_ = r * std::sin(a);
        have_normal_ = true;
        return r * std::cos(a);
    }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(u01() * static_cast<double>(n)) % n;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t ctr_;
    std::uint64_t spare_ = 0;
    bool have_spare_ = false;
    double normal_spare_ = 0.0;
    bool have_normal_ = false;
};

}  // namespace rbm

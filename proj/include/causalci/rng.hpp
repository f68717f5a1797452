#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace causalci {

// Identifies one reproducible random stream. Streams with the same (seed, stream)
// produce identical sequences regardless of process, run, or thread count.
struct RngSeed {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    // Derives a child stream; used to key replications, resamples, splits.
    [[nodiscard]] RngSeed child(std::uint64_t salt) const noexcept {
        return RngSeed{seed, mix(stream, salt)};
    }

    static std::uint64_t mix(std::uint64_t a, std::uint64_t b) noexcept {
        // splitmix64 finalizer over the combined words
        std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

// xoshiro256** by Blackman & Vigna; hand-rolled so streams are bit-identical
// across standard libraries and platforms.
class Rng {
  public:
    explicit Rng(RngSeed key) noexcept {
        // seed state via splitmix64 on (seed, stream)
        std::uint64_t x = key.seed ^ (0x9e3779b97f4a7c15ULL * (key.stream + 1));
        for (auto& word : state_) {
            x += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            word = z ^ (z >> 31);
        }
    }

    std::uint64_t next_u64() noexcept {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in (0, 1]; never returns 0 so log() is safe.
    double next_uniform() noexcept {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Standard normal pair via Box-Muller; consumes exactly two uniforms.
    void next_normal_pair(double& z0, double& z1) noexcept {
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        z0 = r * std::cos(2.0 * std::numbers::pi * u2);
        z1 = r * std::sin(2.0 * std::numbers::pi * u2);
    }

    double next_normal() noexcept {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double z0, z1;
        next_normal_pair(z0, z1);
        spare_ = z1;
        have_spare_ = true;
        return z0;
    }

    // Unbiased integer in [0, bound) by rejection; bound > 0.
    std::uint64_t next_below(std::uint64_t bound) noexcept {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    // Deterministic Fisher-Yates shuffle of 0..n-1.
    std::vector<std::size_t> permutation(std::size_t n) {
        std::vector<std::size_t> p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = i;
        for (std::size_t i = n; i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(p[i - 1], p[j]);
        }
        return p;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace causalci

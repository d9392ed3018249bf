#pragma once

#include <complex>
#include <cstdint>

namespace flexmimo {

// Domain tags keep the per-module random streams statistically separate
// even when they share one seed.
namespace rng_tag {
inline constexpr std::uint32_t hardening = 1;
inline constexpr std::uint32_t fading = 2;
inline constexpr std::uint32_t optimizer = 3;
inline constexpr std::uint32_t se_ee = 4;
inline constexpr std::uint32_t net_init = 5;
}  // namespace rng_tag

// splitmix64 finalizer; bijective on 64 bits.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t w) noexcept {
    return mix64(h + 0x9e3779b97f4a7c15ull + w);
}

// Counter-based random stream: a pure function of (seed, tag, counter words).
// No state is advanced, so any counter range can be evaluated in parallel and
// the same inputs always reproduce the same draw.
struct RngStream {
    std::uint64_t seed = 0;
    std::uint32_t tag = 0;

    constexpr std::uint64_t bits(std::uint64_t c0, std::uint64_t c1 = 0,
                                 std::uint64_t c2 = 0, std::uint64_t c3 = 0) const noexcept {
        std::uint64_t h = hash_combine(seed, tag);
        h = hash_combine(h, c0);
        h = hash_combine(h, c1);
        h = hash_combine(h, c2);
        h = hash_combine(h, c3);
        return h;
    }

    // Uniform on (0,1]; never returns 0 so -log(u) stays finite.
    double uniform(std::uint64_t c0, std::uint64_t c1 = 0,
                   std::uint64_t c2 = 0, std::uint64_t c3 = 0) const noexcept {
        return static_cast<double>((bits(c0, c1, c2, c3) >> 11) + 1) * 0x1.0p-53;
    }

    // Unit-mean exponential.
    double exponential(std::uint64_t c0, std::uint64_t c1 = 0,
                       std::uint64_t c2 = 0, std::uint64_t c3 = 0) const noexcept;

    // Standard normal via Box-Muller; counter word c3 is consumed internally.
    double gaussian(std::uint64_t c0, std::uint64_t c1 = 0,
                    std::uint64_t c2 = 0) const noexcept;

    // Circularly-symmetric complex normal with E[|g|^2] = 1.
    std::complex<double> cgaussian(std::uint64_t c0, std::uint64_t c1 = 0,
                                   std::uint64_t c2 = 0) const noexcept;

    // Independent child stream, e.g. one per optimizer sub-phase.
    constexpr RngStream derived(std::uint64_t salt) const noexcept {
        return RngStream{bits(salt, 0x64657269766564ull), tag};
    }
};

}  // namespace flexmimo

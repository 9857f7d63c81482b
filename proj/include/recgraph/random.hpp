#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <string_view>

namespace recgraph {

/// Stable 64-bit FNV-1a; used to key random streams on string ids.
constexpr std::uint64_t stable_hash(std::string_view text) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives an independent stream key from a root seed and a path of
/// coordinates, e.g. (seed, walk index) or (seed, item, request index, tag).
constexpr std::uint64_t derive_key(std::uint64_t root, std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t key = mix64(root ^ 0x9e3779b97f4a7c15ULL);
    for (const auto part : path) {
        key = mix64(key + 0x9e3779b97f4a7c15ULL + mix64(part));
    }
    return key;
}

/// SplitMix64: a tiny splittable generator. Cheap to construct, which matters
/// because every random walk and every synthetic request gets its own stream.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    /// Uniform double in [0, 1) with 53 bits of randomness.
    constexpr double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound) via Lemire's multiply-shift with rejection.
    constexpr std::uint64_t below(std::uint64_t bound) noexcept {
        if (bound <= 1) return 0;
        auto product = static_cast<unsigned __int128>((*this)()) * bound;
        auto low = static_cast<std::uint64_t>(product);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                product = static_cast<unsigned __int128>((*this)()) * bound;
                low = static_cast<std::uint64_t>(product);
            }
        }
        return static_cast<std::uint64_t>(product >> 64);
    }

    constexpr bool bernoulli(double p) noexcept { return uniform() < p; }

private:
    std::uint64_t state_;
};

} // namespace recgraph

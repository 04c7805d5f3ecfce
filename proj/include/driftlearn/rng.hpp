#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace driftlearn {

// splitmix64 finalizer. This is the fixed 64-bit mixing function behind all
// sub-seed derivation in the toolkit; adding new labelled streams never
// perturbs existing ones.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Master seed -> named sub-stream seed.
constexpr std::uint64_t sub_seed(std::uint64_t seed, std::string_view label) noexcept {
    return mix64(seed ^ fnv1a64(label));
}

constexpr std::uint64_t sub_seed(std::uint64_t seed, std::string_view label,
                                 std::uint64_t index) noexcept {
    return mix64(sub_seed(seed, label) ^ mix64(index + 0x9e3779b97f4a7c15ULL));
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

// Bounded draws are implemented on the raw 64-bit stream so results do not
// depend on the standard library's distribution internals.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(rng()) * n) >> 64);
}

inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    uniform_below(rng, static_cast<std::uint64_t>(hi - lo) + 1));
}

inline double uniform_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_range(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform_unit(rng);
}

template <typename T>
void shuffle_in_place(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_below(rng, i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace driftlearn

#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string_view>

namespace fairtl {

// FNV-1a, 64-bit. Used for config hashes and parameter checksums; not
// collision-resistant against adversaries and not meant to be.
inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

inline std::uint64_t fnv1a64(std::span<const std::byte> bytes,
                             std::uint64_t h = kFnvOffset) {
    for (std::byte b : bytes) {
        h ^= static_cast<std::uint64_t>(b);
        h *= kFnvPrime;
    }
    return h;
}

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = kFnvOffset) {
    return fnv1a64(std::as_bytes(std::span<const char>(s.data(), s.size())), h);
}

template <typename T>
std::uint64_t fnv1a64_values(std::span<const T> values,
                             std::uint64_t h = kFnvOffset) {
    static_assert(std::is_trivially_copyable_v<T>);
    return fnv1a64(std::as_bytes(values), h);
}

// splitmix64 finalizer; stirs a seed into a well-distributed 64-bit value.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Deterministic derivation of sub-stream seeds from (seed, stream index).
inline std::uint64_t mix64(std::uint64_t seed, std::uint64_t stream) {
    return mix64(seed ^ mix64(stream));
}

}  // namespace fairtl

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace graphsense {

// FNV-1a, 64 bit. Used for stable content-derived ids, seed derivation and
// stage-file integrity checks. Not a cryptographic hash.
constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

constexpr std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = kFnvOffset) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= static_cast<std::uint64_t>(c);
        h *= kFnvPrime;
    }
    return h;
}

constexpr std::uint64_t fnv1a64_mix(std::uint64_t value, std::uint64_t seed = kFnvOffset) {
    std::uint64_t h = seed;
    for (int i = 0; i < 8; ++i) {
        h ^= (value >> (i * 8)) & 0xffULL;
        h *= kFnvPrime;
    }
    return h;
}

inline std::string hex64(std::uint64_t value) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[value & 0xf];
        value >>= 4;
    }
    return out;
}

// Short hex tag used inside human-readable ids.
inline std::string hex_tag(std::uint64_t value) {
    return hex64(value).substr(8);
}

// Per-stage seed derivation: every stage draws from the root seed plus the
// hash of its own name, so stages stay independent under one --seed flag.
inline std::uint64_t derive_seed(std::uint64_t root_seed, std::string_view stage_name) {
    return root_seed + fnv1a64(stage_name);
}

} // namespace graphsense

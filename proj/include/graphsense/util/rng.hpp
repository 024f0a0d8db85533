#pragma once

#include <cstdint>
#include <vector>

namespace graphsense {

// Deterministic RNG with a fixed algorithm (splitmix64). The standard
// distributions are implementation-defined, so shuffles and bounded draws are
// implemented here directly; identical seeds give identical streams on every
// platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, n). n must be > 0. Modulo bias is negligible for the
    // small ranges used here and keeps the draw sequence trivially portable.
    std::size_t bounded(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

    // Uniform in [0, 1).
    double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = bounded(i);
            using std::swap;
            swap(items[i - 1], items[j]);
        }
    }

private:
    std::uint64_t state_;
};

} // namespace graphsense

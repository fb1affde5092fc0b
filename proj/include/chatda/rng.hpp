#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace chatda {

// SplitMix64 stream. Used instead of <random> engines + distributions so that
// sampled values are identical across standard library implementations.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, bound) by rejection; bound > 0.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % bound;
    }

    // Uniform in [0, 1) with 53 bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[static_cast<std::size_t>(below(i))]);
        }
    }

private:
    std::uint64_t state_;
};

// Counter-based derivation of an independent stream seed, so per-item
// streams do not depend on the order items are processed in.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t ordinal) {
    SplitMix64 a(master ^ 0xD1B54A32D192ED03ULL);
    const std::uint64_t base = a.next();
    SplitMix64 b(base + ordinal * 0x9E3779B97F4A7C15ULL);
    return b.next();
}

} // namespace chatda

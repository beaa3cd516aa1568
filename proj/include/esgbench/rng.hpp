#pragma once

// Reproducible shuffling. The engine is MT19937-64 (std::mt19937_64, whose
// output sequence is fixed by the C++ standard); bounded draws use
// rejection sampling and the shuffle is a downward Fisher-Yates, so a
// permutation depends only on the seed and never on the standard library.
//
// Test vector: seeded with 5489, the 10000th engine output is
// 9981545732273789042.

#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

namespace esgbench {

class SplitRng {
public:
    explicit SplitRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound), bound >= 1.
    std::uint64_t below(std::uint64_t bound) {
        // 2^64 mod bound; draws under it would bias the modulo
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = engine_();
            if (r >= threshold) return r % bound;
        }
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace esgbench

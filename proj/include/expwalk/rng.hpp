#pragma once

#include <cmath>
#include <cstdint>

namespace expwalk {

/// Counter-based generator: the i-th output is a pure function of (key, i),
/// so any stream can be split or replayed without shared state.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0) : key_(key), ctr_(counter) {}

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next() { return mix(key_ ^ mix(ctr_++)); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in (0, 1], safe as a log argument.
    double uniform_pos() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal by Box-Muller; one draw per pair of uniforms.
    double normal() {
        const double u1 = uniform_pos();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return ctr_; }

private:
    std::uint64_t key_;
    std::uint64_t ctr_;
};

/// Key of the i-th independent substream of `seed`.
inline std::uint64_t subseed(std::uint64_t seed, std::uint64_t i) {
    return CounterRng::mix(CounterRng::mix(seed) + 0xd1b54a32d192ed03ULL * (i + 1));
}

}  // namespace expwalk

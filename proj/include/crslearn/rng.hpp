#ifndef CRSLEARN_RNG_HPP
#define CRSLEARN_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace crslearn {

// splitmix64; used to derive independent sub-stream seeds from (seed, tag) so
// fold/grid jobs stay deterministic regardless of scheduling.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag = 0) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// mt19937_64 with hand-rolled distributions. The std:: distributions are
// implementation-defined, which would break cross-platform reproducibility of
// seeded runs; these are pinned.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix_seed(seed)) {}

    // uniform in [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // uniform in [0, hi)
    double uniform(double hi) { return uniform() * hi; }

    bool bernoulli(double p) { return uniform() < p; }

    // uniform integer in [0, n); n > 0. Rejection sampling, unbiased.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % n);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    // Fisher-Yates
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace crslearn

#endif

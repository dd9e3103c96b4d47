#pragma once

#include <cstdint>
#include <string_view>

namespace sdtgcn {

// Seedable xoshiro256** generator. Distributions are implemented by hand so
// identical seeds give identical draw sequences on every platform.
//
// child(label) derives an independent named sub-stream from the *root* seed,
// so adding a new consumer never perturbs the draws of existing ones.
class Rng {
public:
    Rng() : Rng(0) {}
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    // uniform integer in [0, n), unbiased via rejection
    std::uint64_t uniform_below(std::uint64_t n);

    // uniform double in [0, 1) with 53 random bits
    double uniform();

    // uniform double in [lo, hi)
    double uniform(double lo, double hi);

    // standard normal via Box-Muller (one value per call, no caching)
    double normal();

    // independent stream derived from this stream's seed and a label
    Rng child(std::string_view label) const;

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::uint64_t s_[4];
};

}  // namespace sdtgcn

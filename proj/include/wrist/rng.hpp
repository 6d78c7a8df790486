#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace wrist {

// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

// mt19937_64 output is fixed by the C++ standard. The distributions in <random>
// are not, so the conversions below are done by hand.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    double uniform();                      // [0, 1)
    double uniform(double lo, double hi);  // [lo, hi)
    std::uint64_t below(std::uint64_t n);  // [0, n), unbiased
    double normal();                       // standard normal, Box-Muller
    bool coin() { return (next() >> 63) != 0; }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0;
};

// Fisher-Yates over 0..n-1.
std::vector<std::size_t> permutation(std::size_t n, std::uint64_t seed);

}  // namespace wrist

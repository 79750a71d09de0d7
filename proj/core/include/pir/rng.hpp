#pragma once

#include <array>
#include <cstdint>

#include "pir/grid.hpp"

namespace pir {

// xoshiro256++ seeded through splitmix64. Chosen over std engines so that the
// bit stream is pinned by this file, not by the standard library vendor.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed);
    std::uint64_t next();
    double uniform01();  // in [0,1)
    double normal();     // standard normal, Box-Muller

private:
    std::array<std::uint64_t, 4> s_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Exact Poisson sampling: inversion by sequential search for lambda < 30,
// PTRS transformed rejection for lambda >= 30.
std::int64_t poisson_draw(double lambda, Xoshiro256pp& rng);

CountGrid poisson_sample(const ImageGrid& lambda, std::uint64_t seed);

}  // namespace pir

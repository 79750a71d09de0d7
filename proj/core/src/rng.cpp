#include "pir/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace pir {
namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Xoshiro256pp::Xoshiro256pp(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
}

std::uint64_t Xoshiro256pp::next() {
    std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Xoshiro256pp::uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Xoshiro256pp::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = 0.0;
    do {
        u1 = uniform01();
    } while (u1 <= 0.0);
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

namespace {

std::int64_t poisson_inversion(double lambda, Xoshiro256pp& rng) {
    double u = rng.uniform01();
    double p = std::exp(-lambda);
    double cdf = p;
    std::int64_t k = 0;
    while (u > cdf) {
        ++k;
        p *= lambda / static_cast<double>(k);
        cdf += p;
        if (p < 1e-300 && k > lambda) break;  // tail exhausted numerically
    }
    return k;
}

// Hormann's PTRS transformed double rejection, exact for lambda >= ~10.
std::int64_t poisson_ptrs(double lambda, Xoshiro256pp& rng) {
    double slam = std::sqrt(lambda);
    double loglam = std::log(lambda);
    double b = 0.931 + 2.53 * slam;
    double a = -0.059 + 0.02483 * b;
    double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        double u = rng.uniform01() - 0.5;
        double v = rng.uniform01();
        double us = 0.5 - std::fabs(u);
        double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        double k = kf;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <= k * loglam - lambda - std::lgamma(k + 1.0))
            return static_cast<std::int64_t>(kf);
    }
}

}  // namespace

std::int64_t poisson_draw(double lambda, Xoshiro256pp& rng) {
    if (!(lambda > 0.0)) throw std::invalid_argument("poisson_draw: mean must be positive");
    return lambda < 30.0 ? poisson_inversion(lambda, rng) : poisson_ptrs(lambda, rng);
}

CountGrid poisson_sample(const ImageGrid& lambda, std::uint64_t seed) {
    for (double x : lambda.v)
        if (!(x > 0.0)) throw std::invalid_argument("poisson_sample: nonpositive mean entry");
    CountGrid out(lambda.h, lambda.w);
    Xoshiro256pp rng(seed);
    for (int i = 0; i < lambda.n(); ++i) out.v[i] = poisson_draw(lambda.v[i], rng);
    return out;
}

}  // namespace pir

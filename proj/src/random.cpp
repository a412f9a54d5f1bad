#include "orbitlab/random.hpp"

#include <cmath>

namespace orbitlab {

double Rng::uniform() {
    return (eng_() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    // Box-Muller; u1 bounded away from 0 so the log is finite.
    double u1 = 0.0;
    do {
        u1 = uniform();
    } while (u1 <= 0x1.0p-60);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

cplx Rng::gaussian_cplx() {
    const double re = gaussian();
    const double im = gaussian();
    return {re, im};
}

HVector Rng::gaussian_vector(std::size_t n) {
    HVector v(n);
    for (auto& c : v) c = gaussian_cplx();
    return v;
}

HVector Rng::unit_vector(std::size_t n) {
    if (n == 0) throw InvalidInput("unit_vector: n must be positive");
    for (int attempt = 0; attempt < 64; ++attempt) {
        HVector v = gaussian_vector(n);
        double s = 0.0;
        for (const auto& c : v) s += std::norm(c);
        if (s > 0) {
            const double inv = 1.0 / std::sqrt(s);
            for (auto& c : v) c *= inv;
            return v;
        }
    }
    throw NumericFailure("unit_vector: could not draw a nonzero vector");
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    // splitmix64 finalizer over seed ^ rotated salt
    std::uint64_t z = seed ^ (salt * 0x9e3779b97f4a7c15ULL);
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

}  // namespace orbitlab

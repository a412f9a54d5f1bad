#pragma once

#include <cstdint>
#include <random>

#include "orbitlab/types.hpp"

namespace orbitlab {

/// Deterministic random source.  std::mt19937_64 produces an
/// implementation-independent stream; the uniform/gaussian transforms are
/// written out by hand because the std distributions are allowed to differ
/// between standard libraries and the reports must be reproducible
/// byte-for-byte across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform on [0, 1).  53-bit resolution.
    double uniform();

    /// Standard normal via Box-Muller.
    double gaussian();

    /// Complex with independent standard normal parts.
    cplx gaussian_cplx();

    /// Gaussian vector of length n.
    HVector gaussian_vector(std::size_t n);

    /// Gaussian vector scaled to unit norm.  Retries on (astronomically
    /// unlikely) zero draws.
    HVector unit_vector(std::size_t n);

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Stable per-purpose substream: mixes a scenario seed with a salt so the
/// probe draws, the seed-vector draw, and the operator draw never share a
/// stream even when the configured seeds coincide.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace orbitlab

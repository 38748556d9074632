#pragma once

#include <cstdint>
#include <random>

namespace copreg {

// All sampling in the library draws from this engine. libstdc++'s
// distributions are deterministic for a given engine state, which is what the
// reproducibility guarantees rely on.
using RandomStream = std::mt19937_64;

// Independent stream for (seed, stream) pairs. Seeds are mixed with SplitMix64
// so neighbouring seeds do not produce correlated engines.
RandomStream make_stream(std::uint64_t seed, std::uint64_t stream = 0);

// Uniform draw on the open interval (0, 1).
double uniform_open(RandomStream& rng);

double standard_normal(RandomStream& rng);

// Gamma(shape, scale = 1).
double gamma_variate(double shape, RandomStream& rng);

// Beta(alpha, beta) by the gamma-ratio construction.
double beta_variate(double alpha, double beta, RandomStream& rng);

}  // namespace copreg

#include "copreg/rng.hpp"

#include <array>

namespace copreg {
namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

RandomStream make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t state = seed ^ (stream * 0xD1B54A32D192ED03ULL);
  std::array<std::uint32_t, 8> words{};
  for (std::size_t i = 0; i < words.size(); i += 2) {
    const std::uint64_t w = splitmix64(state);
    words[i] = static_cast<std::uint32_t>(w);
    words[i + 1] = static_cast<std::uint32_t>(w >> 32);
  }
  std::seed_seq seq(words.begin(), words.end());
  return RandomStream(seq);
}

double uniform_open(RandomStream& rng) {
  // 53 random bits mapped to the centres of 2^53 equal cells: never 0 or 1.
  const std::uint64_t bits = rng() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double standard_normal(RandomStream& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

double gamma_variate(double shape, RandomStream& rng) {
  std::gamma_distribution<double> dist(shape, 1.0);
  return dist(rng);
}

double beta_variate(double alpha, double beta, RandomStream& rng) {
  const double x = gamma_variate(alpha, rng);
  const double y = gamma_variate(beta, rng);
  if (x + y <= 0.0) return 0.5;
  return x / (x + y);
}

}  // namespace copreg

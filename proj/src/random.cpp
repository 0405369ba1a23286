#include "steer/random.hpp"

#include <cmath>

namespace steer {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

RngStream RngStream::substream(std::uint64_t seed, std::uint64_t index) {
  return RngStream(splitmix64(seed) ^ splitmix64(index * 0x9E3779B97F4A7C15ULL + 1));
}

std::uint64_t RngStream::next_u64() { return engine_(); }

double RngStream::uniform() {
  // 53 random bits scaled into [0, 1).
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

double RngStream::gaussian() {
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log1p(-u1));  // u1 < 1 keeps the log finite
  return r * std::cos(2.0 * M_PI * u2);
}

PureState random_pure(RngStream& rng) {
  // Four Gaussians normalized: unitarily invariant, hence Haar.
  const cplx a0(rng.gaussian(), rng.gaussian());
  const cplx a1(rng.gaussian(), rng.gaussian());
  return PureState(a0, a1);
}

DensityMatrix random_density(RngStream& rng) {
  const double r = std::cbrt(rng.uniform());
  const double cos_theta = rng.uniform(-1.0, 1.0);
  const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
  const double phi = rng.uniform(0.0, 2.0 * M_PI);
  const double nx = r * sin_theta * std::cos(phi);
  const double ny = r * sin_theta * std::sin(phi);
  const double nz = r * cos_theta;
  return DensityMatrix(0.5 * (1.0 + nz), 0.5 * (1.0 - nz), 0.5 * cplx(nx, -ny));
}

}  // namespace steer

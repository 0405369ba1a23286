#pragma once

#include <cstdint>
#include <random>

#include "steer/qubit.hpp"

namespace steer {

// Deterministic random stream. Doubles are produced by explicit arithmetic on
// raw engine output, so a (seed, index) pair yields the same sequence on any
// platform and any thread. Parallel kernels derive one substream per work
// block and never share streams.
class RngStream {
public:
  explicit RngStream(std::uint64_t seed);

  // Stream for work block `index`, decorrelated from every other index.
  static RngStream substream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next_u64();
  double uniform();  // [0, 1)
  double uniform(double lo, double hi);
  double gaussian();  // standard normal, Box-Muller

private:
  std::mt19937_64 engine_;
};

// Haar-uniform pure qubit state.
PureState random_pure(RngStream& rng);

// Uniform over the Bloch ball: direction Haar, radius r = u^(1/3).
DensityMatrix random_density(RngStream& rng);

}  // namespace steer

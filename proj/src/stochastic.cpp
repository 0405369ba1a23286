#include "steer/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "steer/random.hpp"

namespace steer {

//============================================================================
// Trajectory sampling
//============================================================================

namespace {

constexpr std::uint64_t kShotBlock = 4096;

std::uint64_t trajectory_block(const std::array<EigenPair, 2>& eigen,
                               const std::vector<MeasurementBasis>& bases,
                               const TargetFrame& frame, std::uint64_t seed,
                               std::uint64_t block, std::uint64_t count) {
  RngStream rng = RngStream::substream(seed, block);
  std::uint64_t successes = 0;
  for (std::uint64_t shot = 0; shot < count; ++shot) {
    const PureState* state =
        rng.uniform() < eigen[0].value ? &eigen[0].state : &eigen[1].state;
    for (const MeasurementBasis& basis : bases) {
      const double q0 = std::norm(overlap(basis.s0, *state));
      state = rng.uniform() < q0 ? &basis.s0 : &basis.s1;
    }
    const double p_target = std::norm(overlap(frame.zeta(), *state));
    if (rng.uniform() < p_target) ++successes;
  }
  return successes;
}

TrajectoryEstimate simulate_impl(const DensityMatrix& rho0, const TargetFrame& frame,
                                 const MeasurementChain& chain, std::uint64_t shots,
                                 std::uint64_t seed, bool parallel) {
  if (shots < 1) {
    throw std::invalid_argument("simulate_trajectories requires shots >= 1");
  }
  const auto eigen = eigensystem(rho0);
  std::vector<MeasurementBasis> bases;
  bases.reserve(chain.size());
  for (const BasisAngles& step : chain.steps) {
    bases.push_back(step.realize(frame));
  }

  const std::uint64_t blocks = (shots + kShotBlock - 1) / kShotBlock;
  std::vector<std::uint64_t> partial(blocks, 0);

  if (parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b) {
      const std::uint64_t count =
          std::min(kShotBlock, shots - static_cast<std::uint64_t>(b) * kShotBlock);
      partial[b] = trajectory_block(eigen, bases, frame, seed, b, count);
    }
  } else {
    for (std::uint64_t b = 0; b < blocks; ++b) {
      const std::uint64_t count = std::min(kShotBlock, shots - b * kShotBlock);
      partial[b] = trajectory_block(eigen, bases, frame, seed, b, count);
    }
  }

  std::uint64_t successes = 0;
  for (std::uint64_t s : partial) successes += s;

  TrajectoryEstimate estimate;
  estimate.shots = shots;
  estimate.seed = seed;
  estimate.p_hat = static_cast<double>(successes) / static_cast<double>(shots);
  estimate.std_err = std::sqrt(estimate.p_hat * (1.0 - estimate.p_hat) /
                               static_cast<double>(shots));
  return estimate;
}

}  // namespace

TrajectoryEstimate simulate_trajectories(const DensityMatrix& rho0, const TargetFrame& frame,
                                         const MeasurementChain& chain, std::uint64_t shots,
                                         std::uint64_t seed) {
  return simulate_impl(rho0, frame, chain, shots, seed, true);
}

TrajectoryEstimate simulate_trajectories_serial(const DensityMatrix& rho0,
                                                const TargetFrame& frame,
                                                const MeasurementChain& chain,
                                                std::uint64_t shots, std::uint64_t seed) {
  return simulate_impl(rho0, frame, chain, shots, seed, false);
}

//============================================================================
// Polarizer cascade
//============================================================================

double cascade_flux(const PolarizerCascade& cascade) {
  double flux = 1.0;
  double previous = cascade.input_angle;
  for (const double angle : cascade.angles) {
    const double c = std::cos(angle - previous);
    flux *= c * c;
    previous = angle;
  }
  const double c = std::cos(cascade.target_angle - previous);
  flux *= c * c;
  return std::clamp(flux, 0.0, 1.0);
}

PolarizerCascade equal_spacing_cascade(int n) {
  if (n < 0) {
    throw std::invalid_argument("equal_spacing_cascade requires n >= 0");
  }
  PolarizerCascade cascade;
  cascade.input_angle = 0.5 * M_PI;
  cascade.target_angle = 0.0;
  cascade.angles.reserve(n);
  const double step = 0.5 * M_PI / static_cast<double>(n + 1);
  for (int k = 1; k <= n; ++k) {
    cascade.angles.push_back(0.5 * M_PI - static_cast<double>(k) * step);
  }
  return cascade;
}

MeasurementChain polarizer_chain(const PolarizerCascade& cascade) {
  // A polarizer at absolute angle theta passes the linear polarization
  // cos(theta)|zeta> + sin(theta)|zeta_perp> (target axis at 0), which is the
  // basis state with |<0|zeta>|^2 = cos^2(theta), i.e. alpha = 2 theta.
  MeasurementChain chain;
  chain.steps.reserve(cascade.angles.size());
  for (const double angle : cascade.angles) {
    chain.steps.push_back(BasisAngles{2.0 * (angle - cascade.target_angle), 0.0});
  }
  return chain;
}

DensityMatrix polarizer_input_state(const PolarizerCascade& cascade,
                                    const TargetFrame& frame) {
  const double theta = cascade.input_angle - cascade.target_angle;
  const MeasurementBasis basis = realize_basis(frame, 2.0 * theta, 0.0);
  return DensityMatrix::pure(basis.s0);
}

}  // namespace steer

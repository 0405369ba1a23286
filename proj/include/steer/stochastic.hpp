#pragma once

#include <cstdint>
#include <vector>

#include "steer/chain.hpp"
#include "steer/qubit.hpp"

namespace steer {

struct TrajectoryEstimate {
  double p_hat;
  double std_err;  // sqrt(p_hat (1 - p_hat) / shots)
  std::uint64_t shots;
  std::uint64_t seed;
};

// Single-shot realization of the chain: draws an eigenstate of the initial
// state, collapses through every intermediate measurement with Born-rule
// probabilities, and samples the final target measurement. Shots run in
// fixed blocks with one substream per block, so the estimate is identical
// for any thread count.
TrajectoryEstimate simulate_trajectories(const DensityMatrix& rho0, const TargetFrame& frame,
                                         const MeasurementChain& chain, std::uint64_t shots,
                                         std::uint64_t seed);

// One-thread reference with the identical block schedule; bit-equal to the
// parallel kernel.
TrajectoryEstimate simulate_trajectories_serial(const DensityMatrix& rho0,
                                                const TargetFrame& frame,
                                                const MeasurementChain& chain,
                                                std::uint64_t shots, std::uint64_t seed);

// Sequence of ideal linear polarizers. Orientations are absolute angles in
// radians; light enters polarized at input_angle and the last element is the
// target analyzer at target_angle.
struct PolarizerCascade {
  std::vector<double> angles;  // intermediate polarizers, in beam order
  double input_angle;
  double target_angle;
};

// Transmitted fraction: product of cos^2 of successive orientation
// differences. Only the transmitted branch survives each element.
double cascade_flux(const PolarizerCascade& cascade);

// n intermediate polarizers equally spaced between vertical (pi/2) and
// horizontal (0).
PolarizerCascade equal_spacing_cascade(int n);

// The measurement chain with the same geometry: one intermediate observable
// per polarizer, basis state |0_k> at the polarizer's orientation relative
// to the target axis. Unlike the cascade, the chain keeps both branches.
MeasurementChain polarizer_chain(const PolarizerCascade& cascade);

// Initial state of the polarizer experiment: linear polarization at
// input_angle, expressed in the target frame.
DensityMatrix polarizer_input_state(const PolarizerCascade& cascade,
                                    const TargetFrame& frame);

}  // namespace steer

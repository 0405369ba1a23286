#pragma once

#include <cstdint>
#include <optional>

#include "steer/qubit.hpp"

namespace steer {

// Everything the single-intermediate-measurement theory says about one
// initial state: the direct probability, the closed-form maximum, and the
// basis that attains it.
struct SingleStepReport {
  double p_direct;
  double p_one_step;  // success probability at `optimal`
  double p_max;
  BasisAngles optimal;
  std::optional<double> gamma;
  double r_coeff;
};

// Probability of projecting straight onto the target: <zeta|rho|zeta>.
double p_direct(const DensityMatrix& rho, const TargetFrame& frame);

// Success probability of one intermediate measurement followed by the target
// measurement: sum_i <i|rho|i> |<i|zeta>|^2.
double p_one_step(const DensityMatrix& rho, const TargetFrame& frame,
                  const MeasurementBasis& basis);

// The same probability in frame coordinates, with x = cos^2(alpha/2):
//   p = p_t - 2x(1-x)(p_t - p_p) + (2x - 1) sin(alpha) Re(e^{i beta} c).
double p_one_step_expanded(const FrameCoefficients& coeffs, const BasisAngles& angles);

// R = sqrt((1 - g^2)(2 p_t - 1)^2 + g^2).
double r_coefficient(double p_target, double gamma);

// Closed-form maximum over all intermediate bases: p_t / 2 + (1 + R) / 4.
double p_max_closed(double p_target, double gamma);

// Basis attaining the closed-form maximum:
//   |<0|zeta>|^2 = (1 - sqrt((1 + (2 p_t - 1) / R) / 2)) / 2   (branch <= 1/2)
//   beta = pi - arg(coherence), or 0 when the coherence vanishes.
// Degenerate cases: R < 1e-9 (rho = I/2) returns the unbiased basis
// {alpha = pi/2, beta = 0}; p_target ~ 0 reduces exactly to the same
// unbiased optimum. Throws std::invalid_argument when p_direct >= 1 - 1e-12
// (target already reached).
BasisAngles optimal_basis(const DensityMatrix& rho, const TargetFrame& frame);

// Optimal |<0|zeta>|^2 as a pure function of (p_target, gamma); the
// degenerate R -> 0 case returns the unbiased value 1/2. Well defined on the
// whole square [0,1]^2, including p_target = 1 where optimal_basis refuses.
double optimal_overlap(double p_target, double gamma);

// Pure initial state shortcut: optimal |<0|zeta>|^2 = (1 - m) / 2 for
// m = |<psi|zeta>|.
double pure_optimal_overlap(double m);

SingleStepReport single_step_report(const DensityMatrix& rho, const TargetFrame& frame);

struct MeanEstimate {
  double mean;
  double std_err;
  std::uint64_t samples;
};

// Monte Carlo mean of the closed-form maximum over Haar-random pure initial
// states. Deterministic for a given seed regardless of thread count: samples
// are drawn in fixed blocks with one substream per block and the block sums
// are combined in index order.
MeanEstimate haar_average_pmax(std::uint64_t samples, std::uint64_t seed);

// Reference implementation running the identical block schedule on one
// thread; bit-equal to the parallel kernel.
MeanEstimate haar_average_pmax_serial(std::uint64_t samples, std::uint64_t seed);

}  // namespace steer

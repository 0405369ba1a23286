#include "steer/single_step.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "steer/random.hpp"

namespace steer {

double p_direct(const DensityMatrix& rho, const TargetFrame& frame) {
  return expectation(rho, frame.zeta());
}

double p_one_step(const DensityMatrix& rho, const TargetFrame& frame,
                  const MeasurementBasis& basis) {
  const double q0 = expectation(rho, basis.s0);
  const double q1 = expectation(rho, basis.s1);
  const double x0 = std::norm(overlap(basis.s0, frame.zeta()));
  const double x1 = std::norm(overlap(basis.s1, frame.zeta()));
  return std::clamp(q0 * x0 + q1 * x1, 0.0, 1.0);
}

double p_one_step_expanded(const FrameCoefficients& coeffs, const BasisAngles& angles) {
  const double half = 0.5 * angles.alpha;
  const double x = std::cos(half) * std::cos(half);
  const double sin_alpha = std::sin(angles.alpha);
  const double re_rot = std::cos(angles.beta) * coeffs.coherence.real() -
                        std::sin(angles.beta) * coeffs.coherence.imag();
  return coeffs.p_target - 2.0 * x * (1.0 - x) * (coeffs.p_target - coeffs.p_perp) +
         (2.0 * x - 1.0) * sin_alpha * re_rot;
}

double r_coefficient(double p_target, double gamma) {
  const double d = 2.0 * p_target - 1.0;
  const double g2 = gamma * gamma;
  return std::sqrt((1.0 - g2) * d * d + g2);
}

double p_max_closed(double p_target, double gamma) {
  const double p = 0.5 * p_target + 0.25 * (1.0 + r_coefficient(p_target, gamma));
  return std::clamp(p, 0.0, 1.0);
}

namespace {
constexpr double kDegenerateR = 1e-9;
}  // namespace

double optimal_overlap(double p_target, double gamma) {
  const double r = r_coefficient(p_target, gamma);
  if (r < kDegenerateR) return 0.5;
  const double inner = std::clamp(0.5 * (1.0 + (2.0 * p_target - 1.0) / r), 0.0, 1.0);
  return std::clamp(0.5 * (1.0 - std::sqrt(inner)), 0.0, 1.0);
}

namespace {

double wrap_two_pi(double x) {
  const double two_pi = 2.0 * M_PI;
  x = std::fmod(x, two_pi);
  if (x < 0.0) x += two_pi;
  return x;
}

BasisAngles optimal_from_coefficients(const FrameCoefficients& fc,
                                      std::optional<double> gamma) {
  // p_target ~ 0 (gamma undefined): p reduces to 2x(1-x), maximized by the
  // unbiased basis with value 1/2.
  if (!gamma.has_value()) {
    return BasisAngles{0.5 * M_PI, 0.0};
  }
  if (r_coefficient(fc.p_target, *gamma) < kDegenerateR) {
    // rho = I/2: every basis gives exactly 1/2.
    return BasisAngles{0.5 * M_PI, 0.0};
  }
  const double x = optimal_overlap(fc.p_target, *gamma);
  const double alpha = 2.0 * std::acos(std::sqrt(x));
  const double beta = std::abs(fc.coherence) <= 1e-12
                          ? 0.0
                          : wrap_two_pi(M_PI - std::arg(fc.coherence));
  return BasisAngles{alpha, beta};
}

}  // namespace

BasisAngles optimal_basis(const DensityMatrix& rho, const TargetFrame& frame) {
  const FrameCoefficients fc = frame_coefficients(rho, frame);
  if (fc.p_target >= 1.0 - 1e-12) {
    throw std::invalid_argument("target already reached: <zeta|rho|zeta> >= 1 - 1e-12");
  }
  return optimal_from_coefficients(fc, gamma_of(rho, frame));
}

double pure_optimal_overlap(double m) { return 0.5 * (1.0 - m); }

SingleStepReport single_step_report(const DensityMatrix& rho, const TargetFrame& frame) {
  const FrameCoefficients fc = frame_coefficients(rho, frame);
  SingleStepReport report;
  report.p_direct = fc.p_target;
  report.gamma = gamma_of(rho, frame);
  // The undefined-gamma case only survives the construction above when
  // p_target ~ 0, where the gamma -> 0 limit reproduces the exact reduction
  // p_max = 1/2.
  const double effective_gamma = report.gamma.value_or(0.0);
  report.r_coeff = r_coefficient(fc.p_target, effective_gamma);
  report.p_max = p_max_closed(fc.p_target, effective_gamma);
  report.optimal = optimal_from_coefficients(fc, report.gamma);
  report.p_one_step = p_one_step(rho, frame, report.optimal.realize(frame));
  return report;
}

//============================================================================
// Haar averaging kernel
//============================================================================

namespace {

constexpr std::uint64_t kBlockSize = 4096;

struct BlockSums {
  double sum = 0.0;
  double sum_sq = 0.0;
};

// All samples of block `b` come from substream (seed, b), so the schedule is
// fixed no matter how blocks are distributed over threads.
BlockSums haar_block(std::uint64_t seed, std::uint64_t block, std::uint64_t count) {
  RngStream rng = RngStream::substream(seed, block);
  BlockSums sums;
  for (std::uint64_t i = 0; i < count; ++i) {
    const PureState psi = random_pure(rng);
    const double p_t = std::norm(psi.a0());  // target fixed at |0>; Haar-invariant
    const double p = p_max_closed(p_t, 1.0);
    sums.sum += p;
    sums.sum_sq += p * p;
  }
  return sums;
}

MeanEstimate haar_average_impl(std::uint64_t samples, std::uint64_t seed, bool parallel) {
  if (samples < 1) {
    throw std::invalid_argument("haar_average_pmax requires samples >= 1");
  }
  const std::uint64_t blocks = (samples + kBlockSize - 1) / kBlockSize;
  std::vector<BlockSums> partial(blocks);

  if (parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b) {
      const std::uint64_t count =
          std::min(kBlockSize, samples - static_cast<std::uint64_t>(b) * kBlockSize);
      partial[b] = haar_block(seed, b, count);
    }
  } else {
    for (std::uint64_t b = 0; b < blocks; ++b) {
      const std::uint64_t count = std::min(kBlockSize, samples - b * kBlockSize);
      partial[b] = haar_block(seed, b, count);
    }
  }

  BlockSums total;
  for (const BlockSums& p : partial) {
    total.sum += p.sum;
    total.sum_sq += p.sum_sq;
  }
  const double n = static_cast<double>(samples);
  const double mean = total.sum / n;
  const double var = std::max(0.0, total.sum_sq / n - mean * mean);
  const double std_err = samples > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
  return MeanEstimate{mean, std_err, samples};
}

}  // namespace

MeanEstimate haar_average_pmax(std::uint64_t samples, std::uint64_t seed) {
  return haar_average_impl(samples, seed, true);
}

MeanEstimate haar_average_pmax_serial(std::uint64_t samples, std::uint64_t seed) {
  return haar_average_impl(samples, seed, false);
}

}  // namespace steer

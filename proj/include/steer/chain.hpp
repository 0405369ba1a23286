#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "steer/qubit.hpp"

namespace steer {

// Ordered intermediate observables, applied before the final target
// measurement. Angles are always relative to the fixed target frame.
struct MeasurementChain {
  std::vector<BasisAngles> steps;

  std::size_t size() const { return steps.size(); }
};

struct ChainResult {
  double p_success;                             // success after the full chain
  std::vector<DensityMatrix> intermediate_states;  // rho_1 ... rho_N
  std::vector<double> step_probs;               // success if stopped after step k
  std::vector<double> hs_distances;             // distance of each rho_k to the target projector
};

// Sufficiency flags for a gain when one more observable is inserted after
// step N. `branch_0_dominant` orders the populations of the step-N basis;
// `transfer_improves` is the two-step-beats-direct inequality evaluated on
// the dominant branch. The gain is guaranteed non-negative when a strictly
// dominant branch also satisfies its transfer inequality.
struct GainCheck {
  bool branch_0_dominant;
  bool transfer_improves;
  bool guaranteed_positive;
};

struct OptimizerConfig {
  int random_starts = 32;
  int max_evals_per_start = 2000;
  double convergence_tol = 1e-7;
  std::uint64_t seed = 0;
};

struct ChainOptimum {
  MeasurementChain chain;
  double value;
};

// Applies the dephasing recursion step by step and reads out the target
// population of the final state. An empty chain returns the direct
// probability.
ChainResult run_chain(const DensityMatrix& rho0, const TargetFrame& frame,
                      const MeasurementChain& chain);

// Success probability evaluated without building states: frame-coordinate
// recursion over raw (alpha, beta) pairs. This is the optimizer's hot path;
// it agrees with run_chain to 1e-12.
double evaluate_chain_raw(const FrameCoefficients& rho0, std::span<const double> angles);

// Independent oracle: enumerates all 2^N collapse histories, multiplying
// Born-rule branch probabilities. Throws std::invalid_argument for chains
// longer than 20 steps.
double chain_bruteforce(const DensityMatrix& rho0, const TargetFrame& frame,
                        const MeasurementChain& chain);

// Success gain from inserting a measurement of `basis_next` after `basis_n`,
// where rho_prev is the state entering the basis_n measurement:
//   sum_i <i|rho_prev|i> (sum_j |<i|j>|^2 |<j|zeta>|^2 - |<i|zeta>|^2).
double delta_gain(const DensityMatrix& rho_prev, const TargetFrame& frame,
                  const MeasurementBasis& basis_n, const MeasurementBasis& basis_next);

GainCheck check_gain_conditions(const DensityMatrix& rho_prev, const TargetFrame& frame,
                                const MeasurementBasis& basis_n,
                                const MeasurementBasis& basis_next);

// Chain built by applying the single-step optimum to the current dephased
// state, step after step. Total for every input: once the target population
// reaches 1 - 1e-12 the remaining steps measure the frame itself (the
// x -> 0 limit of the single-step optimum), which leaves the state fixed.
MeasurementChain greedy_chain(const DensityMatrix& rho0, const TargetFrame& frame,
                              int n_steps);

// Multi-start Nelder-Mead maximization of the chain success over all 2N
// angles. Start 0 is the greedy chain; the remaining starts are random. The
// winner is chosen by (value, then start index), so the result does not
// depend on thread count. Throws std::invalid_argument unless
// 1 <= n_steps <= 8.
ChainOptimum optimize_chain(const DensityMatrix& rho0, const TargetFrame& frame,
                            int n_steps, const OptimizerConfig& config = {});

// Same search on one thread; bit-equal to the parallel kernel.
ChainOptimum optimize_chain_serial(const DensityMatrix& rho0, const TargetFrame& frame,
                                   int n_steps, const OptimizerConfig& config = {});

}  // namespace steer

#include "steer/chain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "steer/nelder_mead.hpp"
#include "steer/random.hpp"
#include "steer/single_step.hpp"

namespace steer {

//============================================================================
// Exact evaluation
//============================================================================

ChainResult run_chain(const DensityMatrix& rho0, const TargetFrame& frame,
                      const MeasurementChain& chain) {
  ChainResult result;
  result.intermediate_states.reserve(chain.size());
  result.step_probs.reserve(chain.size());
  result.hs_distances.reserve(chain.size());

  const DensityMatrix target_projector = DensityMatrix::pure(frame.zeta());
  DensityMatrix rho = rho0;
  for (const BasisAngles& step : chain.steps) {
    rho = dephase(rho, step.realize(frame));
    result.intermediate_states.push_back(rho);
    result.step_probs.push_back(expectation(rho, frame.zeta()));
    result.hs_distances.push_back(hs_distance(rho, target_projector));
  }
  result.p_success = result.step_probs.empty() ? expectation(rho0, frame.zeta())
                                               : result.step_probs.back();
  return result;
}

double evaluate_chain_raw(const FrameCoefficients& rho0, std::span<const double> angles) {
  double p_t = rho0.p_target;
  double p_p = rho0.p_perp;
  cplx c = rho0.coherence;
  for (std::size_t k = 0; k + 1 < angles.size(); k += 2) {
    const double u = std::cos(0.5 * angles[k]);
    const double s = std::sin(0.5 * angles[k]);
    const cplx phase(std::cos(angles[k + 1]), std::sin(angles[k + 1]));
    // Populations of the step basis, then the dephased frame components.
    const double cross = 2.0 * u * s * std::real(c * phase);
    const double q0 = u * u * p_t + s * s * p_p + cross;
    const double q1 = s * s * p_t + u * u * p_p - cross;
    p_t = q0 * u * u + q1 * s * s;
    p_p = q0 * s * s + q1 * u * u;
    c = (q0 - q1) * u * s * std::conj(phase);
  }
  return std::clamp(p_t, 0.0, 1.0);
}

namespace {

double bruteforce_paths(const PureState& state, const TargetFrame& frame,
                        const std::vector<MeasurementBasis>& bases, std::size_t depth) {
  if (depth == bases.size()) {
    return std::norm(overlap(state, frame.zeta()));
  }
  const MeasurementBasis& basis = bases[depth];
  const double w0 = std::norm(overlap(basis.s0, state));
  const double w1 = std::norm(overlap(basis.s1, state));
  double total = 0.0;
  if (w0 > 0.0) total += w0 * bruteforce_paths(basis.s0, frame, bases, depth + 1);
  if (w1 > 0.0) total += w1 * bruteforce_paths(basis.s1, frame, bases, depth + 1);
  return total;
}

}  // namespace

double chain_bruteforce(const DensityMatrix& rho0, const TargetFrame& frame,
                        const MeasurementChain& chain) {
  if (chain.size() > 20) {
    throw std::invalid_argument("chain_bruteforce: outcome tree too large (N > 20)");
  }
  std::vector<MeasurementBasis> bases;
  bases.reserve(chain.size());
  for (const BasisAngles& step : chain.steps) {
    bases.push_back(step.realize(frame));
  }
  // Mix over the eigenstates of the initial state, then over every outcome
  // sequence of the chain.
  const auto eigen = eigensystem(rho0);
  double total = 0.0;
  for (const EigenPair& pair : eigen) {
    if (pair.value > 0.0) {
      total += pair.value * bruteforce_paths(pair.state, frame, bases, 0);
    }
  }
  return std::clamp(total, 0.0, 1.0);
}

//============================================================================
// Gain of one extra observable
//============================================================================

namespace {

struct BranchTerms {
  double weight;    // <i|rho_prev|i>
  double direct;    // |<i|zeta>|^2
  double transfer;  // sum_j |<i|j>|^2 |<j|zeta>|^2
};

std::array<BranchTerms, 2> branch_terms(const DensityMatrix& rho_prev,
                                        const TargetFrame& frame,
                                        const MeasurementBasis& basis_n,
                                        const MeasurementBasis& basis_next) {
  const double z0 = std::norm(overlap(basis_next.s0, frame.zeta()));
  const double z1 = std::norm(overlap(basis_next.s1, frame.zeta()));
  std::array<BranchTerms, 2> terms;
  const PureState* states[2] = {&basis_n.s0, &basis_n.s1};
  for (int i = 0; i < 2; ++i) {
    const PureState& s = *states[i];
    terms[i].weight = expectation(rho_prev, s);
    terms[i].direct = std::norm(overlap(s, frame.zeta()));
    terms[i].transfer = std::norm(overlap(s, basis_next.s0)) * z0 +
                        std::norm(overlap(s, basis_next.s1)) * z1;
  }
  return terms;
}

}  // namespace

double delta_gain(const DensityMatrix& rho_prev, const TargetFrame& frame,
                  const MeasurementBasis& basis_n, const MeasurementBasis& basis_next) {
  const auto terms = branch_terms(rho_prev, frame, basis_n, basis_next);
  double delta = 0.0;
  for (const BranchTerms& t : terms) {
    delta += t.weight * (t.transfer - t.direct);
  }
  return delta;
}

GainCheck check_gain_conditions(const DensityMatrix& rho_prev, const TargetFrame& frame,
                                const MeasurementBasis& basis_n,
                                const MeasurementBasis& basis_next) {
  const auto terms = branch_terms(rho_prev, frame, basis_n, basis_next);
  const bool improves_0 = terms[0].transfer > terms[0].direct;
  const bool improves_1 = terms[1].transfer > terms[1].direct;

  GainCheck check;
  check.branch_0_dominant = terms[0].weight > terms[1].weight;
  check.transfer_improves = check.branch_0_dominant ? improves_0 : improves_1;
  check.guaranteed_positive = (terms[0].weight > terms[1].weight && improves_0) ||
                              (terms[1].weight > terms[0].weight && improves_1);
  return check;
}

//============================================================================
// Chain construction
//============================================================================

MeasurementChain greedy_chain(const DensityMatrix& rho0, const TargetFrame& frame,
                              int n_steps) {
  if (n_steps < 1) {
    throw std::invalid_argument("greedy_chain requires n_steps >= 1");
  }
  MeasurementChain chain;
  chain.steps.reserve(n_steps);
  DensityMatrix rho = rho0;
  for (int k = 0; k < n_steps; ++k) {
    const double p_t = expectation(rho, frame.zeta());
    // Once the target is reached the frame itself is measured, which keeps
    // the state fixed (and is the x -> 0 limit of the single-step optimum).
    const BasisAngles step = (p_t >= 1.0 - 1e-12) ? BasisAngles{M_PI, 0.0}
                                                  : optimal_basis(rho, frame);
    chain.steps.push_back(step);
    rho = dephase(rho, step.realize(frame));
  }
  return chain;
}

//============================================================================
// Global optimization
//============================================================================

namespace {

std::vector<double> flatten(const MeasurementChain& chain) {
  std::vector<double> params;
  params.reserve(2 * chain.size());
  for (const BasisAngles& step : chain.steps) {
    params.push_back(step.alpha);
    params.push_back(step.beta);
  }
  return params;
}

MeasurementChain canonicalize(const TargetFrame& frame, std::span<const double> params) {
  MeasurementChain chain;
  chain.steps.reserve(params.size() / 2);
  for (std::size_t k = 0; k + 1 < params.size(); k += 2) {
    const MeasurementBasis basis = realize_basis(frame, params[k], params[k + 1]);
    chain.steps.push_back(basis_angles_of(frame, basis.s0));
  }
  return chain;
}

struct StartResult {
  std::vector<double> point;
  double value;
};

ChainOptimum optimize_impl(const DensityMatrix& rho0, const TargetFrame& frame,
                           int n_steps, const OptimizerConfig& config, bool parallel) {
  if (n_steps < 1 || n_steps > 8) {
    throw std::invalid_argument("optimize_chain supports 1 <= n_steps <= 8");
  }
  const FrameCoefficients fc0 = frame_coefficients(rho0, frame);
  const auto objective = [&fc0](std::span<const double> params) {
    return -evaluate_chain_raw(fc0, params);
  };

  const int total_starts = config.random_starts + 1;
  std::vector<std::vector<double>> starts(total_starts);
  starts[0] = flatten(greedy_chain(rho0, frame, n_steps));
  for (int s = 1; s < total_starts; ++s) {
    RngStream rng = RngStream::substream(config.seed, static_cast<std::uint64_t>(s));
    std::vector<double> params(2 * n_steps);
    for (int k = 0; k < n_steps; ++k) {
      params[2 * k] = rng.uniform(0.0, M_PI);
      params[2 * k + 1] = rng.uniform(0.0, 2.0 * M_PI);
    }
    starts[s] = std::move(params);
  }

  NelderMeadOptions nm;
  nm.max_evals = config.max_evals_per_start;
  nm.diameter_tol = config.convergence_tol;

  std::vector<StartResult> results(total_starts);
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int s = 0; s < total_starts; ++s) {
      NelderMeadResult r = nelder_mead_minimize(objective, starts[s], nm);
      results[s] = StartResult{std::move(r.point), -r.value};
    }
  } else {
    for (int s = 0; s < total_starts; ++s) {
      NelderMeadResult r = nelder_mead_minimize(objective, starts[s], nm);
      results[s] = StartResult{std::move(r.point), -r.value};
    }
  }

  // Winner by (value, then start index): deterministic for any thread count.
  int winner = 0;
  for (int s = 1; s < total_starts; ++s) {
    if (results[s].value > results[winner].value) winner = s;
  }

  ChainOptimum best;
  best.chain = canonicalize(frame, results[winner].point);
  best.value = run_chain(rho0, frame, best.chain).p_success;
  return best;
}

}  // namespace

ChainOptimum optimize_chain(const DensityMatrix& rho0, const TargetFrame& frame,
                            int n_steps, const OptimizerConfig& config) {
  return optimize_impl(rho0, frame, n_steps, config, true);
}

ChainOptimum optimize_chain_serial(const DensityMatrix& rho0, const TargetFrame& frame,
                                   int n_steps, const OptimizerConfig& config) {
  return optimize_impl(rho0, frame, n_steps, config, false);
}

}  // namespace steer

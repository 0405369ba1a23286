#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "steer/chain.hpp"
#include "steer/qubit.hpp"
#include "steer/stochastic.hpp"

namespace steer::cli {

using json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "1.0.0";

// Rectangular numeric table; the CSV / JSON writers handle formatting.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// Fixed 9-significant-digit formatting used for every number the tool emits.
std::string format_number(double v);

// The double nearest to format_number(v); JSON reports carry these so the
// serialized text is stable across runs.
double round_sig(double v);

// Comma-separated, header row, LF line endings.
std::string to_csv(const Table& table);

// Reproducibility block written next to every CSV and embedded in every JSON
// report. `parameters` keeps insertion order.
json make_manifest(const std::string& command,
                   const std::vector<std::pair<std::string, std::string>>& parameters,
                   std::uint64_t seed);

//============================================================================
// Figure data builders
//============================================================================
// Each builder re-derives its own analytic cross-checks (column maxima
// against the closed form, range bounds, expanded-vs-matrix route agreement)
// and throws std::logic_error when a check fails, so a figure file is only
// ever written after validating itself.

// Success probability of one intermediate measurement vs |<0_1|zeta>|^2, one
// curve per initial p_target (phase branch chosen optimally per abscissa),
// plus the flat direct-probability reference lines.
// Columns: overlap_sq, p1s_pt{v}..., pd_pt{v}...
Table fig1_table(const std::vector<double>& p_targets, double gamma, double grid_step);

// Closed-form maximum and the overlap attaining it vs p_target, one pair of
// columns per gamma. Columns: p_target, then per gamma: pmax_g{v}, overlap_g{v}.
Table fig2_table(const std::vector<double>& gammas, double grid_step);

// Multi-step optimized vs greedy success probability on a p_target grid.
// Columns: p_target, then per gamma and per N: opt_g{v}_n{N}, greedy_g{v}_n{N}.
// n_values are sorted and deduplicated; each (row, gamma, N) optimizer call
// derives its own substream of config.seed, so thread count never matters.
Table fig3_table(std::vector<int> n_values, const std::vector<double>& gammas,
                 double p_grid_step, const OptimizerConfig& config);

//============================================================================
// Run reports (single JSON object, fixed key order, manifest first)
//============================================================================

json chain_report(const PureState& zeta, const DensityMatrix& rho0,
                  const MeasurementChain& chain, const std::string& mode, json manifest);

json optimize_report(const PureState& zeta, const DensityMatrix& rho0, int n_steps,
                     const OptimizerConfig& config, json manifest);

json mc_report(const PureState& zeta, const DensityMatrix& rho0,
               const MeasurementChain& chain, const std::string& mode, std::uint64_t shots,
               std::uint64_t seed, json manifest);

json polarizer_report(const PolarizerCascade& cascade, bool equal_spacing, json manifest);

// Full command-line entry point. Exit codes: 0 success, 2 invalid input,
// 3 internal invariant violation.
int run(int argc, const char* const* argv);

}  // namespace steer::cli

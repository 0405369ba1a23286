#include "steer/cli.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#ifdef _OPENMP
#include <omp.h>
#endif

#include "steer/single_step.hpp"
#include "steer/stochastic.hpp"

namespace steer::cli {

namespace {

// Internal cross-check failure: figure data is never written when one of the
// analytic validations does not hold.
void check(bool ok, const std::string& what) {
  if (!ok) throw std::logic_error(what);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

void require_finite(const std::vector<double>& values, const std::string& name) {
  for (double v : values) require(std::isfinite(v), name + " must be finite");
}

std::vector<double> grid_points(double lo, double hi, double step) {
  std::vector<double> grid;
  for (std::size_t k = 0;; ++k) {
    const double v = lo + static_cast<double>(k) * step;
    if (v > hi + 1e-12) break;
    grid.push_back(std::min(v, hi));
  }
  if (grid.empty() || grid.back() < hi - 1e-12) grid.push_back(hi);
  return grid;
}

std::string join_numbers(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_number(values[i]);
  }
  return out;
}

std::string join_ints(const std::vector<int>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

std::string iso_timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

FrameCoefficients frame_coeffs_from(double p_target, double gamma, double phase) {
  require(p_target >= 0.0 && p_target <= 1.0, "p_target must lie in [0, 1]");
  require(gamma >= 0.0 && gamma <= 1.0, "gamma must lie in [0, 1]");
  const double p_perp = 1.0 - p_target;
  const cplx coh = std::polar(gamma * std::sqrt(p_target * p_perp), phase);
  return FrameCoefficients{p_target, p_perp, coh};
}

// Success probability at overlap x with the phase branch chosen optimally:
// the coherence term carries sign (2x - 1), so the best phase flips at 1/2.
double curve_value(const FrameCoefficients& fc, double x) {
  x = std::clamp(x, 0.0, 1.0);
  const double alpha = 2.0 * std::acos(std::sqrt(x));
  double beta = 0.0;
  if (std::abs(fc.coherence) > 0.0) {
    const double arg = std::arg(fc.coherence);
    beta = (x >= 0.5) ? -arg : M_PI - arg;
    beta = std::fmod(beta + 4.0 * M_PI, 2.0 * M_PI);
  }
  return p_one_step_expanded(fc, BasisAngles{alpha, beta});
}

double curve_beta(const FrameCoefficients& fc, double x) {
  if (std::abs(fc.coherence) <= 0.0) return 0.0;
  const double arg = std::arg(fc.coherence);
  const double beta = (x >= 0.5) ? -arg : M_PI - arg;
  return std::fmod(beta + 4.0 * M_PI, 2.0 * M_PI);
}

}  // namespace

//============================================================================
// Formatting and serialization
//============================================================================

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

double round_sig(double v) { return std::strtod(format_number(v).c_str(), nullptr); }

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  for (const std::vector<double>& row : table.rows) {
    check(row.size() == table.columns.size(), "table row width does not match header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_number(row[i]);
    }
    out += '\n';
  }
  return out;
}

json make_manifest(const std::string& command,
                   const std::vector<std::pair<std::string, std::string>>& parameters,
                   std::uint64_t seed) {
  json manifest;
  manifest["command"] = command;
  json params = json::object();
  for (const auto& [key, value] : parameters) params[key] = value;
  manifest["parameters"] = params;
  manifest["seed"] = seed;
  manifest["tool_version"] = kToolVersion;
  manifest["timestamp"] = iso_timestamp_utc();
  return manifest;
}

//============================================================================
// Figure builders
//============================================================================

Table fig1_table(const std::vector<double>& p_targets, double gamma, double grid_step) {
  require(!p_targets.empty(), "need at least one p_target");
  require_finite(p_targets, "p_targets");
  require(grid_step > 0.0 && grid_step <= 0.5, "grid_step must lie in (0, 0.5]");

  const TargetFrame frame{PureState{1.0, 0.0}};
  const std::vector<double> xs = grid_points(0.0, 1.0, grid_step);

  Table t;
  t.columns.push_back("overlap_sq");
  for (double p : p_targets) t.columns.push_back("p1s_pt" + format_number(p));
  for (double p : p_targets) t.columns.push_back("pd_pt" + format_number(p));

  std::vector<FrameCoefficients> coeffs;
  std::vector<DensityMatrix> states;
  for (double p : p_targets) {
    coeffs.push_back(frame_coeffs_from(p, gamma, 0.0));
    states.push_back(from_frame(frame, coeffs.back()));
  }

  for (double x : xs) {
    std::vector<double> row;
    row.push_back(x);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      const double p_exp = curve_value(coeffs[i], x);
      // Same point through the matrix route.
      const double alpha = 2.0 * std::acos(std::sqrt(std::clamp(x, 0.0, 1.0)));
      const MeasurementBasis basis = realize_basis(frame, alpha, curve_beta(coeffs[i], x));
      const double p_mat = p_one_step(states[i], frame, basis);
      check(std::abs(p_exp - p_mat) <= 1e-12,
            "fig1: expanded and matrix routes disagree");
      check(p_exp >= -1e-12 && p_exp <= 1.0 + 1e-12, "fig1: probability outside [0, 1]");
      const double pmax = p_max_closed(coeffs[i].p_target, gamma);
      check(p_exp <= pmax + 1e-9, "fig1: curve exceeds the closed-form maximum");
      row.push_back(p_exp);
    }
    for (const DensityMatrix& rho : states) {
      row.push_back(expectation(rho, frame.zeta()));
    }
    t.rows.push_back(std::move(row));
  }

  // The curve evaluated at the analytic argmax must reproduce the closed form.
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const double p = coeffs[i].p_target;
    const double xstar = optimal_overlap(p, gamma);
    check(std::abs(curve_value(coeffs[i], xstar) - p_max_closed(p, gamma)) <= 1e-9,
          "fig1: curve maximum disagrees with the closed form");
    // Direct column is flat at p_target.
    check(std::abs(expectation(states[i], frame.zeta()) - p) <= 1e-12,
          "fig1: direct probability disagrees with p_target");
  }
  return t;
}

Table fig2_table(const std::vector<double>& gammas, double grid_step) {
  require(!gammas.empty(), "need at least one gamma");
  require_finite(gammas, "gammas");
  require(grid_step > 0.0 && grid_step <= 0.5, "grid_step must lie in (0, 0.5]");
  for (double g : gammas) require(g >= 0.0 && g <= 1.0, "gamma must lie in [0, 1]");

  const TargetFrame frame{PureState{1.0, 0.0}};
  const std::vector<double> ps = grid_points(0.0, 1.0, grid_step);

  Table t;
  t.columns.push_back("p_target");
  for (double g : gammas) {
    t.columns.push_back("pmax_g" + format_number(g));
    t.columns.push_back("overlap_g" + format_number(g));
  }

  for (double p : ps) {
    std::vector<double> row;
    row.push_back(p);
    for (double g : gammas) {
      const double pmax = p_max_closed(p, g);
      const double x = optimal_overlap(p, g);
      check(pmax >= p - 1e-12 && pmax <= 1.0 + 1e-12, "fig2: p_max outside [p_target, 1]");
      check(x >= -1e-12 && x <= 0.5 + 1e-12, "fig2: optimal overlap outside [0, 1/2]");
      if (g == 1.0) {
        check(std::abs(pmax - (0.5 * p + 0.5)) <= 1e-12,
              "fig2: gamma = 1 column is not the line p/2 + 1/2");
      }
      if (g == 0.0) {
        check(std::abs(pmax - std::max(p, 0.5)) <= 1e-12,
              "fig2: gamma = 0 column is not max(p, 1/2)");
        if (p < 0.5 - 1e-9) {
          check(std::abs(x - 0.5) <= 1e-12, "fig2: gamma = 0 overlap is not 1/2 below p = 1/2");
        }
      }
      // Realize the basis on the actual state and confirm it attains pmax.
      if (p <= 1.0 - 1e-9) {
        const DensityMatrix rho = from_frame(frame, frame_coeffs_from(p, g, 0.0));
        const double attained = p_one_step(rho, frame, optimal_basis(rho, frame).realize(frame));
        check(std::abs(attained - pmax) <= 1e-9, "fig2: optimal basis does not attain p_max");
      }
      row.push_back(pmax);
      row.push_back(x);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table fig3_table(std::vector<int> n_values, const std::vector<double>& gammas,
                 double p_grid_step, const OptimizerConfig& config) {
  std::sort(n_values.begin(), n_values.end());
  n_values.erase(std::unique(n_values.begin(), n_values.end()), n_values.end());
  require(!n_values.empty(), "need at least one N");
  require(n_values.front() >= 1, "N must be at least 1");
  require(!gammas.empty(), "need at least one gamma");
  require_finite(gammas, "gammas");
  for (double g : gammas) require(g >= 0.0 && g <= 1.0, "gamma must lie in [0, 1]");
  require(p_grid_step > 0.0 && p_grid_step <= 0.5, "p_grid_step must lie in (0, 0.5]");

  const TargetFrame frame{PureState{1.0, 0.0}};
  const std::vector<double> ps = grid_points(0.0, 1.0, p_grid_step);

  Table t;
  t.columns.push_back("p_target");
  for (double g : gammas) {
    for (int n : n_values) {
      t.columns.push_back("opt_g" + format_number(g) + "_n" + std::to_string(n));
      t.columns.push_back("greedy_g" + format_number(g) + "_n" + std::to_string(n));
    }
  }

  std::uint64_t cell = 0;
  for (double p : ps) {
    std::vector<double> row;
    row.push_back(p);
    for (double g : gammas) {
      const DensityMatrix rho = from_frame(frame, frame_coeffs_from(p, g, 0.0));
      double previous_opt = 0.0;
      bool have_previous = false;
      for (int n : n_values) {
        OptimizerConfig cell_config = config;
        cell_config.seed = config.seed + cell;
        ++cell;
        const ChainOptimum best = optimize_chain(rho, frame, n, cell_config);
        const double greedy =
            run_chain(rho, frame, greedy_chain(rho, frame, n)).p_success;

        check(best.value >= -1e-12 && best.value <= 1.0 + 1e-9,
              "fig3: optimized value outside [0, 1]");
        check(best.value >= greedy - 1e-9, "fig3: optimizer fell below the greedy chain");
        check(best.value >= p - 1e-9, "fig3: optimizer fell below the direct probability");
        if (n == 1) {
          check(std::abs(best.value - p_max_closed(p, g)) <= 1e-4,
                "fig3: N = 1 column disagrees with the closed form");
        }
        if (g == 0.0 && p >= 0.5) {
          check(std::abs(best.value - p) <= 1e-4,
                "fig3: gamma = 0 above p = 1/2 must stay at the direct probability");
        }
        if (have_previous) {
          check(best.value >= previous_opt - 1e-6, "fig3: optimized value decreased with N");
        }
        previous_opt = best.value;
        have_previous = true;
        row.push_back(best.value);
        row.push_back(greedy);
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

//============================================================================
// Run reports
//============================================================================

namespace {

double checked_prob(double p, const std::string& what) {
  check(p >= -1e-12 && p <= 1.0 + 1e-12, what + " outside [0, 1]");
  return round_sig(std::clamp(p, 0.0, 1.0));
}

json reals_json(const std::vector<double>& values) {
  json arr = json::array();
  for (double v : values) arr.push_back(round_sig(v));
  return arr;
}

json zeta_json(const PureState& z) {
  return json::array({round_sig(z.a0().real()), round_sig(z.a0().imag()),
                      round_sig(z.a1().real()), round_sig(z.a1().imag())});
}

json state_json(const DensityMatrix& rho, const TargetFrame& frame) {
  const FrameCoefficients fc = frame_coefficients(rho, frame);
  const std::optional<double> g = gamma_of(rho, frame);
  json s;
  s["r00"] = round_sig(rho.r00());
  s["r01_re"] = round_sig(rho.r01().real());
  s["r01_im"] = round_sig(rho.r01().imag());
  s["r11"] = round_sig(rho.r11());
  s["p_target"] = round_sig(fc.p_target);
  s["p_perp"] = round_sig(fc.p_perp);
  s["coherence_re"] = round_sig(fc.coherence.real());
  s["coherence_im"] = round_sig(fc.coherence.imag());
  if (g.has_value()) {
    s["gamma"] = round_sig(*g);
  } else {
    s["gamma"] = nullptr;
  }
  return s;
}

json angles_json(const MeasurementChain& chain) {
  json arr = json::array();
  for (const BasisAngles& step : chain.steps) {
    arr.push_back(json::array({round_sig(step.alpha), round_sig(step.beta)}));
  }
  return arr;
}

json chain_json(const MeasurementChain& chain, const std::string& mode) {
  json c;
  c["mode"] = mode;
  c["n_steps"] = chain.size();
  c["angles"] = angles_json(chain);
  return c;
}

}  // namespace

json chain_report(const PureState& zeta, const DensityMatrix& rho0,
                  const MeasurementChain& chain, const std::string& mode, json manifest) {
  const TargetFrame frame{zeta};
  const ChainResult res = run_chain(rho0, frame, chain);

  json gain_checks = json::array();
  for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
    const DensityMatrix& prev = (k == 0) ? rho0 : res.intermediate_states[k - 1];
    const GainCheck gc = check_gain_conditions(prev, frame, chain.steps[k].realize(frame),
                                               chain.steps[k + 1].realize(frame));
    json item;
    item["branch_0_dominant"] = gc.branch_0_dominant;
    item["transfer_improves"] = gc.transfer_improves;
    item["guaranteed_positive"] = gc.guaranteed_positive;
    gain_checks.push_back(item);
  }

  json result;
  result["p_direct"] = checked_prob(p_direct(rho0, frame), "p_direct");
  result["p_success"] = checked_prob(res.p_success, "p_success");
  json steps = json::array();
  for (double v : res.step_probs) steps.push_back(checked_prob(v, "step probability"));
  result["step_probs"] = steps;
  result["hs_distances"] = reals_json(res.hs_distances);
  result["gain_checks"] = gain_checks;

  json doc;
  doc["manifest"] = std::move(manifest);
  doc["target"] = json{{"zeta", zeta_json(zeta)}};
  doc["initial_state"] = state_json(rho0, frame);
  doc["chain"] = chain_json(chain, mode);
  doc["result"] = result;
  return doc;
}

json optimize_report(const PureState& zeta, const DensityMatrix& rho0, int n_steps,
                     const OptimizerConfig& config, json manifest) {
  const TargetFrame frame{zeta};
  const ChainOptimum best = optimize_chain(rho0, frame, n_steps, config);
  const MeasurementChain greedy = greedy_chain(rho0, frame, n_steps);
  const double greedy_value = run_chain(rho0, frame, greedy).p_success;
  const double pd = p_direct(rho0, frame);
  const SingleStepReport single = single_step_report(rho0, frame);

  check(best.value >= greedy_value - 1e-9, "optimizer fell below the greedy chain");
  if (n_steps == 1) {
    check(std::abs(best.value - single.p_max) <= 1e-6,
          "one-step optimizer disagrees with the closed form");
  }

  json optimizer;
  optimizer["n_steps"] = n_steps;
  optimizer["random_starts"] = config.random_starts;
  optimizer["max_evals_per_start"] = config.max_evals_per_start;
  optimizer["convergence_tol"] = round_sig(config.convergence_tol);

  json result;
  result["p_direct"] = checked_prob(pd, "p_direct");
  result["p_max_single"] = checked_prob(single.p_max, "p_max_single");
  result["greedy_value"] = checked_prob(greedy_value, "greedy value");
  result["greedy_angles"] = angles_json(greedy);
  result["optimal_value"] = checked_prob(best.value, "optimal value");
  result["optimal_angles"] = angles_json(best.chain);
  result["gain_over_direct"] = round_sig(best.value - pd);

  json doc;
  doc["manifest"] = std::move(manifest);
  doc["target"] = json{{"zeta", zeta_json(zeta)}};
  doc["initial_state"] = state_json(rho0, frame);
  doc["optimizer"] = optimizer;
  doc["result"] = result;
  return doc;
}

json mc_report(const PureState& zeta, const DensityMatrix& rho0,
               const MeasurementChain& chain, const std::string& mode, std::uint64_t shots,
               std::uint64_t seed, json manifest) {
  require(shots > 0, "shots must be positive");
  const TargetFrame frame{zeta};
  const TrajectoryEstimate est = simulate_trajectories(rho0, frame, chain, shots, seed);
  const double exact = run_chain(rho0, frame, chain).p_success;
  const double diff = est.p_hat - exact;

  json sampling;
  sampling["shots"] = shots;

  json result;
  result["p_exact"] = checked_prob(exact, "p_exact");
  result["p_hat"] = checked_prob(est.p_hat, "p_hat");
  result["std_err"] = round_sig(est.std_err);
  if (est.std_err > 0.0) {
    result["z_score"] = round_sig(diff / est.std_err);
  } else {
    result["z_score"] = nullptr;
  }
  result["within_four_sigma"] = std::abs(diff) <= 4.0 * est.std_err + 1e-12;

  json doc;
  doc["manifest"] = std::move(manifest);
  doc["target"] = json{{"zeta", zeta_json(zeta)}};
  doc["initial_state"] = state_json(rho0, frame);
  doc["chain"] = chain_json(chain, mode);
  doc["sampling"] = sampling;
  doc["result"] = result;
  return doc;
}

json polarizer_report(const PolarizerCascade& cascade, bool equal_spacing, json manifest) {
  require_finite(cascade.angles, "angles");
  require(std::isfinite(cascade.input_angle) && std::isfinite(cascade.target_angle),
          "angles must be finite");

  const double flux = cascade_flux(cascade);
  const TargetFrame frame{PureState{1.0, 0.0}};
  const DensityMatrix input = polarizer_input_state(cascade, frame);
  const MeasurementChain chain = polarizer_chain(cascade);
  const double p_quantum = run_chain(input, frame, chain).p_success;

  // The all-transmit collapse history of the chain is exactly the cascade
  // flux, so keeping every branch can only help.
  check(p_quantum >= flux - 1e-12, "quantum chain fell below the cascade flux");

  json geometry;
  geometry["n_intermediate"] = cascade.angles.size();
  geometry["input_angle"] = round_sig(cascade.input_angle);
  geometry["target_angle"] = round_sig(cascade.target_angle);
  geometry["angles"] = reals_json(cascade.angles);

  json result;
  result["flux_cascade"] = checked_prob(flux, "cascade flux");
  if (equal_spacing) {
    const int n = static_cast<int>(cascade.angles.size());
    const double closed = std::pow(std::cos(M_PI / (2.0 * (n + 1))), 2.0 * (n + 1));
    check(std::abs(flux - closed) <= 1e-12,
          "equal-spacing flux disagrees with the closed form");
    result["equal_spacing_closed_form"] = checked_prob(closed, "closed-form flux");
  }
  result["p_quantum"] = checked_prob(p_quantum, "p_quantum");
  result["quantum_advantage"] = round_sig(p_quantum - flux);

  json doc;
  doc["manifest"] = std::move(manifest);
  doc["cascade"] = geometry;
  doc["result"] = result;
  return doc;
}

//============================================================================
// Command-line front end
//============================================================================

namespace {

struct GlobalOptions {
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out;
  std::string format;
};

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open output path: " + path);
  f << text;
  f.flush();
  if (!f) throw std::invalid_argument("failed writing output path: " + path);
}

void emit_text(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
  } else {
    write_text_file(out, text);
  }
}

void emit_table(const Table& table, const json& manifest, const GlobalOptions& g) {
  if (g.format == "json") {
    json doc;
    doc["manifest"] = manifest;
    doc["columns"] = table.columns;
    json rows = json::array();
    for (const std::vector<double>& row : table.rows) {
      json r = json::array();
      for (double v : row) r.push_back(round_sig(v));
      rows.push_back(r);
    }
    doc["rows"] = rows;
    emit_text(doc.dump(2) + "\n", g.out);
    return;
  }
  emit_text(to_csv(table), g.out);
  if (!g.out.empty()) {
    write_text_file(g.out + ".manifest.json", manifest.dump(2) + "\n");
  }
}

void emit_report(const json& doc, const GlobalOptions& g) {
  require(g.format != "csv", "this command emits a JSON report; --format csv is not supported");
  emit_text(doc.dump(2) + "\n", g.out);
}

PureState parse_zeta(const std::vector<double>& raw) {
  if (raw.empty()) return PureState{1.0, 0.0};
  require(raw.size() == 4, "--zeta needs 4 reals: re0,im0,re1,im1");
  require_finite(raw, "--zeta");
  return PureState{cplx{raw[0], raw[1]}, cplx{raw[2], raw[3]}};
}

DensityMatrix parse_rho(const TargetFrame& frame, bool have_p_target, double p_target,
                        double gamma, double phase, const std::vector<double>& rho_raw) {
  if (!rho_raw.empty()) {
    require(rho_raw.size() == 4, "--rho needs 4 reals: r00,r11,re01,im01");
    require_finite(rho_raw, "--rho");
    return DensityMatrix{rho_raw[0], rho_raw[1], cplx{rho_raw[2], rho_raw[3]}};
  }
  require(have_p_target,
          "specify the initial state with --p-target [--gamma --phase] or --rho");
  require(std::isfinite(p_target) && std::isfinite(gamma) && std::isfinite(phase),
          "state parameters must be finite");
  return from_frame(frame, frame_coeffs_from(p_target, gamma, phase));
}

MeasurementChain angles_to_chain(const std::vector<double>& flat) {
  require(flat.size() % 2 == 0, "--angles must list (alpha, beta) pairs");
  require(!flat.empty(), "--angles needs at least one (alpha, beta) pair");
  require_finite(flat, "--angles");
  MeasurementChain chain;
  for (std::size_t k = 0; k + 1 < flat.size(); k += 2) {
    chain.steps.push_back(BasisAngles{flat[k], flat[k + 1]});
  }
  return chain;
}

}  // namespace

int run(int argc, const char* const* argv) {
  GlobalOptions g;

  CLI::App app{"measurement-driven steering of a qubit onto a known target state"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", g.seed, "base RNG seed (default 0)");
  app.add_option("--threads", g.threads, "worker thread cap; 0 keeps the runtime default")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--out", g.out, "output path (default stdout)");
  app.add_option("--format", g.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  // fig1
  std::vector<double> f1_p_targets{0.0, 0.5, 0.9};
  double f1_gamma = 1.0;
  double f1_step = 0.001;
  CLI::App* fig1 = app.add_subcommand(
      "fig1", "one-step success probability vs intermediate-basis overlap");
  fig1->add_option("--p-targets", f1_p_targets, "initial <zeta|rho|zeta> values")
      ->delimiter(',');
  fig1->add_option("--gamma", f1_gamma, "coherence ratio (default 1)");
  fig1->add_option("--grid-step", f1_step, "overlap grid step (default 0.001)");

  // fig2
  std::vector<double> f2_gammas{0.0, 0.4, 0.7, 1.0};
  double f2_step = 0.001;
  CLI::App* fig2 = app.add_subcommand(
      "fig2", "closed-form maximum and optimal overlap vs p_target");
  fig2->add_option("--gammas", f2_gammas, "coherence ratios")->delimiter(',');
  fig2->add_option("--grid-step", f2_step, "p_target grid step (default 0.001)");

  // fig3
  std::vector<int> f3_n{1, 2, 3};
  std::vector<double> f3_gammas{1.0, 0.0};
  double f3_step = 0.05;
  OptimizerConfig f3_config;
  CLI::App* fig3 = app.add_subcommand(
      "fig3", "optimized and greedy N-step success vs p_target");
  fig3->add_option("--n-values", f3_n, "chain lengths")->delimiter(',');
  fig3->add_option("--gammas", f3_gammas, "coherence ratios")->delimiter(',');
  fig3->add_option("--p-grid-step", f3_step, "p_target grid step (default 0.05)");
  fig3->add_option("--starts", f3_config.random_starts, "random optimizer starts");
  fig3->add_option("--max-evals", f3_config.max_evals_per_start, "evaluation budget per start");
  fig3->add_option("--tol", f3_config.convergence_tol, "simplex diameter tolerance");

  // shared state flags for chain / optimize / mc
  struct StateFlags {
    std::vector<double> zeta;
    double p_target = 0.0;
    double gamma = 1.0;
    double phase = 0.0;
    std::vector<double> rho;
    CLI::Option* p_target_opt = nullptr;
  };
  auto add_state_flags = [](CLI::App* cmd, StateFlags& s) {
    cmd->add_option("--zeta", s.zeta, "target state re0,im0,re1,im1 (default 1,0,0,0)")
        ->delimiter(',');
    s.p_target_opt =
        cmd->add_option("--p-target", s.p_target, "initial <zeta|rho|zeta>");
    cmd->add_option("--gamma", s.gamma, "coherence ratio (default 1)");
    cmd->add_option("--phase", s.phase, "coherence phase in radians (default 0)");
    CLI::Option* rho_opt =
        cmd->add_option("--rho", s.rho, "explicit entries r00,r11,re01,im01")->delimiter(',');
    rho_opt->excludes(s.p_target_opt);
  };

  // chain
  StateFlags chain_state;
  std::vector<double> chain_angles;
  int chain_greedy = 0;
  int chain_optimal = 0;
  OptimizerConfig chain_config;
  CLI::App* chain_cmd = app.add_subcommand("chain", "evaluate a measurement chain exactly");
  add_state_flags(chain_cmd, chain_state);
  CLI::Option* chain_angles_opt =
      chain_cmd->add_option("--angles", chain_angles, "flat alpha,beta,... list")
          ->delimiter(',');
  CLI::Option* chain_greedy_opt =
      chain_cmd->add_option("--greedy", chain_greedy, "use the N-step greedy chain")
          ->check(CLI::PositiveNumber);
  CLI::Option* chain_optimal_opt =
      chain_cmd->add_option("--optimal", chain_optimal, "use the optimized N-step chain")
          ->check(CLI::Range(1, 8));
  chain_angles_opt->excludes(chain_greedy_opt)->excludes(chain_optimal_opt);
  chain_greedy_opt->excludes(chain_optimal_opt);
  chain_cmd->add_option("--starts", chain_config.random_starts, "random optimizer starts");
  chain_cmd->add_option("--max-evals", chain_config.max_evals_per_start,
                        "evaluation budget per start");
  chain_cmd->add_option("--tol", chain_config.convergence_tol, "simplex diameter tolerance");

  // optimize
  StateFlags opt_state;
  int opt_steps = 0;
  OptimizerConfig opt_config;
  CLI::App* opt_cmd = app.add_subcommand("optimize", "search for the best N-step chain");
  add_state_flags(opt_cmd, opt_state);
  opt_cmd->add_option("--steps", opt_steps, "number of intermediate measurements")
      ->required()
      ->check(CLI::Range(1, 8));
  opt_cmd->add_option("--starts", opt_config.random_starts, "random optimizer starts");
  opt_cmd->add_option("--max-evals", opt_config.max_evals_per_start,
                      "evaluation budget per start");
  opt_cmd->add_option("--tol", opt_config.convergence_tol, "simplex diameter tolerance");

  // mc
  StateFlags mc_state;
  std::vector<double> mc_angles;
  int mc_greedy = 0;
  int mc_optimal = 0;
  std::uint64_t mc_shots = 100000;
  OptimizerConfig mc_config;
  CLI::App* mc_cmd = app.add_subcommand("mc", "Monte Carlo trajectory estimate of a chain");
  add_state_flags(mc_cmd, mc_state);
  CLI::Option* mc_angles_opt =
      mc_cmd->add_option("--angles", mc_angles, "flat alpha,beta,... list")->delimiter(',');
  CLI::Option* mc_greedy_opt =
      mc_cmd->add_option("--greedy", mc_greedy, "use the N-step greedy chain")
          ->check(CLI::PositiveNumber);
  CLI::Option* mc_optimal_opt =
      mc_cmd->add_option("--optimal", mc_optimal, "use the optimized N-step chain")
          ->check(CLI::Range(1, 8));
  mc_angles_opt->excludes(mc_greedy_opt)->excludes(mc_optimal_opt);
  mc_greedy_opt->excludes(mc_optimal_opt);
  mc_cmd->add_option("--shots", mc_shots, "trajectories to sample (default 100000)");
  mc_cmd->add_option("--starts", mc_config.random_starts, "random optimizer starts");
  mc_cmd->add_option("--max-evals", mc_config.max_evals_per_start,
                     "evaluation budget per start");
  mc_cmd->add_option("--tol", mc_config.convergence_tol, "simplex diameter tolerance");

  // polarizer
  int pol_equal = 0;
  std::vector<double> pol_angles;
  double pol_input = 0.5 * M_PI;
  double pol_target = 0.0;
  CLI::App* pol_cmd =
      app.add_subcommand("polarizer", "Malus-law cascade vs the matching quantum chain");
  CLI::Option* pol_equal_opt =
      pol_cmd->add_option("--equal-spacing", pol_equal,
                          "n equally spaced intermediate polarizers between pi/2 and 0")
          ->check(CLI::NonNegativeNumber);
  CLI::Option* pol_angles_opt =
      pol_cmd->add_option("--angles", pol_angles, "absolute intermediate angles in radians")
          ->delimiter(',');
  CLI::Option* pol_input_opt =
      pol_cmd->add_option("--input-angle", pol_input, "input polarization (default pi/2)");
  CLI::Option* pol_target_opt =
      pol_cmd->add_option("--target-angle", pol_target, "analyzer angle (default 0)");
  pol_equal_opt->excludes(pol_angles_opt)->excludes(pol_input_opt)->excludes(pol_target_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

#ifdef _OPENMP
  if (g.threads > 0) omp_set_num_threads(g.threads);
#endif

  try {
    if (app.got_subcommand(fig1)) {
      const json manifest = make_manifest(
          "fig1",
          {{"p_targets", join_numbers(f1_p_targets)},
           {"gamma", format_number(f1_gamma)},
           {"grid_step", format_number(f1_step)}},
          g.seed);
      emit_table(fig1_table(f1_p_targets, f1_gamma, f1_step), manifest, g);
      return 0;
    }

    if (app.got_subcommand(fig2)) {
      const json manifest = make_manifest(
          "fig2",
          {{"gammas", join_numbers(f2_gammas)}, {"grid_step", format_number(f2_step)}},
          g.seed);
      emit_table(fig2_table(f2_gammas, f2_step), manifest, g);
      return 0;
    }

    if (app.got_subcommand(fig3)) {
      f3_config.seed = g.seed;
      const json manifest = make_manifest(
          "fig3",
          {{"n_values", join_ints(f3_n)},
           {"gammas", join_numbers(f3_gammas)},
           {"p_grid_step", format_number(f3_step)},
           {"random_starts", std::to_string(f3_config.random_starts)},
           {"max_evals_per_start", std::to_string(f3_config.max_evals_per_start)},
           {"convergence_tol", format_number(f3_config.convergence_tol)}},
          g.seed);
      emit_table(fig3_table(f3_n, f3_gammas, f3_step, f3_config), manifest, g);
      return 0;
    }

    auto state_params = [](const StateFlags& s) {
      std::vector<std::pair<std::string, std::string>> params;
      params.emplace_back("zeta", s.zeta.empty() ? "1,0,0,0" : join_numbers(s.zeta));
      if (!s.rho.empty()) {
        params.emplace_back("rho", join_numbers(s.rho));
      } else {
        params.emplace_back("p_target", format_number(s.p_target));
        params.emplace_back("gamma", format_number(s.gamma));
        params.emplace_back("phase", format_number(s.phase));
      }
      return params;
    };

    if (app.got_subcommand(chain_cmd)) {
      const PureState zeta = parse_zeta(chain_state.zeta);
      const TargetFrame frame{zeta};
      const DensityMatrix rho0 =
          parse_rho(frame, chain_state.p_target_opt->count() > 0, chain_state.p_target,
                    chain_state.gamma, chain_state.phase, chain_state.rho);
      chain_config.seed = g.seed;

      std::string mode;
      MeasurementChain chain;
      auto params = state_params(chain_state);
      if (!chain_angles.empty()) {
        mode = "angles";
        chain = angles_to_chain(chain_angles);
        params.emplace_back("angles", join_numbers(chain_angles));
      } else if (chain_greedy > 0) {
        mode = "greedy";
        chain = greedy_chain(rho0, frame, chain_greedy);
        params.emplace_back("greedy", std::to_string(chain_greedy));
      } else if (chain_optimal > 0) {
        mode = "optimal";
        chain = optimize_chain(rho0, frame, chain_optimal, chain_config).chain;
        params.emplace_back("optimal", std::to_string(chain_optimal));
      } else {
        throw std::invalid_argument("specify the chain with --angles, --greedy, or --optimal");
      }

      emit_report(chain_report(zeta, rho0, chain, mode, make_manifest("chain", params, g.seed)),
                  g);
      return 0;
    }

    if (app.got_subcommand(opt_cmd)) {
      const PureState zeta = parse_zeta(opt_state.zeta);
      const TargetFrame frame{zeta};
      const DensityMatrix rho0 =
          parse_rho(frame, opt_state.p_target_opt->count() > 0, opt_state.p_target,
                    opt_state.gamma, opt_state.phase, opt_state.rho);
      opt_config.seed = g.seed;

      auto params = state_params(opt_state);
      params.emplace_back("steps", std::to_string(opt_steps));
      params.emplace_back("random_starts", std::to_string(opt_config.random_starts));
      params.emplace_back("max_evals_per_start",
                          std::to_string(opt_config.max_evals_per_start));
      params.emplace_back("convergence_tol", format_number(opt_config.convergence_tol));

      emit_report(optimize_report(zeta, rho0, opt_steps, opt_config,
                                  make_manifest("optimize", params, g.seed)),
                  g);
      return 0;
    }

    if (app.got_subcommand(mc_cmd)) {
      const PureState zeta = parse_zeta(mc_state.zeta);
      const TargetFrame frame{zeta};
      const DensityMatrix rho0 =
          parse_rho(frame, mc_state.p_target_opt->count() > 0, mc_state.p_target,
                    mc_state.gamma, mc_state.phase, mc_state.rho);
      mc_config.seed = g.seed;

      std::string mode;
      MeasurementChain chain;
      auto params = state_params(mc_state);
      if (!mc_angles.empty()) {
        mode = "angles";
        chain = angles_to_chain(mc_angles);
        params.emplace_back("angles", join_numbers(mc_angles));
      } else if (mc_greedy > 0) {
        mode = "greedy";
        chain = greedy_chain(rho0, frame, mc_greedy);
        params.emplace_back("greedy", std::to_string(mc_greedy));
      } else if (mc_optimal > 0) {
        mode = "optimal";
        chain = optimize_chain(rho0, frame, mc_optimal, mc_config).chain;
        params.emplace_back("optimal", std::to_string(mc_optimal));
      } else {
        throw std::invalid_argument("specify the chain with --angles, --greedy, or --optimal");
      }
      params.emplace_back("shots", std::to_string(mc_shots));

      emit_report(mc_report(zeta, rho0, chain, mode, mc_shots, g.seed,
                            make_manifest("mc", params, g.seed)),
                  g);
      return 0;
    }

    if (app.got_subcommand(pol_cmd)) {
      PolarizerCascade cascade;
      bool equal_spacing = false;
      std::vector<std::pair<std::string, std::string>> params;
      if (pol_equal_opt->count() > 0) {
        equal_spacing = true;
        cascade = equal_spacing_cascade(pol_equal);
        params.emplace_back("equal_spacing", std::to_string(pol_equal));
      } else {
        cascade.angles = pol_angles;
        cascade.input_angle = pol_input;
        cascade.target_angle = pol_target;
        params.emplace_back("angles", join_numbers(pol_angles));
        params.emplace_back("input_angle", format_number(pol_input));
        params.emplace_back("target_angle", format_number(pol_target));
      }

      emit_report(polarizer_report(cascade, equal_spacing,
                                   make_manifest("polarizer", params, g.seed)),
                  g);
      return 0;
    }

    throw std::invalid_argument("no command given");
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 3;
  }
}

}  // namespace steer::cli

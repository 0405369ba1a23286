// Acceptance gate: every release-blocking behaviour of the library, checked
// end to end with independent oracles and printed one line per criterion.
// Exit status is the number of failed criteria (0 = all green).

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "steer/chain.hpp"
#include "steer/qubit.hpp"
#include "steer/random.hpp"
#include "steer/single_step.hpp"
#include "steer/stochastic.hpp"

using namespace steer;

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

FrameCoefficients coeffs_from(double p, double g, double phase) {
  return FrameCoefficients{p, 1.0 - p, std::polar(g * std::sqrt(p * (1.0 - p)), phase)};
}

const TargetFrame kFrame{PureState{1.0, 0.0}};

//----------------------------------------------------------------------------
// 1. Closed-form one-step maximum vs an independent grid + refined search.
bool closed_form_vs_search(std::string& detail) {
  RngStream rng(20260814);
  double max_err = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double p = rng.uniform();
    const double g = rng.uniform();
    const double phase = rng.uniform(0.0, 2.0 * M_PI);
    const oracle::GridMax found = oracle::max_one_step(coeffs_from(p, g, phase), 361);
    max_err = std::max(max_err, std::abs(p_max_closed(p, g) - found.value));
  }
  detail = "max |closed - searched| = " + sci(max_err) + " over 1000 draws (tol 1e-5)";
  return max_err <= 1e-5;
}

//----------------------------------------------------------------------------
// 2. The maximally mixed state gives exactly 1/2 through any basis.
bool mixed_state_line(std::string& detail) {
  RngStream rng(7);
  const DensityMatrix mixed = DensityMatrix::maximally_mixed();
  double max_err = 0.0;
  for (int i = 0; i < 100; ++i) {
    const BasisAngles angles{rng.uniform(0.0, M_PI), rng.uniform(0.0, 2.0 * M_PI)};
    const double p = p_one_step(mixed, kFrame, angles.realize(kFrame));
    max_err = std::max(max_err, std::abs(p - 0.5));
  }
  detail = "max |p - 1/2| = " + sci(max_err) + " over 100 bases (tol 1e-12)";
  return max_err <= 1e-12;
}

//----------------------------------------------------------------------------
// 3. Coherence-free dichotomy: p_max(p, 0) = max(p, 1/2).
bool coherence_free_dichotomy(std::string& detail) {
  double max_err = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double p = i / 1000.0;
    max_err = std::max(max_err, std::abs(p_max_closed(p, 0.0) - std::max(p, 0.5)));
  }
  detail = "max deviation = " + sci(max_err) + " on 1001 grid points (tol 1e-12)";
  return max_err <= 1e-12;
}

//----------------------------------------------------------------------------
// 4. Mean one-step maximum over Haar-random pure inputs is 3/4.
bool haar_average(std::string& detail) {
  const MeanEstimate est = haar_average_pmax(100000, 424242);
  detail = "mean = " + fixed3(est.mean) + " over 1e5 states (want 0.75 +/- 0.01)";
  return std::abs(est.mean - 0.75) <= 0.01;
}

//----------------------------------------------------------------------------
// 5. Dephasing recursion equals the brute-force sum over collapse histories.
bool recursion_soundness(std::string& detail) {
  RngStream rng(51);
  double max_err = 0.0;
  for (int i = 0; i < 100; ++i) {
    const DensityMatrix rho = random_density(rng);
    MeasurementChain chain;
    const int n = 1 + i % 10;
    for (int k = 0; k < n; ++k) {
      chain.steps.push_back(
          BasisAngles{rng.uniform(0.0, M_PI), rng.uniform(0.0, 2.0 * M_PI)});
    }
    const double rec = run_chain(rho, kFrame, chain).p_success;
    const double brute = chain_bruteforce(rho, kFrame, chain);
    max_err = std::max(max_err, std::abs(rec - brute));
  }
  detail = "max |recursion - histories| = " + sci(max_err) +
           " over 100 chains, N <= 10 (tol 1e-12)";
  return max_err <= 1e-12;
}

//----------------------------------------------------------------------------
// 6. Matrix and frame-coordinate forms agree; the insertion gain equals the
//    direct probability difference.
bool form_equivalence(std::string& detail) {
  RngStream rng(61);
  double max_form = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const DensityMatrix rho = random_density(rng);
    const BasisAngles angles{rng.uniform(0.0, M_PI), rng.uniform(0.0, 2.0 * M_PI)};
    const double matrix = p_one_step(rho, kFrame, angles.realize(kFrame));
    const double expanded = p_one_step_expanded(frame_coefficients(rho, kFrame), angles);
    max_form = std::max(max_form, std::abs(matrix - expanded));
  }

  double max_gain = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const DensityMatrix rho = random_density(rng);
    const BasisAngles a1{rng.uniform(0.0, M_PI), rng.uniform(0.0, 2.0 * M_PI)};
    const BasisAngles a2{rng.uniform(0.0, M_PI), rng.uniform(0.0, 2.0 * M_PI)};
    const double delta =
        delta_gain(rho, kFrame, a1.realize(kFrame), a2.realize(kFrame));
    MeasurementChain one, two;
    one.steps = {a1};
    two.steps = {a1, a2};
    const double direct = run_chain(rho, kFrame, two).p_success -
                          run_chain(rho, kFrame, one).p_success;
    max_gain = std::max(max_gain, std::abs(delta - direct));
  }
  detail = "forms " + sci(max_form) + ", insertion gain " + sci(max_gain) +
           ", 1e4 draws each (tol 1e-12)";
  return max_form <= 1e-12 && max_gain <= 1e-12;
}

//----------------------------------------------------------------------------
// 7. Optimized-chain structure across the (p_target, gamma, N) grid.
bool optimized_chain_structure(std::string& detail) {
  OptimizerConfig config;
  config.random_starts = 16;
  config.seed = 40;
  std::uint64_t cell = 0;
  const auto optimize_cell = [&](double p, double g, int n) {
    OptimizerConfig c = config;
    c.seed = config.seed + cell++;
    const DensityMatrix rho = from_frame(kFrame, coeffs_from(p, g, 0.0));
    return optimize_chain(rho, kFrame, n, c).value;
  };

  // (a) full coherence: every chain strictly beats the direct measurement
  //     and longer chains never do worse.
  double min_gain = 1.0;
  double worst_mono = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double p = 0.05 * i;
    double prev = 0.0;
    for (int n = 1; n <= 3; ++n) {
      const double v = optimize_cell(p, 1.0, n);
      min_gain = std::min(min_gain, v - p);
      if (n > 1) worst_mono = std::max(worst_mono, prev - v);
      prev = v;
    }
  }

  // (b) no coherence above the 1/2 threshold: chains cannot help.
  double max_plateau_dev = 0.0;
  for (int i = 11; i <= 19; ++i) {
    const double p = 0.05 * i;
    for (int n = 1; n <= 3; ++n) {
      max_plateau_dev = std::max(max_plateau_dev, std::abs(optimize_cell(p, 0.0, n) - p));
    }
  }

  // (c) no coherence below the threshold: two steps break the 1/2 barrier.
  const double barrier = optimize_cell(0.2, 0.0, 2);

  detail = "min gain " + sci(min_gain) + ", monotone slack " + sci(worst_mono) +
           ", plateau dev " + sci(max_plateau_dev) + ", p(0.2, N=2) = " + fixed3(barrier);
  return min_gain > 0.0 && worst_mono <= 1e-6 && max_plateau_dev <= 1e-4 &&
         barrier > 0.5 + 1e-4;
}

//----------------------------------------------------------------------------
// 8. Trajectory sampling reproduces the exact recursion within 4 sigma.
bool monte_carlo_consistency(std::string& detail) {
  RngStream rng(5150);
  double worst_z = 0.0;
  int failures = 0;
  for (int i = 0; i < 50; ++i) {
    const DensityMatrix rho = random_density(rng);
    MeasurementChain chain;
    const int n = 1 + i % 4;
    for (int k = 0; k < n; ++k) {
      chain.steps.push_back(
          BasisAngles{rng.uniform(0.0, M_PI), rng.uniform(0.0, 2.0 * M_PI)});
    }
    const TrajectoryEstimate est =
        simulate_trajectories(rho, kFrame, chain, 100000, 8800 + i);
    const double exact = run_chain(rho, kFrame, chain).p_success;
    const double diff = std::abs(est.p_hat - exact);
    if (est.std_err > 0.0) worst_z = std::max(worst_z, diff / est.std_err);
    if (diff > 4.0 * est.std_err + 1e-12) ++failures;
  }
  detail = "worst |z| = " + fixed3(worst_z) + " over 50 instances, 1e5 shots each";
  return failures == 0;
}

//----------------------------------------------------------------------------
// 9. Polarizer cascade: closed-form flux, monotone growth, quantum advantage.
bool polarizer_cascade(std::string& detail) {
  double max_err = 0.0;
  double prev = 0.0;
  bool increasing = true;
  double flux1 = 0.0;
  for (int n = 1; n <= 100; ++n) {
    const double flux = cascade_flux(equal_spacing_cascade(n));
    const double closed = std::pow(std::cos(M_PI / (2.0 * (n + 1))), 2.0 * (n + 1));
    max_err = std::max(max_err, std::abs(flux - closed));
    if (n == 1) flux1 = flux;
    if (n > 1 && flux <= prev) increasing = false;
    prev = flux;
  }

  double min_advantage = 1.0;
  for (int n = 0; n <= 6; ++n) {
    const PolarizerCascade cascade = equal_spacing_cascade(n);
    const DensityMatrix input = polarizer_input_state(cascade, kFrame);
    const double quantum = run_chain(input, kFrame, polarizer_chain(cascade)).p_success;
    min_advantage = std::min(min_advantage, quantum - cascade_flux(cascade));
  }

  detail = "closed-form err " + sci(max_err) + " (n <= 100), flux(1) = " + fixed3(flux1) +
           ", min quantum advantage " + sci(min_advantage);
  return max_err <= 1e-12 && increasing && std::abs(flux1 - 0.25) <= 1e-12 &&
         min_advantage >= -1e-12;
}

//----------------------------------------------------------------------------
// 10. The optimal-basis formula attains the closed-form maximum; pure inputs
//     follow x = (1 - m)/2 and p = (m^2 + 1)/2.
bool optimal_basis_formula(std::string& detail) {
  RngStream rng(9090);
  double max_err = 0.0;
  int used = 0;
  while (used < 1000) {
    const DensityMatrix rho = random_density(rng);
    const FrameCoefficients fc = frame_coefficients(rho, kFrame);
    const std::optional<double> g = gamma_of(rho, kFrame);
    if (fc.p_target >= 1.0 - 1e-6 || !g.has_value()) continue;
    const double attained =
        p_one_step(rho, kFrame, optimal_basis(rho, kFrame).realize(kFrame));
    max_err = std::max(max_err, std::abs(attained - p_max_closed(fc.p_target, *g)));
    ++used;
  }

  double max_pure = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double m = i / 100.0;
    const PureState psi{m, std::sqrt(1.0 - m * m)};
    const DensityMatrix rho = DensityMatrix::pure(psi);
    const BasisAngles best = optimal_basis(rho, kFrame);
    const double x = std::cos(0.5 * best.alpha) * std::cos(0.5 * best.alpha);
    const double p = p_one_step(rho, kFrame, best.realize(kFrame));
    max_pure = std::max(max_pure, std::abs(x - 0.5 * (1.0 - m)));
    max_pure = std::max(max_pure, std::abs(p - 0.5 * (m * m + 1.0)));
  }

  detail = "mixed err " + sci(max_err) + " (tol 1e-9), pure-law err " + sci(max_pure) +
           " (tol 1e-12)";
  return max_err <= 1e-9 && max_pure <= 1e-12;
}

struct Criterion {
  const char* name;
  double budget_s;  // 0 = untimed
  bool (*run)(std::string&);
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"closed-form one-step maximum vs independent search", 60.0, closed_form_vs_search},
      {"maximally mixed input stays on the 1/2 line", 0.0, mixed_state_line},
      {"coherence-free maximum is max(p, 1/2)", 0.0, coherence_free_dichotomy},
      {"Haar-average one-step maximum is 3/4", 0.0, haar_average},
      {"recursion equals brute-force history sum", 10.0, recursion_soundness},
      {"matrix/expanded forms and insertion gain agree", 0.0, form_equivalence},
      {"optimized chains: gain, monotonicity, plateau, barrier", 300.0,
       optimized_chain_structure},
      {"trajectory sampling within 4 sigma of exact", 60.0, monte_carlo_consistency},
      {"polarizer cascade flux and quantum advantage", 0.0, polarizer_cascade},
      {"optimal-basis formula and pure-state law", 0.0, optimal_basis_formula},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = criteria[i].run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (ok && criteria[i].budget_s > 0.0 && secs >= criteria[i].budget_s) {
      ok = false;
      detail += " [exceeded " + fixed3(criteria[i].budget_s) + "s budget]";
    }
    std::printf("[%s] %2zu. %-55s (%6.2fs)  %s\n", ok ? "PASS" : "FAIL", i + 1,
                criteria[i].name, secs, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failed;
  }

  if (failed == 0) {
    std::printf("all %zu acceptance criteria passed\n", criteria.size());
  } else {
    std::printf("%d of %zu acceptance criteria FAILED\n", failed, criteria.size());
  }
  return failed;
}

#pragma once

#include <functional>
#include <span>
#include <vector>

namespace steer {

struct NelderMeadOptions {
  int max_evals = 2000;
  double diameter_tol = 1e-7;  // stop when the simplex shrinks below this
  double initial_step = 0.4;   // per-coordinate offset of the initial simplex
};

struct NelderMeadResult {
  std::vector<double> point;
  double value;
  int evals;
};

// Unconstrained downhill-simplex minimization with the standard
// reflect/expand/contract/shrink coefficients (1, 2, 1/2, 1/2). Fully
// deterministic for a given starting point.
NelderMeadResult nelder_mead_minimize(
    const std::function<double(std::span<const double>)>& objective,
    std::span<const double> start, const NelderMeadOptions& options = {});

}  // namespace steer

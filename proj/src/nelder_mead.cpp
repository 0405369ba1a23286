#include "steer/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace steer {

namespace {

double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    d2 += d * d;
  }
  return std::sqrt(d2);
}

}  // namespace

NelderMeadResult nelder_mead_minimize(
    const std::function<double(std::span<const double>)>& objective,
    std::span<const double> start, const NelderMeadOptions& options) {
  const std::size_t dim = start.size();
  if (dim == 0) {
    throw std::invalid_argument("nelder_mead_minimize needs at least one dimension");
  }

  std::vector<std::vector<double>> simplex(dim + 1, std::vector<double>(start.begin(), start.end()));
  for (std::size_t i = 0; i < dim; ++i) {
    simplex[i + 1][i] += options.initial_step;
  }

  int evals = 0;
  const auto eval = [&](const std::vector<double>& x) {
    ++evals;
    return objective(std::span<const double>(x));
  };

  std::vector<double> values(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) {
    values[i] = eval(simplex[i]);
  }

  std::vector<std::size_t> order(dim + 1);
  std::iota(order.begin(), order.end(), 0);

  const auto sort_order = [&] {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  };

  while (evals < options.max_evals) {
    sort_order();
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[dim - 1];

    double diameter = 0.0;
    for (std::size_t i = 1; i <= dim; ++i) {
      diameter = std::max(diameter, distance(simplex[order[i]], simplex[best]));
    }
    if (diameter < options.diameter_tol) break;

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t k = 0; k < dim; ++k) centroid[k] += simplex[order[i]][k];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    const auto blend = [&](double coeff) {
      std::vector<double> x(dim);
      for (std::size_t k = 0; k < dim; ++k) {
        x[k] = centroid[k] + coeff * (centroid[k] - simplex[worst][k]);
      }
      return x;
    };

    std::vector<double> reflected = blend(1.0);
    const double f_reflected = eval(reflected);

    if (f_reflected < values[best]) {
      std::vector<double> expanded = blend(2.0);
      const double f_expanded = eval(expanded);
      if (f_expanded < f_reflected) {
        simplex[worst] = std::move(expanded);
        values[worst] = f_expanded;
      } else {
        simplex[worst] = std::move(reflected);
        values[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < values[second_worst]) {
      simplex[worst] = std::move(reflected);
      values[worst] = f_reflected;
      continue;
    }

    // Contract toward the better of the worst vertex and its reflection.
    const bool outside = f_reflected < values[worst];
    std::vector<double> contracted = blend(outside ? 0.5 : -0.5);
    const double f_contracted = eval(contracted);
    if ((outside && f_contracted <= f_reflected) ||
        (!outside && f_contracted < values[worst])) {
      simplex[worst] = std::move(contracted);
      values[worst] = f_contracted;
      continue;
    }

    // Shrink everything toward the best vertex.
    for (std::size_t i = 1; i <= dim; ++i) {
      const std::size_t idx = order[i];
      for (std::size_t k = 0; k < dim; ++k) {
        simplex[idx][k] = simplex[best][k] + 0.5 * (simplex[idx][k] - simplex[best][k]);
      }
      values[idx] = eval(simplex[idx]);
      if (evals >= options.max_evals) break;
    }
  }

  sort_order();
  NelderMeadResult result;
  result.point = simplex[order.front()];
  result.value = values[order.front()];
  result.evals = evals;
  return result;
}

}  // namespace steer

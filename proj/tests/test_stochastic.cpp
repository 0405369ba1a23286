#include <cmath>

#include "doctest.h"
#include "steer/chain.hpp"
#include "steer/qubit.hpp"
#include "steer/random.hpp"
#include "steer/stochastic.hpp"

using namespace steer;

TEST_CASE("trajectory estimates are deterministic and carry the right error bar") {
  const TargetFrame frame{PureState{1.0, 0.0}};
  const DensityMatrix rho = from_frame(frame, FrameCoefficients{0.3, 0.7, cplx{0.25, 0.1}});
  const MeasurementChain chain = greedy_chain(rho, frame, 3);

  const TrajectoryEstimate a = simulate_trajectories(rho, frame, chain, 50000, 21);
  const TrajectoryEstimate b = simulate_trajectories(rho, frame, chain, 50000, 21);
  CHECK(a.p_hat == b.p_hat);
  CHECK(a.shots == 50000);
  CHECK(a.seed == 21);
  CHECK(a.std_err ==
        doctest::Approx(std::sqrt(a.p_hat * (1.0 - a.p_hat) / 50000.0)).epsilon(1e-12));

  const TrajectoryEstimate c = simulate_trajectories(rho, frame, chain, 50000, 22);
  CHECK(a.p_hat != c.p_hat);
}

TEST_CASE("trajectories agree with the exact recursion within four sigma") {
  RngStream rng(307);
  for (int i = 0; i < 10; ++i) {
    const TargetFrame frame{random_pure(rng)};
    const DensityMatrix rho = random_density(rng);
    MeasurementChain chain;
    const int n = 1 + (int)(rng.uniform() * 4.0);
    for (int k = 0; k < n; ++k) {
      chain.steps.push_back(
          BasisAngles{rng.uniform(0.0, M_PI), rng.uniform(0.0, 2.0 * M_PI)});
    }
    const double exact = run_chain(rho, frame, chain).p_success;
    const TrajectoryEstimate est = simulate_trajectories(rho, frame, chain, 100000, 1000 + i);
    CHECK(std::abs(est.p_hat - exact) <= 4.0 * est.std_err + 1e-12);
  }
}

TEST_CASE("an empty chain samples the direct measurement") {
  const TargetFrame frame{PureState{1.0, 0.0}};
  const DensityMatrix rho = from_frame(frame, FrameCoefficients{0.42, 0.58, cplx{0.0, 0.0}});
  const TrajectoryEstimate est = simulate_trajectories(rho, frame, MeasurementChain{}, 200000, 3);
  CHECK(std::abs(est.p_hat - 0.42) <= 4.0 * est.std_err);
}

TEST_CASE("deterministic-state chains produce exact frequencies") {
  // Initial state = target, chain measures the frame itself: every shot hits.
  const TargetFrame frame{PureState{1.0, 0.0}};
  const DensityMatrix rho = DensityMatrix::pure(frame.zeta());
  MeasurementChain frame_chain;
  frame_chain.steps.push_back(BasisAngles{M_PI, 0.0});
  const TrajectoryEstimate est = simulate_trajectories(rho, frame, frame_chain, 10000, 5);
  CHECK(est.p_hat == 1.0);
  CHECK(est.std_err == 0.0);
}

TEST_CASE("cascade flux follows the product of squared cosines") {
  PolarizerCascade cascade;
  cascade.input_angle = 0.5 * M_PI;
  cascade.target_angle = 0.0;
  cascade.angles = {1.1, 0.7, 0.2};
  const double expected = std::pow(std::cos(0.5 * M_PI - 1.1), 2) *
                          std::pow(std::cos(1.1 - 0.7), 2) *
                          std::pow(std::cos(0.7 - 0.2), 2) * std::pow(std::cos(0.2), 2);
  CHECK(cascade_flux(cascade) == doctest::Approx(expected).epsilon(1e-12));

  // No intermediate polarizers: crossed input and analyzer block everything.
  PolarizerCascade crossed;
  crossed.input_angle = 0.5 * M_PI;
  crossed.target_angle = 0.0;
  CHECK(cascade_flux(crossed) <= 1e-30);
}

TEST_CASE("equal spacing flux: closed form, monotonicity, and the n = 1 value") {
  CHECK(std::abs(cascade_flux(equal_spacing_cascade(1)) - 0.25) <= 1e-12);
  double prev = 0.0;
  for (int n = 1; n <= 100; ++n) {
    const double flux = cascade_flux(equal_spacing_cascade(n));
    const double closed = std::pow(std::cos(M_PI / (2.0 * (n + 1))), 2.0 * (n + 1));
    CHECK(std::abs(flux - closed) <= 1e-12);
    CHECK(flux > prev);
    prev = flux;
  }
  // The flux creeps toward full transmission.
  CHECK(prev > 0.97);
}

TEST_CASE("the quantum chain never loses to the classical cascade") {
  for (int n = 1; n <= 6; ++n) {
    const PolarizerCascade cascade = equal_spacing_cascade(n);
    const TargetFrame frame{PureState{1.0, 0.0}};
    const DensityMatrix input = polarizer_input_state(cascade, frame);
    const double p_quantum =
        run_chain(input, frame, polarizer_chain(cascade)).p_success;
    CHECK(p_quantum >= cascade_flux(cascade) - 1e-12);
  }

  // n = 1 by hand: crossed input, one polarizer at pi/4. The chain keeps
  // both branches of the unbiased measurement, so exactly half the light
  // reaches the target; the cascade keeps only the transmitted quarter.
  const PolarizerCascade one = equal_spacing_cascade(1);
  const TargetFrame frame{PureState{1.0, 0.0}};
  const DensityMatrix input = polarizer_input_state(one, frame);
  CHECK(run_chain(input, frame, polarizer_chain(one)).p_success ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("polarizer geometry maps onto the frame correctly") {
  const PolarizerCascade cascade = equal_spacing_cascade(2);
  const TargetFrame frame{PureState{1.0, 0.0}};
  // Input is orthogonal to the target axis.
  CHECK(expectation(polarizer_input_state(cascade, frame), frame.zeta()) <= 1e-12);

  const MeasurementChain chain = polarizer_chain(cascade);
  REQUIRE(chain.size() == 2);
  // |<0_k|zeta>|^2 = cos^2(theta_k - target).
  for (std::size_t k = 0; k < chain.size(); ++k) {
    const MeasurementBasis basis = chain.steps[k].realize(frame);
    const double x = std::norm(overlap(basis.s0, frame.zeta()));
    const double expected = std::pow(std::cos(cascade.angles[k] - cascade.target_angle), 2);
    CHECK(x == doctest::Approx(expected).epsilon(1e-12));
  }
}

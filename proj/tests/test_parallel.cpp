// The parallel kernels must be bit-identical to their serial references and
// independent of the OpenMP thread count: work is split into fixed blocks
// with one RNG substream each, and partial results combine in block order.

#include <vector>

#include "doctest.h"
#include "steer/chain.hpp"
#include "steer/qubit.hpp"
#include "steer/single_step.hpp"
#include "steer/stochastic.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace steer;

namespace {

struct ThreadGuard {
#ifdef _OPENMP
  int saved = omp_get_max_threads();
  ~ThreadGuard() { omp_set_num_threads(saved); }
  void set(int n) { omp_set_num_threads(n); }
#else
  void set(int) {}
#endif
};

}  // namespace

TEST_CASE("haar averaging: serial reference equals parallel kernel bit for bit") {
  // Sizes straddling the block boundary on purpose.
  for (std::uint64_t samples : {1ull, 4095ull, 4096ull, 4097ull, 20000ull}) {
    const MeanEstimate s = haar_average_pmax_serial(samples, 31);
    const MeanEstimate p = haar_average_pmax(samples, 31);
    CHECK(s.mean == p.mean);
    CHECK(s.std_err == p.std_err);
    CHECK(s.samples == p.samples);
  }
}

TEST_CASE("trajectory sampling: serial reference equals parallel kernel bit for bit") {
  const TargetFrame frame{PureState{1.0, 0.0}};
  const DensityMatrix rho = from_frame(frame, FrameCoefficients{0.25, 0.75, cplx{0.2, -0.3}});
  const MeasurementChain chain = greedy_chain(rho, frame, 3);
  for (std::uint64_t shots : {1ull, 4096ull, 10000ull, 50000ull}) {
    const TrajectoryEstimate s = simulate_trajectories_serial(rho, frame, chain, shots, 77);
    const TrajectoryEstimate p = simulate_trajectories(rho, frame, chain, shots, 77);
    CHECK(s.p_hat == p.p_hat);
    CHECK(s.std_err == p.std_err);
  }
}

TEST_CASE("chain optimization: serial reference equals parallel kernel bit for bit") {
  const TargetFrame frame{PureState{cplx{0.8, 0.0}, cplx{0.0, 0.6}}};
  const DensityMatrix rho = from_frame(frame, FrameCoefficients{0.35, 0.65, cplx{0.1, 0.2}});
  OptimizerConfig config;
  config.random_starts = 16;
  config.seed = 3;
  const ChainOptimum s = optimize_chain_serial(rho, frame, 3, config);
  const ChainOptimum p = optimize_chain(rho, frame, 3, config);
  CHECK(s.value == p.value);
  REQUIRE(s.chain.size() == p.chain.size());
  for (std::size_t k = 0; k < s.chain.size(); ++k) {
    CHECK(s.chain.steps[k].alpha == p.chain.steps[k].alpha);
    CHECK(s.chain.steps[k].beta == p.chain.steps[k].beta);
  }
}

TEST_CASE("results do not depend on the thread count") {
  const TargetFrame frame{PureState{1.0, 0.0}};
  const DensityMatrix rho = from_frame(frame, FrameCoefficients{0.3, 0.7, cplx{0.3, 0.1}});
  const MeasurementChain chain = greedy_chain(rho, frame, 2);
  OptimizerConfig config;
  config.random_starts = 8;
  config.seed = 17;

  ThreadGuard guard;
  std::vector<double> haar, traj, opt;
  for (int threads : {1, 2, 3}) {
    guard.set(threads);
    haar.push_back(haar_average_pmax(12000, 4).mean);
    traj.push_back(simulate_trajectories(rho, frame, chain, 30000, 5).p_hat);
    opt.push_back(optimize_chain(rho, frame, 2, config).value);
  }
  CHECK(haar[0] == haar[1]);
  CHECK(haar[0] == haar[2]);
  CHECK(traj[0] == traj[1]);
  CHECK(traj[0] == traj[2]);
  CHECK(opt[0] == opt[1]);
  CHECK(opt[0] == opt[2]);
}

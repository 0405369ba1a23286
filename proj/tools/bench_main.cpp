// Serial vs parallel timing for the three hot kernels. Each pair runs the
// identical block schedule, so results must match bit for bit; the benchmark
// fails loudly if they do not.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "steer/chain.hpp"
#include "steer/single_step.hpp"
#include "steer/stochastic.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(const char* name, double serial_s, double parallel_s, bool equal) {
  std::printf("%-24s serial %8.3f s   parallel %8.3f s   speedup %5.2fx   %s\n", name,
              serial_s, parallel_s, serial_s / parallel_s, equal ? "results equal" : "RESULTS DIFFER");
  if (!equal) std::exit(1);
}

}  // namespace

int main(int argc, char** argv) {
  std::uint64_t haar_samples = 2'000'000;
  std::uint64_t shots = 4'000'000;
  int opt_steps = 3;
  if (argc > 1) haar_samples = std::strtoull(argv[1], nullptr, 10);
  if (argc > 2) shots = std::strtoull(argv[2], nullptr, 10);

#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (built without OpenMP)\n");
#endif

  using clock = std::chrono::steady_clock;

  {
    auto t0 = clock::now();
    const steer::MeanEstimate serial = steer::haar_average_pmax_serial(haar_samples, 7);
    const double ts = seconds_since(t0);
    t0 = clock::now();
    const steer::MeanEstimate parallel = steer::haar_average_pmax(haar_samples, 7);
    const double tp = seconds_since(t0);
    report("haar_average_pmax", ts, tp,
           serial.mean == parallel.mean && serial.std_err == parallel.std_err);
    std::printf("  mean %.9g  std_err %.2e  (%llu samples)\n", parallel.mean,
                parallel.std_err, static_cast<unsigned long long>(parallel.samples));
  }

  const steer::TargetFrame frame{steer::PureState{1.0, 0.0}};
  const steer::DensityMatrix rho = steer::from_frame(
      frame, steer::FrameCoefficients{0.3, 0.7, steer::cplx{0.2, 0.1}});

  {
    const steer::MeasurementChain chain = steer::greedy_chain(rho, frame, 4);
    auto t0 = clock::now();
    const steer::TrajectoryEstimate serial =
        steer::simulate_trajectories_serial(rho, frame, chain, shots, 11);
    const double ts = seconds_since(t0);
    t0 = clock::now();
    const steer::TrajectoryEstimate parallel =
        steer::simulate_trajectories(rho, frame, chain, shots, 11);
    const double tp = seconds_since(t0);
    report("simulate_trajectories", ts, tp, serial.p_hat == parallel.p_hat);
    std::printf("  p_hat %.9g  exact %.9g  (%llu shots)\n", parallel.p_hat,
                steer::run_chain(rho, frame, chain).p_success,
                static_cast<unsigned long long>(parallel.shots));
  }

  {
    steer::OptimizerConfig config;
    config.random_starts = 64;
    config.seed = 13;
    auto t0 = clock::now();
    const steer::ChainOptimum serial =
        steer::optimize_chain_serial(rho, frame, opt_steps, config);
    const double ts = seconds_since(t0);
    t0 = clock::now();
    const steer::ChainOptimum parallel = steer::optimize_chain(rho, frame, opt_steps, config);
    const double tp = seconds_since(t0);
    report("optimize_chain", ts, tp, serial.value == parallel.value);
    std::printf("  best %.9g over %d steps\n", parallel.value, opt_steps);
  }

  return 0;
}

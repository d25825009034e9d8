#pragma once

#include "slowman/benchmarks.hpp"
#include "slowman/dataset.hpp"
#include "slowman/integrator.hpp"

namespace slowman {

// Trajectory-based sampling recipe for one benchmark.
struct Protocol {
  std::string benchmark;
  std::string version;
  double eps0 = 1e-4;
  double eps1 = 1e-1;

  int n_eps_train = 13;
  int traj_per_eps_train = 10;
  int points_per_traj_train = 20;
  double train_fraction = 0.8;

  int n_eps_test = 50;
  int traj_per_eps_test = 10;
  int points_per_traj_test = 100;
  // test eps uniform on [eps0, eps1] unless set
  bool test_eps_log_uniform = false;
  // test samples before transient_factor * eps are dropped
  double transient_factor = 10.0;
  // Place the equidistant test grid over the whole trajectory and drop the
  // early samples, instead of starting the grid at the transient cut.
  bool test_grid_from_start = true;

  double t_end = 1e3;
  IntegratorOptions integrator;
  int max_retries = 25;
};

Protocol default_protocol(const std::string& benchmark);

// Full initial state [x; y] for trajectory `index` of one eps value.
Vec sample_initial_state(const std::string& benchmark, bool test, int index, Rng& rng);
EventPredicate stop_predicate(const std::string& benchmark);

// n log-spaced values with exact endpoints.
std::vector<double> log_grid(double lo, double hi, int n);

TrainingSet make_training_set(const Benchmark& bench, std::uint64_t seed, const Protocol& proto);
TrainingSet make_training_set(const Benchmark& bench, std::uint64_t seed);
TestSet make_test_set(const Benchmark& bench, std::uint64_t seed, const Protocol& proto);
TestSet make_test_set(const Benchmark& bench, std::uint64_t seed);

}  // namespace slowman

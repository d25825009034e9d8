#pragma once

#include "slowman/network.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace slowman {

// Collocation points for training, ordered by (eps index, trajectory, sample).
// Only slow variables are kept; the 80/20 split is by index.
struct TrainingSet {
  std::string benchmark;
  std::string protocol;
  std::uint64_t seed = 0;
  Vec omega_lo, omega_hi;
  double eps0 = 1e-4, eps1 = 1e-1;

  Collocation points;
  std::vector<int> traj;    // trajectory id, unique across the set
  std::vector<double> time; // sample time within its trajectory
  std::vector<Eigen::Index> train_idx, valid_idx;

  Collocation train() const { return points.subset(train_idx); }
  Collocation valid() const { return points.subset(valid_idx); }
};

// On-SIM test data: slow state, eps and the integrated fast state.
struct TestSet {
  std::string benchmark;
  std::string protocol;
  std::uint64_t seed = 0;
  Vec omega_lo, omega_hi;
  double eps0 = 1e-4, eps1 = 1e-1;

  Collocation points;
  Mat x_ref;  // n x M
  std::vector<int> traj;
  std::vector<double> time;

  Eigen::Index size() const { return points.size(); }
};

void write_training_csv(std::ostream& out, const TrainingSet& set);
TrainingSet read_training_csv(std::istream& in);
void write_test_csv(std::ostream& out, const TestSet& set);
TestSet read_test_csv(std::istream& in);

void save_training_set(const std::string& path, const TrainingSet& set);
TrainingSet load_training_set(const std::string& path);
void save_test_set(const std::string& path, const TestSet& set);
TestSet load_test_set(const std::string& path);

// %.17g, which round-trips every double.
std::string format_double(double v);

}  // namespace slowman

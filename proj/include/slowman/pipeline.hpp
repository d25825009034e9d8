#pragma once

#include "slowman/checks.hpp"
#include "slowman/datagen.hpp"
#include "slowman/eval.hpp"
#include "slowman/network.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace slowman {

int default_hidden(const std::string& method, const std::string& benchmark);

struct TrainConfig {
  std::string method = "slfnn";  // slfnn or rpnn
  int hidden = 0;                // 0 picks default_hidden
  double tol = 1e-3;
  int max_iters = 0;             // 0 picks 500 for LM, 100 for Newton
  double svd_cutoff = 1e-10;
  DerivativeBackend backend = DerivativeBackend::analytic;
  std::uint64_t seed = 1;
};

struct TrainOutcome {
  std::string method;
  SimMapPtr map;
  std::string model_json;
  double train_loss = 0.0;  // ||F||^2 on the training split
  double valid_loss = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;
  std::vector<TrainEntry> history;
};

TrainOutcome train_model(const Benchmark& bench, const TrainingSet& data, const TrainConfig& cfg);

// Reads either network format, dispatching on the "format" field.
SimMapPtr load_model(const std::string& path);

void write_history_csv(std::ostream& out, const std::vector<TrainEntry>& history);

// Benchmark behind a results-table id: 2 -> mm, 4 -> tmdd, 6 -> selkov3d.
std::string table_benchmark(int table);

struct ReproduceOptions {
  std::uint64_t seed = 1;
  // also train an SLFNN with the finite-difference backend
  bool fd_variant = false;
  bool with_checks = true;
  Protocol protocol;  // empty benchmark means the default for the table
};

struct ReproduceResult {
  std::string benchmark;
  TrainingSet train;
  TestSet test;
  std::vector<TrainOutcome> trained;
  std::vector<ErrorReport> table;
  CheckReport derivative;
  CheckReport residual;
  std::vector<std::pair<std::string, double>> timings;  // seconds per phase
};

ReproduceResult reproduce(int table, const ReproduceOptions& opts = {});

void write_training_table_csv(std::ostream& out, const std::vector<TrainOutcome>& rows);

// Derived seeds, so that data and initialisations never share a stream.
std::uint64_t train_data_seed(std::uint64_t seed);
std::uint64_t test_data_seed(std::uint64_t seed);
std::uint64_t init_seed(std::uint64_t seed, const std::string& method);

}  // namespace slowman

#pragma once

#include "slowman/benchmarks.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace slowman {

// One verdict: a measured value compared against a threshold.
struct CheckLine {
  std::string suite;
  std::string benchmark;
  std::string quantity;
  double value = 0.0;
  double expected = 0.0;   // target for slopes, 0 otherwise
  double threshold = 0.0;  // pass when |value - expected| <= threshold
  bool pass = false;
};

struct CheckReport {
  std::vector<CheckLine> lines;
  bool all_pass() const;
  void append(const CheckReport& other);
};

void write_check_csv(std::ostream& out, const CheckReport& report);

// Central half of Omega in every slow coordinate.
std::pair<Vec, Vec> interior_box(const Benchmark& bench);

struct DerivativeCheckOptions {
  int configs = 100;
  int points = 3;
  int max_hidden = 8;
  double tolerance = 1e-5;
  std::uint64_t seed = 1;
};

// Analytic grad_y and parameter Jacobians of both networks against central
// differences, at random networks and random collocation points. Reports the
// worst normwise relative error per quantity.
CheckReport derivative_check(const Benchmark& bench, const DerivativeCheckOptions& opts = {});

struct ResidualOrderOptions {
  std::vector<double> eps = {1e-6, 1e-5, 1e-4, 1e-3};
  int points = 20;
  double slope_tolerance = 0.2;
  std::uint64_t seed = 1;
};

// Expected order of ||ie_residual|| in eps for a baseline id, 0 if none is
// asserted.
int expected_residual_order(const std::string& id);

// Log-log slope of the stacked invariance-equation residual of each baseline,
// evaluated in quad precision at interior points.
CheckReport residual_order(const Benchmark& bench, const ResidualOrderOptions& opts = {});

struct CspCheckOptions {
  std::vector<double> eps = {1e-5, 1e-4, 1e-3};
  std::vector<double> root_eps = {1e-4, 1e-3, 1e-2, 1e-1};
  int points = 20;
  // C(eps) = max |csp1 - h0 - eps h1| / eps^2 may vary by at most this factor
  double c_ratio = 2.0;
  double root_tolerance = 1e-8;
  std::uint64_t seed = 1;
};

// csp1 agrees with the O(eps) expansion up to C eps^2 with a stable C, and
// root-finding on the generic one-iteration condition reproduces csp1.
CheckReport csp_consistency(const Benchmark& bench, const CspCheckOptions& opts = {});

}  // namespace slowman

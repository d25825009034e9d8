#pragma once

#include "slowman/benchmarks.hpp"
#include "slowman/dataset.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace slowman {

struct PointError {
  Vec y;
  double eps = 0.0;
  double abs_error = 0.0;
};

// Metrics over the stacked error vector e_k = ||x_ref_k - h(y_k, eps_k)||_2.
// Points where h throws or returns non-finite values are excluded and counted.
struct ErrorReport {
  std::string method;
  std::string benchmark;
  double l2 = 0.0;
  double linf = 0.0;
  double mse = 0.0;
  Eigen::Index n_points = 0;
  Eigen::Index excluded = 0;
  std::vector<PointError> pointwise;
};

ErrorReport evaluate(const SimMap& h, const TestSet& test, const std::string& method = "");

// One report per method, in the given order.
std::vector<ErrorReport> compare(const std::vector<NamedMap>& methods, const TestSet& test);

void write_table_csv(std::ostream& out, const std::vector<ErrorReport>& rows);
void write_error_grid_csv(std::ostream& out, const ErrorReport& report);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Least-squares line through (log10 x, log10 y).
LineFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

// Largest pointwise error for each distinct eps, sorted by eps.
std::vector<std::pair<double, double>> per_eps_max(const ErrorReport& report);

// Slope of log(per-eps max error) against log(eps).
double eps_slope(const ErrorReport& report);

}  // namespace slowman

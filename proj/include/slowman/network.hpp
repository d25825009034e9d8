#pragma once

#include "slowman/ode.hpp"

#include <functional>
#include <string>
#include <vector>

namespace slowman {

// Collocation points (y_k, eps_k), one per row. Residual q = m + k M belongs to
// fast component m at point k, so grid data stored eps-block by eps-block
// reproduces the ordering q = m + (i + j n_y) M.
struct Collocation {
  Mat y;    // n x (N-M)
  Vec eps;  // n

  Collocation() = default;
  Collocation(Mat y_, Vec eps_);
  Eigen::Index size() const { return eps.size(); }
  int slow_dim() const { return static_cast<int>(y.cols()); }
  Collocation subset(const std::vector<Eigen::Index>& rows) const;
};

enum class DerivativeBackend { analytic, finite_difference };
DerivativeBackend parse_backend(const std::string& s);
const char* backend_name(DerivativeBackend b);

inline double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }

// Stacked invariance-equation residuals of any SIM map over the points.
Vec stacked_residuals(const SimMap& h, const SlowSystem& sys, const Collocation& pts);

// Forward-difference Jacobian of F at p, step 1e-7 (1 + |p_j|).
Mat forward_difference_jacobian(const std::function<Vec(const Vec&)>& F, const Vec& p,
                                const Vec& F0);
// Central differences; used only as a test oracle.
Mat central_difference_jacobian(const std::function<Vec(const Vec&)>& F, const Vec& p,
                                double rel_step = 1e-6);

struct TrainEntry {
  int iter;
  double residual_norm;
  double lambda;  // LM damping; 0 for Newton
  bool accepted;
};

}  // namespace slowman

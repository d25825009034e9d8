#pragma once

#include "slowman/network.hpp"

#include <iosfwd>
#include <map>
#include <vector>

namespace slowman {

// Fixed hidden layer of one output. Every neuron l has a center c_l with
// A_l c_l + beta_l = 0, i.e. c_l sits on the sigmoid's inflection point.
struct RpnnProjection {
  Mat A;        // L x D, last column multiplies eps
  Vec beta;     // L
  Mat centers;  // L x D
};

RpnnProjection rpnn_sample(int L, const Vec& omega_lo, const Vec& omega_hi, double eps0,
                           double eps1, std::uint64_t seed);

// N_m(y, eps) = w_o^T phi(A [y; eps] + beta); the output bias is fixed at 0.
class RpnnModel final : public SimMap {
 public:
  // Samples one projection per output and draws w_o uniform on [-1, 1].
  static RpnnModel sample(int fast, int slow, int L, const Vec& omega_lo, const Vec& omega_hi,
                          double eps0, double eps1, std::uint64_t seed);
  RpnnModel(std::vector<RpnnProjection> proj, Mat w_out);

  std::string name() const override { return "rpnn"; }
  int fast_dim() const override { return static_cast<int>(proj_.size()); }
  int slow_dim() const override { return static_cast<int>(proj_.front().A.cols()) - 1; }
  Vec eval(const Vec& y, const double& eps) const override;
  Mat grad_y(const Vec& y, const double& eps) const override;

  int hidden() const { return static_cast<int>(proj_.front().A.rows()); }
  const RpnnProjection& projection(int m) const { return proj_.at(m); }
  // L x M, column m holds output m's weights
  const Mat& w_out() const { return w_; }
  // flattened as [w_out(:,0); w_out(:,1); ...]
  Vec parameters() const;
  RpnnModel with_parameters(const Vec& p) const;
  int param_count() const { return static_cast<int>(w_.size()); }

  std::uint64_t seed = 0;
  std::map<std::string, std::string> metadata;

  void save(std::ostream& out) const;
  static RpnnModel load(std::istream& in);

 private:
  std::vector<RpnnProjection> proj_;
  Mat w_;
};

// Phi^(m)_{l,k} = phi(alpha_l^T [y_k; eps_k] + beta_l), L x n.
Mat projection_matrix(const RpnnModel& model, int m, const Collocation& pts);

Vec rpnn_forward(const RpnnModel& model, const Vec& y, double eps);
Mat rpnn_grad_y(const RpnnModel& model, const Vec& y, double eps);
Vec rpnn_residuals(const RpnnModel& model, const SlowSystem& sys, const Collocation& pts);
Mat rpnn_jacobian(const RpnnModel& model, const SlowSystem& sys, const Collocation& pts);
Mat rpnn_jacobian_fd(const RpnnModel& model, const SlowSystem& sys, const Collocation& pts);

// Truncated-SVD pseudo-inverse; singular values below cutoff * sigma_max are
// dropped.
Mat truncated_pinv(const Mat& J, double cutoff = 1e-10);

struct NewtonOptions {
  double tol = 1e-3;
  int max_iters = 100;
  double svd_cutoff = 1e-10;
  double divergence_factor = 10.0;
  DerivativeBackend backend = DerivativeBackend::analytic;
};

struct NewtonResult {
  RpnnModel model;
  std::vector<TrainEntry> history;
  bool converged = false;
  std::string stop_reason;  // tol, max_iters, diverged
  double residual_norm = 0.0;
};

// Plain Newton steps dW = -J^+ F. If ||F|| ever exceeds divergence_factor times
// the best norm seen, training stops and returns the best iterate.
NewtonResult newton_train(const RpnnModel& model0, const SlowSystem& sys, const Collocation& pts,
                          const NewtonOptions& opts = {});

}  // namespace slowman

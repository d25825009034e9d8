#pragma once

#include "slowman/network.hpp"

#include <iosfwd>
#include <map>
#include <vector>

namespace slowman {

// Single-hidden-layer logistic network, one independent block per fast output:
//   N_m(y, eps) = w_o^T phi(W [y; eps] + b) + b_o.
// Parameters of output m occupy a contiguous block of L (D + 2) + 1 entries
// laid out as [w_o (L), b_o, W (L x D, neuron-major), b (L)].
class SlfnnModel final : public SimMap {
 public:
  SlfnnModel(int fast, int slow, int hidden);
  static SlfnnModel random(int fast, int slow, int hidden, std::uint64_t seed);

  std::string name() const override { return "slfnn"; }
  int fast_dim() const override { return fast_; }
  int slow_dim() const override { return slow_; }
  Vec eval(const Vec& y, const double& eps) const override;
  Mat grad_y(const Vec& y, const double& eps) const override;

  int hidden() const { return hidden_; }
  int input_dim() const { return slow_ + 1; }
  int params_per_output() const { return hidden_ * (input_dim() + 2) + 1; }
  int param_count() const { return fast_ * params_per_output(); }
  const Vec& parameters() const { return p_; }
  SlfnnModel with_parameters(const Vec& p) const;

  // Views into output m's block.
  Eigen::Map<const Vec> w_out(int m) const;
  double b_out(int m) const;
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> W(int m) const;
  Eigen::Map<const Vec> b(int m) const;

  // Offsets within one output block.
  int off_w_out() const { return 0; }
  int off_b_out() const { return hidden_; }
  int off_W() const { return hidden_ + 1; }
  int off_b() const { return hidden_ + 1 + hidden_ * input_dim(); }

  std::uint64_t seed = 0;
  std::map<std::string, std::string> metadata;

  void save(std::ostream& out) const;
  static SlfnnModel load(std::istream& in);

 private:
  int fast_, slow_, hidden_;
  Vec p_;
};

Vec slfnn_forward(const SlfnnModel& model, const Vec& y, double eps);
Mat slfnn_grad_y(const SlfnnModel& model, const Vec& y, double eps);
Vec slfnn_residuals(const SlfnnModel& model, const SlowSystem& sys, const Collocation& pts);
Mat slfnn_jacobian(const SlfnnModel& model, const SlowSystem& sys, const Collocation& pts);
Mat slfnn_jacobian_fd(const SlfnnModel& model, const SlowSystem& sys, const Collocation& pts);

struct LmOptions {
  double tol = 1e-3;
  int max_iters = 500;
  double lambda0 = 1e-2;
  double lambda_max = 1e10;
  DerivativeBackend backend = DerivativeBackend::analytic;
};

struct LmState {
  double lambda = 1e-2;
  int iteration = 0;
  double residual_norm = 0.0;
};

struct LmResult {
  SlfnnModel model;
  LmState state;
  std::vector<TrainEntry> history;
  bool converged = false;
  std::string stop_reason;
};

// Levenberg-Marquardt on ||F||: solve (J^T J + lambda diag(J^T J)) d = -J^T F,
// accept if the norm drops (lambda / 10), otherwise keep the parameters and
// raise lambda tenfold.
LmResult lm_train(const SlfnnModel& model0, const SlowSystem& sys, const Collocation& pts,
                  const LmOptions& opts = {});

}  // namespace slowman

#pragma once

#include "slowman/common.hpp"

#include <map>
#include <limits>
#include <memory>
#include <string>

namespace slowman {

// Fast/slow system in slow-subsystem form
//   eps dx/dt = f(x, y, eps),  dy/dt = g(x, y, eps)
// with x the M fast and y the N-M slow variables.
template <class T>
class BasicSlowSystem {
 public:
  using V = VecT<T>;
  using M = MatT<T>;

  virtual ~BasicSlowSystem() = default;

  virtual std::string name() const = 0;
  virtual int fast_dim() const = 0;
  virtual int slow_dim() const = 0;
  virtual std::map<std::string, double> params() const { return {}; }

  virtual V f(const V& x, const V& y, const T& eps) const = 0;
  virtual V g(const V& x, const V& y, const T& eps) const = 0;
  virtual M fx(const V& x, const V& y, const T& eps) const = 0;
  virtual M fy(const V& x, const V& y, const T& eps) const = 0;
  virtual M gx(const V& x, const V& y, const T& eps) const = 0;
  virtual M gy(const V& x, const V& y, const T& eps) const = 0;
};

// Explicit graph x = h(y, eps) together with its slow gradient.
template <class T>
class BasicSimMap {
 public:
  using V = VecT<T>;
  using M = MatT<T>;

  virtual ~BasicSimMap() = default;

  virtual std::string name() const = 0;
  virtual int fast_dim() const = 0;
  virtual int slow_dim() const = 0;
  virtual V eval(const V& y, const T& eps) const = 0;
  // M x (N-M) matrix of dh_m/dy_d
  virtual M grad_y(const V& y, const T& eps) const = 0;
};

using SlowSystem = BasicSlowSystem<double>;
using SimMap = BasicSimMap<double>;
using SystemPtr = std::shared_ptr<const SlowSystem>;
using SimMapPtr = std::shared_ptr<const SimMap>;

template <class T>
VecT<T> ie_residual(const BasicSlowSystem<T>& sys, const BasicSimMap<T>& h,
                    const VecT<T>& y, const T& eps) {
  require(h.fast_dim() == sys.fast_dim() && h.slow_dim() == sys.slow_dim(),
          "ie_residual: SIM map dimensions do not match the system");
  require(y.size() == sys.slow_dim(), "ie_residual: slow state has wrong size");
  require(eps >= 0, "ie_residual: eps must be non-negative");
  const VecT<T> x = h.eval(y, eps);
  require(x.size() == sys.fast_dim(), "ie_residual: SIM map returned wrong size");
  const VecT<T> fv = sys.f(x, y, eps);
  if (eps == 0) return fv;
  return fv - eps * (h.grad_y(y, eps) * sys.g(x, y, eps));
}

// Reduced slow flow dy/dt = g(h(y, eps), y, eps). It has no fast variables and
// can be handed to the integrator like any other system.
class ReducedSystem final : public SlowSystem {
 public:
  ReducedSystem(SystemPtr full, SimMapPtr h);

  std::string name() const override { return full_->name() + "/reduced"; }
  int fast_dim() const override { return 0; }
  int slow_dim() const override { return full_->slow_dim(); }
  std::map<std::string, double> params() const override { return full_->params(); }

  Vec f(const Vec& x, const Vec& y, const double& eps) const override;
  Vec g(const Vec& x, const Vec& y, const double& eps) const override;
  Mat fx(const Vec& x, const Vec& y, const double& eps) const override;
  Mat fy(const Vec& x, const Vec& y, const double& eps) const override;
  Mat gx(const Vec& x, const Vec& y, const double& eps) const override;
  Mat gy(const Vec& x, const Vec& y, const double& eps) const override;

 private:
  SystemPtr full_;
  SimMapPtr h_;
};

SystemPtr slow_flow(SystemPtr sys, SimMapPtr h);

// f = -x + y, g = -y. Its SIM is known exactly, x = y / (1 - eps).
template <class T>
class BasicLinearFixture final : public BasicSlowSystem<T> {
 public:
  using V = VecT<T>;
  using M = MatT<T>;
  std::string name() const override { return "linear"; }
  int fast_dim() const override { return 1; }
  int slow_dim() const override { return 1; }
  V f(const V& x, const V& y, const T&) const override { return V::Constant(1, y(0) - x(0)); }
  V g(const V&, const V& y, const T&) const override { return V::Constant(1, -y(0)); }
  M fx(const V&, const V&, const T&) const override { return M::Constant(1, 1, T(-1)); }
  M fy(const V&, const V&, const T&) const override { return M::Constant(1, 1, T(1)); }
  M gx(const V&, const V&, const T&) const override { return M::Constant(1, 1, T(0)); }
  M gy(const V&, const V&, const T&) const override { return M::Constant(1, 1, T(-1)); }
};

template <class T>
class BasicLinearExactSim final : public BasicSimMap<T> {
 public:
  using V = VecT<T>;
  using M = MatT<T>;
  std::string name() const override { return "exact"; }
  int fast_dim() const override { return 1; }
  int slow_dim() const override { return 1; }
  V eval(const V& y, const T& eps) const override {
    if (eps == 1) fail(ErrorKind::singular_input, "linear exact SIM undefined at eps = 1");
    return V::Constant(1, y(0) / (1 - eps));
  }
  M grad_y(const V&, const T& eps) const override {
    if (eps == 1) fail(ErrorKind::singular_input, "linear exact SIM undefined at eps = 1");
    return M::Constant(1, 1, 1 / (1 - eps));
  }
};

using LinearFixture = BasicLinearFixture<double>;
using LinearExactSim = BasicLinearExactSim<double>;

// Central finite-difference Jacobian of a map R^n -> R^m, used both as a test
// oracle and for the CSP baselines whose gradients have no tidy closed form.
template <class T, class F>
MatT<T> central_jacobian(const F& fun, const VecT<T>& at, int rows) {
  using std::abs;
  using std::cbrt;
  // the cube root of machine epsilon balances truncation against round-off
  const T base = cbrt(std::numeric_limits<T>::epsilon());
  MatT<T> jac(rows, at.size());
  for (int d = 0; d < at.size(); ++d) {
    const T h = base * (abs(at(d)) > 1 ? abs(at(d)) : T(1));
    VecT<T> lo = at, hi = at;
    lo(d) -= h;
    hi(d) += h;
    jac.col(d) = (fun(hi) - fun(lo)) / (2 * h);
  }
  return jac;
}

}  // namespace slowman

#include "slowman/ode.hpp"

namespace slowman {

ReducedSystem::ReducedSystem(SystemPtr full, SimMapPtr h)
    : full_(std::move(full)), h_(std::move(h)) {
  require(full_ && h_, "slow_flow: null system or SIM map");
  require(h_->fast_dim() == full_->fast_dim() && h_->slow_dim() == full_->slow_dim(),
          "slow_flow: SIM map dimensions do not match the system");
}

Vec ReducedSystem::f(const Vec&, const Vec&, const double&) const { return Vec(0); }

Vec ReducedSystem::g(const Vec&, const Vec& y, const double& eps) const {
  return full_->g(h_->eval(y, eps), y, eps);
}

Mat ReducedSystem::fx(const Vec&, const Vec&, const double&) const { return Mat(0, 0); }

Mat ReducedSystem::fy(const Vec&, const Vec&, const double&) const {
  return Mat(0, slow_dim());
}

Mat ReducedSystem::gx(const Vec&, const Vec&, const double&) const {
  return Mat(slow_dim(), 0);
}

Mat ReducedSystem::gy(const Vec&, const Vec& y, const double& eps) const {
  const Vec x = h_->eval(y, eps);
  return full_->gx(x, y, eps) * h_->grad_y(y, eps) + full_->gy(x, y, eps);
}

SystemPtr slow_flow(SystemPtr sys, SimMapPtr h) {
  return std::make_shared<ReducedSystem>(std::move(sys), std::move(h));
}

}  // namespace slowman

#include "slowman/benchmarks.hpp"
#include "slowman/rpnn.hpp"
#include "slowman/slfnn.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace slowman;

namespace {

Collocation grid(double y0, double y1, int ny, const std::vector<double>& eps) {
  Mat y(ny * static_cast<int>(eps.size()), 1);
  Vec e(y.rows());
  int r = 0;
  for (double ev : eps)
    for (int i = 0; i < ny; ++i, ++r) {
      y(r, 0) = y0 + (y1 - y0) * i / (ny - 1);
      e(r) = ev;
    }
  return Collocation(y, e);
}

Vec v1(double a) { return Vec::Constant(1, a); }

}  // namespace

TEST_CASE("slfnn forward pass by hand") {
  // one neuron: out = w * s(a y + c eps + b) + b_out
  SlfnnModel m(1, 1, 1);
  Vec p(m.param_count());
  p << 2.0, 0.5, 1.0, -3.0, 0.25;
  m = m.with_parameters(p);
  const double u = 1.0 * 0.4 - 3.0 * 0.1 + 0.25;
  CHECK(m.eval(v1(0.4), 0.1)(0) == doctest::Approx(2.0 * logistic(u) + 0.5).epsilon(1e-15));
  const double s = logistic(u);
  CHECK(m.grad_y(v1(0.4), 0.1)(0, 0) == doctest::Approx(2.0 * s * (1 - s) * 1.0).epsilon(1e-15));
}

TEST_CASE("slfnn derivatives against central differences") {
  const Benchmark b = make_benchmark("tmdd");
  const SlfnnModel m = SlfnnModel::random(1, 2, 5, 11);
  Mat y(3, 2);
  y << 0.5, 1.5, 1.0, 2.0, 1.8, 2.7;
  Vec e(3);
  e << 1e-3, 1e-2, 1e-1;
  const Collocation pts(y, e);
  const Mat J = slfnn_jacobian(m, *b.system, pts);
  const Mat F = central_difference_jacobian(
      [&](const Vec& p) { return slfnn_residuals(m.with_parameters(p), *b.system, pts); }, m.parameters());
  CHECK(rel_error(J, F) < 1e-6);
  CHECK(rel_error(slfnn_jacobian_fd(m, *b.system, pts), J) < 1e-5);
  for (int k = 0; k < 3; ++k) {
    const Vec yk = y.row(k).transpose();
    const Mat fd = central_jacobian<double>([&](const Vec& q) { return m.eval(q, e(k)); }, yk, 1);
    CHECK(rel_error(m.grad_y(yk, e(k)), fd) < 1e-8);
  }
}

TEST_CASE("slfnn save and load round-trip exactly") {
  SlfnnModel m = SlfnnModel::random(1, 2, 4, 5);
  m.metadata["benchmark"] = "tmdd";
  std::stringstream ss;
  m.save(ss);
  const SlfnnModel r = SlfnnModel::load(ss);
  CHECK(r.parameters() == m.parameters());
  CHECK(r.metadata.at("benchmark") == "tmdd");
  std::stringstream bad("{\"format\": \"other\"}");
  CHECK_THROWS_AS(SlfnnModel::load(bad), Error);
}

TEST_CASE("lm drives the linear fixture residual below tol") {
  LinearFixture sys;
  const Collocation pts = grid(0.0, 1.0, 15, {1e-4, 1e-3, 1e-2, 1e-1});
  LmOptions o;
  o.tol = 1e-4;
  o.max_iters = 400;
  const LmResult r = lm_train(SlfnnModel::random(1, 1, 6, 3), sys, pts, o);
  CHECK(r.converged);
  CHECK(slfnn_residuals(r.model, sys, pts).norm() < 1e-4);
  // accepted steps never increase the residual
  double last = INFINITY;
  for (const auto& h : r.history)
    if (h.accepted) {
      CHECK(h.residual_norm <= last * (1 + 1e-12));
      last = h.residual_norm;
    }
}

TEST_CASE("lm is deterministic for a seed") {
  const Benchmark b = make_benchmark("mm");
  const Collocation pts = grid(0.01, 1.0, 10, {1e-3, 1e-2});
  LmOptions o;
  o.max_iters = 20;
  const LmResult a = lm_train(SlfnnModel::random(1, 1, 4, 9), *b.system, pts, o);
  const LmResult c = lm_train(SlfnnModel::random(1, 1, 4, 9), *b.system, pts, o);
  CHECK(a.model.parameters() == c.model.parameters());
  CHECK(a.history.size() == c.history.size());
}

TEST_CASE("truncated pinv satisfies the Moore-Penrose identity") {
  Rng rng(1);
  Mat J(30, 12);
  for (Eigen::Index i = 0; i < J.size(); ++i) J.data()[i] = rng.uniform(-1, 1);
  J.col(11) = J.col(3) * 2.0;  // rank deficient
  const Mat P = truncated_pinv(J);
  CHECK((J * P * J - J).norm() / J.norm() < 1e-8);
  CHECK((P * J * P - P).norm() / P.norm() < 1e-8);
}

TEST_CASE("rpnn projection stays fixed during training") {
  LinearFixture sys;
  const Collocation pts = grid(0.0, 1.0, 20, {1e-4, 1e-2, 1e-1});
  const RpnnModel m0 = RpnnModel::sample(1, 1, 20, v1(0.0), v1(1.0), 1e-4, 1e-1, 4);
  const NewtonResult r = newton_train(m0, sys, pts);
  CHECK(r.model.projection(0).A == m0.projection(0).A);
  CHECK(r.model.projection(0).beta == m0.projection(0).beta);
  CHECK(r.model.projection(0).centers == m0.projection(0).centers);
  CHECK(projection_matrix(r.model, 0, pts) == projection_matrix(m0, 0, pts));
}

TEST_CASE("newton on an affine residual converges in one step") {
  // f linear in x and g independent of x: residuals are affine in w_out
  LinearFixture sys;
  const Collocation pts = grid(0.0, 1.0, 25, {1e-4, 1e-3, 1e-2, 1e-1});
  const RpnnModel m0 = RpnnModel::sample(1, 1, 20, v1(0.0), v1(1.0), 1e-4, 1e-1, 8);
  NewtonOptions o;
  o.tol = 1e-300;
  o.max_iters = 3;
  const NewtonResult r = newton_train(m0, sys, pts, o);
  REQUIRE(r.history.size() >= 2);
  const double after1 = r.history[1].residual_norm;
  CHECK(after1 < 1e-6 * r.history[0].residual_norm);
  CHECK(rpnn_jacobian(m0, sys, pts) == rpnn_jacobian(r.model, sys, pts));
}

TEST_CASE("rpnn derivatives against central differences") {
  const Benchmark b = make_benchmark("selkov3d");
  const RpnnModel m = RpnnModel::sample(1, 2, 6, b.omega_lo, b.omega_hi, 1e-4, 1e-1, 2);
  Mat y(2, 2);
  y << 0.5, 1.0, 1.2, 1.9;
  Vec e(2);
  e << 1e-3, 5e-2;
  const Collocation pts(y, e);
  const Mat F = central_difference_jacobian(
      [&](const Vec& p) { return rpnn_residuals(m.with_parameters(p), *b.system, pts); }, m.parameters());
  CHECK(rel_error(rpnn_jacobian(m, *b.system, pts), F) < 1e-6);
  const Vec y0 = y.row(0).transpose();
  const Mat fd = central_jacobian<double>([&](const Vec& q) { return m.eval(q, 1e-3); }, y0, 1);
  CHECK(rel_error(m.grad_y(y0, 1e-3), fd) < 1e-8);
}

TEST_CASE("rpnn save and load keeps centers and weights") {
  const RpnnModel m = RpnnModel::sample(1, 2, 7, Vec::Zero(2), Vec::Ones(2), 1e-4, 1e-1, 3);
  std::stringstream ss;
  m.save(ss);
  const RpnnModel r = RpnnModel::load(ss);
  CHECK(r.w_out() == m.w_out());
  CHECK(r.projection(0).centers == m.projection(0).centers);
  CHECK(r.projection(0).A == m.projection(0).A);
}

TEST_CASE("collocation subset and stacked residual ordering") {
  const Collocation pts = grid(0.0, 1.0, 3, {0.1, 0.2});
  const Collocation s = pts.subset({4, 0});
  CHECK(s.size() == 2);
  CHECK(s.eps(0) == 0.2);
  CHECK(s.y(0, 0) == 0.5);
  LinearFixture sys;
  LinearExactSim h;
  CHECK(stacked_residuals(h, sys, pts).norm() < 1e-15);
  CHECK(parse_backend("finite_difference") == DerivativeBackend::finite_difference);
  CHECK_THROWS_AS(parse_backend("symbolic"), Error);
}

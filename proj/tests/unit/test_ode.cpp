#include "slowman/integrator.hpp"
#include "slowman/ode.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace slowman;

namespace {
Vec v1(double a) { return Vec::Constant(1, a); }
}  // namespace

TEST_CASE("exact linear SIM has zero invariance residual") {
  LinearFixture sys;
  LinearExactSim h;
  for (double e : {1e-4, 1e-2, 0.1, 0.5})
    for (double y : {0.0, 0.3, 1.0}) CHECK(std::abs(ie_residual(sys, h, v1(y), e)(0)) < 1e-15);
}

TEST_CASE("eps = 0 reduces the residual to f") {
  LinearFixture sys;
  LinearExactSim h;
  CHECK(ie_residual(sys, h, v1(0.7), 0.0)(0) == 0.0);
}

TEST_CASE("ie_residual rejects contract violations") {
  LinearFixture sys;
  LinearExactSim h;
  CHECK_THROWS_AS(ie_residual(sys, h, v1(0.5), -1e-3), Error);
  CHECK_THROWS_AS(ie_residual(sys, h, Vec(Vec::Zero(2)), 1e-3), Error);
  try {
    h.eval(v1(1.0), 1.0);
    FAIL("expected singular input");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::singular_input);
  }
}

TEST_CASE("central_jacobian of a smooth map") {
  auto fun = [](const Vec& q) {
    Vec r(2);
    r << std::sin(q(0)) * q(1), q(0) * q(0);
    return r;
  };
  Vec at(2);
  at << 0.3, 2.0;
  const Mat J = central_jacobian<double>(fun, at, 2);
  Mat ex(2, 2);
  ex << std::cos(0.3) * 2.0, std::sin(0.3), 0.6, 0.0;
  CHECK(rel_error(J, ex) < 1e-9);
}

TEST_CASE("reduced system follows the slow flow on the SIM") {
  auto sys = std::make_shared<LinearFixture>();
  auto h = std::make_shared<LinearExactSim>();
  const SystemPtr red = slow_flow(sys, h);
  CHECK(red->fast_dim() == 0);
  CHECK(red->g(Vec(0), v1(0.4), 0.01)(0) == doctest::Approx(-0.4));
}

TEST_CASE("integrator reproduces the linear fast-slow solution") {
  LinearFixture sys;
  const double eps = 1e-3, x0 = 2.0, y0 = 1.0;
  const Trajectory tr = integrate(sys, v1(x0), v1(y0), eps, 5.0);
  CHECK(tr.stop_reason == StopReason::t_end);
  CHECK(tr.tf() == doctest::Approx(5.0));
  auto exact = [&](double t) {
    const double c = y0 / (1 - eps);
    return c * std::exp(-t) + (x0 - c) * std::exp(-t / eps);
  };
  double worst = 0;
  for (double t : {1e-4, 1e-3, 1e-2, 0.5, 2.0, 4.9}) {
    const Vec s = tr.state_at(t);
    worst = std::max(worst, std::abs(s(0) - exact(t)));
    CHECK(s(1) == doctest::Approx(y0 * std::exp(-t)).epsilon(1e-6));
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("threshold stop ends before the slow variable crosses the level") {
  LinearFixture sys;
  const Trajectory tr = integrate(sys, v1(1.0), v1(1.0), 1e-2, 100.0, {}, threshold_stop(1, 0.1));
  CHECK(tr.stop_reason == StopReason::event);
  CHECK(tr.states.back()(1) >= 0.1);
  CHECK(tr.tf() == doctest::Approx(std::log(10.0)).epsilon(1e-3));
}

TEST_CASE("equidistant sampling hits both ends") {
  LinearFixture sys;
  const Trajectory tr = integrate(sys, v1(0.0), v1(1.0), 0.05, 2.0);
  const auto s = sample_equidistant(tr, 5);
  REQUIRE(s.size() == 5);
  CHECK(s.front()(1) == doctest::Approx(1.0));
  CHECK(s.back()(1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-6));
  const auto w = sample_window(tr, 1.0, 2.0, 3);
  CHECK(w[1](1) == doctest::Approx(std::exp(-1.5)).epsilon(1e-6));
}

TEST_CASE("trajectory csv has one row per node") {
  LinearFixture sys;
  const Trajectory tr = integrate(sys, v1(0.0), v1(1.0), 0.05, 1.0);
  std::ostringstream os;
  write_trajectory_csv(os, tr);
  const std::string s = os.str();
  std::size_t rows = 0;
  for (char c : s) rows += c == '\n';
  CHECK(rows >= tr.size());
}

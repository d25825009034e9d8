#include "slowman/benchmarks.hpp"
#include "slowman/precision.hpp"

#include <doctest.h>

#include <cmath>

using namespace slowman;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) out(i++) = d;
  return out;
}

struct Point {
  std::string bench;
  Vec y;
  double h[3];
};

// Values from order-by-order symbolic matching of the invariance equation at
// default parameters (tests/oracles/closed_forms.py derives the same terms).
std::vector<Point> expansion_oracles() {
  return {
      {"mm", vec({0.5}), {0.52380952380952381, 0.54750849697399746, 0.99862806689190967}},
      {"tmdd", vec({1.0, 2.0}), {1.2247191011235955, -17.975905118601748, 881.81015375599477}},
      {"selkov3d", vec({0.7, 1.4}), {0.98, -0.026, -2.2806}},
  };
}

}  // namespace

TEST_CASE("expansion terms match the symbolic derivation") {
  for (const auto& p : expansion_oracles()) {
    const auto bp = BenchmarkParams::make(p.bench);
    for (int k = 0; k < 3; ++k) {
      CAPTURE(p.bench);
      CAPTURE(k);
      CHECK(expansion_term<double>(bp, k, p.y)(0) == doctest::Approx(p.h[k]).epsilon(1e-13));
    }
  }
}

TEST_CASE("gspt baselines are truncated expansions") {
  for (const auto& p : expansion_oracles()) {
    const Benchmark b = make_benchmark(p.bench);
    const double e = 3e-3;
    CHECK(b.baseline("sqssa").map->eval(p.y, e)(0) == doctest::Approx(p.h[0]).epsilon(1e-13));
    CHECK(b.baseline("gspt1").map->eval(p.y, e)(0) == doctest::Approx(p.h[0] + e * p.h[1]).epsilon(1e-13));
    CHECK(b.baseline("gspt2").map->eval(p.y, e)(0) ==
          doctest::Approx(p.h[0] + e * p.h[1] + e * e * p.h[2]).epsilon(1e-13));
  }
}

TEST_CASE("mm csp closed form at a reference point") {
  const Benchmark b = make_benchmark("mm");
  // high-precision evaluation of the closed form, y = 0.5, eps = 1e-2
  CHECK(b.baseline("csp1").map->eval(vec({0.5}), 1e-2)(0) ==
        doctest::Approx(0.52933336983902577724).epsilon(1e-14));
}

TEST_CASE("baseline gradients agree with finite differences") {
  for (const auto& name : benchmark_names()) {
    const Benchmark b = make_benchmark(name);
    const Vec y = 0.5 * (b.omega_lo + b.omega_hi);
    for (const auto& nm : b.baselines) {
      CAPTURE(nm.id);
      const Mat fd = central_jacobian<double>([&](const Vec& q) { return nm.map->eval(q, 1e-2); }, y, 1);
      CHECK(rel_error(nm.map->grad_y(y, 1e-2), fd) < 1e-8);
    }
  }
}

TEST_CASE("system jacobians agree with finite differences") {
  for (const auto& name : benchmark_names()) {
    const Benchmark b = make_benchmark(name);
    const SlowSystem& s = *b.system;
    const Vec y = 0.5 * (b.omega_lo + b.omega_hi);
    const Vec x = Vec::Constant(1, 0.8);
    const double e = 0.02;
    CAPTURE(name);
    CHECK(rel_error(s.fx(x, y, e), central_jacobian<double>([&](const Vec& q) { return s.f(q, y, e); }, x, 1)) < 1e-8);
    CHECK(rel_error(s.fy(x, y, e), central_jacobian<double>([&](const Vec& q) { return s.f(x, q, e); }, y, 1)) < 1e-8);
    const int S = s.slow_dim();
    CHECK(rel_error(s.gx(x, y, e), central_jacobian<double>([&](const Vec& q) { return s.g(q, y, e); }, x, S)) < 1e-8);
    CHECK(rel_error(s.gy(x, y, e), central_jacobian<double>([&](const Vec& q) { return s.g(x, q, e); }, y, S)) < 1e-8);
  }
}

TEST_CASE("quad and double systems agree") {
  const auto bp = BenchmarkParams::make("tmdd");
  const auto sq = make_system<Quad>(bp);
  const auto sd = make_system<double>(bp);
  const Vec y = vec({1.1, 2.2}), x = vec({0.9});
  const double fd = sd->f(x, y, 0.01)(0);
  const double fq = static_cast<double>(sq->f(x.cast<Quad>(), y.cast<Quad>(), Quad(0.01))(0));
  CHECK(fq == doctest::Approx(fd).epsilon(1e-14));
}

TEST_CASE("csp closed forms are roots of the generic one-iteration condition") {
  for (const auto& name : benchmark_names()) {
    const Benchmark b = make_benchmark(name);
    const Vec y = 0.5 * (b.omega_lo + b.omega_hi);
    for (double e : {1e-3, 1e-2}) {
      const Vec x = b.baseline("csp1").map->eval(y, e);
      const Vec c = csp_one_iteration_condition<double>(*b.system, x, y, e);
      CAPTURE(name);
      CHECK(std::abs(c(0)) < 1e-10);
    }
  }
}

TEST_CASE("registry: names, baselines and labels") {
  CHECK(benchmark_names() == std::vector<std::string>{"mm", "tmdd", "selkov3d"});
  CHECK(baseline_ids("mm").size() == 5);
  CHECK(baseline_ids("tmdd").size() == 4);
  CHECK(canonical_method("qssa") == "sqssa");
  CHECK(method_label("mm", "sqssa") == "sQSSA");
  CHECK(method_label("tmdd", "qssa") == "QSSA");
  CHECK_THROWS_AS(make_benchmark("selkov").baselines.size(), Error);
  CHECK_THROWS_AS(make_benchmark("tmdd").baseline("spt1"), Error);
}

TEST_CASE("parameter overrides are validated") {
  const auto bp = BenchmarkParams::make("mm", {{"kappa", 2.0}});
  CHECK(bp.mm.kappa == 2.0);
  CHECK(bp.values().at("sigma") == 100.0);
  try {
    BenchmarkParams::make("mm", {{"kappa", -1.0}});
    FAIL("negative kappa accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::config);
  }
  CHECK_THROWS_AS(BenchmarkParams::make("selkov3d", {{"kappa", 1.0}}), Error);
}

TEST_CASE("domains and sampling boxes") {
  const Benchmark mm = make_benchmark("mm");
  CHECK(mm.in_omega(vec({0.5})));
  CHECK_FALSE(mm.in_omega(vec({1.5})));
  CHECK(mm.in_sampling_box(vec({1.5})));
  const Benchmark t = make_benchmark("tmdd");
  CHECK(t.in_omega(vec({0.2, 1.3})));
  CHECK_FALSE(t.in_omega(vec({0.19, 1.3})));
}

#include "slowman/eval.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace slowman;

namespace {

// Test set on the exact SIM of the linear fixture.
TestSet linear_set(int n) {
  TestSet t;
  t.benchmark = "linear";
  Mat y(n, 1);
  Vec e(n);
  t.x_ref.resize(n, 1);
  for (int k = 0; k < n; ++k) {
    y(k, 0) = 0.1 + 0.8 * k / (n - 1);
    e(k) = k % 2 ? 1e-2 : 1e-3;
    t.x_ref(k, 0) = y(k, 0) / (1 - e(k));
  }
  t.points = Collocation(y, e);
  return t;
}

class Offset final : public SimMap {
 public:
  explicit Offset(double slope) : slope_(slope) {}
  std::string name() const override { return "offset"; }
  int fast_dim() const override { return 1; }
  int slow_dim() const override { return 1; }
  Vec eval(const Vec& y, const double& eps) const override {
    if (y(0) > 0.85) fail(ErrorKind::domain, "outside");
    return Vec::Constant(1, y(0) / (1 - eps) + std::pow(eps, slope_));
  }
  Mat grad_y(const Vec&, const double& eps) const override { return Mat::Constant(1, 1, 1 / (1 - eps)); }

 private:
  double slope_;
};

}  // namespace

TEST_CASE("exact map has zero error") {
  const TestSet t = linear_set(20);
  const ErrorReport r = evaluate(LinearExactSim(), t, "exact");
  CHECK(r.l2 == 0.0);
  CHECK(r.linf == 0.0);
  CHECK(r.mse == 0.0);
  CHECK(r.n_points == 20);
  CHECK(r.pointwise.size() == 20);
}

TEST_CASE("metric identities and exclusions") {
  const TestSet t = linear_set(40);
  const ErrorReport r = evaluate(Offset(2.0), t, "off");
  CHECK(r.excluded > 0);
  CHECK(r.n_points + r.excluded == 40);
  CHECK(r.linf <= r.l2);
  CHECK(r.mse * static_cast<double>(r.n_points) == doctest::Approx(r.l2 * r.l2).epsilon(1e-12));
  CHECK(r.linf == doctest::Approx(1e-4).epsilon(1e-9));
}

TEST_CASE("evaluate is invariant under permutation of the test points") {
  const TestSet t = linear_set(31);
  TestSet p = t;
  for (int k = 0; k < 31; ++k) {
    p.points.y(k, 0) = t.points.y(30 - k, 0);
    p.points.eps(k) = t.points.eps(30 - k);
    p.x_ref(k, 0) = t.x_ref(30 - k, 0);
  }
  const ErrorReport a = evaluate(Offset(1.5), t), b = evaluate(Offset(1.5), p);
  CHECK(a.l2 == b.l2);
  CHECK(a.linf == b.linf);
  CHECK(a.mse == b.mse);
}

TEST_CASE("per-eps maxima and slope") {
  const ErrorReport r = evaluate(Offset(2.0), linear_set(40));
  const auto m = per_eps_max(r);
  REQUIRE(m.size() == 2);
  CHECK(m[0].first == 1e-3);
  CHECK(eps_slope(r) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("loglog fit recovers a power law") {
  const LineFit f = loglog_fit({1e-6, 1e-5, 1e-4, 1e-3}, {3e-18, 3e-15, 3e-12, 3e-9});
  CHECK(f.slope == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(std::log10(3.0)).epsilon(1e-12));
}

TEST_CASE("compare keeps order and labels; empty list gives empty table") {
  const TestSet t = linear_set(10);
  CHECK(compare({}, t).empty());
  const auto rows = compare({{"exact", "Exact", std::make_shared<LinearExactSim>()},
                             {"off", "Offset", std::make_shared<Offset>(1.0)}},
                            t);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].method == "Exact");
  CHECK(rows[1].method == "Offset");
  std::ostringstream os;
  write_table_csv(os, rows);
  const std::string s = os.str();
  CHECK(s.rfind("# slowman-table v1\nmethod,benchmark,l2,linf,mse,n_points,excluded\n", 0) == 0);
  std::ostringstream g;
  write_error_grid_csv(g, rows[0]);
  std::size_t lines = 0;
  for (char c : g.str()) lines += c == '\n';
  CHECK(lines == 2 + 10);
}

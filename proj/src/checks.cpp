#include "slowman/checks.hpp"
#include "slowman/dataset.hpp"
#include "slowman/eval.hpp"
#include "slowman/precision.hpp"
#include "slowman/rpnn.hpp"
#include "slowman/slfnn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace slowman {

bool CheckReport::all_pass() const {
  return std::all_of(lines.begin(), lines.end(), [](const CheckLine& l) { return l.pass; });
}

void CheckReport::append(const CheckReport& other) {
  lines.insert(lines.end(), other.lines.begin(), other.lines.end());
}

void write_check_csv(std::ostream& out, const CheckReport& report) {
  out << "# slowman-checks v1\n";
  out << "suite,benchmark,quantity,value,expected,threshold,pass\n";
  for (const auto& l : report.lines)
    out << l.suite << "," << l.benchmark << "," << l.quantity << "," << format_double(l.value) << ","
        << format_double(l.expected) << "," << format_double(l.threshold) << ","
        << (l.pass ? "pass" : "fail") << "\n";
}

std::pair<Vec, Vec> interior_box(const Benchmark& bench) {
  const Vec mid = 0.5 * (bench.omega_lo + bench.omega_hi);
  const Vec half = 0.25 * (bench.omega_hi - bench.omega_lo);
  return {mid - half, mid + half};
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CheckLine line(const std::string& suite, const Benchmark& b, std::string quantity, double value,
               double expected, double threshold) {
  return {suite, b.params.name, std::move(quantity), value, expected, threshold,
          std::isfinite(value) && std::abs(value - expected) <= threshold};
}

Collocation random_points(const Vec& lo, const Vec& hi, double e0, double e1, int n, Rng& rng) {
  Mat y(n, lo.size());
  Vec e(n);
  for (int k = 0; k < n; ++k) {
    for (Eigen::Index d = 0; d < lo.size(); ++d) y(k, d) = rng.uniform(lo(d), hi(d));
    e(k) = rng.log_uniform(e0, e1);
  }
  return Collocation(std::move(y), std::move(e));
}

template <class Model>
double worst_grad_error(const Model& model, const Collocation& pts) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < pts.size(); ++k) {
    const Vec y = pts.y.row(k).transpose();
    const double e = pts.eps(k);
    const Mat fd = central_jacobian<double>([&](const Vec& q) { return model.eval(q, e); }, y,
                                            model.fast_dim());
    worst = std::max(worst, rel_error(model.grad_y(y, e), fd));
  }
  return worst;
}

std::string eps_tag(double e) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.0e", e);
  return buf;
}

}  // namespace

CheckReport derivative_check(const Benchmark& bench, const DerivativeCheckOptions& opts) {
  require(opts.configs >= 1 && opts.points >= 1 && opts.max_hidden >= 1,
          "derivative_check: invalid options");
  const SlowSystem& sys = *bench.system;
  const int M = sys.fast_dim(), S = sys.slow_dim();
  double g_slfnn = 0, g_rpnn = 0, j_slfnn = 0, j_rpnn = 0;
  for (int c = 0; c < opts.configs; ++c) {
    Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(c)));
    const int L = 1 + static_cast<int>(rng.index(static_cast<std::size_t>(opts.max_hidden)));
    const Collocation pts = random_points(bench.omega_lo, bench.omega_hi, 1e-4, 1e-1, opts.points, rng);
    const std::uint64_t s = derive_seed(opts.seed ^ 0xD0C5ULL, static_cast<std::uint64_t>(c));

    const SlfnnModel sl = SlfnnModel::random(M, S, L, s);
    g_slfnn = std::max(g_slfnn, worst_grad_error(sl, pts));
    const Mat Jsl = slfnn_jacobian(sl, sys, pts);
    const Mat Fsl = central_difference_jacobian(
        [&](const Vec& p) { return slfnn_residuals(sl.with_parameters(p), sys, pts); }, sl.parameters());
    j_slfnn = std::max(j_slfnn, rel_error(Jsl, Fsl));

    const RpnnModel rp = RpnnModel::sample(M, S, L, bench.omega_lo, bench.omega_hi, 1e-4, 1e-1, s);
    g_rpnn = std::max(g_rpnn, worst_grad_error(rp, pts));
    const Mat Jrp = rpnn_jacobian(rp, sys, pts);
    const Mat Frp = central_difference_jacobian(
        [&](const Vec& p) { return rpnn_residuals(rp.with_parameters(p), sys, pts); }, rp.parameters());
    j_rpnn = std::max(j_rpnn, rel_error(Jrp, Frp));
  }
  CheckReport r;
  const double tol = opts.tolerance;
  r.lines.push_back(line("derivative", bench, "slfnn_grad_y", g_slfnn, 0.0, tol));
  r.lines.push_back(line("derivative", bench, "rpnn_grad_y", g_rpnn, 0.0, tol));
  r.lines.push_back(line("derivative", bench, "slfnn_jacobian", j_slfnn, 0.0, tol));
  r.lines.push_back(line("derivative", bench, "rpnn_jacobian", j_rpnn, 0.0, tol));
  return r;
}

int expected_residual_order(const std::string& id) {
  const std::string c = canonical_method(id);
  if (c == "sqssa") return 1;
  if (c == "gspt1" || c == "csp1") return 2;
  if (c == "gspt2") return 3;
  return 0;
}

CheckReport residual_order(const Benchmark& bench, const ResidualOrderOptions& opts) {
  require(opts.eps.size() >= 2 && opts.points >= 1, "residual_order: invalid options");
  const auto sys = make_system<Quad>(bench.params);
  const auto [lo, hi] = interior_box(bench);
  Rng rng(opts.seed);
  std::vector<VecT<Quad>> ys;
  for (int k = 0; k < opts.points; ++k) {
    VecT<Quad> y(lo.size());
    for (Eigen::Index d = 0; d < lo.size(); ++d) y(d) = Quad(rng.uniform(lo(d), hi(d)));
    ys.push_back(y);
  }
  CheckReport r;
  for (const auto& id : baseline_ids(bench.params.name)) {
    const auto h = make_baseline<Quad>(bench.params, id);
    std::vector<double> norms;
    for (double e : opts.eps) {
      Quad sq = 0;
      for (const auto& y : ys) sq += ie_residual<Quad>(*sys, *h, y, Quad(e)).squaredNorm();
      norms.push_back(static_cast<double>(sqrt(sq)));
    }
    const double slope = loglog_fit(opts.eps, norms).slope;
    const int order = expected_residual_order(id);
    if (order > 0)
      r.lines.push_back(line("residual_order", bench, "slope_" + id, slope, order, opts.slope_tolerance));
    else
      r.lines.push_back(line("residual_order", bench, "slope_" + id, slope, slope, kInf));
  }
  return r;
}

CheckReport csp_consistency(const Benchmark& bench, const CspCheckOptions& opts) {
  require(!opts.eps.empty() && opts.points >= 1, "csp_consistency: invalid options");
  const auto [lo, hi] = interior_box(bench);
  Rng rng(opts.seed);
  std::vector<Vec> ys;
  for (int k = 0; k < opts.points; ++k) {
    Vec y(lo.size());
    for (Eigen::Index d = 0; d < lo.size(); ++d) y(d) = rng.uniform(lo(d), hi(d));
    ys.push_back(y);
  }
  CheckReport r;

  // quad precision keeps the O(eps^2) difference well above round-off
  const auto csp_q = make_baseline<Quad>(bench.params, "csp1");
  std::vector<double> cs;
  for (double e : opts.eps) {
    double c = 0;
    for (const auto& yd : ys) {
      const VecT<Quad> y = yd.cast<Quad>();
      const Quad eq(e);
      const VecT<Quad> d = csp_q->eval(y, eq) - expansion_term<Quad>(bench.params, 0, y) -
                           eq * expansion_term<Quad>(bench.params, 1, y);
      c = std::max(c, static_cast<double>(d.norm() / (eq * eq)));
    }
    cs.push_back(c);
    r.lines.push_back(line("csp", bench, "C_eps_" + eps_tag(e), c, c, kInf));
  }
  const double cmax = *std::max_element(cs.begin(), cs.end());
  const double cmin = *std::min_element(cs.begin(), cs.end());
  r.lines.push_back(line("csp", bench, "C_ratio", cmin > 0 ? cmax / cmin : kInf, 1.0, opts.c_ratio - 1.0));

  const NamedMap& csp = bench.baseline("csp1");
  const NamedMap& qssa = bench.baseline("sqssa");
  double worst = 0;
  for (double e : opts.root_eps) {
    for (const auto& y : ys) {
      const double closed = csp.map->eval(y, e)(0);
      // widen a bracket around the QSSA value until the condition changes sign
      const double x0 = qssa.map->eval(y, e)(0);
      double w = 0.05 * (1 + std::abs(x0)), root = std::numeric_limits<double>::quiet_NaN();
      for (int it = 0; it < 30 && std::isnan(root); ++it, w *= 2) {
        try {
          root = csp_one_iteration_root(*bench.system, y, e, x0 - w, x0 + w);
        } catch (const Error& err) {
          if (err.kind() != ErrorKind::numerical) throw;
        }
      }
      const double err = std::abs(root - closed) / std::max(1.0, std::abs(closed));
      worst = std::isfinite(err) ? std::max(worst, err) : kInf;
    }
  }
  r.lines.push_back(line("csp", bench, "root_vs_closed_form", worst, 0.0, opts.root_tolerance));
  return r;
}

}  // namespace slowman

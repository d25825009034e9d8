#include "slowman/eval.hpp"
#include "slowman/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

namespace slowman {

ErrorReport evaluate(const SimMap& h, const TestSet& test, const std::string& method) {
  require(h.slow_dim() == test.points.slow_dim() && h.fast_dim() == test.x_ref.cols(),
          "evaluate: map and test set dimensions differ");
  const Eigen::Index n = test.size();
  std::vector<double> err(static_cast<std::size_t>(n), 0.0);
  std::vector<char> ok(static_cast<std::size_t>(n), 0);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t k) {
    const auto i = static_cast<Eigen::Index>(k);
    try {
      const Vec x = h.eval(test.points.y.row(i).transpose(), test.points.eps(i));
      const double e = (test.x_ref.row(i).transpose() - x).norm();
      if (std::isfinite(e)) {
        err[k] = e;
        ok[k] = 1;
      }
    } catch (const std::exception&) {
      // counted as excluded below
    }
  });

  ErrorReport r;
  r.method = method.empty() ? h.name() : method;
  r.benchmark = test.benchmark;
  std::vector<double> sq;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!ok[i]) {
      ++r.excluded;
      continue;
    }
    r.pointwise.push_back({test.points.y.row(i).transpose(), test.points.eps(i), err[i]});
    sq.push_back(err[i] * err[i]);
    r.linf = std::max(r.linf, err[i]);
  }
  r.n_points = static_cast<Eigen::Index>(sq.size());
  // summing in sorted order makes the result independent of point order
  std::sort(sq.begin(), sq.end());
  double s = 0.0;
  for (double v : sq) s += v;
  r.l2 = std::sqrt(s);
  r.mse = r.n_points ? s / static_cast<double>(r.n_points) : 0.0;
  return r;
}

std::vector<ErrorReport> compare(const std::vector<NamedMap>& methods, const TestSet& test) {
  std::vector<ErrorReport> out;
  for (const auto& m : methods) out.push_back(evaluate(*m.map, test, m.label));
  return out;
}

void write_table_csv(std::ostream& out, const std::vector<ErrorReport>& rows) {
  out << "# slowman-table v1\n";
  out << "method,benchmark,l2,linf,mse,n_points,excluded\n";
  for (const auto& r : rows)
    out << r.method << "," << r.benchmark << "," << format_double(r.l2) << ","
        << format_double(r.linf) << "," << format_double(r.mse) << "," << r.n_points << ","
        << r.excluded << "\n";
}

void write_error_grid_csv(std::ostream& out, const ErrorReport& report) {
  out << "# slowman-grid v1\n";
  const int S = report.pointwise.empty() ? 0 : static_cast<int>(report.pointwise.front().y.size());
  for (int d = 0; d < S; ++d) out << "y" << d + 1 << ",";
  out << "eps,abs_error\n";
  for (const auto& p : report.pointwise) {
    for (int d = 0; d < S; ++d) out << format_double(p.y(d)) << ",";
    out << format_double(p.eps) << "," << format_double(p.abs_error) << "\n";
  }
}

LineFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "loglog_fit: need at least two pairs");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) fail(ErrorKind::domain, "loglog_fit: non-positive value");
    const double a = std::log10(x[i]), b = std::log10(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) fail(ErrorKind::singular_input, "loglog_fit: all x equal");
  LineFit f;
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

std::vector<std::pair<double, double>> per_eps_max(const ErrorReport& report) {
  std::map<double, double> m;
  for (const auto& p : report.pointwise) {
    auto [it, fresh] = m.emplace(p.eps, p.abs_error);
    if (!fresh) it->second = std::max(it->second, p.abs_error);
  }
  return {m.begin(), m.end()};
}

double eps_slope(const ErrorReport& report) {
  std::vector<double> e, a;
  for (const auto& [eps, err] : per_eps_max(report)) {
    e.push_back(eps);
    a.push_back(err);
  }
  return loglog_fit(e, a).slope;
}

}  // namespace slowman

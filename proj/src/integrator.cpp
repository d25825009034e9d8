#include "slowman/integrator.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace slowman {

namespace odeint = boost::numeric::odeint;
namespace ublas = boost::numeric::ublas;
using UVec = ublas::vector<double>;
using UMat = ublas::matrix<double>;

const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::t_end: return "t_end";
    case StopReason::event: return "event";
    case StopReason::step_failure: return "step_failure";
  }
  return "unknown";
}

namespace {

Vec hermite(double t0, double t1, const Vec& s0, const Vec& s1, const Vec& d0,
            const Vec& d1, double t) {
  const double h = t1 - t0;
  if (h <= 0) return s1;
  const double th = (t - t0) / h, th2 = th * th, th3 = th2 * th;
  return (2 * th3 - 3 * th2 + 1) * s0 + (th3 - 2 * th2 + th) * h * d0 +
         (-2 * th3 + 3 * th2) * s1 + (th3 - th2) * h * d1;
}

// Full-state vector field with eps folded into the fast rows.
struct FullField {
  const SlowSystem& sys;
  double eps;
  int m, s;

  Vec rhs(const Vec& st) const {
    const Vec x = st.head(m), y = st.tail(s);
    Vec d(m + s);
    d.head(m) = sys.f(x, y, eps) / eps;
    d.tail(s) = sys.g(x, y, eps);
    return d;
  }

  Mat jac(const Vec& st) const {
    const Vec x = st.head(m), y = st.tail(s);
    Mat j(m + s, m + s);
    j.topLeftCorner(m, m) = sys.fx(x, y, eps) / eps;
    j.topRightCorner(m, s) = sys.fy(x, y, eps) / eps;
    j.bottomLeftCorner(s, m) = sys.gx(x, y, eps);
    j.bottomRightCorner(s, s) = sys.gy(x, y, eps);
    return j;
  }
};

Vec to_eigen(const UVec& u) {
  Vec v(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) v(i) = u[i];
  return v;
}

struct OdeintRhs {
  const FullField* field;
  void operator()(const UVec& u, UVec& du, double) const {
    const Vec d = field->rhs(to_eigen(u));
    for (std::size_t i = 0; i < du.size(); ++i) du[i] = d(i);
  }
};

struct OdeintJac {
  const FullField* field;
  void operator()(const UVec& u, UMat& j, const double&, UVec& dfdt) const {
    const Mat jm = field->jac(to_eigen(u));
    for (std::size_t r = 0; r < j.size1(); ++r) {
      dfdt[r] = 0.0;
      for (std::size_t c = 0; c < j.size2(); ++c) j(r, c) = jm(r, c);
    }
  }
};

// Bisection on a boolean condition over [lo, hi] where cond(lo) is false and
// cond(hi) is true; returns the last time known to be false.
template <class Cond>
double refine(double lo, double hi, const Cond& cond) {
  for (int it = 0; it < 100 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (cond(mid)) hi = mid;
    else lo = mid;
  }
  return lo;
}

}  // namespace

Vec Trajectory::state_at(double t) const {
  require(has_dense_output(), "trajectory was integrated without dense output");
  require(!times.empty() && t >= times.front() - 1e-12 * std::max(1.0, std::abs(times.front())) &&
              t <= times.back() + 1e-12 * std::max(1.0, std::abs(times.back())),
          "state_at: time outside the trajectory");
  if (t <= times.front()) return states.front();
  if (t >= times.back()) return states.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - times.begin());
  return hermite(times[k - 1], times[k], states[k - 1], states[k], derivs[k - 1], derivs[k], t);
}

EventPredicate threshold_stop(int component, double value, bool below) {
  require(component >= 0, "threshold_stop: negative component index");
  return [=](const StepView& st) -> std::optional<double> {
    require(component < st.s1.size(), "threshold_stop: component index out of range");
    auto fired = [&](const Vec& s) { return below ? s(component) < value : s(component) > value; };
    if (fired(st.s0)) return st.t0;
    if (!fired(st.s1)) return std::nullopt;
    return refine(st.t0, st.t1, [&](double t) { return fired(st.at(t)); });
  };
}

EventPredicate poincare_proximity_stop(int component, double level, double distance) {
  require(component >= 0, "poincare_proximity_stop: negative component index");
  std::optional<Vec> last;
  return [=](const StepView& st) mutable -> std::optional<double> {
    require(component < st.s1.size(), "poincare_proximity_stop: component index out of range");
    if (!(st.s0(component) < level && st.s1(component) >= level)) return std::nullopt;
    const double tc = refine(st.t0, st.t1, [&](double t) { return st.at(t)(component) >= level; });
    Vec crossing = st.at(tc);
    crossing(component) = level;
    const bool close = last && (crossing - *last).norm() < distance;
    last = crossing;
    if (close) return tc;
    return std::nullopt;
  };
}

Trajectory integrate(const SlowSystem& sys, const Vec& x0, const Vec& y0, double eps,
                     double t_end, const IntegratorOptions& opts, EventPredicate stop) {
  require(eps > 0, "integrate: eps must be positive");
  require(t_end > 0, "integrate: t_end must be positive");
  require(opts.rtol > 0 && opts.atol > 0, "integrate: tolerances must be positive");
  const int m = sys.fast_dim(), s = sys.slow_dim();
  require(x0.size() == m && y0.size() == s, "integrate: initial state has wrong size");

  FullField field{sys, eps, m, s};
  Trajectory traj;
  traj.fast_dim = m;
  traj.slow_dim = s;
  traj.eps = eps;

  Vec cur(m + s);
  cur << x0, y0;
  if (!cur.allFinite()) fail(ErrorKind::numerical, "integrate: non-finite initial state");
  Vec dcur = field.rhs(cur);
  double t = 0.0;
  traj.times.push_back(t);
  traj.states.push_back(cur);
  traj.derivs.push_back(dcur);

  using Stepper = odeint::rosenbrock4<double>;
  odeint::rosenbrock4_controller<Stepper> ctrl =
      opts.max_step > 0 ? odeint::rosenbrock4_controller<Stepper>(opts.atol, opts.rtol, opts.max_step)
                        : odeint::rosenbrock4_controller<Stepper>(opts.atol, opts.rtol);
  auto system = std::make_pair(OdeintRhs{&field}, OdeintJac{&field});

  double dt = opts.initial_step > 0 ? opts.initial_step : 1e-2 * std::min(eps, t_end);
  UVec u(m + s), unew(m + s);
  for (int i = 0; i < m + s; ++i) u[i] = cur(i);

  int consecutive_fail = 0;
  while (t < t_end) {
    if (traj.steps >= opts.max_steps) {
      traj.stop_reason = StopReason::step_failure;
      break;
    }
    if (dt < 1e-15 * std::max(1.0, std::abs(t)) || consecutive_fail > 500) {
      traj.stop_reason = StopReason::step_failure;
      break;
    }
    const bool last = t + dt >= t_end;
    double tt = t, hh = last ? t_end - t : dt;
    const double h_tried = hh;
    odeint::controlled_step_result res;
    try {
      res = ctrl.try_step(system, u, tt, unew, hh);
    } catch (const odeint::odeint_error&) {
      traj.stop_reason = StopReason::step_failure;
      break;
    }
    if (res == odeint::fail) {
      ++consecutive_fail;
      ++traj.rejected;
      dt = hh;
      continue;
    }
    consecutive_fail = 0;
    ++traj.steps;
    const Vec next = to_eigen(unew);
    if (!next.allFinite())
      fail(ErrorKind::numerical, "integrate: state became non-finite at t = " + std::to_string(tt));
    const double t_next = last ? t_end : t + h_tried;
    const Vec dnext = field.rhs(next);

    if (stop) {
      const double ta = t;
      const Vec s0 = cur, d0 = dcur;
      const std::function<Vec(double)> at = [&](double q) {
        return hermite(ta, t_next, s0, next, d0, dnext, q);
      };
      const StepView view{ta, t_next, s0, next, at};
      if (const auto ts = stop(view)) {
        if (*ts > ta) {
          const Vec se = at(*ts);
          traj.times.push_back(*ts);
          traj.states.push_back(se);
          traj.derivs.push_back(field.rhs(se));
        }
        traj.stop_reason = StopReason::event;
        break;
      }
    }

    t = t_next;
    cur = next;
    dcur = dnext;
    u = unew;
    traj.times.push_back(t);
    traj.states.push_back(cur);
    traj.derivs.push_back(dcur);
    dt = hh;
    if (last) traj.stop_reason = StopReason::t_end;
  }
  if (!opts.dense_output) traj.derivs.clear();
  return traj;
}

std::vector<Vec> sample_window(const Trajectory& traj, double ta, double tb, int n) {
  require(n >= 2, "sample: need at least two points");
  require(traj.size() >= 2, "sample: trajectory has fewer than two nodes");
  require(tb >= ta, "sample: empty window");
  std::vector<Vec> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double t = k == n - 1 ? tb : ta + k * (tb - ta) / (n - 1);
    out.push_back(traj.state_at(t));
  }
  return out;
}

std::vector<Vec> sample_equidistant(const Trajectory& traj, int n) {
  require(n >= 2, "sample_equidistant: need at least two points");
  require(!traj.times.empty(), "sample_equidistant: empty trajectory");
  return sample_window(traj, traj.t0(), traj.tf(), n);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "# slowman-trajectory v1 stop=" << stop_reason_name(traj.stop_reason) << "\n";
  out << "t";
  for (int i = 0; i < traj.fast_dim; ++i) out << ",x" << i + 1;
  for (int i = 0; i < traj.slow_dim; ++i) out << ",y" << i + 1;
  out << ",eps\n";
  char buf[32];
  for (std::size_t k = 0; k < traj.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", traj.times[k]);
    out << buf;
    for (int i = 0; i < traj.states[k].size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", traj.states[k](i));
      out << ',' << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", traj.eps);
    out << ',' << buf << "\n";
  }
}

}  // namespace slowman

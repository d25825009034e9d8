#pragma once

#include "slowman/ode.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

namespace slowman {

struct IntegratorOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  std::size_t max_steps = 1000000;
  bool dense_output = true;
  // 0 lets the integrator pick
  double initial_step = 0.0;
  double max_step = 0.0;
};

enum class StopReason { t_end, event, step_failure };
const char* stop_reason_name(StopReason r);

// Accepted trajectory of the full state s = [x; y]. Derivatives are kept at
// every node so the trajectory can be evaluated anywhere by cubic Hermite
// interpolation, which is what "dense output" means here.
struct Trajectory {
  int fast_dim = 0;
  int slow_dim = 0;
  double eps = 0.0;
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<Vec> derivs;
  StopReason stop_reason = StopReason::t_end;
  std::size_t steps = 0;
  std::size_t rejected = 0;

  std::size_t size() const { return times.size(); }
  double t0() const { return times.front(); }
  double tf() const { return times.back(); }
  bool has_dense_output() const { return !derivs.empty(); }
  Vec state_at(double t) const;
};

// One accepted step as seen by a stop predicate. at(t) interpolates inside
// [t0, t1].
struct StepView {
  double t0, t1;
  const Vec& s0;
  const Vec& s1;
  const std::function<Vec(double)>& at;
};

// Returns the time at which the trajectory should end if the predicate fires
// during this step. Predicates are copied into each integration, so any state
// they carry starts fresh per call.
using EventPredicate = std::function<std::optional<double>(const StepView&)>;

// Fires once s[component] drops below value (or rises above it when
// below = false). The returned stop time is the last time the condition had
// not yet fired, so the retained trajectory never violates it.
EventPredicate threshold_stop(int component, double value, bool below = true);

// Fires when two consecutive upward crossings of the section
// s[component] = level are closer than distance in the full state.
EventPredicate poincare_proximity_stop(int component, double level, double distance);

Trajectory integrate(const SlowSystem& sys, const Vec& x0, const Vec& y0, double eps,
                     double t_end, const IntegratorOptions& opts = {},
                     EventPredicate stop = {});

// n states at t0 + k (tf - t0) / (n - 1).
std::vector<Vec> sample_equidistant(const Trajectory& traj, int n);
// n states equally spaced over [ta, tb], a sub-interval of the trajectory.
std::vector<Vec> sample_window(const Trajectory& traj, double ta, double tb, int n);

void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

}  // namespace slowman

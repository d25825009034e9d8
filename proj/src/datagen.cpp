#include "slowman/datagen.hpp"
#include "slowman/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace slowman {

Protocol default_protocol(const std::string& benchmark) {
  Protocol p;
  p.benchmark = benchmark;
  if (benchmark == "mm") {
    p.version = "mm-v1";
    p.traj_per_eps_train = 10;
    p.traj_per_eps_test = 10;
    p.t_end = 1e3;
  } else if (benchmark == "tmdd") {
    p.version = "tmdd-v1";
    p.traj_per_eps_train = 25;
    p.traj_per_eps_test = 25;
    p.t_end = 1e3;
  } else if (benchmark == "selkov3d") {
    p.version = "selkov3d-v1";
    p.traj_per_eps_train = 25;
    p.traj_per_eps_test = 25;
    p.t_end = 500.0;
  } else {
    fail(ErrorKind::config, "unknown benchmark '" + benchmark + "'");
  }
  return p;
}

namespace {

// uniform over a union of equal-probability intervals
double pick(Rng& rng, std::initializer_list<std::pair<double, double>> parts) {
  const std::size_t i = rng.index(parts.size());
  const auto& iv = *(parts.begin() + i);
  return rng.uniform(iv.first, iv.second);
}

Vec state3(double x, double y, double z) { return (Vec(3) << x, y, z).finished(); }

}  // namespace

Vec sample_initial_state(const std::string& benchmark, bool test, int index, Rng& rng) {
  if (benchmark == "mm") {
    const double x = rng.uniform(0.0, 2.0);
    const double y = test ? rng.uniform(2.0, 3.0) : rng.uniform(1.0, 2.0);
    return (Vec(2) << x, y).finished();
  }
  if (benchmark == "tmdd") {
    if (test) {
      const double y = rng.uniform(3.0, 4.0), z = rng.uniform(0.0, 1.0);
      return state3(rng.uniform(0.0, 2.0), y, z);
    }
    const double y = rng.uniform(2.0, 2.4), z = rng.uniform(1.3, 2.3);
    return state3(rng.uniform(0.0, 2.0), y, z);
  }
  if (benchmark == "selkov3d") {
    // the first 20 of every 25 start outside the limit cycle, the rest inside
    const bool exterior = index % 25 < 20;
    double y, z;
    if (!exterior) {
      y = rng.uniform(0.5, 0.7);
      z = rng.uniform(1.2, 1.4);
    } else if (test) {
      y = pick(rng, {{0.0, 0.2}, {1.3, 1.5}});
      z = pick(rng, {{0.0, 0.5}, {2.1, 2.6}});
    } else {
      y = pick(rng, {{0.3, 0.5}, {1.0, 1.2}});
      z = pick(rng, {{0.4, 0.8}, {1.6, 2.0}});
    }
    return state3(rng.uniform(0.0, 2.0), y, z);
  }
  fail(ErrorKind::config, "unknown benchmark '" + benchmark + "'");
}

EventPredicate stop_predicate(const std::string& benchmark) {
  // state layout is [x; y...], so the first slow variable is component 1
  if (benchmark == "mm") return threshold_stop(1, 1e-6);
  if (benchmark == "tmdd") return threshold_stop(1, 0.2);
  if (benchmark == "selkov3d") return poincare_proximity_stop(1, 0.7, 0.01);
  fail(ErrorKind::config, "unknown benchmark '" + benchmark + "'");
}

std::vector<double> log_grid(double lo, double hi, int n) {
  require(n >= 2 && lo > 0 && hi > lo, "log_grid: need n >= 2 and 0 < lo < hi");
  std::vector<double> out(n);
  const double a = std::log10(lo), b = std::log10(hi);
  for (int j = 0; j < n; ++j) out[j] = std::pow(10.0, a + (b - a) * j / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

namespace {

// Bisection between a node with cond false and one with cond true; returns
// the earliest time known to satisfy cond.
template <class Cond>
double first_true(double lo, double hi, const Cond& cond) {
  for (int it = 0; it < 100 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (cond(mid)) hi = mid;
    else lo = mid;
  }
  return hi;
}

struct Window {
  double t_in = 0, t_out = 0;
  bool ok = false;
};

// First contiguous stretch of the trajectory inside the sampling box.
Window sampling_window(const Trajectory& tr, const Benchmark& bench) {
  const int m = tr.fast_dim, s = tr.slow_dim;
  auto inside_at = [&](double t) { return bench.in_sampling_box(tr.state_at(t).segment(m, s)); };
  auto inside_node = [&](std::size_t i) {
    return bench.in_sampling_box(tr.states[i].segment(m, s));
  };
  Window w;
  std::size_t a = 0;
  while (a < tr.size() && !inside_node(a)) ++a;
  if (a == tr.size()) return w;
  w.t_in = a == 0 ? tr.times[0] : first_true(tr.times[a - 1], tr.times[a], inside_at);
  std::size_t b = a + 1;
  while (b < tr.size() && inside_node(b)) ++b;
  if (b == tr.size()) {
    w.t_out = tr.tf();
  } else {
    // last inside time: first time at which "outside" holds, stepped back
    double lo = tr.times[b - 1], hi = tr.times[b];
    for (int it = 0; it < 100 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (inside_at(mid)) lo = mid;
      else hi = mid;
    }
    w.t_out = lo;
  }
  w.ok = w.t_out > w.t_in;
  return w;
}

struct TrainChunk {
  std::vector<Vec> y;
  std::vector<double> t;
};

struct TestChunk {
  std::vector<Vec> y, x;
  std::vector<double> t;
};

}  // namespace

TrainingSet make_training_set(const Benchmark& bench, std::uint64_t seed, const Protocol& proto) {
  const std::string& name = bench.params.name;
  require(proto.benchmark == name, "make_training_set: protocol is for a different benchmark");
  require(proto.points_per_traj_train >= 2 && proto.traj_per_eps_train >= 1,
          "make_training_set: invalid protocol counts");
  const std::vector<double> eps = log_grid(proto.eps0, proto.eps1, proto.n_eps_train);
  const int per = proto.traj_per_eps_train, n_jobs = proto.n_eps_train * per;
  const int m = bench.system->fast_dim(), s = bench.system->slow_dim();

  std::vector<TrainChunk> chunks(n_jobs);
  parallel_for(static_cast<std::size_t>(n_jobs), [&](std::size_t job) {
    const int j = static_cast<int>(job) / per, i = static_cast<int>(job) % per;
    Rng rng(derive_seed(seed, job));
    for (int attempt = 0; attempt <= proto.max_retries; ++attempt) {
      const Vec s0 = sample_initial_state(name, false, i, rng);
      const Trajectory tr = integrate(*bench.system, s0.head(m), s0.tail(s), eps[j], proto.t_end,
                                      proto.integrator, stop_predicate(name));
      if (tr.stop_reason == StopReason::step_failure) continue;
      const Window w = sampling_window(tr, bench);
      if (!w.ok) continue;
      const auto pts = sample_window(tr, w.t_in, w.t_out, proto.points_per_traj_train);
      bool all_in = true;
      for (const auto& p : pts) all_in = all_in && bench.in_sampling_box(p.segment(m, s));
      if (!all_in) continue;
      TrainChunk c;
      for (int k = 0; k < proto.points_per_traj_train; ++k) {
        c.y.push_back(pts[k].segment(m, s));
        c.t.push_back(w.t_in + k * (w.t_out - w.t_in) / (proto.points_per_traj_train - 1));
      }
      chunks[job] = std::move(c);
      return;
    }
    fail(ErrorKind::numerical, "make_training_set: no usable trajectory for eps index " +
                                   std::to_string(j) + ", trajectory " + std::to_string(i));
  });

  TrainingSet set;
  set.benchmark = name;
  set.protocol = proto.version;
  set.seed = seed;
  set.omega_lo = bench.sample_lo;
  set.omega_hi = bench.sample_hi;
  set.eps0 = proto.eps0;
  set.eps1 = proto.eps1;
  const Eigen::Index n = static_cast<Eigen::Index>(n_jobs) * proto.points_per_traj_train;
  Mat Y(n, s);
  Vec E(n);
  Eigen::Index row = 0;
  for (int job = 0; job < n_jobs; ++job) {
    for (std::size_t k = 0; k < chunks[job].y.size(); ++k, ++row) {
      Y.row(row) = chunks[job].y[k].transpose();
      E(row) = eps[job / per];
      set.traj.push_back(job);
      set.time.push_back(chunks[job].t[k]);
    }
  }
  set.points = Collocation(std::move(Y), std::move(E));

  // uniformly random 80/20 split
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) perm[i] = i;
  Rng rng(derive_seed(seed, 0x5B117));
  for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);
  const auto n_train = static_cast<std::size_t>(std::llround(proto.train_fraction * static_cast<double>(n)));
  set.train_idx.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  set.valid_idx.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
  std::sort(set.train_idx.begin(), set.train_idx.end());
  std::sort(set.valid_idx.begin(), set.valid_idx.end());
  return set;
}

TrainingSet make_training_set(const Benchmark& bench, std::uint64_t seed) {
  return make_training_set(bench, seed, default_protocol(bench.params.name));
}

TestSet make_test_set(const Benchmark& bench, std::uint64_t seed, const Protocol& proto) {
  const std::string& name = bench.params.name;
  require(proto.benchmark == name, "make_test_set: protocol is for a different benchmark");
  require(proto.points_per_traj_test >= 2 && proto.traj_per_eps_test >= 1 && proto.n_eps_test >= 1,
          "make_test_set: invalid protocol counts");
  const int m = bench.system->fast_dim(), s = bench.system->slow_dim();

  std::vector<double> eps(proto.n_eps_test);
  {
    Rng rng(derive_seed(seed, 0xE95));
    for (auto& e : eps)
      e = proto.test_eps_log_uniform ? rng.log_uniform(proto.eps0, proto.eps1)
                                     : rng.uniform(proto.eps0, proto.eps1);
  }
  const int per = proto.traj_per_eps_test, n_jobs = proto.n_eps_test * per;
  std::vector<TestChunk> chunks(n_jobs);
  parallel_for(static_cast<std::size_t>(n_jobs), [&](std::size_t job) {
    const int j = static_cast<int>(job) / per, i = static_cast<int>(job) % per;
    Rng rng(derive_seed(seed ^ 0x7E57ULL, job));
    const Vec s0 = sample_initial_state(name, true, i, rng);
    const Trajectory tr = integrate(*bench.system, s0.head(m), s0.tail(s), eps[j], proto.t_end,
                                    proto.integrator, stop_predicate(name));
    if (tr.stop_reason == StopReason::step_failure) return;
    const double ta = proto.transient_factor * eps[j];
    if (tr.tf() <= ta) return;
    const int n = proto.points_per_traj_test;
    const double t0 = proto.test_grid_from_start ? tr.t0() : ta;
    const auto pts = sample_window(tr, t0, tr.tf(), n);
    TestChunk c;
    for (int k = 0; k < n; ++k) {
      const double t = t0 + k * (tr.tf() - t0) / (n - 1);
      const Vec y = pts[k].segment(m, s);
      if (t <= ta || !bench.in_omega(y)) continue;
      c.y.push_back(y);
      c.x.push_back(pts[k].head(m));
      c.t.push_back(t);
    }
    chunks[job] = std::move(c);
  });

  TestSet set;
  set.benchmark = name;
  set.protocol = proto.version;
  set.seed = seed;
  set.omega_lo = bench.omega_lo;
  set.omega_hi = bench.omega_hi;
  set.eps0 = proto.eps0;
  set.eps1 = proto.eps1;
  Eigen::Index n = 0;
  for (const auto& c : chunks) n += static_cast<Eigen::Index>(c.y.size());
  Mat Y(n, s), X(n, m);
  Vec E(n);
  Eigen::Index row = 0;
  for (int job = 0; job < n_jobs; ++job) {
    for (std::size_t k = 0; k < chunks[job].y.size(); ++k, ++row) {
      Y.row(row) = chunks[job].y[k].transpose();
      X.row(row) = chunks[job].x[k].transpose();
      E(row) = eps[job / per];
      set.traj.push_back(job);
      set.time.push_back(chunks[job].t[k]);
    }
  }
  set.points = Collocation(std::move(Y), std::move(E));
  set.x_ref = std::move(X);
  return set;
}

TestSet make_test_set(const Benchmark& bench, std::uint64_t seed) {
  return make_test_set(bench, seed, default_protocol(bench.params.name));
}

}  // namespace slowman

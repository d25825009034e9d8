#pragma once

#include "slowman/ode.hpp"

#include <map>
#include <string>
#include <vector>

namespace slowman {

struct MmParams {
  double kappa = 10.0;
  double sigma = 100.0;
  void validate() const;
};

// Scaled TMDD ratios. k3 = ksyn/(kint L0) with L0 = kint/(kon * 0.01), i.e. the
// L0 at which the raw rates give eps = 0.01.
struct TmddParams {
  double k1 = 0.001 / 0.0089;
  double k2 = 0.0089 / 0.003;
  double k3 = 0.11 * 0.091 * 0.01 / (0.003 * 0.003);
  double k4 = 0.0015 / 0.003;
  void validate() const;
  static TmddParams from_rates(double kon, double koff, double kel, double ksyn,
                               double kdeg, double kint, double L0);
};

struct SelkovParams {
  double a = 0.1;
  double b = 0.6;
  double k = 1.0;
  void validate() const;
};

// Which benchmark and with which parameters. Only the block matching name is
// read.
struct BenchmarkParams {
  std::string name = "mm";
  MmParams mm;
  TmddParams tmdd;
  SelkovParams selkov;

  static BenchmarkParams make(const std::string& name,
                              const std::map<std::string, double>& overrides = {});
  std::map<std::string, double> values() const;
};

std::vector<std::string> benchmark_names();
// Canonical baseline ids in table order: sqssa, spt1 (mm only), gspt1, gspt2, csp1.
std::vector<std::string> baseline_ids(const std::string& benchmark);
// "qssa" is accepted as a spelling of "sqssa".
std::string canonical_method(const std::string& id);
std::string method_label(const std::string& benchmark, const std::string& id);

template <class T>
std::shared_ptr<const BasicSlowSystem<T>> make_system(const BenchmarkParams& p);
template <class T>
std::shared_ptr<const BasicSimMap<T>> make_baseline(const BenchmarkParams& p, const std::string& id);
// Coefficient h_order(y) of the regular expansion h = h0 + eps h1 + eps^2 h2.
template <class T>
VecT<T> expansion_term(const BenchmarkParams& p, int order, const VecT<T>& y);

struct NamedMap {
  std::string id;
  std::string label;
  SimMapPtr map;
};

SystemPtr mm_system(const MmParams& p = {});
SystemPtr tmdd_system(const TmddParams& p = {});
SystemPtr selkov_system(const SelkovParams& p = {});
std::vector<NamedMap> mm_baselines(const MmParams& p = {});
std::vector<NamedMap> tmdd_baselines(const TmddParams& p = {});
std::vector<NamedMap> selkov_baselines(const SelkovParams& p = {});

// Registry entry: system, baselines, the slow-variable box Omega on which
// accuracy is measured, and the box training points are drawn from. The
// latter reaches upstream of Omega to the top of the initial-condition box:
// the invariance equation is transported along the slow flow, so a boundary
// placed at the edge of Omega would leave the manifold undetermined there.
struct Benchmark {
  BenchmarkParams params;
  SystemPtr system;
  std::vector<NamedMap> baselines;
  Vec omega_lo, omega_hi;
  Vec sample_lo, sample_hi;

  const NamedMap& baseline(const std::string& id) const;
  bool in_omega(const Vec& y) const;
  bool in_sampling_box(const Vec& y) const;
};

bool in_box(const Vec& y, const Vec& lo, const Vec& hi);

Benchmark make_benchmark(const std::string& name,
                         const std::map<std::string, double>& overrides = {});

// f + eps (df/dx)^-1 (df/dy) g, the one-iteration CSP slow-manifold condition.
template <class T>
VecT<T> csp_one_iteration_condition(const BasicSlowSystem<T>& sys, const VecT<T>& x,
                                    const VecT<T>& y, const T& eps);

// Root in x of the scalar CSP condition inside [lo, hi] (M = 1 only).
double csp_one_iteration_root(const SlowSystem& sys, const Vec& y, double eps, double lo,
                              double hi);

// Two-iteration CSP condition for MM in implicit form, as a residual in (x, y).
template <class T>
T mm_csp2_implicit_residual(const T& x, const T& y, const T& eps, const MmParams& p);

}  // namespace slowman

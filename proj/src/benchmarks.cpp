#include "slowman/benchmarks.hpp"
#include "slowman/precision.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <functional>

namespace slowman {

void MmParams::validate() const {
  if (!(kappa > 0 && sigma > 0)) fail(ErrorKind::config, "mm: kappa and sigma must be positive");
}

void TmddParams::validate() const {
  if (!(k1 > 0 && k2 > 0 && k3 > 0 && k4 > 0))
    fail(ErrorKind::config, "tmdd: k1..k4 must be positive");
}

TmddParams TmddParams::from_rates(double kon, double koff, double kel, double ksyn, double kdeg,
                                  double kint, double L0) {
  TmddParams p;
  p.k1 = koff / kdeg;
  p.k2 = kdeg / kint;
  p.k3 = ksyn / (kint * L0);
  p.k4 = kel / kint;
  (void)kon;
  p.validate();
  return p;
}

void SelkovParams::validate() const {
  if (!(a > 0 && b > 0 && k > 0)) fail(ErrorKind::config, "selkov3d: a, b, k must be positive");
}

std::vector<std::string> benchmark_names() { return {"mm", "tmdd", "selkov3d"}; }

static void require_benchmark(const std::string& name) {
  for (const auto& n : benchmark_names())
    if (n == name) return;
  fail(ErrorKind::config, "unknown benchmark '" + name + "'");
}

BenchmarkParams BenchmarkParams::make(const std::string& name,
                                      const std::map<std::string, double>& overrides) {
  require_benchmark(name);
  BenchmarkParams p;
  p.name = name;
  for (const auto& [key, value] : overrides) {
    double* slot = nullptr;
    if (name == "mm") {
      if (key == "kappa") slot = &p.mm.kappa;
      if (key == "sigma") slot = &p.mm.sigma;
    } else if (name == "tmdd") {
      if (key == "k1") slot = &p.tmdd.k1;
      if (key == "k2") slot = &p.tmdd.k2;
      if (key == "k3") slot = &p.tmdd.k3;
      if (key == "k4") slot = &p.tmdd.k4;
    } else {
      if (key == "a") slot = &p.selkov.a;
      if (key == "b") slot = &p.selkov.b;
      if (key == "k") slot = &p.selkov.k;
    }
    if (!slot) fail(ErrorKind::config, "unknown parameter '" + key + "' for benchmark " + name);
    *slot = value;
  }
  if (name == "mm") p.mm.validate();
  else if (name == "tmdd") p.tmdd.validate();
  else p.selkov.validate();
  return p;
}

std::map<std::string, double> BenchmarkParams::values() const {
  if (name == "mm") return {{"kappa", mm.kappa}, {"sigma", mm.sigma}};
  if (name == "tmdd") return {{"k1", tmdd.k1}, {"k2", tmdd.k2}, {"k3", tmdd.k3}, {"k4", tmdd.k4}};
  return {{"a", selkov.a}, {"b", selkov.b}, {"k", selkov.k}};
}

std::string canonical_method(const std::string& id) { return id == "qssa" ? "sqssa" : id; }

std::vector<std::string> baseline_ids(const std::string& benchmark) {
  require_benchmark(benchmark);
  if (benchmark == "mm") return {"sqssa", "spt1", "gspt1", "gspt2", "csp1"};
  return {"sqssa", "gspt1", "gspt2", "csp1"};
}

std::string method_label(const std::string& benchmark, const std::string& id) {
  const std::string c = canonical_method(id);
  if (c == "slfnn") return "SLFNN";
  if (c == "rpnn") return "RPNN";
  if (c == "sqssa") return benchmark == "mm" ? "sQSSA" : "QSSA";
  if (c == "spt1") return "SPT O(eps)";
  if (c == "gspt1") return "GSPT O(eps)";
  if (c == "gspt2") return "GSPT O(eps^2)";
  if (c == "csp1") return "CSP";
  return c;
}

namespace {

using std::abs;
using std::pow;
using std::log;
using std::sqrt;

template <class T>
VecT<T> v1(const T& a) {
  VecT<T> v(1);
  v(0) = a;
  return v;
}

template <class T>
MatT<T> m11(const T& a) {
  MatT<T> m(1, 1);
  m(0, 0) = a;
  return m;
}

// ---------------------------------------------------------------- systems

template <class T>
class MmSystem final : public BasicSlowSystem<T> {
 public:
  using V = VecT<T>;
  using M = MatT<T>;
  explicit MmSystem(MmParams p) : p_(p) {}
  std::string name() const override { return "mm"; }
  int fast_dim() const override { return 1; }
  int slow_dim() const override { return 1; }
  std::map<std::string, double> params() const override {
    return {{"kappa", p_.kappa}, {"sigma", p_.sigma}};
  }
  V f(const V& x, const V& y, const T&) const override {
    const T k(p_.kappa);
    return v1<T>(y(0) - (k + y(0)) * x(0) / (k + 1));
  }
  V g(const V& x, const V& y, const T&) const override {
    const T k(p_.kappa), s(p_.sigma);
    return v1<T>((-(k + 1) * y(0) + (k - s + y(0)) * x(0)) / s);
  }
  M fx(const V&, const V& y, const T&) const override {
    const T k(p_.kappa);
    return m11<T>(-(k + y(0)) / (k + 1));
  }
  M fy(const V& x, const V&, const T&) const override {
    const T k(p_.kappa);
    return m11<T>(1 - x(0) / (k + 1));
  }
  M gx(const V&, const V& y, const T&) const override {
    const T k(p_.kappa), s(p_.sigma);
    return m11<T>((k - s + y(0)) / s);
  }
  M gy(const V& x, const V&, const T&) const override {
    const T k(p_.kappa), s(p_.sigma);
    return m11<T>((-(k + 1) + x(0)) / s);
  }

 private:
  MmParams p_;
};

template <class T>
class TmddSystem final : public BasicSlowSystem<T> {
 public:
  using V = VecT<T>;
  using M = MatT<T>;
  explicit TmddSystem(TmddParams p) : p_(p) {}
  std::string name() const override { return "tmdd"; }
  int fast_dim() const override { return 1; }
  int slow_dim() const override { return 2; }
  std::map<std::string, double> params() const override {
    return {{"k1", p_.k1}, {"k2", p_.k2}, {"k3", p_.k3}, {"k4", p_.k4}};
  }
  V f(const V& x, const V& y, const T& eps) const override {
    const T k1(p_.k1), k2(p_.k2);
    return v1<T>(-x(0) * y(0) + k1 * y(1) + 1 - eps * k2 * x(0));
  }
  V g(const V& x, const V& y, const T&) const override {
    const T k1(p_.k1), k2(p_.k2), k3(p_.k3), k4(p_.k4);
    V out(2);
    out(0) = k3 * (-x(0) * y(0) + k1 * y(1)) - k4 * y(0);
    out(1) = k2 * (x(0) * y(0) - k1 * y(1)) - y(1);
    return out;
  }
  M fx(const V&, const V& y, const T& eps) const override {
    return m11<T>(-y(0) - eps * T(p_.k2));
  }
  M fy(const V& x, const V&, const T&) const override {
    M m(1, 2);
    m << -x(0), T(p_.k1);
    return m;
  }
  M gx(const V&, const V& y, const T&) const override {
    M m(2, 1);
    m << -T(p_.k3) * y(0), T(p_.k2) * y(0);
    return m;
  }
  M gy(const V& x, const V&, const T&) const override {
    const T k1(p_.k1), k2(p_.k2), k3(p_.k3), k4(p_.k4);
    M m(2, 2);
    m << -k3 * x(0) - k4, k3 * k1, k2 * x(0), -k2 * k1 - 1;
    return m;
  }

 private:
  TmddParams p_;
};

template <class T>
class SelkovSystem final : public BasicSlowSystem<T> {
 public:
  using V = VecT<T>;
  using M = MatT<T>;
  explicit SelkovSystem(SelkovParams p) : p_(p) {}
  std::string name() const override { return "selkov3d"; }
  int fast_dim() const override { return 1; }
  int slow_dim() const override { return 2; }
  std::map<std::string, double> params() const override {
    return {{"a", p_.a}, {"b", p_.b}, {"k", p_.k}};
  }
  V f(const V& x, const V& y, const T&) const override {
    return v1<T>(y(0) * y(0) * y(1) - T(p_.k) * x(0) * y(0));
  }
  V g(const V& x, const V& y, const T& eps) const override {
    const T a(p_.a), b(p_.b);
    V out(2);
    out(0) = a * y(1) + y(0) * y(0) * y(1) - y(0) + eps * x(0);
    out(1) = -a * y(1) - y(0) * y(0) * y(1) + b;
    return out;
  }
  M fx(const V&, const V& y, const T&) const override { return m11<T>(-T(p_.k) * y(0)); }
  M fy(const V& x, const V& y, const T&) const override {
    M m(1, 2);
    m << 2 * y(0) * y(1) - T(p_.k) * x(0), y(0) * y(0);
    return m;
  }
  M gx(const V&, const V&, const T& eps) const override {
    M m(2, 1);
    m << eps, T(0);
    return m;
  }
  M gy(const V&, const V& y, const T&) const override {
    const T a(p_.a);
    M m(2, 2);
    m << 2 * y(0) * y(1) - 1, a + y(0) * y(0), -2 * y(0) * y(1), -a - y(0) * y(0);
    return m;
  }

 private:
  SelkovParams p_;
};

// ---------------------------------------------------------------- closed forms

template <class T>
struct MmForms {
  T k, s;
  explicit MmForms(const MmParams& p) : k(p.kappa), s(p.sigma) {}

  void check(const T& y) const {
    if (k + y == 0) fail(ErrorKind::singular_input, "mm: kappa + y = 0");
  }
  T h0(const T& y) const { return (k + 1) * y / (k + y); }
  T dh0(const T& y) const { return (k + 1) * k / ((k + y) * (k + y)); }
  T h1(const T& y) const { return k * pow(k + 1, 3) * y / pow(k + y, 4); }
  T dh1(const T& y) const { return k * pow(k + 1, 3) * (k - 3 * y) / pow(k + y, 5); }
  T h2(const T& y) const {
    const T u = k * k * y + 3 * s * y * y + k * y * y - 2 * k * s * y;
    return -k * pow(k + 1, 5) * u / (s * pow(k + y, 7));
  }
  T dh2(const T& y) const {
    const T u = k * k * y + 3 * s * y * y + k * y * y - 2 * k * s * y;
    const T du = k * k + 6 * s * y + 2 * k * y - 2 * k * s;
    return -k * pow(k + 1, 5) * (du * (k + y) - 7 * u) / (s * pow(k + y, 8));
  }
  // first-order SPT correction
  T spt(const T& y) const {
    if (!(y > 0)) fail(ErrorKind::domain, "mm spt1: logarithm needs y > 0");
    const T L = log((k + y) / ((k + 1) * y));
    const T B = 2 * s * y / (k + y) - y + (k - s) * y / k * L;
    return k * (k + 1) * (k + 1) / (s * pow(k + y, 3)) * B;
  }
  T dspt(const T& y) const {
    if (!(y > 0)) fail(ErrorKind::domain, "mm spt1: logarithm needs y > 0");
    const T L = log((k + y) / ((k + 1) * y));
    const T dL = 1 / (k + y) - 1 / y;
    const T B = 2 * s * y / (k + y) - y + (k - s) * y / k * L;
    const T dB = 2 * s * k / ((k + y) * (k + y)) - 1 + (k - s) / k * (L + y * dL);
    const T P = k * (k + 1) * (k + 1) / s;
    return P * (-3 * B / pow(k + y, 4) + dB / pow(k + y, 3));
  }
  // one-iteration CSP root, rationalised so it stays regular at eps = 0
  T csp(const T& y, const T& e) const {
    const T c = (k + 1) * (k + 1);
    const T A = s * (k + y) * (k + y) + e * c * (k - s + 2 * y);
    const T q = e * c * (k - s) + s * (k + y) * (k + y);
    const T B = q * q + 4 * e * c * s * s * y * (k + y);
    if (B < 0) fail(ErrorKind::domain, "mm csp1: negative radicand");
    const T den = A + sqrt(B);
    if (den == 0) fail(ErrorKind::singular_input, "mm csp1: vanishing denominator");
    return 2 * (k + 1) * y * (s * (k + y) + e * c) / den;
  }
};

template <class T>
struct TmddForms {
  T k1, k2, k3, k4;
  explicit TmddForms(const TmddParams& p) : k1(p.k1), k2(p.k2), k3(p.k3), k4(p.k4) {}

  void check(const VecT<T>& v) const {
    if (v(0) == 0) fail(ErrorKind::singular_input, "tmdd: y = 0");
  }
  T h0(const T& y, const T& z) const { return (1 + k1 * z) / y; }
  T h1(const T& y, const T& z) const {
    const T B = k2 + k1 * k2 + k4 + k1 * z * (k2 + k4 - 1);
    return -(k3 * (1 + k1 * z) + y * B) / (y * y * y);
  }
  T h2(const T& y, const T& z) const {
    const T n =
        k3 * k3 * (k1 * z + 1) * (k1 * z + 4) +
        y * y *
            ((k2 + k4) * (k2 + 2 * k4) + k1 * k2 * (3 * k2 + 4 * k4 - 1) +
             k1 * (k2 + k4 - 1) * (k2 + 2 * k4 - 1) * z + k1 * k1 * k2 * (k2 + (k2 + k4 - 1) * z)) +
        k3 * y *
            (6 * k4 + k1 * z * (7 * k4 + k1 * (k4 - 1) * z - 4) +
             k2 * (4 + k1 * (5 + z * (5 + k1 * (2 + z)))));
    return n / pow(y, 5);
  }
  MatT<T> grad01(const T& y, const T& z, const T& e) const {
    const T B = k2 + k1 * k2 + k4 + k1 * z * (k2 + k4 - 1);
    MatT<T> g(1, 2);
    g(0, 0) = -(1 + k1 * z) / (y * y) + e * (3 * k3 * (1 + k1 * z) / pow(y, 4) + 2 * B / pow(y, 3));
    g(0, 1) = k1 / y + e * (-k3 * k1 / pow(y, 3) - k1 * (k2 + k4 - 1) / (y * y));
    return g;
  }
  T csp(const T& y, const T& z, const T& e) const {
    const T Q = (y + e * k2) * (y + e * k2) + e * (y * (k1 * k2 + k4) - k1 * k3 * z);
    if (Q == 0) fail(ErrorKind::singular_input, "tmdd csp1: vanishing denominator");
    const T R = e * k2 + y + k1 * z * (e * (1 + k2 + k1 * k2) + y);
    const T U = 4 * e * k3 * y * R / (Q * Q);
    if (1 + U < 0) fail(ErrorKind::domain, "tmdd csp1: negative radicand");
    return 2 * R / (Q * (1 + sqrt(1 + U)));
  }
};

template <class T>
struct SelkovForms {
  T a, b, k;
  explicit SelkovForms(const SelkovParams& p) : a(p.a), b(p.b), k(p.k) {}

  void check(const VecT<T>& v) const {
    if (v(0) == 0) fail(ErrorKind::singular_input, "selkov3d: y = 0");
  }
  T h0(const T& y, const T& z) const { return y * z / k; }
  T h1(const T& y, const T& z) const {
    return (z - b) / (k * k) + z * (a + y * y) * (y - z) / (k * k * y);
  }
  T h2(const T& y, const T& z) const {
    const T n = b * y * (-y * (1 + a + y * y) + 2 * (a + y * y) * z) +
                z * (a * y * (y + 2 * pow(y, 3) + z - 6 * y * y * z) +
                     a * a * (y * y - 2 * y * z - z * z) +
                     pow(y, 3) * (-2 * z + y * (3 + y * y - 4 * y * z + z * z)));
    return n / (pow(k, 3) * pow(y, 3));
  }
  MatT<T> grad01(const T& y, const T& z, const T& e) const {
    // q = z (y - z)(a/y + y) is the y-dependent part of k^2 h1
    const T w = a / y + y;
    const T qy = z * (w + (y - z) * (1 - a / (y * y)));
    const T qz = w * (y - 2 * z);
    MatT<T> g(1, 2);
    g(0, 0) = z / k + e * qy / (k * k);
    g(0, 1) = y / k + e * (1 + qz) / (k * k);
    return g;
  }
  T csp(const T& y, const T& z, const T& e) const {
    const T S = e * b * y + z * (2 * e * z * (a + y * y) - y * (k * y + e * (2 + a + y * y)));
    const T D = k * y * (k * y + e) + e * z * (2 * e * y - k * (a + y * y));
    if (D == 0) fail(ErrorKind::singular_input, "selkov3d csp1: vanishing denominator");
    const T V = 4 * e * e * k * y * S / (D * D);
    if (1 + V < 0) fail(ErrorKind::domain, "selkov3d csp1: negative radicand");
    return -2 * y * S / (D * (1 + sqrt(1 + V)));
  }
};

// A SIM map defined by closures; a missing gradient falls back to central
// differences of eval.
template <class T>
class ClosedFormSim final : public BasicSimMap<T> {
 public:
  using V = VecT<T>;
  using M = MatT<T>;
  using EvalFn = std::function<V(const V&, const T&)>;
  using GradFn = std::function<M(const V&, const T&)>;

  ClosedFormSim(std::string name, int slow, EvalFn eval, GradFn grad)
      : name_(std::move(name)), slow_(slow), eval_(std::move(eval)), grad_(std::move(grad)) {}
  std::string name() const override { return name_; }
  int fast_dim() const override { return 1; }
  int slow_dim() const override { return slow_; }
  V eval(const V& y, const T& eps) const override {
    require(y.size() == slow_, name_ + ": slow state has wrong size");
    return eval_(y, eps);
  }
  M grad_y(const V& y, const T& eps) const override {
    require(y.size() == slow_, name_ + ": slow state has wrong size");
    if (grad_) return grad_(y, eps);
    return central_jacobian<T>([&](const V& q) { return eval_(q, eps); }, y, 1);
  }

 private:
  std::string name_;
  int slow_;
  EvalFn eval_;
  GradFn grad_;
};

template <class T>
std::shared_ptr<const BasicSimMap<T>> mm_baseline(const MmParams& p, const std::string& id) {
  using V = VecT<T>;
  const MmForms<T> F(p);
  const std::string name = "mm/" + id;
  auto sim = [&](auto eval, auto grad) {
    return std::make_shared<ClosedFormSim<T>>(name, 1, eval, grad);
  };
  if (id == "sqssa")
    return sim([F](const V& y, const T&) { F.check(y(0)); return v1<T>(F.h0(y(0))); },
               [F](const V& y, const T&) { F.check(y(0)); return m11<T>(F.dh0(y(0))); });
  if (id == "spt1")
    return sim([F](const V& y, const T& e) { F.check(y(0)); return v1<T>(F.h0(y(0)) + e * F.spt(y(0))); },
               [F](const V& y, const T& e) { F.check(y(0)); return m11<T>(F.dh0(y(0)) + e * F.dspt(y(0))); });
  if (id == "gspt1")
    return sim([F](const V& y, const T& e) { F.check(y(0)); return v1<T>(F.h0(y(0)) + e * F.h1(y(0))); },
               [F](const V& y, const T& e) { F.check(y(0)); return m11<T>(F.dh0(y(0)) + e * F.dh1(y(0))); });
  if (id == "gspt2")
    return sim(
        [F](const V& y, const T& e) {
          F.check(y(0));
          return v1<T>(F.h0(y(0)) + e * F.h1(y(0)) + e * e * F.h2(y(0)));
        },
        [F](const V& y, const T& e) {
          F.check(y(0));
          return m11<T>(F.dh0(y(0)) + e * F.dh1(y(0)) + e * e * F.dh2(y(0)));
        });
  if (id == "csp1")
    return sim([F](const V& y, const T& e) { return v1<T>(F.csp(y(0), e)); },
               typename ClosedFormSim<T>::GradFn{});
  fail(ErrorKind::config, "unknown mm baseline '" + id + "'");
}

// TMDD and Sel'kov share the same structure: analytic gradients for the h0/h1
// part, differences for h2 and the CSP form.
template <class T, class Forms>
std::shared_ptr<const BasicSimMap<T>> planar_baseline(const Forms& F, const std::string& bench,
                                                      const std::string& id) {
  using V = VecT<T>;
  using M = MatT<T>;
  using Sim = ClosedFormSim<T>;
  const std::string name = bench + "/" + id;
  if (id == "sqssa")
    return std::make_shared<Sim>(
        name, 2, [F](const V& y, const T&) { F.check(y); return v1<T>(F.h0(y(0), y(1))); },
        [F](const V& y, const T&) { F.check(y); return M(F.grad01(y(0), y(1), T(0))); });
  if (id == "gspt1")
    return std::make_shared<Sim>(
        name, 2,
        [F](const V& y, const T& e) {
          F.check(y);
          return v1<T>(F.h0(y(0), y(1)) + e * F.h1(y(0), y(1)));
        },
        [F](const V& y, const T& e) { F.check(y); return M(F.grad01(y(0), y(1), e)); });
  if (id == "gspt2")
    return std::make_shared<Sim>(
        name, 2,
        [F](const V& y, const T& e) {
          F.check(y);
          return v1<T>(F.h0(y(0), y(1)) + e * F.h1(y(0), y(1)) + e * e * F.h2(y(0), y(1)));
        },
        [F](const V& y, const T& e) {
          F.check(y);
          const M d2 = central_jacobian<T>([&](const V& q) { return v1<T>(F.h2(q(0), q(1))); }, y, 1);
          return M(F.grad01(y(0), y(1), e) + e * e * d2);
        });
  if (id == "csp1")
    return std::make_shared<Sim>(
        name, 2, [F](const V& y, const T& e) { F.check(y); return v1<T>(F.csp(y(0), y(1), e)); },
        typename Sim::GradFn{});
  fail(ErrorKind::config, "unknown " + bench + " baseline '" + id + "'");
}

}  // namespace

template <class T>
std::shared_ptr<const BasicSlowSystem<T>> make_system(const BenchmarkParams& p) {
  if (p.name == "mm") return std::make_shared<MmSystem<T>>(p.mm);
  if (p.name == "tmdd") return std::make_shared<TmddSystem<T>>(p.tmdd);
  if (p.name == "selkov3d") return std::make_shared<SelkovSystem<T>>(p.selkov);
  fail(ErrorKind::config, "unknown benchmark '" + p.name + "'");
}

template <class T>
std::shared_ptr<const BasicSimMap<T>> make_baseline(const BenchmarkParams& p, const std::string& id) {
  const std::string c = canonical_method(id);
  if (p.name == "mm") return mm_baseline<T>(p.mm, c);
  if (c == "spt1") fail(ErrorKind::config, "spt1 is only defined for mm");
  if (p.name == "tmdd") return planar_baseline<T>(TmddForms<T>(p.tmdd), p.name, c);
  if (p.name == "selkov3d") return planar_baseline<T>(SelkovForms<T>(p.selkov), p.name, c);
  fail(ErrorKind::config, "unknown benchmark '" + p.name + "'");
}

template <class T>
VecT<T> expansion_term(const BenchmarkParams& p, int order, const VecT<T>& y) {
  require(order >= 0 && order <= 2, "expansion_term: order must be 0, 1 or 2");
  if (p.name == "mm") {
    const MmForms<T> F(p.mm);
    F.check(y(0));
    return v1<T>(order == 0 ? F.h0(y(0)) : order == 1 ? F.h1(y(0)) : F.h2(y(0)));
  }
  auto pick = [&](const auto& F) {
    F.check(y);
    return v1<T>(order == 0   ? F.h0(y(0), y(1))
                 : order == 1 ? F.h1(y(0), y(1))
                              : F.h2(y(0), y(1)));
  };
  if (p.name == "tmdd") return pick(TmddForms<T>(p.tmdd));
  if (p.name == "selkov3d") return pick(SelkovForms<T>(p.selkov));
  fail(ErrorKind::config, "unknown benchmark '" + p.name + "'");
}

template <class T>
VecT<T> csp_one_iteration_condition(const BasicSlowSystem<T>& sys, const VecT<T>& x,
                                    const VecT<T>& y, const T& eps) {
  require(x.size() == sys.fast_dim() && y.size() == sys.slow_dim(),
          "csp_one_iteration_condition: state has wrong size");
  const MatT<T> J = sys.fx(x, y, eps);
  Eigen::FullPivLU<MatT<T>> lu(J);
  if (!lu.isInvertible())
    fail(ErrorKind::normal_hyperbolicity, "csp_one_iteration_condition: df/dx is singular");
  return sys.f(x, y, eps) + eps * lu.solve(MatT<T>(sys.fy(x, y, eps)) * sys.g(x, y, eps));
}

double csp_one_iteration_root(const SlowSystem& sys, const Vec& y, double eps, double lo,
                              double hi) {
  require(sys.fast_dim() == 1, "csp_one_iteration_root: only scalar fast variables");
  auto cond = [&](double x) { return csp_one_iteration_condition<double>(sys, Vec::Constant(1, x), y, eps)(0); };
  const double flo = cond(lo), fhi = cond(hi);
  if (flo == 0) return lo;
  if (fhi == 0) return hi;
  if ((flo > 0) == (fhi > 0)) fail(ErrorKind::numerical, "csp_one_iteration_root: root not bracketed");
  boost::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(cond, lo, hi, flo, fhi,
                                                   boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (r.first + r.second);
}

template <class T>
T mm_csp2_implicit_residual(const T& x, const T& y, const T& eps, const MmParams& p) {
  const T k(p.kappa), s(p.sigma), e = eps;
  const T A2 = k * (1 + k - 2 * x) + 2 * (1 + k - x) * y;
  const T B = e * (1 + k) * (1 + k - x) * (k + k * k - s * x) + s * (k + y) * A2;
  const T C = s * (k + y) * (k + y) + e * (1 + k) * (1 + k - x) * (k - s + y);
  if (C == 0 || e == 0 || k + y == 0)
    fail(ErrorKind::singular_input, "mm csp2: vanishing inner denominator");
  const T num = -s * (k + y) * ((1 + k) * y - x * (k + y)) * C +
                e * (1 + k) * (-(1 + k) * y + x * (k - s + y)) * B;
  const T inner = (k + y) / (e + e * k) + (k - s + y) * B / (s * (k + y) * C);
  const T den = e * (1 + k) * (1 + k) * s * s * (k + y) * (k + y) * inner;
  if (den == 0) fail(ErrorKind::singular_input, "mm csp2: vanishing outer denominator");
  return num / den;
}

// ---------------------------------------------------------------- registry

SystemPtr mm_system(const MmParams& p) {
  p.validate();
  return std::make_shared<MmSystem<double>>(p);
}
SystemPtr tmdd_system(const TmddParams& p) {
  p.validate();
  return std::make_shared<TmddSystem<double>>(p);
}
SystemPtr selkov_system(const SelkovParams& p) {
  p.validate();
  return std::make_shared<SelkovSystem<double>>(p);
}

static std::vector<NamedMap> baselines_for(const BenchmarkParams& bp) {
  std::vector<NamedMap> out;
  for (const auto& id : baseline_ids(bp.name))
    out.push_back({id, method_label(bp.name, id), make_baseline<double>(bp, id)});
  return out;
}

std::vector<NamedMap> mm_baselines(const MmParams& p) {
  BenchmarkParams bp;
  bp.name = "mm";
  bp.mm = p;
  p.validate();
  return baselines_for(bp);
}
std::vector<NamedMap> tmdd_baselines(const TmddParams& p) {
  BenchmarkParams bp;
  bp.name = "tmdd";
  bp.tmdd = p;
  p.validate();
  return baselines_for(bp);
}
std::vector<NamedMap> selkov_baselines(const SelkovParams& p) {
  BenchmarkParams bp;
  bp.name = "selkov3d";
  bp.selkov = p;
  p.validate();
  return baselines_for(bp);
}

const NamedMap& Benchmark::baseline(const std::string& id) const {
  const std::string c = canonical_method(id);
  for (const auto& b : baselines)
    if (b.id == c) return b;
  fail(ErrorKind::config, "benchmark " + params.name + " has no baseline '" + id + "'");
}

bool in_box(const Vec& y, const Vec& lo, const Vec& hi) {
  return (y.array() >= lo.array()).all() && (y.array() <= hi.array()).all();
}

bool Benchmark::in_omega(const Vec& y) const { return in_box(y, omega_lo, omega_hi); }
bool Benchmark::in_sampling_box(const Vec& y) const { return in_box(y, sample_lo, sample_hi); }

Benchmark make_benchmark(const std::string& name, const std::map<std::string, double>& overrides) {
  Benchmark b;
  b.params = BenchmarkParams::make(name, overrides);
  b.system = make_system<double>(b.params);
  b.baselines = baselines_for(b.params);
  if (name == "mm") {
    b.omega_lo = Vec::Constant(1, 1e-6);
    b.omega_hi = Vec::Constant(1, 1.0);
    b.sample_lo = b.omega_lo;
    b.sample_hi = Vec::Constant(1, 2.0);
  } else if (name == "tmdd") {
    b.omega_lo = (Vec(2) << 0.2, 1.3).finished();
    b.omega_hi = (Vec(2) << 2.0, 2.9).finished();
    b.sample_lo = b.omega_lo;
    b.sample_hi = (Vec(2) << 2.4, 2.9).finished();
  } else {
    b.omega_lo = (Vec(2) << 0.2, 0.3).finished();
    b.omega_hi = (Vec(2) << 1.4, 2.1).finished();
    b.sample_lo = b.omega_lo;
    b.sample_hi = b.omega_hi;
  }
  return b;
}

#define SLOWMAN_INSTANTIATE(T)                                                                  \
  template std::shared_ptr<const BasicSlowSystem<T>> make_system<T>(const BenchmarkParams&);    \
  template std::shared_ptr<const BasicSimMap<T>> make_baseline<T>(const BenchmarkParams&,        \
                                                                  const std::string&);          \
  template VecT<T> expansion_term<T>(const BenchmarkParams&, int, const VecT<T>&);              \
  template VecT<T> csp_one_iteration_condition<T>(const BasicSlowSystem<T>&, const VecT<T>&,    \
                                                  const VecT<T>&, const T&);                    \
  template T mm_csp2_implicit_residual<T>(const T&, const T&, const T&, const MmParams&);

SLOWMAN_INSTANTIATE(double)
SLOWMAN_INSTANTIATE(Quad)

}  // namespace slowman

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace slowman {

template <class T>
using VecT = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <class T>
using MatT = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

using Vec = VecT<double>;
using Mat = MatT<double>;

enum class ErrorKind {
  contract_violation,
  config,
  singular_input,
  domain,
  numerical,
  normal_hyperbolicity,
  missing_input,
};

const char* error_kind_name(ErrorKind kind);

// Every failure the library reports carries a kind so the CLI can map it to
// an exit code without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorKind::contract_violation, what);
}

// Normwise relative difference, guarded so two zero blocks compare equal.
template <class A, class B>
double rel_error(const A& a, const B& b) {
  const double na = a.norm(), nb = b.norm();
  const double scale = std::max({na, nb, 1e-12});
  return (a - b).norm() / scale;
}

// mt19937_64 output is fixed by the standard, the distributions are not, so
// doubles are built from raw bits here to keep data sets portable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  double log_uniform(double lo, double hi);
  std::size_t index(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

// Derives an independent stream seed from a base seed and a tag.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag);

}  // namespace slowman

#include "slowman/common.hpp"
#include "slowman/parallel.hpp"

#include <atomic>
#include <thread>
#include <vector>

namespace slowman {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::contract_violation: return "contract_violation";
    case ErrorKind::config: return "config_error";
    case ErrorKind::singular_input: return "singular_input";
    case ErrorKind::domain: return "domain_error";
    case ErrorKind::numerical: return "numerical_failure";
    case ErrorKind::normal_hyperbolicity: return "normal_hyperbolicity_lost";
    case ErrorKind::missing_input: return "missing_input";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

double Rng::log_uniform(double lo, double hi) {
  return std::exp(uniform(std::log(lo), std::log(hi)));
}

std::size_t Rng::index(std::size_t n) {
  const auto i = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
  return i < n ? i : n - 1;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
  // splitmix64 finaliser over the combined word
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {
std::atomic<int> g_threads{0};
}

void set_thread_count(int n) { g_threads = n < 0 ? 0 : n; }

int thread_count() {
  const int n = g_threads.load();
  if (n > 0) return n;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(thread_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  // lowest chunk wins so the reported failure is the same as a serial run
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace slowman

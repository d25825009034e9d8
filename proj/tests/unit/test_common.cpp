#include "slowman/common.hpp"
#include "slowman/parallel.hpp"

#include <doctest.h>

#include <set>
#include <vector>

using namespace slowman;

TEST_CASE("rng streams are reproducible and seed dependent") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform01();
    CHECK(u == b.uniform01());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  Rng d(42);
  CHECK(d.uniform01() != c.uniform01());
}

TEST_CASE("rng doubles come from raw engine bits") {
  // the standard fixes the 10000th output of mt19937_64 seeded with 5489
  Rng r(5489);
  for (int i = 0; i < 9999; ++i) r.uniform01();
  const double expected = static_cast<double>(9981545732273789042ULL >> 11) * 0x1.0p-53;
  CHECK(r.uniform01() == expected);
}

TEST_CASE("log_uniform stays in range and covers decades evenly") {
  Rng r(7);
  int low = 0;
  for (int i = 0; i < 4000; ++i) {
    const double v = r.log_uniform(1e-4, 1e-1);
    CHECK(v >= 1e-4);
    CHECK(v <= 1e-1);
    low += v < 1e-3;
  }
  CHECK(low > 1100);
  CHECK(low < 1570);
}

TEST_CASE("index is uniform over [0, n)") {
  Rng r(3);
  std::vector<int> hits(5, 0);
  for (int i = 0; i < 5000; ++i) ++hits[r.index(5)];
  for (int h : hits) CHECK(h > 850);
}

TEST_CASE("derive_seed gives distinct streams") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t base = 0; base < 20; ++base)
    for (std::uint64_t tag = 0; tag < 50; ++tag) seen.insert(derive_seed(base, tag));
  CHECK(seen.size() == 1000);
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
}

TEST_CASE("rel_error treats two zero blocks as equal") {
  Vec z = Vec::Zero(3);
  CHECK(rel_error(z, z) == 0.0);
  Vec a(2), b(2);
  a << 1, 0;
  b << 1, 1e-3;
  CHECK(rel_error(a, b) == doctest::Approx(1e-3).epsilon(1e-3));
}

TEST_CASE("errors carry their kind") {
  try {
    fail(ErrorKind::missing_input, "nope");
    FAIL("fail returned");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::missing_input);
    CHECK(std::string(error_kind_name(e.kind())) == "missing_input");
  }
  CHECK_THROWS_AS(require(false, "x"), Error);
  CHECK_NOTHROW(require(true, "x"));
}

TEST_CASE("parallel_for touches each index once for any thread count") {
  for (int threads : {1, 2, 3, 8}) {
    set_thread_count(threads);
    std::vector<int> hits(1001, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += static_cast<int>(i) + 1; });
    for (std::size_t i = 0; i < hits.size(); ++i) CHECK(hits[i] == static_cast<int>(i) + 1);
  }
  set_thread_count(0);
  CHECK(thread_count() >= 1);
}

TEST_CASE("parallel_for rethrows worker exceptions") {
  set_thread_count(4);
  CHECK_THROWS_AS(parallel_for(100, [](std::size_t i) {
                    if (i == 57) fail(ErrorKind::numerical, "boom");
                  }),
                  Error);
  set_thread_count(0);
}

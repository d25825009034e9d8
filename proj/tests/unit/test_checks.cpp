#include "slowman/checks.hpp"
#include "slowman/pipeline.hpp"

#include <doctest.h>

#include <sstream>

using namespace slowman;

TEST_CASE("expected residual orders") {
  CHECK(expected_residual_order("qssa") == 1);
  CHECK(expected_residual_order("gspt1") == 2);
  CHECK(expected_residual_order("csp1") == 2);
  CHECK(expected_residual_order("gspt2") == 3);
  CHECK(expected_residual_order("spt1") == 0);
}

TEST_CASE("derivative check on a small configuration") {
  DerivativeCheckOptions o;
  o.configs = 5;
  const CheckReport r = derivative_check(make_benchmark("mm"), o);
  CHECK(r.lines.size() == 4);
  CHECK(r.all_pass());
}

TEST_CASE("residual order slopes on tmdd") {
  const CheckReport r = residual_order(make_benchmark("tmdd"));
  CHECK(r.lines.size() == 4);
  CHECK(r.all_pass());
}

TEST_CASE("check csv format") {
  CheckReport r;
  r.lines.push_back({"s", "mm", "q", 1.0, 1.0, 0.1, true});
  std::ostringstream os;
  write_check_csv(os, r);
  CHECK(os.str() == "# slowman-checks v1\nsuite,benchmark,quantity,value,expected,threshold,pass\n"
                    "s,mm,q,1,1,0.10000000000000001,pass\n");
}

TEST_CASE("interior box is the central half") {
  const auto [lo, hi] = interior_box(make_benchmark("tmdd"));
  CHECK(lo(0) == doctest::Approx(0.65));
  CHECK(hi(1) == doctest::Approx(2.5));
}

TEST_CASE("pipeline helpers") {
  CHECK(table_benchmark(2) == "mm");
  CHECK(table_benchmark(6) == "selkov3d");
  CHECK_THROWS_AS(table_benchmark(3), Error);
  CHECK(default_hidden("rpnn", "tmdd") == 400);
  CHECK(default_hidden("slfnn", "mm") == 20);
  CHECK(train_data_seed(1) != test_data_seed(1));
  CHECK(init_seed(1, "slfnn") != init_seed(1, "rpnn"));
}

TEST_CASE("train_model refuses mismatched data") {
  TrainingSet s;
  s.benchmark = "tmdd";
  try {
    train_model(make_benchmark("mm"), s, {});
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::config);
  }
}

TEST_CASE("load_model reports missing files") {
  try {
    load_model("/nonexistent/model.json");
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::missing_input);
  }
}

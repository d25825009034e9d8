#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Out {
  int code;
  std::string err;
};

Out run(const std::string& args) {
  const fs::path errf = fs::temp_directory_path() / "slowman_cli_err.txt";
  const std::string cmd = std::string(SLOWMAN_CLI) + " " + args + " 2> " + errf.string() + " > /dev/null";
  const int st = std::system(cmd.c_str());
  std::ifstream in(errf);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("slowman_cli_" + name);
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("unknown benchmark is a config error on one line") {
  const Out o = run("generate-data --benchmark nope -o " + scratch("a").string());
  CHECK(o.code == 2);
  CHECK(o.err.rfind("error kind=config_error code=2 ", 0) == 0);
  CHECK(o.err.find('\n') == o.err.size() - 1);
}

TEST_CASE("unknown table id and bad flags exit with code 2") {
  CHECK(run("reproduce --table 3 -o " + scratch("b").string()).code == 2);
  CHECK(run("train --bogus").code == 2);
  CHECK(run("").code == 2);
}

TEST_CASE("missing inputs exit with code 4") {
  const std::string d = scratch("c").string();
  const Out o = run("train --data /nonexistent.csv -o " + d);
  CHECK(o.code == 4);
  CHECK(o.err.find("kind=missing_input") != std::string::npos);
  CHECK(run("evaluate --test /nonexistent.csv -o " + d).code == 4);
}

TEST_CASE("generate, train and evaluate a small mm run") {
  const fs::path d = scratch("d");
  // a reduced protocol keeps this test quick; flags override the config file
  fs::create_directories(d);
  std::ofstream(d / "cfg.toml") << "threads = 2\n[generate-data]\nbenchmark = \"mm\"\nseed = 9\n";
  REQUIRE(run("--config " + (d / "cfg.toml").string() + " -o " + d.string() + " generate-data --seed 4").code == 0);
  REQUIRE(fs::exists(d / "train.csv"));
  REQUIRE(fs::exists(d / "test.csv"));
  CHECK(slurp(d / "manifest.json").find("config_hash") != std::string::npos);
  CHECK(slurp(d / "train.csv").find("seed") != std::string::npos);

  const fs::path again = scratch("d2");
  REQUIRE(run("-o " + again.string() + " generate-data --kind train --seed 4").code == 0);
  CHECK(slurp(again / "train.csv") == slurp(d / "train.csv"));

  const fs::path m = d / "model";
  REQUIRE(run("-o " + m.string() + " train --data " + (d / "train.csv").string() + " --method rpnn").code == 0);
  CHECK(fs::exists(m / "model.json"));
  CHECK(fs::exists(m / "history.csv"));

  const fs::path e = d / "eval";
  REQUIRE(run("-o " + e.string() + " evaluate --test " + (d / "test.csv").string() + " --model " +
              (m / "model.json").string())
              .code == 0);
  const std::string table = slurp(e / "table.csv");
  std::size_t lines = 0;
  for (char c : table) lines += c == '\n';
  CHECK(lines == 3);

  const fs::path b = d / "base";
  REQUIRE(run("-o " + b.string() + " evaluate --grid --method gspt1 --test " + (d / "test.csv").string()).code == 0);
  CHECK(fs::exists(b / "grid_gspt1.csv"));
  const std::string first = slurp(b / "table.csv");
  REQUIRE(run("-o " + b.string() + " evaluate --grid --method gspt1 --test " + (d / "test.csv").string()).code == 0);
  CHECK(slurp(b / "table.csv") == first);
  CHECK(run("-o " + b.string() + " evaluate --method slfnn --test " + (d / "test.csv").string()).code == 2);
}

#include "slowman/checks.hpp"
#include "slowman/datagen.hpp"
#include "slowman/eval.hpp"
#include "slowman/parallel.hpp"
#include "slowman/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace slowman;
using nlohmann::json;

namespace {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config:
    case ErrorKind::contract_violation: return 2;
    case ErrorKind::missing_input: return 4;
    default: return 3;
  }
}

// One line, key=value, message last and quoted.
void report_error(const std::string& kind, int code, std::string msg) {
  for (char& c : msg)
    if (c == '\n' || c == '"') c = '\'';
  std::cerr << "error kind=" << kind << " code=" << code << " message=\"" << msg << "\"\n";
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct Common {
  std::string output_dir;
  int threads = 0;
};

struct Run {
  fs::path dir;
  json manifest;
  std::chrono::steady_clock::time_point clock = std::chrono::steady_clock::now();

  Run(const CLI::App& sub, const Common& common) {
    dir = common.output_dir;
    fs::create_directories(dir);
    // only settings that can change results enter the hash
    const std::string cfg = sub.config_to_str(true, false);
    manifest["command"] = sub.get_name();
    manifest["config_hash"] = "fnv1a64:" + hex64(fnv1a(cfg));
    manifest["config"] = cfg;
    manifest["threads"] = thread_count();
    manifest["output_dir"] = dir.string();
    manifest["files"] = json::array();
    manifest["timings"] = json::object();
  }

  std::ofstream open(const std::string& name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) fail(ErrorKind::missing_input, "cannot write '" + (dir / name).string() + "'");
    manifest["files"].push_back(name);
    return out;
  }

  void lap(const std::string& phase) {
    const auto now = std::chrono::steady_clock::now();
    manifest["timings"][phase] = std::chrono::duration<double>(now - clock).count();
    clock = now;
  }

  void finish() {
    std::ofstream out(dir / "manifest.json");
    out << manifest.dump(2) << "\n";
  }
};

std::map<std::string, double> parse_params(const std::vector<std::string>& kv) {
  std::map<std::string, double> out;
  for (const auto& s : kv) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(ErrorKind::config, "--param expects name=value, got '" + s + "'");
    try {
      out[s.substr(0, eq)] = std::stod(s.substr(eq + 1));
    } catch (const std::exception&) {
      fail(ErrorKind::config, "--param value is not a number in '" + s + "'");
    }
  }
  return out;
}

bool is_network(const std::string& m) { return m == "slfnn" || m == "rpnn"; }

void write_reports(Run& run, const std::vector<ErrorReport>& rows, const std::string& name) {
  auto out = run.open(name);
  write_table_csv(out, rows);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slow invariant manifold learning and benchmarking"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML config file; command-line flags take precedence");

  Common common;
  if (const char* env = std::getenv("SLOWMAN_OUTPUT_DIR")) common.output_dir = env;
  if (common.output_dir.empty()) common.output_dir = "out";
  app.add_option("--output-dir,-o", common.output_dir, "Output directory (env SLOWMAN_OUTPUT_DIR)")
      ->capture_default_str();
  app.add_option("--threads", common.threads, "Worker threads, 0 for hardware parallelism")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  // generate-data
  std::string gd_bench = "mm", gd_kind = "both";
  std::uint64_t gd_seed = 1;
  bool gd_log = false;
  std::vector<std::string> gd_params;
  auto* gd = app.add_subcommand("generate-data", "Integrate trajectories into training and test sets");
  gd->add_option("--benchmark,-b", gd_bench)->capture_default_str();
  gd->add_option("--seed", gd_seed, "Data seed")->capture_default_str();
  gd->add_option("--kind", gd_kind)->check(CLI::IsMember({"train", "test", "both"}))->capture_default_str();
  gd->add_flag("--log-uniform-eps", gd_log, "Draw test eps log-uniformly");
  gd->add_option("--param", gd_params, "Benchmark parameter override name=value");

  // train
  std::string tr_bench = "mm", tr_data, tr_backend = "analytic";
  TrainConfig tcfg;
  std::vector<std::string> tr_params;
  auto* tr = app.add_subcommand("train", "Fit a network to a training set");
  tr->add_option("--benchmark,-b", tr_bench)->capture_default_str();
  tr->add_option("--data", tr_data, "Training set CSV")->required();
  tr->add_option("--method,-m", tcfg.method)->check(CLI::IsMember({"slfnn", "rpnn"}))->capture_default_str();
  tr->add_option("--hidden,-L", tcfg.hidden, "Hidden neurons, 0 for the benchmark default")->capture_default_str();
  tr->add_option("--tol", tcfg.tol)->capture_default_str();
  tr->add_option("--max-iters", tcfg.max_iters, "0 for the method default")->capture_default_str();
  tr->add_option("--svd-cutoff", tcfg.svd_cutoff)->capture_default_str();
  tr->add_option("--derivative-backend", tr_backend)
      ->check(CLI::IsMember({"analytic", "finite_difference"}))
      ->capture_default_str();
  tr->add_option("--seed", tcfg.seed, "Initialisation seed")->capture_default_str();
  tr->add_option("--param", tr_params, "Benchmark parameter override name=value");

  // evaluate
  std::string ev_bench = "mm", ev_test, ev_model, ev_method;
  bool ev_grid = false;
  std::vector<std::string> ev_params;
  auto* ev = app.add_subcommand("evaluate", "Error metrics of a model or baseline on a test set");
  ev->add_option("--benchmark,-b", ev_bench)->capture_default_str();
  ev->add_option("--test", ev_test, "Test set CSV")->required();
  auto* ev_model_opt = ev->add_option("--model", ev_model, "Trained model JSON");
  ev->add_option("--method,-m", ev_method, "Baseline id, or 'all' for every baseline")->excludes(ev_model_opt);
  ev->add_flag("--grid", ev_grid, "Also write the pointwise error grid");
  ev->add_option("--param", ev_params, "Benchmark parameter override name=value");

  // reproduce
  int rp_table = 2;
  ReproduceOptions rp_opts;
  bool rp_no_checks = false, rp_log = false;
  auto* rp = app.add_subcommand("reproduce", "Generate, train and compare for one results table");
  rp->add_option("--table", rp_table, "2 (mm), 4 (tmdd) or 6 (selkov3d)")->capture_default_str();
  rp->add_option("--seed", rp_opts.seed)->capture_default_str();
  rp->add_flag("--fd-variant", rp_opts.fd_variant, "Also train an SLFNN with finite differences");
  rp->add_flag("--no-checks", rp_no_checks, "Skip the derivative and residual-order suites");
  rp->add_flag("--log-uniform-eps", rp_log, "Draw test eps log-uniformly");

  // derivative-check / residual-order
  std::string dc_bench = "all", ro_bench = "all";
  DerivativeCheckOptions dc_opts;
  auto* dc = app.add_subcommand("derivative-check", "Analytic derivatives against central differences");
  dc->add_option("--benchmark,-b", dc_bench, "Benchmark or 'all'")->capture_default_str();
  dc->add_option("--configs", dc_opts.configs)->capture_default_str();
  dc->add_option("--seed", dc_opts.seed)->capture_default_str();
  auto* ro = app.add_subcommand("residual-order", "Residual slopes of the baselines and CSP consistency");
  ro->add_option("--benchmark,-b", ro_bench, "Benchmark or 'all'")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("config_error", 2, e.what());
    return 2;
  }

  try {
    set_thread_count(common.threads);
    auto benches = [](const std::string& b) {
      return b == "all" ? benchmark_names() : std::vector<std::string>{b};
    };

    if (*gd) {
      Run run(*gd, common);
      const Benchmark bench = make_benchmark(gd_bench, parse_params(gd_params));
      Protocol proto = default_protocol(gd_bench);
      proto.test_eps_log_uniform = gd_log;
      // same derivation as reproduce, so both routes yield identical files
      run.manifest["seeds"] = {{"data", gd_seed}};
      if (gd_kind != "test") {
        save_training_set((run.dir / "train.csv").string(), make_training_set(bench, train_data_seed(gd_seed), proto));
        run.manifest["files"].push_back("train.csv");
        run.lap("training_data");
      }
      if (gd_kind != "train") {
        save_test_set((run.dir / "test.csv").string(), make_test_set(bench, test_data_seed(gd_seed), proto));
        run.manifest["files"].push_back("test.csv");
        run.lap("test_data");
      }
      run.finish();
    } else if (*tr) {
      Run run(*tr, common);
      const Benchmark bench = make_benchmark(tr_bench, parse_params(tr_params));
      if (!fs::exists(tr_data)) fail(ErrorKind::missing_input, "training set '" + tr_data + "' not found");
      const TrainingSet data = load_training_set(tr_data);
      run.lap("load");
      tcfg.backend = parse_backend(tr_backend);
      TrainOutcome t = train_model(bench, data, tcfg);
      run.lap("train");
      run.open("model.json") << t.model_json;
      {
        auto h = run.open("history.csv");
        write_history_csv(h, t.history);
      }
      {
        auto s = run.open("training.csv");
        write_training_table_csv(s, {t});
      }
      run.manifest["seeds"] = {{"data", data.seed}, {"init", tcfg.seed}};
      run.manifest["converged"] = t.converged;
      run.manifest["stop_reason"] = t.stop_reason;
      run.finish();
      if (!t.converged)
        std::cerr << "warning: training stopped without reaching tol (" << t.stop_reason
                  << "), final ||F||^2 = " << t.train_loss << "\n";
    } else if (*ev) {
      Run run(*ev, common);
      const Benchmark bench = make_benchmark(ev_bench, parse_params(ev_params));
      if (!fs::exists(ev_test)) fail(ErrorKind::missing_input, "test set '" + ev_test + "' not found");
      const TestSet test = load_test_set(ev_test);
      if (test.benchmark != bench.params.name)
        fail(ErrorKind::config, "test set is for '" + test.benchmark + "', not '" + bench.params.name + "'");
      std::vector<NamedMap> methods;
      if (!ev_model.empty()) {
        if (!fs::exists(ev_model)) fail(ErrorKind::missing_input, "model '" + ev_model + "' not found");
        methods.push_back({"model", fs::path(ev_model).stem().string(), load_model(ev_model)});
      } else if (ev_method.empty() || ev_method == "all") {
        methods = bench.baselines;
      } else {
        if (is_network(ev_method)) fail(ErrorKind::config, "method '" + ev_method + "' needs --model");
        methods.push_back(bench.baseline(canonical_method(ev_method)));
      }
      const auto rows = compare(methods, test);
      run.lap("evaluate");
      write_reports(run, rows, "table.csv");
      if (ev_grid)
        for (std::size_t i = 0; i < rows.size(); ++i) {
          auto g = run.open("grid_" + methods[i].id + ".csv");
          write_error_grid_csv(g, rows[i]);
        }
      run.manifest["seeds"] = {{"test_data", test.seed}};
      run.finish();
    } else if (*rp) {
      Run run(*rp, common);
      rp_opts.with_checks = !rp_no_checks;
      rp_opts.protocol = default_protocol(table_benchmark(rp_table));
      rp_opts.protocol.test_eps_log_uniform = rp_log;
      const ReproduceResult res = reproduce(rp_table, rp_opts);
      write_reports(run, res.table, "table.csv");
      {
        auto s = run.open("training.csv");
        write_training_table_csv(s, res.trained);
      }
      if (rp_opts.with_checks) {
        auto d = run.open("derivative_check.csv");
        write_check_csv(d, res.derivative);
        auto r = run.open("residual_order.csv");
        write_check_csv(r, res.residual);
      }
      for (const auto& t : res.trained) {
        std::string stem = t.method;
        for (char& c : stem) c = c == ' ' ? '_' : static_cast<char>(std::tolower(c));
        run.open("model_" + stem + ".json") << t.model_json;
      }
      run.manifest["benchmark"] = res.benchmark;
      run.manifest["seeds"] = {{"base", rp_opts.seed},
                               {"training_data", train_data_seed(rp_opts.seed)},
                               {"test_data", test_data_seed(rp_opts.seed)},
                               {"slfnn_init", init_seed(rp_opts.seed, "slfnn")},
                               {"rpnn_init", init_seed(rp_opts.seed, "rpnn")}};
      for (const auto& [phase, sec] : res.timings) run.manifest["timings"][phase] = sec;
      run.finish();
    } else if (*dc) {
      Run run(*dc, common);
      CheckReport all;
      for (const auto& b : benches(dc_bench)) all.append(derivative_check(make_benchmark(b), dc_opts));
      run.lap("derivative_check");
      auto out = run.open("derivative_check.csv");
      write_check_csv(out, all);
      run.manifest["seeds"] = {{"check", dc_opts.seed}};
      run.finish();
      if (!all.all_pass()) {
        report_error("numerical_failure", 3, "derivative check failed, see derivative_check.csv");
        return 3;
      }
    } else if (*ro) {
      Run run(*ro, common);
      CheckReport all;
      for (const auto& b : benches(ro_bench)) {
        const Benchmark bench = make_benchmark(b);
        all.append(residual_order(bench));
        all.append(csp_consistency(bench));
      }
      run.lap("residual_order");
      auto out = run.open("residual_order.csv");
      write_check_csv(out, all);
      run.finish();
      if (!all.all_pass()) {
        report_error("numerical_failure", 3, "residual-order suite failed, see residual_order.csv");
        return 3;
      }
    }
  } catch (const Error& e) {
    report_error(error_kind_name(e.kind()), exit_code(e.kind()), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    report_error("numerical_failure", 3, e.what());
    return 3;
  }
  return 0;
}

#include "slowman/pipeline.hpp"
#include "slowman/rpnn.hpp"
#include "slowman/slfnn.hpp"

#include <json.hpp>

#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>

namespace slowman {

int default_hidden(const std::string& method, const std::string& benchmark) {
  if (method == "slfnn") return 20;
  if (method == "rpnn") {
    // fixed per-benchmark widths; the tmdd manifold needs far more features
    if (benchmark == "mm") return 81;
    if (benchmark == "tmdd") return 400;
    if (benchmark == "selkov3d") return 101;
  }
  fail(ErrorKind::config, "no default hidden size for " + method + " on " + benchmark);
}

std::uint64_t train_data_seed(std::uint64_t seed) { return derive_seed(seed, 1); }
std::uint64_t test_data_seed(std::uint64_t seed) { return derive_seed(seed, 2); }
std::uint64_t init_seed(std::uint64_t seed, const std::string& method) {
  return derive_seed(seed, method == "rpnn" ? 202 : 101);
}

TrainOutcome train_model(const Benchmark& bench, const TrainingSet& data, const TrainConfig& cfg) {
  if (data.benchmark != bench.params.name)
    fail(ErrorKind::config, "training set is for '" + data.benchmark + "', not '" + bench.params.name + "'");
  const Collocation tr = data.train(), va = data.valid();
  if (tr.size() == 0) fail(ErrorKind::missing_input, "training set has no training points");
  const SlowSystem& sys = *bench.system;
  const int M = sys.fast_dim(), S = sys.slow_dim();
  const int L = cfg.hidden > 0 ? cfg.hidden : default_hidden(cfg.method, bench.params.name);

  TrainOutcome out;
  out.method = cfg.method;
  std::ostringstream js;
  if (cfg.method == "slfnn") {
    LmOptions o;
    o.tol = cfg.tol;
    if (cfg.max_iters > 0) o.max_iters = cfg.max_iters;
    o.backend = cfg.backend;
    auto res = lm_train(SlfnnModel::random(M, S, L, cfg.seed), sys, tr, o);
    res.model.metadata["benchmark"] = bench.params.name;
    const auto model = std::make_shared<SlfnnModel>(res.model);
    out.train_loss = slfnn_residuals(*model, sys, tr).squaredNorm();
    out.valid_loss = va.size() ? slfnn_residuals(*model, sys, va).squaredNorm() : 0.0;
    out.iterations = res.state.iteration;
    out.converged = res.converged;
    out.stop_reason = res.stop_reason;
    out.history = std::move(res.history);
    model->save(js);
    out.map = model;
  } else if (cfg.method == "rpnn") {
    NewtonOptions o;
    o.tol = cfg.tol;
    if (cfg.max_iters > 0) o.max_iters = cfg.max_iters;
    o.svd_cutoff = cfg.svd_cutoff;
    o.backend = cfg.backend;
    // centers cover the bounding box of the training inputs
    const Vec lo = tr.y.colwise().minCoeff().transpose();
    const Vec hi = tr.y.colwise().maxCoeff().transpose();
    const double e0 = tr.eps.minCoeff(), e1 = tr.eps.maxCoeff();
    auto res = newton_train(RpnnModel::sample(M, S, L, lo, hi, e0, e1, cfg.seed), sys, tr, o);
    res.model.metadata["benchmark"] = bench.params.name;
    const auto model = std::make_shared<RpnnModel>(res.model);
    out.train_loss = rpnn_residuals(*model, sys, tr).squaredNorm();
    out.valid_loss = va.size() ? rpnn_residuals(*model, sys, va).squaredNorm() : 0.0;
    out.iterations = res.history.empty() ? 0 : res.history.back().iter;
    out.converged = res.converged;
    out.stop_reason = res.stop_reason;
    out.history = std::move(res.history);
    model->save(js);
    out.map = model;
  } else {
    fail(ErrorKind::config, "cannot train method '" + cfg.method + "'");
  }
  out.model_json = js.str();
  return out;
}

SimMapPtr load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::missing_input, "cannot open model '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  std::string format;
  try {
    format = nlohmann::json::parse(buf.str()).value("format", "");
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::config, "model '" + path + "' is not valid JSON: " + e.what());
  }
  std::istringstream again(buf.str());
  if (format == "slowman.slfnn") return std::make_shared<SlfnnModel>(SlfnnModel::load(again));
  if (format == "slowman.rpnn") return std::make_shared<RpnnModel>(RpnnModel::load(again));
  fail(ErrorKind::config, "model '" + path + "' has unknown format '" + format + "'");
}

void write_history_csv(std::ostream& out, const std::vector<TrainEntry>& history) {
  out << "# slowman-history v1\n";
  out << "iter,residual_norm,lambda,accepted\n";
  for (const auto& h : history)
    out << h.iter << "," << format_double(h.residual_norm) << "," << format_double(h.lambda) << ","
        << (h.accepted ? 1 : 0) << "\n";
}

std::string table_benchmark(int table) {
  switch (table) {
    case 2: return "mm";
    case 4: return "tmdd";
    case 6: return "selkov3d";
    default: fail(ErrorKind::config, "unknown table id " + std::to_string(table) + " (expected 2, 4 or 6)");
  }
}

void write_training_table_csv(std::ostream& out, const std::vector<TrainOutcome>& rows) {
  out << "# slowman-training v1\n";
  out << "method,train_loss,valid_loss,iterations,converged,stop_reason\n";
  for (const auto& r : rows)
    out << r.method << "," << format_double(r.train_loss) << "," << format_double(r.valid_loss) << ","
        << r.iterations << "," << (r.converged ? 1 : 0) << "," << r.stop_reason << "\n";
}

ReproduceResult reproduce(int table, const ReproduceOptions& opts) {
  const std::string name = table_benchmark(table);
  const Benchmark bench = make_benchmark(name);
  const Protocol proto = opts.protocol.benchmark.empty() ? default_protocol(name) : opts.protocol;
  ReproduceResult res;
  res.benchmark = name;
  auto clock = std::chrono::steady_clock::now();
  auto lap = [&](const std::string& phase) {
    const auto now = std::chrono::steady_clock::now();
    res.timings.emplace_back(phase, std::chrono::duration<double>(now - clock).count());
    clock = now;
  };

  res.train = make_training_set(bench, train_data_seed(opts.seed), proto);
  lap("training_data");
  res.test = make_test_set(bench, test_data_seed(opts.seed), proto);
  lap("test_data");

  std::vector<NamedMap> methods;
  auto run = [&](const std::string& method, DerivativeBackend backend, const std::string& label) {
    TrainConfig cfg;
    cfg.method = method;
    cfg.backend = backend;
    cfg.seed = init_seed(opts.seed, method);
    TrainOutcome t = train_model(bench, res.train, cfg);
    t.method = label;
    methods.push_back({method, label, t.map});
    res.trained.push_back(std::move(t));
    lap("train_" + label);
  };
  run("slfnn", DerivativeBackend::analytic, "SLFNN");
  if (opts.fd_variant) run("slfnn", DerivativeBackend::finite_difference, "SLFNN FD");
  run("rpnn", DerivativeBackend::analytic, "RPNN");
  for (const auto& b : bench.baselines) methods.push_back(b);

  res.table = compare(methods, res.test);
  lap("evaluate");
  if (opts.with_checks) {
    res.derivative = derivative_check(bench);
    res.residual = residual_order(bench);
    res.residual.append(csp_consistency(bench));
    lap("checks");
  }
  return res;
}

}  // namespace slowman

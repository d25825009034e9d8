#include "slowman/dataset.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace slowman {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string join_vec(const Vec& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_double(v(i));
  return s;
}

Vec parse_vec(const std::string& s) {
  std::istringstream in(s);
  std::vector<double> vals;
  std::string tok;
  while (in >> tok) vals.push_back(std::strtod(tok.c_str(), nullptr));
  return Eigen::Map<const Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

void write_header(std::ostream& out, const char* kind, const std::string& bench,
                  const std::string& protocol, std::uint64_t seed, const Vec& lo, const Vec& hi,
                  double e0, double e1) {
  out << "# slowman-dataset v1\n";
  out << "# kind: " << kind << "\n";
  out << "# benchmark: " << bench << "\n";
  out << "# protocol: " << protocol << "\n";
  out << "# seed: " << seed << "\n";
  out << "# omega_lo: " << join_vec(lo) << "\n";
  out << "# omega_hi: " << join_vec(hi) << "\n";
  out << "# eps_range: " << format_double(e0) << " " << format_double(e1) << "\n";
}

struct Parsed {
  std::map<std::string, std::string> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, ',')) out.push_back(cur);
  return out;
}

Parsed parse(std::istream& in, const char* kind) {
  Parsed p;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (first && line != "# slowman-dataset v1")
        fail(ErrorKind::config, "dataset: unrecognised header '" + line + "'");
      first = false;
      const auto colon = line.find(':');
      if (colon != std::string::npos) {
        std::string key = line.substr(2, colon - 2), val = line.substr(colon + 1);
        if (!val.empty() && val[0] == ' ') val.erase(0, 1);
        p.meta[key] = val;
      }
      continue;
    }
    if (first) fail(ErrorKind::config, "dataset: missing version header");
    if (p.columns.empty()) {
      p.columns = split(line);
      continue;
    }
    p.rows.push_back(split(line));
    if (p.rows.back().size() != p.columns.size())
      fail(ErrorKind::config, "dataset: row " + std::to_string(p.rows.size()) + " has wrong column count");
  }
  if (p.meta["kind"] != kind)
    fail(ErrorKind::config, std::string("dataset: expected kind '") + kind + "', found '" + p.meta["kind"] + "'");
  return p;
}

double num(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) fail(ErrorKind::config, "dataset: bad number '" + s + "'");
  return v;
}

template <class Set>
void read_meta(Set& set, Parsed& p) {
  set.benchmark = p.meta["benchmark"];
  set.protocol = p.meta["protocol"];
  set.seed = std::strtoull(p.meta["seed"].c_str(), nullptr, 10);
  set.omega_lo = parse_vec(p.meta["omega_lo"]);
  set.omega_hi = parse_vec(p.meta["omega_hi"]);
  const Vec er = parse_vec(p.meta["eps_range"]);
  if (er.size() == 2) {
    set.eps0 = er(0);
    set.eps1 = er(1);
  }
}

int count_prefix(const std::vector<std::string>& cols, char c) {
  int n = 0;
  for (const auto& s : cols)
    if (s.size() > 1 && s[0] == c && std::isdigit(static_cast<unsigned char>(s[1]))) ++n;
  return n;
}

}  // namespace

void write_training_csv(std::ostream& out, const TrainingSet& set) {
  write_header(out, "training", set.benchmark, set.protocol, set.seed, set.omega_lo, set.omega_hi,
               set.eps0, set.eps1);
  const int S = set.points.slow_dim();
  for (int d = 0; d < S; ++d) out << "y" << d + 1 << ",";
  out << "eps,split,traj,t\n";
  std::vector<char> is_train(static_cast<std::size_t>(set.points.size()), 0);
  for (auto i : set.train_idx) is_train[static_cast<std::size_t>(i)] = 1;
  for (Eigen::Index k = 0; k < set.points.size(); ++k) {
    for (int d = 0; d < S; ++d) out << format_double(set.points.y(k, d)) << ",";
    out << format_double(set.points.eps(k)) << "," << (is_train[k] ? "train" : "valid") << ","
        << set.traj[k] << "," << format_double(set.time[k]) << "\n";
  }
}

TrainingSet read_training_csv(std::istream& in) {
  Parsed p = parse(in, "training");
  TrainingSet set;
  read_meta(set, p);
  const int S = count_prefix(p.columns, 'y');
  if (S < 1 || p.columns.size() != static_cast<std::size_t>(S + 4))
    fail(ErrorKind::config, "training csv: unexpected columns");
  const auto n = static_cast<Eigen::Index>(p.rows.size());
  Mat y(n, S);
  Vec e(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& r = p.rows[static_cast<std::size_t>(k)];
    for (int d = 0; d < S; ++d) y(k, d) = num(r[d]);
    e(k) = num(r[S]);
    if (r[S + 1] == "train") set.train_idx.push_back(k);
    else if (r[S + 1] == "valid") set.valid_idx.push_back(k);
    else fail(ErrorKind::config, "training csv: split must be train or valid");
    set.traj.push_back(std::atoi(r[S + 2].c_str()));
    set.time.push_back(num(r[S + 3]));
  }
  set.points = Collocation(std::move(y), std::move(e));
  return set;
}

void write_test_csv(std::ostream& out, const TestSet& set) {
  write_header(out, "test", set.benchmark, set.protocol, set.seed, set.omega_lo, set.omega_hi,
               set.eps0, set.eps1);
  const int S = set.points.slow_dim(), M = static_cast<int>(set.x_ref.cols());
  for (int d = 0; d < S; ++d) out << "y" << d + 1 << ",";
  out << "eps";
  for (int m = 0; m < M; ++m) out << ",x" << m + 1;
  out << ",traj,t\n";
  for (Eigen::Index k = 0; k < set.points.size(); ++k) {
    for (int d = 0; d < S; ++d) out << format_double(set.points.y(k, d)) << ",";
    out << format_double(set.points.eps(k));
    for (int m = 0; m < M; ++m) out << "," << format_double(set.x_ref(k, m));
    out << "," << set.traj[k] << "," << format_double(set.time[k]) << "\n";
  }
}

TestSet read_test_csv(std::istream& in) {
  Parsed p = parse(in, "test");
  TestSet set;
  read_meta(set, p);
  const int S = count_prefix(p.columns, 'y'), M = count_prefix(p.columns, 'x');
  if (S < 1 || M < 1 || p.columns.size() != static_cast<std::size_t>(S + M + 3))
    fail(ErrorKind::config, "test csv: unexpected columns");
  const auto n = static_cast<Eigen::Index>(p.rows.size());
  Mat y(n, S), x(n, M);
  Vec e(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& r = p.rows[static_cast<std::size_t>(k)];
    for (int d = 0; d < S; ++d) y(k, d) = num(r[d]);
    e(k) = num(r[S]);
    for (int m = 0; m < M; ++m) x(k, m) = num(r[S + 1 + m]);
    set.traj.push_back(std::atoi(r[S + 1 + M].c_str()));
    set.time.push_back(num(r[S + 2 + M]));
  }
  set.points = Collocation(std::move(y), std::move(e));
  set.x_ref = std::move(x);
  return set;
}

namespace {
std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::missing_input, "cannot open '" + path + "'");
  return in;
}
std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::config, "cannot write '" + path + "'");
  return out;
}
}  // namespace

void save_training_set(const std::string& path, const TrainingSet& set) {
  auto out = open_out(path);
  write_training_csv(out, set);
}
TrainingSet load_training_set(const std::string& path) {
  auto in = open_in(path);
  return read_training_csv(in);
}
void save_test_set(const std::string& path, const TestSet& set) {
  auto out = open_out(path);
  write_test_csv(out, set);
}
TestSet load_test_set(const std::string& path) {
  auto in = open_in(path);
  return read_test_csv(in);
}

}  // namespace slowman

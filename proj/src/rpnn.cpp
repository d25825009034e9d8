#include "slowman/rpnn.hpp"
#include "slowman/parallel.hpp"

#include <json.hpp>

#include <istream>
#include <ostream>

namespace slowman {

RpnnProjection rpnn_sample(int L, const Vec& omega_lo, const Vec& omega_hi, double eps0,
                           double eps1, std::uint64_t seed) {
  require(L >= 1, "rpnn_sample: L must be positive");
  require(omega_lo.size() == omega_hi.size() && omega_lo.size() >= 1,
          "rpnn_sample: domain bounds have inconsistent sizes");
  require((omega_hi.array() >= omega_lo.array()).all() && omega_lo.allFinite() && omega_hi.allFinite(),
          "rpnn_sample: domain bounds must be finite and ordered");
  require(0 < eps0 && eps0 < eps1, "rpnn_sample: need 0 < eps0 < eps1");
  const int S = static_cast<int>(omega_lo.size()), D = S + 1;
  Rng rng(seed);
  RpnnProjection p;
  p.A.resize(L, D);
  p.beta.resize(L);
  p.centers.resize(L, D);
  for (int l = 0; l < L; ++l) {
    for (int d = 0; d < S; ++d) p.centers(l, d) = rng.uniform(omega_lo(d), omega_hi(d));
    p.centers(l, S) = rng.log_uniform(eps0, eps1);
    for (int d = 0; d < D; ++d) p.A(l, d) = rng.uniform(-1.0, 1.0);
    p.beta(l) = -p.A.row(l).dot(p.centers.row(l));
  }
  return p;
}

RpnnModel::RpnnModel(std::vector<RpnnProjection> proj, Mat w_out)
    : proj_(std::move(proj)), w_(std::move(w_out)) {
  require(!proj_.empty(), "rpnn: need at least one output");
  const auto L = proj_.front().A.rows(), D = proj_.front().A.cols();
  for (const auto& p : proj_)
    require(p.A.rows() == L && p.A.cols() == D && p.beta.size() == L,
            "rpnn: projections have inconsistent shapes");
  require(w_.rows() == L && w_.cols() == static_cast<Eigen::Index>(proj_.size()),
          "rpnn: output weights have wrong shape");
}

RpnnModel RpnnModel::sample(int fast, int slow, int L, const Vec& omega_lo, const Vec& omega_hi,
                            double eps0, double eps1, std::uint64_t seed) {
  require(fast >= 1 && slow >= 1, "rpnn: dimensions must be positive");
  require(omega_lo.size() == slow, "rpnn: domain dimension differs from slow dimension");
  std::vector<RpnnProjection> proj;
  for (int m = 0; m < fast; ++m)
    proj.push_back(rpnn_sample(L, omega_lo, omega_hi, eps0, eps1, derive_seed(seed, m)));
  Rng rng(derive_seed(seed, 1000));
  Mat w(L, fast);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform(-1.0, 1.0);
  RpnnModel model(std::move(proj), std::move(w));
  model.seed = seed;
  return model;
}

Vec RpnnModel::parameters() const { return Eigen::Map<const Vec>(w_.data(), w_.size()); }

RpnnModel RpnnModel::with_parameters(const Vec& p) const {
  require(p.size() == w_.size(), "rpnn: parameter vector has wrong length");
  RpnnModel out = *this;
  out.w_ = Eigen::Map<const Mat>(p.data(), w_.rows(), w_.cols());
  return out;
}

namespace {
Vec input(const Vec& y, double eps) {
  Vec u(y.size() + 1);
  u << y, eps;
  return u;
}
Vec activations(const RpnnProjection& p, const Vec& u) {
  return (p.A * u + p.beta).unaryExpr([](double v) { return logistic(v); });
}
}  // namespace

Vec RpnnModel::eval(const Vec& y, const double& eps) const {
  require(y.size() == slow_dim(), "rpnn: slow state has wrong size");
  const Vec u = input(y, eps);
  Vec out(fast_dim());
  for (int m = 0; m < fast_dim(); ++m) out(m) = w_.col(m).dot(activations(proj_[m], u));
  return out;
}

Mat RpnnModel::grad_y(const Vec& y, const double& eps) const {
  require(y.size() == slow_dim(), "rpnn: slow state has wrong size");
  const Vec u = input(y, eps);
  const int S = slow_dim();
  Mat G(fast_dim(), S);
  for (int m = 0; m < fast_dim(); ++m) {
    const Vec phi = activations(proj_[m], u);
    const Vec wd = w_.col(m).array() * phi.array() * (1.0 - phi.array());
    G.row(m) = (proj_[m].A.leftCols(S).transpose() * wd).transpose();
  }
  return G;
}

Mat projection_matrix(const RpnnModel& model, int m, const Collocation& pts) {
  require(pts.slow_dim() == model.slow_dim(), "projection_matrix: slow dimension mismatch");
  const RpnnProjection& p = model.projection(m);
  Mat U(p.A.cols(), pts.size());
  U.topRows(pts.slow_dim()) = pts.y.transpose();
  U.bottomRows(1) = pts.eps.transpose();
  Mat Z = p.A * U;
  Z.colwise() += p.beta;
  return Z.unaryExpr([](double v) { return logistic(v); });
}

Vec rpnn_forward(const RpnnModel& model, const Vec& y, double eps) { return model.eval(y, eps); }
Mat rpnn_grad_y(const RpnnModel& model, const Vec& y, double eps) { return model.grad_y(y, eps); }

namespace {

// Residuals and, optionally, the Jacobian from precomputed projections. Phi
// never changes during training, so it is built once per output.
struct RpnnAssembler {
  const RpnnModel& model;
  const SlowSystem& sys;
  const Collocation& pts;
  std::vector<Mat> phi;

  RpnnAssembler(const RpnnModel& m, const SlowSystem& s, const Collocation& c)
      : model(m), sys(s), pts(c) {
    require(sys.fast_dim() == model.fast_dim() && sys.slow_dim() == model.slow_dim(),
            "rpnn: model/system dimension mismatch");
    for (int r = 0; r < model.fast_dim(); ++r) phi.push_back(projection_matrix(model, r, pts));
  }

  // w is L x M
  void run(const Mat& w, Vec* F, Mat* J) const {
    const int M = model.fast_dim(), S = model.slow_dim(), L = model.hidden();
    if (F) F->resize(M * pts.size());
    if (J) J->setZero(M * pts.size(), L * M);
    parallel_for(static_cast<std::size_t>(pts.size()), [&](std::size_t kk) {
      const auto k = static_cast<Eigen::Index>(kk);
      const double e = pts.eps(k);
      const Vec y = pts.y.row(k).transpose();
      Vec x(M);
      Mat G(M, S);
      std::vector<Vec> dphi(M);
      for (int r = 0; r < M; ++r) {
        const auto ph = phi[r].col(k);
        dphi[r] = ph.array() * (1.0 - ph.array());
        x(r) = w.col(r).dot(ph);
        G.row(r) = (model.projection(r).A.leftCols(S).transpose() * w.col(r).cwiseProduct(dphi[r])).transpose();
      }
      const Vec gv = sys.g(x, y, e);
      if (F) F->segment(k * M, M) = sys.f(x, y, e) - e * G * gv;
      if (!J) return;
      const Mat fx = sys.fx(x, y, e);
      const Mat gx = sys.gx(x, y, e);
      for (int m = 0; m < M; ++m) {
        for (int r = 0; r < M; ++r) {
          const double coef = fx(m, r) - e * G.row(m).dot(gx.col(r));
          const auto ph = phi[r].col(k);
          auto row = J->row(k * M + m).segment(r * L, L);
          row = coef * ph.transpose();
          if (r == m) {
            const Vec s = model.projection(r).A.leftCols(S) * gv;
            row -= e * dphi[r].cwiseProduct(s).transpose();
          }
        }
      }
    });
  }
};

}  // namespace

Vec rpnn_residuals(const RpnnModel& model, const SlowSystem& sys, const Collocation& pts) {
  return stacked_residuals(model, sys, pts);
}

Mat rpnn_jacobian(const RpnnModel& model, const SlowSystem& sys, const Collocation& pts) {
  RpnnAssembler a(model, sys, pts);
  Mat J;
  a.run(model.w_out(), nullptr, &J);
  return J;
}

Mat rpnn_jacobian_fd(const RpnnModel& model, const SlowSystem& sys, const Collocation& pts) {
  RpnnAssembler a(model, sys, pts);
  const Mat& w = model.w_out();
  auto F = [&](const Vec& p) {
    Vec out;
    a.run(Eigen::Map<const Mat>(p.data(), w.rows(), w.cols()), &out, nullptr);
    return out;
  };
  const Vec p0 = model.parameters();
  return forward_difference_jacobian(F, p0, F(p0));
}

Mat truncated_pinv(const Mat& J, double cutoff) {
  Eigen::BDCSVD<Mat> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) fail(ErrorKind::numerical, "truncated_pinv: SVD failed");
  const Vec& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  Vec inv = Vec::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cutoff * smax) inv(i) = 1.0 / s(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

NewtonResult newton_train(const RpnnModel& model0, const SlowSystem& sys, const Collocation& pts,
                          const NewtonOptions& opts) {
  require(opts.tol > 0 && opts.max_iters >= 0 && opts.svd_cutoff >= 0, "newton_train: invalid options");
  RpnnAssembler a(model0, sys, pts);
  const Eigen::Index L = model0.hidden(), M = model0.fast_dim();
  NewtonResult res{model0, {}, false, "max_iters", 0.0};

  Vec p = model0.parameters();
  auto as_w = [&](const Vec& q) { return Mat(Eigen::Map<const Mat>(q.data(), L, M)); };
  Vec F;
  a.run(as_w(p), &F, nullptr);
  double norm = F.norm();
  if (!std::isfinite(norm)) fail(ErrorKind::numerical, "newton_train: non-finite initial residual");
  Vec best = p;
  double best_norm = norm;
  res.history.push_back({0, norm, 0.0, true});

  for (int it = 1;; ++it) {
    if (norm < opts.tol) {
      res.converged = true;
      res.stop_reason = "tol";
      break;
    }
    if (it > opts.max_iters) break;
    Mat J;
    if (opts.backend == DerivativeBackend::analytic) {
      a.run(as_w(p), nullptr, &J);
    } else {
      J = forward_difference_jacobian(
          [&](const Vec& q) {
            Vec out;
            a.run(as_w(q), &out, nullptr);
            return out;
          },
          p, F);
    }
    Eigen::BDCSVD<Mat> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) fail(ErrorKind::numerical, "newton_train: SVD failed");
    const Vec& s = svd.singularValues();
    Vec coeff = svd.matrixU().transpose() * F;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      coeff(i) = s(i) > opts.svd_cutoff * s(0) ? coeff(i) / s(i) : 0.0;
    p -= svd.matrixV() * coeff;
    a.run(as_w(p), &F, nullptr);
    norm = F.norm();
    const bool finite = std::isfinite(norm);
    res.history.push_back({it, norm, 0.0, true});
    if (finite && norm < best_norm) {
      best = p;
      best_norm = norm;
    }
    if (!finite || norm > opts.divergence_factor * best_norm) {
      res.stop_reason = "diverged";
      break;
    }
  }
  res.model = model0.with_parameters(best);
  res.residual_norm = best_norm;
  res.model.metadata["trainer"] = "newton_svd";
  res.model.metadata["derivative_backend"] = backend_name(opts.backend);
  return res;
}

// ------------------------------------------------------------------ io

namespace {
nlohmann::json mat_json(const Mat& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> r(m.cols());
    for (Eigen::Index c = 0; c < m.cols(); ++c) r[c] = m(i, c);
    rows.push_back(r);
  }
  return rows;
}
Mat json_mat(const nlohmann::json& j, Eigen::Index rows, Eigen::Index cols) {
  const auto v = j.get<std::vector<std::vector<double>>>();
  require(static_cast<Eigen::Index>(v.size()) == rows, "rpnn model: matrix has wrong row count");
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    require(static_cast<Eigen::Index>(v[i].size()) == cols, "rpnn model: matrix has wrong column count");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = v[i][c];
  }
  return m;
}
}  // namespace

void RpnnModel::save(std::ostream& out) const {
  nlohmann::json j;
  j["format"] = "slowman.rpnn";
  j["version"] = 1;
  j["fast_dim"] = fast_dim();
  j["slow_dim"] = slow_dim();
  j["hidden"] = hidden();
  j["activation"] = "logistic";
  j["output_bias"] = 0.0;
  j["seed"] = seed;
  nlohmann::json outs = nlohmann::json::array();
  for (int m = 0; m < fast_dim(); ++m) {
    nlohmann::json o;
    o["A"] = mat_json(proj_[m].A);
    o["beta"] = std::vector<double>(proj_[m].beta.begin(), proj_[m].beta.end());
    o["centers"] = mat_json(proj_[m].centers);
    const Vec w = w_.col(m);
    o["w_out"] = std::vector<double>(w.begin(), w.end());
    outs.push_back(o);
  }
  j["outputs"] = outs;
  j["metadata"] = metadata;
  out << j.dump(1) << "\n";
}

RpnnModel RpnnModel::load(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail(ErrorKind::config, std::string("rpnn model: parse error: ") + e.what());
  }
  if (j.value("format", "") != "slowman.rpnn") fail(ErrorKind::config, "not an rpnn model file");
  try {
    const int M = j.at("fast_dim").get<int>(), S = j.at("slow_dim").get<int>(), L = j.at("hidden").get<int>();
    require(M >= 1 && S >= 1 && L >= 1, "rpnn model: dimensions must be positive");
    const auto& outs = j.at("outputs");
    require(static_cast<int>(outs.size()) == M, "rpnn model: wrong number of outputs");
    std::vector<RpnnProjection> proj;
    Mat w(L, M);
    for (int m = 0; m < M; ++m) {
      const auto& o = outs.at(m);
      RpnnProjection p;
      p.A = json_mat(o.at("A"), L, S + 1);
      p.centers = json_mat(o.at("centers"), L, S + 1);
      const auto beta = o.at("beta").get<std::vector<double>>();
      const auto wm = o.at("w_out").get<std::vector<double>>();
      require(static_cast<int>(beta.size()) == L && static_cast<int>(wm.size()) == L,
              "rpnn model: vector sizes do not match hidden width");
      p.beta = Eigen::Map<const Vec>(beta.data(), L);
      w.col(m) = Eigen::Map<const Vec>(wm.data(), L);
      proj.push_back(std::move(p));
    }
    RpnnModel model(std::move(proj), std::move(w));
    model.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("metadata")) model.metadata = j["metadata"].get<std::map<std::string, std::string>>();
    return model;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::config, std::string("rpnn model: ") + e.what());
  }
}

}  // namespace slowman

#include "slowman/slfnn.hpp"
#include "slowman/parallel.hpp"

#include <json.hpp>

#include <istream>
#include <ostream>

namespace slowman {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

SlfnnModel::SlfnnModel(int fast, int slow, int hidden)
    : fast_(fast), slow_(slow), hidden_(hidden) {
  require(fast >= 1 && slow >= 1 && hidden >= 1, "slfnn: dimensions must be positive");
  p_ = Vec::Zero(param_count());
}

SlfnnModel SlfnnModel::random(int fast, int slow, int hidden, std::uint64_t seed) {
  SlfnnModel m(fast, slow, hidden);
  Rng rng(seed);
  for (Eigen::Index i = 0; i < m.p_.size(); ++i) m.p_(i) = rng.uniform(-1.0, 1.0);
  m.seed = seed;
  return m;
}

SlfnnModel SlfnnModel::with_parameters(const Vec& p) const {
  require(p.size() == param_count(), "slfnn: parameter vector has wrong length");
  SlfnnModel out = *this;
  out.p_ = p;
  return out;
}

Eigen::Map<const Vec> SlfnnModel::w_out(int m) const {
  return Eigen::Map<const Vec>(p_.data() + m * params_per_output() + off_w_out(), hidden_);
}

double SlfnnModel::b_out(int m) const { return p_(m * params_per_output() + off_b_out()); }

Eigen::Map<const RowMat> SlfnnModel::W(int m) const {
  return Eigen::Map<const RowMat>(p_.data() + m * params_per_output() + off_W(), hidden_, input_dim());
}

Eigen::Map<const Vec> SlfnnModel::b(int m) const {
  return Eigen::Map<const Vec>(p_.data() + m * params_per_output() + off_b(), hidden_);
}

namespace {

struct Hidden {
  Vec phi, dphi, ddphi;
};

Hidden hidden_layer(const SlfnnModel& model, int m, const Vec& u) {
  Hidden h;
  const Vec z = model.W(m) * u + model.b(m);
  h.phi = z.unaryExpr([](double v) { return logistic(v); });
  h.dphi = h.phi.array() * (1.0 - h.phi.array());
  h.ddphi = h.dphi.array() * (1.0 - 2.0 * h.phi.array());
  return h;
}

Vec input(const Vec& y, double eps) {
  Vec u(y.size() + 1);
  u << y, eps;
  return u;
}

}  // namespace

Vec SlfnnModel::eval(const Vec& y, const double& eps) const {
  require(y.size() == slow_, "slfnn: slow state has wrong size");
  const Vec u = input(y, eps);
  Vec out(fast_);
  for (int m = 0; m < fast_; ++m) out(m) = w_out(m).dot(hidden_layer(*this, m, u).phi) + b_out(m);
  return out;
}

Mat SlfnnModel::grad_y(const Vec& y, const double& eps) const {
  require(y.size() == slow_, "slfnn: slow state has wrong size");
  const Vec u = input(y, eps);
  Mat G(fast_, slow_);
  for (int m = 0; m < fast_; ++m) {
    const Hidden h = hidden_layer(*this, m, u);
    const Vec wd = w_out(m).cwiseProduct(h.dphi);
    // the eps column of W is not a slow direction
    G.row(m) = (W(m).leftCols(slow_).transpose() * wd).transpose();
  }
  return G;
}

Vec slfnn_forward(const SlfnnModel& model, const Vec& y, double eps) { return model.eval(y, eps); }

Mat slfnn_grad_y(const SlfnnModel& model, const Vec& y, double eps) { return model.grad_y(y, eps); }

Vec slfnn_residuals(const SlfnnModel& model, const SlowSystem& sys, const Collocation& pts) {
  return stacked_residuals(model, sys, pts);
}

Mat slfnn_jacobian(const SlfnnModel& model, const SlowSystem& sys, const Collocation& pts) {
  const int M = sys.fast_dim(), S = sys.slow_dim();
  require(model.fast_dim() == M && model.slow_dim() == S, "slfnn_jacobian: model/system mismatch");
  require(pts.slow_dim() == S, "slfnn_jacobian: collocation slow dimension mismatch");
  const int L = model.hidden(), D = model.input_dim(), P = model.params_per_output();
  Mat J = Mat::Zero(M * pts.size(), model.param_count());

  parallel_for(static_cast<std::size_t>(pts.size()), [&](std::size_t kk) {
    const auto k = static_cast<Eigen::Index>(kk);
    const double e = pts.eps(k);
    const Vec y = pts.y.row(k).transpose();
    const Vec u = input(y, e);

    std::vector<Hidden> hid(M);
    Vec x(M);
    Mat G(M, S);
    for (int r = 0; r < M; ++r) {
      hid[r] = hidden_layer(model, r, u);
      x(r) = model.w_out(r).dot(hid[r].phi) + model.b_out(r);
      G.row(r) = (model.W(r).leftCols(S).transpose() * model.w_out(r).cwiseProduct(hid[r].dphi)).transpose();
    }
    const Mat fx = sys.fx(x, y, e);
    const Mat gx = sys.gx(x, y, e);
    const Vec gv = sys.g(x, y, e);

    for (int m = 0; m < M; ++m) {
      const Eigen::Index row = k * M + m;
      for (int r = 0; r < M; ++r) {
        const Hidden& h = hid[r];
        const auto w = model.w_out(r);
        const auto Wr = model.W(r);
        // chain factor multiplying dN_r/dp in row m
        const double coef = fx(m, r) - e * G.row(m).dot(gx.col(r));
        const double mix = (r == m) ? e : 0.0;
        const Vec s = Wr.leftCols(S) * gv;  // sum_d W_ld g_d
        const int off = r * P;
        for (int l = 0; l < L; ++l) {
          J(row, off + model.off_w_out() + l) = coef * h.phi(l) - mix * h.dphi(l) * s(l);
          for (int c = 0; c < D; ++c) {
            const double dN = w(l) * u(c) * h.dphi(l);
            const double d2 = w(l) * (u(c) * h.ddphi(l) * s(l) + (c < S ? h.dphi(l) * gv(c) : 0.0));
            J(row, off + model.off_W() + l * D + c) = coef * dN - mix * d2;
          }
          J(row, off + model.off_b() + l) = coef * w(l) * h.dphi(l) - mix * w(l) * h.ddphi(l) * s(l);
        }
        J(row, off + model.off_b_out()) = coef;
      }
    }
  });
  return J;
}

Mat slfnn_jacobian_fd(const SlfnnModel& model, const SlowSystem& sys, const Collocation& pts) {
  const Vec F0 = slfnn_residuals(model, sys, pts);
  return forward_difference_jacobian(
      [&](const Vec& p) { return slfnn_residuals(model.with_parameters(p), sys, pts); },
      model.parameters(), F0);
}

LmResult lm_train(const SlfnnModel& model0, const SlowSystem& sys, const Collocation& pts,
                  const LmOptions& opts) {
  require(opts.tol > 0 && opts.max_iters >= 0 && opts.lambda0 > 0, "lm_train: invalid options");
  LmResult res{model0, {}, {}, false, ""};
  Vec p = model0.parameters();
  auto residual = [&](const Vec& q) { return slfnn_residuals(model0.with_parameters(q), sys, pts); };

  Vec F = residual(p);
  double norm = F.norm();
  if (!std::isfinite(norm)) fail(ErrorKind::numerical, "lm_train: non-finite initial residual");
  double lambda = opts.lambda0;
  res.history.push_back({0, norm, lambda, true});

  Mat J;
  bool stale = true;
  int it = 0;
  res.stop_reason = "max_iters";
  while (true) {
    if (norm < opts.tol) {
      res.converged = true;
      res.stop_reason = "tol";
      break;
    }
    if (it >= opts.max_iters) break;
    if (lambda > opts.lambda_max) {
      res.stop_reason = "stagnation";
      break;
    }
    ++it;
    if (stale) {
      const SlfnnModel cur = model0.with_parameters(p);
      J = opts.backend == DerivativeBackend::analytic ? slfnn_jacobian(cur, sys, pts)
                                                       : slfnn_jacobian_fd(cur, sys, pts);
      stale = false;
    }
    const Mat A = J.transpose() * J;
    const Vec grad = J.transpose() * F;
    // A saturated neuron leaves its columns of J numerically zero, and plain
    // lambda * diag(A) would then add nothing to those rows. The floor keeps
    // the damped matrix positive definite.
    const Vec scale = A.diagonal().cwiseMax(1e-12 * A.diagonal().maxCoeff());
    Mat Ad = A;
    Ad.diagonal() += lambda * scale;
    Eigen::LDLT<Mat> ldlt(Ad);
    Vec d;
    bool ok = ldlt.info() == Eigen::Success;
    if (ok) {
      d = ldlt.solve(-grad);
      ok = ldlt.info() == Eigen::Success && d.allFinite();
    }
    double trial_norm = norm;
    if (ok) {
      const Vec p_try = p + d;
      const Vec F_try = residual(p_try);
      trial_norm = F_try.norm();
      if (std::isfinite(trial_norm) && trial_norm < norm) {
        p = p_try;
        F = F_try;
        norm = trial_norm;
        lambda /= 10.0;
        stale = true;
        res.history.push_back({it, norm, lambda, true});
        continue;
      }
    }
    lambda *= 10.0;
    res.history.push_back({it, trial_norm, lambda, false});
  }
  res.model = model0.with_parameters(p);
  res.model.metadata["trainer"] = "levenberg_marquardt";
  res.model.metadata["derivative_backend"] = backend_name(opts.backend);
  res.state = {lambda, it, norm};
  return res;
}

// ------------------------------------------------------------------ io

void SlfnnModel::save(std::ostream& out) const {
  nlohmann::json j;
  j["format"] = "slowman.slfnn";
  j["version"] = 1;
  j["fast_dim"] = fast_;
  j["slow_dim"] = slow_;
  j["hidden"] = hidden_;
  j["activation"] = "logistic";
  j["seed"] = seed;
  j["parameter_layout"] = "w_out[L], b_out, W[L][D] (last column eps), b[L]";
  nlohmann::json outs = nlohmann::json::array();
  for (int m = 0; m < fast_; ++m) {
    nlohmann::json o;
    o["w_out"] = std::vector<double>(w_out(m).begin(), w_out(m).end());
    o["b_out"] = b_out(m);
    nlohmann::json rows = nlohmann::json::array();
    for (int l = 0; l < hidden_; ++l) {
      std::vector<double> r(input_dim());
      for (int c = 0; c < input_dim(); ++c) r[c] = W(m)(l, c);
      rows.push_back(r);
    }
    o["W"] = rows;
    o["b"] = std::vector<double>(b(m).begin(), b(m).end());
    outs.push_back(o);
  }
  j["outputs"] = outs;
  j["metadata"] = metadata;
  out << j.dump(1) << "\n";
}

SlfnnModel SlfnnModel::load(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail(ErrorKind::config, std::string("slfnn model: parse error: ") + e.what());
  }
  if (j.value("format", "") != "slowman.slfnn") fail(ErrorKind::config, "not an slfnn model file");
  try {
    SlfnnModel m(j.at("fast_dim").get<int>(), j.at("slow_dim").get<int>(), j.at("hidden").get<int>());
    m.seed = j.at("seed").get<std::uint64_t>();
    const int P = m.params_per_output(), L = m.hidden_, D = m.input_dim();
    const auto& outs = j.at("outputs");
    require(static_cast<int>(outs.size()) == m.fast_, "slfnn model: wrong number of outputs");
    for (int r = 0; r < m.fast_; ++r) {
      const auto& o = outs.at(r);
      const auto w = o.at("w_out").get<std::vector<double>>();
      const auto bb = o.at("b").get<std::vector<double>>();
      const auto W = o.at("W").get<std::vector<std::vector<double>>>();
      require(static_cast<int>(w.size()) == L && static_cast<int>(bb.size()) == L &&
                  static_cast<int>(W.size()) == L,
              "slfnn model: block sizes do not match hidden width");
      for (int l = 0; l < L; ++l) {
        m.p_(r * P + m.off_w_out() + l) = w[l];
        m.p_(r * P + m.off_b() + l) = bb[l];
        require(static_cast<int>(W[l].size()) == D, "slfnn model: W row has wrong length");
        for (int c = 0; c < D; ++c) m.p_(r * P + m.off_W() + l * D + c) = W[l][c];
      }
      m.p_(r * P + m.off_b_out()) = o.at("b_out").get<double>();
    }
    if (j.contains("metadata")) m.metadata = j["metadata"].get<std::map<std::string, std::string>>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::config, std::string("slfnn model: ") + e.what());
  }
}

}  // namespace slowman

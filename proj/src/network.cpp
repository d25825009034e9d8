#include "slowman/network.hpp"
#include "slowman/parallel.hpp"

namespace slowman {

Collocation::Collocation(Mat y_, Vec eps_) : y(std::move(y_)), eps(std::move(eps_)) {
  require(y.rows() == eps.size(), "collocation: y rows and eps length differ");
}

Collocation Collocation::subset(const std::vector<Eigen::Index>& rows) const {
  Collocation out;
  out.y.resize(static_cast<Eigen::Index>(rows.size()), y.cols());
  out.eps.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i] >= 0 && rows[i] < size(), "collocation subset: index out of range");
    out.y.row(static_cast<Eigen::Index>(i)) = y.row(rows[i]);
    out.eps(static_cast<Eigen::Index>(i)) = eps(rows[i]);
  }
  return out;
}

DerivativeBackend parse_backend(const std::string& s) {
  if (s == "analytic" || s == "sd") return DerivativeBackend::analytic;
  if (s == "finite_difference" || s == "fd") return DerivativeBackend::finite_difference;
  fail(ErrorKind::config, "unknown derivative backend '" + s + "'");
}

const char* backend_name(DerivativeBackend b) {
  return b == DerivativeBackend::analytic ? "analytic" : "finite_difference";
}

Vec stacked_residuals(const SimMap& h, const SlowSystem& sys, const Collocation& pts) {
  const int m = sys.fast_dim();
  require(pts.slow_dim() == sys.slow_dim(), "residuals: collocation slow dimension mismatch");
  Vec F(m * pts.size());
  parallel_for(static_cast<std::size_t>(pts.size()), [&](std::size_t k) {
    const auto i = static_cast<Eigen::Index>(k);
    const Vec y = pts.y.row(i).transpose();
    F.segment(i * m, m) = ie_residual<double>(sys, h, y, pts.eps(i));
  });
  return F;
}

Mat forward_difference_jacobian(const std::function<Vec(const Vec&)>& F, const Vec& p,
                                const Vec& F0) {
  Mat J(F0.size(), p.size());
  Vec q = p;
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    const double h = 1e-7 * (1.0 + std::abs(p(j)));
    q(j) = p(j) + h;
    J.col(j) = (F(q) - F0) / h;
    q(j) = p(j);
  }
  return J;
}

Mat central_difference_jacobian(const std::function<Vec(const Vec&)>& F, const Vec& p,
                                double rel_step) {
  Vec q = p;
  Mat J;
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    const double h = rel_step * (1.0 + std::abs(p(j)));
    q(j) = p(j) + h;
    const Vec hi = F(q);
    q(j) = p(j) - h;
    const Vec lo = F(q);
    q(j) = p(j);
    if (j == 0) J.resize(hi.size(), p.size());
    J.col(j) = (hi - lo) / (2 * h);
  }
  return J;
}

}  // namespace slowman

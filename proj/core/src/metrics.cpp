#include "csimrec/metrics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "csimrec/errors.hpp"

namespace csimrec {

namespace {

void require_same_length(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                         const char* what) {
  if (x.size() != y.size()) {
    throw ShapeError(std::string(what) + ": length mismatch (" +
                     std::to_string(x.size()) + " vs " +
                     std::to_string(y.size()) + ")");
  }
}

void require_dim(Eigen::Index size, const CsimParams& p, const char* what) {
  if (size != p.n) {
    throw ShapeError(std::string(what) + ": signal length " +
                     std::to_string(size) + " does not match CSIM dimension " +
                     std::to_string(p.n));
  }
}

struct PairStats {
  double mean_x, mean_y, var_x, var_y, cov;
};

PairStats pair_stats(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const double n = static_cast<double>(x.size());
  PairStats st{};
  st.mean_x = x.mean();
  st.mean_y = y.mean();
  const Eigen::ArrayXd dx = x.array() - st.mean_x;
  const Eigen::ArrayXd dy = y.array() - st.mean_y;
  const double dof = n > 1 ? n - 1.0 : 1.0;
  st.var_x = dx.square().sum() / dof;
  st.var_y = dy.square().sum() / dof;
  st.cov = (dx * dy).sum() / dof;
  return st;
}

double ssim_from_stats(const PairStats& st, double c1, double c2) {
  const double luminance = (2.0 * st.mean_x * st.mean_y + c1) /
                           (st.mean_x * st.mean_x + st.mean_y * st.mean_y + c1);
  const double structure = (2.0 * st.cov + c2) / (st.var_x + st.var_y + c2);
  return luminance * structure;
}

}  // namespace

CsimParams csim_weights(int n, double k0, double rho) {
  if (n < 2) throw ParameterError("csim_weights: dimension must be >= 2");
  if (!(k0 > 0.0)) throw ParameterError("csim_weights: k0 must be positive");
  if (!(rho > 0.0)) throw ParameterError("csim_weights: rho must be positive");
  const double dn = static_cast<double>(n);
  CsimParams p;
  p.n = n;
  p.k0 = k0;
  p.rho = rho;
  p.w1 = k0 * rho / (dn - 1.0);
  p.w2 = k0 * (1.0 / (dn * dn) - rho / (dn * (dn - 1.0)));
  return p;
}

double csim_stat(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                 const CsimParams& p) {
  require_same_length(x, y, "csim_stat");
  require_dim(x.size(), p, "csim_stat");
  const PairStats st = pair_stats(x, y);
  const double dmean = st.mean_x - st.mean_y;
  return p.k0 * (dmean * dmean + p.rho * (st.var_x + st.var_y - 2.0 * st.cov));
}

double csim_quad(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                 const CsimParams& p) {
  require_same_length(x, y, "csim_quad");
  require_dim(x.size(), p, "csim_quad");
  const Eigen::VectorXd e = x - y;
  const double total = e.sum();
  return p.w1 * e.squaredNorm() + p.w2 * total * total;
}

Eigen::VectorXd apply_w(const Eigen::VectorXd& v, const CsimParams& p) {
  require_dim(v.size(), p, "apply_w");
  const double total = v.sum();
  return (p.w1 * v.array() + p.w2 * total).matrix();
}

double ssim_global(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                   double c1, double c2) {
  require_same_length(x, y, "ssim_global");
  if (x.size() == 0) throw ShapeError("ssim_global: empty signals");
  if (!(c1 > 0.0) || !(c2 > 0.0)) {
    throw ParameterError("ssim_global: c1 and c2 must be positive");
  }
  return ssim_from_stats(pair_stats(x, y), c1, c2);
}

double mse(const Eigen::Ref<const Eigen::MatrixXd>& x,
           const Eigen::Ref<const Eigen::MatrixXd>& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw ShapeError("mse: shape mismatch");
  }
  if (x.size() == 0) throw ShapeError("mse: empty inputs");
  return (x - y).squaredNorm() / static_cast<double>(x.size());
}

double psnr(const Eigen::Ref<const Eigen::MatrixXd>& x,
            const Eigen::Ref<const Eigen::MatrixXd>& y, double peak) {
  if (!(peak > 0.0)) throw ParameterError("psnr: peak must be positive");
  const double err = mse(x, y);
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / err);
}

double ssim_windowed(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                     int window, double c1, double c2) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw ShapeError("ssim_windowed: shape mismatch");
  }
  if (window < 1 || window > x.rows() || window > x.cols()) {
    throw ParameterError("ssim_windowed: window must fit inside the image");
  }
  if (!(c1 > 0.0) || !(c2 > 0.0)) {
    throw ParameterError("ssim_windowed: c1 and c2 must be positive");
  }
  const Eigen::Index rows = x.rows();
  const Eigen::Index cols = x.cols();

  // Summed-area tables of the pair after removing a common offset, which
  // keeps the per-window moment differences well conditioned.
  const double offset = 0.5 * (x.mean() + y.mean());
  const Eigen::ArrayXXd a = x.array() - offset;
  const Eigen::ArrayXXd b = y.array() - offset;
  auto integral = [rows, cols](const Eigen::ArrayXXd& v) {
    Eigen::ArrayXXd t = Eigen::ArrayXXd::Zero(rows + 1, cols + 1);
    for (Eigen::Index c = 0; c < cols; ++c) {
      for (Eigen::Index r = 0; r < rows; ++r) {
        t(r + 1, c + 1) = v(r, c) + t(r, c + 1) + t(r + 1, c) - t(r, c);
      }
    }
    return t;
  };
  const Eigen::ArrayXXd sa = integral(a);
  const Eigen::ArrayXXd sb = integral(b);
  const Eigen::ArrayXXd saa = integral(a * a);
  const Eigen::ArrayXXd sbb = integral(b * b);
  const Eigen::ArrayXXd sab = integral(a * b);
  auto box = [window](const Eigen::ArrayXXd& t, Eigen::Index r, Eigen::Index c) {
    return t(r + window, c + window) - t(r, c + window) - t(r + window, c) +
           t(r, c);
  };

  const double count = static_cast<double>(window) * window;
  const double dof = count > 1.0 ? count - 1.0 : 1.0;
  double total = 0.0;
  for (Eigen::Index c = 0; c + window <= cols; ++c) {
    for (Eigen::Index r = 0; r + window <= rows; ++r) {
      const double ma = box(sa, r, c) / count;
      const double mb = box(sb, r, c) / count;
      PairStats st{};
      st.mean_x = ma + offset;
      st.mean_y = mb + offset;
      st.var_x = (box(saa, r, c) - count * ma * ma) / dof;
      st.var_y = (box(sbb, r, c) - count * mb * mb) / dof;
      st.cov = (box(sab, r, c) - count * ma * mb) / dof;
      total += ssim_from_stats(st, c1, c2);
    }
  }
  const double windows =
      static_cast<double>(rows - window + 1) * static_cast<double>(cols - window + 1);
  return total / windows;
}

QualityReport compare_images(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                             const CsimParams& p) {
  QualityReport q;
  q.mse = mse(x, y);
  q.psnr = psnr(x, y);
  if (x.rows() >= kSsimWindow && x.cols() >= kSsimWindow) {
    q.ssim = ssim_windowed(x, y, kSsimWindow, kSsimC1, kSsimC2);
  } else {
    q.ssim = ssim_global(x.reshaped(), y.reshaped(), kSsimC1, kSsimC2);
  }
  q.csim = csim_quad(x.reshaped(), y.reshaped(), p);
  return q;
}

}  // namespace csimrec

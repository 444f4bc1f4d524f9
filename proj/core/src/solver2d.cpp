#include "csimrec/solver2d.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <vector>

#include "csimrec/errors.hpp"

namespace csimrec {

Mask2D::Mask2D(Eigen::MatrixXd grid) : grid_(std::move(grid)) {
  for (Eigen::Index c = 0; c < grid_.cols(); ++c) {
    for (Eigen::Index r = 0; r < grid_.rows(); ++r) {
      const double v = grid_(r, c);
      if (v != 0.0 && v != 1.0) {
        throw ParameterError("Mask2D: entries must be 0 or 1");
      }
      if (v == 1.0) ++count_;
    }
  }
}

Mask2D Mask2D::full(int rows, int cols) {
  return Mask2D(Eigen::MatrixXd::Ones(rows, cols));
}

Eigen::MatrixXd Mask2D::apply(const Eigen::MatrixXd& x) const {
  if (x.rows() != grid_.rows() || x.cols() != grid_.cols()) {
    throw ShapeError("Mask2D::apply: shape mismatch");
  }
  return x.cwiseProduct(grid_);
}

SolverConfig2D SolverConfig2D::defaults_for(double sr) {
  SolverConfig2D cfg;
  cfg.sigma = 6.0 * sr;
  return cfg;
}

void SolverConfig2D::validate() const {
  if (!(sigma > 0.0)) throw ParameterError("sigma must be > 0");
  if (!(mu > 0.0 && mu < 1.0)) throw ParameterError("mu must be in (0, 1)");
  if (!(zeta > 0.0 && zeta < 1.0)) throw ParameterError("zeta must be in (0, 1)");
  if (!(alpha_min > 0.0)) throw ParameterError("alpha_min must be > 0");
  if (!(rho > 0.0)) throw ParameterError("rho must be > 0");
  if (k0 && !(*k0 > 0.0)) throw ParameterError("k0 must be > 0");
  if (!(lambda >= 1.0)) {
    throw ParameterError("lambda must be >= 1 (orthonormal 2D DCT has norm 1)");
  }
  if (max_iter < 1) throw ParameterError("max_iter must be >= 1");
  if (!(tol >= 0.0)) throw ParameterError("tol must be >= 0");
  if (kernel_side < 1 || kernel_side % 2 == 0) {
    throw ParameterError("kernel_side must be a positive odd integer");
  }
}

std::string SolverConfig2D::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "sigma=" << sigma << " mu=" << mu << " zeta=" << zeta
     << " alpha_min=" << alpha_min << " rho=" << rho << " k0=";
  if (k0) os << *k0; else os << "2.5(N-1)";
  os << " lambda=" << lambda << " max_iter=" << max_iter << " tol=" << tol
     << " kernel_side=" << kernel_side
     << " kernel=" << (kernel == InterpKernel::kTent ? "tent" : "box");
  return os.str();
}

Eigen::MatrixXd apply_w_2d(const Eigen::MatrixXd& x, const CsimParams& p) {
  if (x.size() != p.n) {
    throw ShapeError("apply_w_2d: matrix size does not match CSIM dimension");
  }
  return (p.w1 * x.array() + p.w2 * x.sum()).matrix();
}

double csim_2d(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
               const CsimParams& p) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw ShapeError("csim_2d: shape mismatch");
  }
  if (x.size() != p.n) {
    throw ShapeError("csim_2d: matrix size does not match CSIM dimension");
  }
  const Eigen::MatrixXd e = x - y;
  const double total = e.sum();
  return p.w1 * e.squaredNorm() + p.w2 * total * total;
}

namespace {

void require_odd_kernel(int kernel_side) {
  if (kernel_side < 1 || kernel_side % 2 == 0) {
    throw ParameterError("interp_residual: kernel_side must be a positive odd integer");
  }
}

// Separable filtering with replicated borders; taps has odd length and is
// applied along columns and then along rows.
Eigen::MatrixXd separable_filter(const Eigen::MatrixXd& r, const std::vector<double>& taps) {
  const Eigen::Index rows = r.rows();
  const Eigen::Index cols = r.cols();
  const auto half = static_cast<Eigen::Index>(taps.size() / 2);
  auto clamp = [](Eigen::Index i, Eigen::Index n) {
    return std::clamp<Eigen::Index>(i, 0, n - 1);
  };
  Eigen::MatrixXd vertical(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      double acc = 0.0;
      for (Eigen::Index k = -half; k <= half; ++k) {
        acc += taps[static_cast<std::size_t>(k + half)] * r(clamp(i + k, rows), c);
      }
      vertical(i, c) = acc;
    }
  }
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      double acc = 0.0;
      for (Eigen::Index k = -half; k <= half; ++k) {
        acc += taps[static_cast<std::size_t>(k + half)] * vertical(i, clamp(j + k, cols));
      }
      out(i, j) = acc;
    }
  }
  return out;
}

}  // namespace

Eigen::MatrixXd interp_residual(const Eigen::MatrixXd& r, int kernel_side) {
  require_odd_kernel(kernel_side);
  if (kernel_side == 1 || r.size() == 0) return r;
  return separable_filter(
      r, std::vector<double>(static_cast<std::size_t>(kernel_side), 1.0 / kernel_side));
}

Eigen::MatrixXd interp_residual_tent(const Eigen::MatrixXd& r, int kernel_side) {
  require_odd_kernel(kernel_side);
  if (kernel_side == 1 || r.size() == 0) return r;
  const int half = kernel_side / 2;
  std::vector<double> taps(static_cast<std::size_t>(kernel_side));
  const double norm = static_cast<double>(half + 1) * (half + 1);
  for (int k = -half; k <= half; ++k) {
    taps[static_cast<std::size_t>(k + half)] = (half + 1 - std::abs(k)) / norm;
  }
  return separable_filter(r, taps);
}

Eigen::MatrixXd interp_residual(const Eigen::MatrixXd& r, int kernel_side,
                                InterpKernel kernel) {
  return kernel == InterpKernel::kTent ? interp_residual_tent(r, kernel_side)
                                       : interp_residual(r, kernel_side);
}

namespace {

// 2 H^T W H y for a masked image y, with W over the observed pixels.
Eigen::MatrixXd observed_data_term(const Eigen::MatrixXd& y, const Mask2D& mask,
                                   const CsimParams& p) {
  if (p.n != mask.count()) {
    throw ShapeError("CSIM weights must be built over the observed pixel count");
  }
  const Eigen::MatrixXd observed = mask.apply(y);
  const double total = observed.sum();
  return 2.0 * mask.apply((p.w1 * observed.array() + p.w2 * total).matrix());
}

void require_same_shape(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                        const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(what) + ": shape mismatch");
  }
}

Eigen::MatrixXd x_step(const SolverState2D& state, const Mask2D& mask,
                       const Eigen::MatrixXd& data_term, const WoodburyGammas& g,
                       double sigma) {
  const Eigen::MatrixXd c = -data_term - sigma * state.u + state.gamma;
  const Eigen::MatrixXd c_obs = mask.apply(c);
  const double total = c_obs.sum();
  const Eigen::MatrixXd correction =
      mask.apply((g.gamma1 * c_obs.array() + g.gamma2 * total).matrix());
  return -(c - correction) / sigma;
}

}  // namespace

Eigen::MatrixXd x_update_2d(const SolverState2D& state, const Mask2D& mask,
                            const Eigen::MatrixXd& y, const CsimParams& p,
                            double sigma) {
  require_same_shape(y, mask.grid(), "x_update_2d");
  require_same_shape(state.u, y, "x_update_2d");
  require_same_shape(state.gamma, y, "x_update_2d");
  const WoodburyGammas g = woodbury_gammas(p, sigma);
  return x_step(state, mask, observed_data_term(y, mask, p), g, sigma);
}

ShrinkResult s_update_2d(const SolverState2D& state, double sigma, double alpha,
                         double lambda, int kernel_side, InterpKernel kernel,
                         const Dct2d& transform) {
  if (!(sigma > 0.0)) throw ParameterError("s_update_2d: sigma must be > 0");
  if (!(lambda > 0.0)) throw ParameterError("s_update_2d: lambda must be > 0");
  require_same_shape(state.x, state.u, "s_update_2d");
  require_same_shape(state.x, state.gamma, "s_update_2d");
  const Eigen::MatrixXd residual =
      interp_residual(state.x + state.gamma / sigma - state.u, kernel_side, kernel);
  ShrinkResult out;
  const Eigen::MatrixXd coeffs = transform.forward(state.u + residual / lambda);
  out.s = soft_threshold(coeffs.reshaped(), alpha / (lambda * sigma))
              .reshaped(coeffs.rows(), coeffs.cols());
  out.u = transform.inverse(out.s);
  return out;
}

ShrinkResult s_update_2d(const SolverState2D& state, double sigma, double alpha,
                         double lambda, int kernel_side, InterpKernel kernel) {
  const Dct2d transform(static_cast<int>(state.x.rows()),
                        static_cast<int>(state.x.cols()));
  return s_update_2d(state, sigma, alpha, lambda, kernel_side, kernel, transform);
}

InpaintProblem::InpaintProblem(const Eigen::MatrixXd& y, const Mask2D& mask,
                               const SolverConfig2D& cfg)
    : y_(y),
      mask_(mask),
      cfg_(cfg),
      transform_(static_cast<int>(y.rows()), static_cast<int>(y.cols())) {
  cfg.validate();
  require_same_shape(y, mask.grid(), "InpaintProblem");
  if (mask.count() == 0) {
    throw UnrecoverableInputError("inpaint: mask has no observed pixels");
  }
  masked_ = mask.apply(y);
  weights_ = observed_weights(mask.count(),
                              cfg.resolved_k0(static_cast<int>(y.size())), cfg.rho);
  gammas_ = woodbury_gammas(weights_, cfg.sigma);
  data_term_ = observed_data_term(masked_, mask_, weights_);
}

SolverState2D InpaintProblem::initial_state() const {
  SolverState2D st;
  const Eigen::Index rows = y_.rows();
  const Eigen::Index cols = y_.cols();
  st.x = Eigen::MatrixXd::Zero(rows, cols);
  st.s = Eigen::MatrixXd::Zero(rows, cols);
  st.u = Eigen::MatrixXd::Zero(rows, cols);
  st.gamma = Eigen::MatrixXd::Zero(rows, cols);
  st.alpha = cfg_.zeta * transform_.forward(masked_).cwiseAbs().maxCoeff();
  return st;
}

void InpaintProblem::iterate(SolverState2D& state) const {
  state.x = x_step(state, mask_, data_term_, gammas_, cfg_.sigma);
  ShrinkResult shrunk = s_update_2d(state, cfg_.sigma, state.alpha, cfg_.lambda,
                                    cfg_.kernel_side, cfg_.kernel, transform_);
  state.s = std::move(shrunk.s);
  state.u = std::move(shrunk.u);
  state.gamma += cfg_.sigma * (state.x - state.u);
  state.alpha = std::max(state.alpha * cfg_.mu, cfg_.alpha_min);
  ++state.t;
}

Eigen::MatrixXd InpaintProblem::project(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd out = x;
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
      if (mask_.observed(static_cast<int>(r), static_cast<int>(c))) out(r, c) = y_(r, c);
    }
  }
  return out;
}

InpaintResult inpaint(const Eigen::MatrixXd& y, const Mask2D& mask,
                      const SolverConfig2D& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const InpaintProblem problem(y, mask, cfg);
  SolverState2D state = problem.initial_state();

  InpaintResult result;
  result.report.config = cfg.describe();
  while (state.t < cfg.max_iter) {
    const Eigen::MatrixXd previous = state.x;
    problem.iterate(state);
    if ((state.x - previous).norm() <= cfg.tol * state.x.norm()) {
      result.report.converged = true;
      break;
    }
  }
  result.x_hat = problem.project(state.x);
  result.report.iterations = state.t;
  result.report.final_alpha = state.alpha;
  result.report.feasibility = (state.x - state.u).norm();
  result.report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace csimrec

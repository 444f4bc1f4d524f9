#pragma once

#include <optional>
#include <string>

#include <Eigen/Core>

#include "csimrec/metrics.hpp"
#include "csimrec/report.hpp"
#include "csimrec/solver1d.hpp"
#include "csimrec/transforms.hpp"

namespace csimrec {

// Binary sampling mask for an image, 1 = observed. Sampling is the Hadamard
// product H .* X.
class Mask2D {
 public:
  Mask2D() = default;
  // Throws ParameterError if any entry is not exactly 0 or 1.
  explicit Mask2D(Eigen::MatrixXd grid);

  static Mask2D full(int rows, int cols);

  int rows() const { return static_cast<int>(grid_.rows()); }
  int cols() const { return static_cast<int>(grid_.cols()); }
  int count() const { return count_; }
  bool observed(int r, int c) const { return grid_(r, c) != 0.0; }
  const Eigen::MatrixXd& grid() const { return grid_; }

  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;

 private:
  Eigen::MatrixXd grid_;
  int count_ = 0;
};

// Shape of the residual smoothing kernel. kTent is the separable triangle
// (box of side (k+1)/2 convolved with itself, [1 2 1]/4 for k = 3); its
// frequency response is non-negative. The uniform box has negative lobes, and
// with them the residual step amplifies high frequencies once the threshold
// has decayed, so the iteration diverges.
enum class InterpKernel { kBox, kTent };

struct SolverConfig2D {
  double sigma = 1.8;
  double mu = 0.8;
  double zeta = 0.2;
  double alpha_min = 1e-4;
  double rho = 1.1;
  std::optional<double> k0;  // unset: 2.5*(N-1), N = rows*cols
  double lambda = 1.2;
  int max_iter = 40;
  double tol = 1e-6;
  int kernel_side = 3;
  InterpKernel kernel = InterpKernel::kTent;

  // sigma = 6*sr; other fields keep their defaults.
  static SolverConfig2D defaults_for(double sr);

  void validate() const;
  double resolved_k0(int pixels) const { return k0 ? *k0 : 2.5 * (pixels - 1.0); }
  std::string describe() const;
};

struct SolverState2D {
  Eigen::MatrixXd x;
  Eigen::MatrixXd s;
  Eigen::MatrixXd u;      // synthesis of s
  Eigen::MatrixXd gamma;  // dual variable
  double alpha = 0.0;
  int t = 0;
};

// w1*X + w2*sum(X)*ones. p.n must equal X.size().
Eigen::MatrixXd apply_w_2d(const Eigen::MatrixXd& x, const CsimParams& p);

// trace(w1 E^T E + w2 (1^T E 1)^2), E = X - Y.
double csim_2d(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
               const CsimParams& p);

// Moving-average filter with a kernel_side x kernel_side uniform kernel and
// replicated borders. kernel_side must be odd and positive.
Eigen::MatrixXd interp_residual(const Eigen::MatrixXd& r, int kernel_side);

// Separable triangle filter of odd side k with weights proportional to
// (h + 1 - |j|), h = (k-1)/2, normalised to unit gain; replicated borders.
Eigen::MatrixXd interp_residual_tent(const Eigen::MatrixXd& r, int kernel_side);

Eigen::MatrixXd interp_residual(const Eigen::MatrixXd& r, int kernel_side,
                                InterpKernel kernel);

// Closed-form x-subproblem. y is the masked image (zeros where missing) and p
// holds the CSIM weights over the observed pixels.
Eigen::MatrixXd x_update_2d(const SolverState2D& state, const Mask2D& mask,
                            const Eigen::MatrixXd& y, const CsimParams& p,
                            double sigma);

struct ShrinkResult {
  Eigen::MatrixXd s;
  Eigen::MatrixXd u;
};

// Interpolated residual followed by a soft-thresholded DCT step. Reads x, u,
// gamma from state.
ShrinkResult s_update_2d(const SolverState2D& state, double sigma, double alpha,
                         double lambda, int kernel_side, InterpKernel kernel,
                         const Dct2d& transform);
ShrinkResult s_update_2d(const SolverState2D& state, double sigma, double alpha,
                         double lambda, int kernel_side = 3,
                         InterpKernel kernel = InterpKernel::kBox);

// Fixed inpainting problem data. References must outlive the object.
class InpaintProblem {
 public:
  InpaintProblem(const Eigen::MatrixXd& y, const Mask2D& mask,
                 const SolverConfig2D& cfg);

  const CsimParams& weights() const { return weights_; }
  const Dct2d& transform() const { return transform_; }

  // Zero matrices with alpha = zeta*max|DCT2(Y)|.
  SolverState2D initial_state() const;
  void iterate(SolverState2D& state) const;
  // (1 - H) .* X + H .* Y
  Eigen::MatrixXd project(const Eigen::MatrixXd& x) const;

 private:
  const Eigen::MatrixXd& y_;
  const Mask2D& mask_;
  const SolverConfig2D& cfg_;
  Eigen::MatrixXd masked_;
  CsimParams weights_;
  WoodburyGammas gammas_;
  Eigen::MatrixXd data_term_;  // 2 H^T W H y
  Dct2d transform_;
};

struct InpaintResult {
  Eigen::MatrixXd x_hat;
  RecoveryReport report;
};

// Holistic inpainting of a masked image. Missing pixels of y are ignored.
// Throws UnrecoverableInputError for an empty mask.
InpaintResult inpaint(const Eigen::MatrixXd& y, const Mask2D& mask,
                      const SolverConfig2D& cfg);

}  // namespace csimrec

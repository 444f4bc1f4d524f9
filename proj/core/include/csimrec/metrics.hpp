#pragma once

#include <Eigen/Core>

namespace csimrec {

// Weights of the CSIM operator W = w1*I + w2*1*1^T over an n-dimensional
// signal. CSIM(x, y) = (x - y)^T W (x - y).
struct CsimParams {
  int n = 0;
  double k0 = 0.0;
  double rho = 0.0;
  double w1 = 0.0;
  double w2 = 0.0;

  // Eigenvalue of W on the ones vector; equals w1 + n*w2 = k0/n.
  double mean_eigenvalue() const { return w1 + n * w2; }
};

// Requires n >= 2, k0 > 0, rho > 0. Throws ParameterError otherwise.
//   w1 = k0*rho/(n-1),  w2 = k0*(1/n^2 - rho/(n(n-1)))
CsimParams csim_weights(int n, double k0, double rho);

// CSIM from signal statistics: k0*((mu_x-mu_y)^2 + rho*(var_x + var_y - 2cov)).
// Means divide by n, variance and covariance by n-1.
double csim_stat(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                 const CsimParams& p);

// CSIM in quadratic form w1*|e|^2 + w2*(1^T e)^2 with e = x - y.
double csim_quad(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                 const CsimParams& p);

// W*v in O(n).
Eigen::VectorXd apply_w(const Eigen::VectorXd& v, const CsimParams& p);

// Global-statistics SSIM of two equal-length signals.
double ssim_global(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                   double c1, double c2);

double mse(const Eigen::Ref<const Eigen::MatrixXd>& x,
           const Eigen::Ref<const Eigen::MatrixXd>& y);

// 10*log10(peak^2/MSE). Returns +infinity when the inputs are identical.
double psnr(const Eigen::Ref<const Eigen::MatrixXd>& x,
            const Eigen::Ref<const Eigen::MatrixXd>& y, double peak = 255.0);

// Mean SSIM over all window x window blocks at stride 1, uniform weights.
double ssim_windowed(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                     int window, double c1, double c2);

inline constexpr double kSsimC1 = (0.01 * 255.0) * (0.01 * 255.0);
inline constexpr double kSsimC2 = (0.03 * 255.0) * (0.03 * 255.0);
inline constexpr int kSsimWindow = 8;

struct QualityReport {
  double mse = 0.0;
  double psnr = 0.0;
  double ssim = 0.0;
  double csim = 0.0;
};

// Image comparison with the default reporting metrics: PSNR at peak 255,
// 8x8 windowed SSIM (falls back to global SSIM when the image is smaller than
// the window) and CSIM over the flattened image with the given params.
QualityReport compare_images(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                             const CsimParams& p);

}  // namespace csimrec

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "csimrec/metrics.hpp"
#include "csimrec/report.hpp"
#include "csimrec/transforms.hpp"

namespace csimrec {

// Row-selection operator H over an n-dimensional signal. The observed index
// list is strictly increasing, so H*H^T = I.
class SamplingMask1D {
 public:
  SamplingMask1D() = default;
  // Sorts the indices. Throws ParameterError on duplicates or out-of-range.
  SamplingMask1D(int n, std::vector<int> observed);

  static SamplingMask1D full(int n);

  int n() const { return n_; }
  int m() const { return static_cast<int>(observed_.size()); }
  const std::vector<int>& observed() const { return observed_; }
  bool is_full() const { return m() == n_; }

  // H*x
  Eigen::VectorXd gather(const Eigen::VectorXd& x) const;
  // H^T*y, missing entries zero-filled.
  Eigen::VectorXd scatter(const Eigen::VectorXd& y) const;

 private:
  int n_ = 0;
  std::vector<int> observed_;
};

struct SolverConfig1D {
  double sigma = 1.0;
  double mu = 0.8;
  double zeta = 0.2;
  double alpha_min = 1e-4;
  double rho = 1.1;
  std::optional<double> k0;      // unset: n - 1 for the patch dimension
  std::optional<double> lambda;  // unset: the dictionary's own norm estimate
  int max_iter = 50;
  double tol = 1e-6;
  // Solve for y - mean(y) and add the offset back before the final
  // projection (the observed samples stay bit-exact either way).
  bool center = false;

  // sigma = 2*sr; the remaining fields keep their defaults.
  static SolverConfig1D defaults_for(double sr);

  // Throws ParameterError when a field is outside its domain.
  void validate() const;
  double resolved_k0(int n) const { return k0 ? *k0 : n - 1.0; }
  std::string describe() const;
};

struct SolverState1D {
  Eigen::VectorXd x;
  Eigen::VectorXd s;
  Eigen::VectorXd eta;
  double alpha = 0.0;
  int t = 0;
};

// CSIM weights over the m observed samples. For m = 1, W is the 1x1 matrix
// [k0] (only the mean term survives).
CsimParams observed_weights(int m, double k0, double rho);

struct WoodburyGammas {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
};

// Scalars with [I + H^T (2/sigma) W H]^{-1} = I - H^T (g1 I + g2 1 1^T) H,
// where W lives on the observed space described by p.
WoodburyGammas woodbury_gammas(const CsimParams& p, double sigma);

// Elementwise sign(v)*max(|v| - t, 0). Throws ParameterError for t < 0.
Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double t);

// Fixed problem data plus the quantities that do not change across
// iterations. References must outlive the problem.
class PatchProblem {
 public:
  PatchProblem(const Eigen::VectorXd& y, const SamplingMask1D& mask,
               const Dictionary& dict, const SolverConfig1D& cfg);

  const SamplingMask1D& mask() const { return mask_; }
  const Dictionary& dictionary() const { return dict_; }
  const SolverConfig1D& config() const { return cfg_; }
  const Eigen::VectorXd& observations() const { return y_; }
  const CsimParams& weights() const { return weights_; }
  const WoodburyGammas& gammas() const { return gammas_; }
  double lambda() const { return lambda_; }

  // x = 0, s = 0, eta = 0, alpha = zeta*|D^T H^T y|_inf.
  SolverState1D initial_state() const;

  // c = -2 H^T W y - sigma D s + eta
  Eigen::VectorXd linear_term(const SolverState1D& state) const;
  Eigen::VectorXd x_update(const SolverState1D& state) const;
  Eigen::VectorXd s_update(const SolverState1D& state) const;

  // One ADMM sweep: x, s, dual ascent on eta, alpha decay, t += 1.
  void iterate(SolverState1D& state) const;

  // CSIM(Hx, y) + alpha|s|_1 + eta^T(x - Ds) + sigma/2 |x - Ds|^2
  double augmented_lagrangian(const SolverState1D& state) const;

  // (I - H^T H) x + H^T y
  Eigen::VectorXd project(const Eigen::VectorXd& x) const;

 private:
  const Eigen::VectorXd& y_;
  const SamplingMask1D& mask_;
  const Dictionary& dict_;
  const SolverConfig1D& cfg_;
  CsimParams weights_;
  WoodburyGammas gammas_;
  double lambda_;
  Eigen::VectorXd data_term_;  // 2 H^T W y
};

Eigen::VectorXd x_update(const SolverState1D& state, const SamplingMask1D& mask,
                         const Eigen::VectorXd& y, const Dictionary& d,
                         const SolverConfig1D& cfg);

Eigen::VectorXd s_update(const SolverState1D& state, const Dictionary& d,
                         const SolverConfig1D& cfg);

struct PatchResult {
  Eigen::VectorXd x_hat;
  RecoveryReport report;
};

// ADMM recovery of one masked patch. y holds the m observed values in mask
// order. Throws UnrecoverableInputError when nothing is observed.
PatchResult recover_patch(const Eigen::VectorXd& y, const SamplingMask1D& mask,
                          const Dictionary& d, const SolverConfig1D& cfg);

}  // namespace csimrec

#include "csimrec/transforms.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "csimrec/errors.hpp"
#include "csimrec/rng.hpp"

namespace csimrec {

namespace {

constexpr double kColumnNormTol = 1e-12;
constexpr double kPowerTol = 1e-8;
constexpr int kPowerMaxIter = 1000;
constexpr std::uint64_t kPowerSeed = 0x5eed5eedULL;

double power_iteration(const Eigen::MatrixXd& gram) {
  const Eigen::Index n = gram.rows();
  Rng rng(kPowerSeed);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = 0.5 + rng.uniform01();
  v.normalize();

  double estimate = v.dot(gram * v);
  for (int it = 0; it < kPowerMaxIter; ++it) {
    Eigen::VectorXd w = gram * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    const double next = v.dot(gram * v);
    const bool done = std::abs(next - estimate) <= kPowerTol * std::abs(next);
    estimate = next;
    if (done) break;
  }
  return estimate;
}

}  // namespace

Dictionary::Dictionary(Eigen::MatrixXd atoms) : atoms_(std::move(atoms)) {
  if (atoms_.size() == 0) throw ParameterError("Dictionary: empty atom matrix");
  if (atoms_.cols() < atoms_.rows()) {
    throw ParameterError("Dictionary: need at least as many atoms as rows");
  }
  for (Eigen::Index k = 0; k < atoms_.cols(); ++k) {
    const double norm = atoms_.col(k).norm();
    if (std::abs(norm - 1.0) > kColumnNormTol) {
      throw ParameterError("Dictionary: atom " + std::to_string(k) +
                           " is not unit norm");
    }
  }
  lambda_ = operator_norm_sq(atoms_);
}

Dictionary build_overcomplete_dct(int n, int m_atoms, bool mean_removal) {
  if (n < 1) throw ParameterError("build_overcomplete_dct: n must be >= 1");
  if (m_atoms < n) {
    throw ParameterError("build_overcomplete_dct: m_atoms must be >= n");
  }
  Eigen::MatrixXd atoms(n, m_atoms);
  for (int k = 0; k < m_atoms; ++k) {
    for (int i = 0; i < n; ++i) {
      atoms(i, k) = std::cos(std::numbers::pi * k * (2.0 * i + 1.0) /
                             (2.0 * m_atoms));
    }
    if (mean_removal && k > 0) {
      atoms.col(k).array() -= atoms.col(k).mean();
    }
    const double norm = atoms.col(k).norm();
    if (norm < 1e-8) {
      throw ParameterError("build_overcomplete_dct: degenerate atom " +
                           std::to_string(k));
    }
    atoms.col(k) /= norm;
  }
  return Dictionary(std::move(atoms));
}

double operator_norm_sq(const Eigen::MatrixXd& d) {
  if (d.size() == 0) throw ParameterError("operator_norm_sq: empty matrix");
  if (d.rows() <= d.cols()) {
    return power_iteration(d * d.transpose());
  }
  return power_iteration(d.transpose() * d);
}

double operator_norm_sq(const Dictionary& d) {
  return operator_norm_sq(d.atoms());
}

Eigen::MatrixXd dct_matrix(int n) {
  if (n < 1) throw ParameterError("dct_matrix: n must be >= 1");
  Eigen::MatrixXd c(n, n);
  const double dc = std::sqrt(1.0 / n);
  const double ac = std::sqrt(2.0 / n);
  for (int k = 0; k < n; ++k) {
    const double scale = k == 0 ? dc : ac;
    for (int i = 0; i < n; ++i) {
      c(k, i) = scale * std::cos(std::numbers::pi * k * (2.0 * i + 1.0) / (2.0 * n));
    }
  }
  return c;
}

Dct2d::Dct2d(int rows, int cols)
    : row_basis_(dct_matrix(rows)), col_basis_(dct_matrix(cols)) {}

Eigen::MatrixXd Dct2d::forward(const Eigen::MatrixXd& image) const {
  if (image.rows() != row_basis_.rows() || image.cols() != col_basis_.rows()) {
    throw ShapeError("Dct2d::forward: image size does not match the plan");
  }
  const Eigen::MatrixXd tmp = row_basis_ * image;
  return tmp * col_basis_.transpose();
}

Eigen::MatrixXd Dct2d::inverse(const Eigen::MatrixXd& coeffs) const {
  if (coeffs.rows() != row_basis_.rows() || coeffs.cols() != col_basis_.rows()) {
    throw ShapeError("Dct2d::inverse: coefficient size does not match the plan");
  }
  const Eigen::MatrixXd tmp = row_basis_.transpose() * coeffs;
  return tmp * col_basis_;
}

Eigen::MatrixXd dct2d(const Eigen::MatrixXd& image) {
  return Dct2d(static_cast<int>(image.rows()), static_cast<int>(image.cols()))
      .forward(image);
}

Eigen::MatrixXd idct2d(const Eigen::MatrixXd& coeffs) {
  return Dct2d(static_cast<int>(coeffs.rows()), static_cast<int>(coeffs.cols()))
      .inverse(coeffs);
}

}  // namespace csimrec

#pragma once

#include <Eigen/Core>

namespace csimrec {

// Synthesis dictionary: an n x m_atoms matrix with unit-norm columns and its
// cached squared spectral norm. Immutable after construction.
class Dictionary {
 public:
  // Takes ownership of the atom matrix. Throws ParameterError if any column
  // is not unit norm (1e-12) or the matrix has fewer columns than rows.
  explicit Dictionary(Eigen::MatrixXd atoms);

  const Eigen::MatrixXd& atoms() const { return atoms_; }
  int n() const { return static_cast<int>(atoms_.rows()); }
  int m_atoms() const { return static_cast<int>(atoms_.cols()); }
  double lambda() const { return lambda_; }

 private:
  Eigen::MatrixXd atoms_;
  double lambda_;
};

// Atom k is cos(pi*k*(2i+1)/(2M)), i = 0..n-1. With mean_removal, atoms
// k >= 1 are centred before normalisation. Throws ParameterError if
// m_atoms < n.
Dictionary build_overcomplete_dct(int n, int m_atoms, bool mean_removal = true);

// Largest eigenvalue of D^T D by power iteration on the smaller Gram matrix.
// Deterministic start vector, relative tolerance 1e-8, at most 1000 steps.
double operator_norm_sq(const Eigen::MatrixXd& d);
double operator_norm_sq(const Dictionary& d);

// Orthonormal DCT-II matrix C, so that C*x is the transform of x and C^T
// inverts it.
Eigen::MatrixXd dct_matrix(int n);

// Separable orthonormal 2D DCT for a fixed image size; the basis matrices
// are built once and reused.
class Dct2d {
 public:
  Dct2d(int rows, int cols);

  int rows() const { return static_cast<int>(row_basis_.rows()); }
  int cols() const { return static_cast<int>(col_basis_.rows()); }

  Eigen::MatrixXd forward(const Eigen::MatrixXd& image) const;
  Eigen::MatrixXd inverse(const Eigen::MatrixXd& coeffs) const;

 private:
  Eigen::MatrixXd row_basis_;
  Eigen::MatrixXd col_basis_;
};

Eigen::MatrixXd dct2d(const Eigen::MatrixXd& image);
Eigen::MatrixXd idct2d(const Eigen::MatrixXd& coeffs);

}  // namespace csimrec

#include <gtest/gtest.h>

#include <cmath>

#include "csimrec/errors.hpp"
#include "csimrec/transforms.hpp"
#include "oracles.hpp"

namespace csimrec {
namespace {

TEST(OvercompleteDct, PatchDictionaryHasUnitAtoms) {
  const Dictionary d = build_overcomplete_dct(64, 128);
  ASSERT_EQ(d.n(), 64);
  ASSERT_EQ(d.m_atoms(), 128);
  for (int k = 0; k < d.m_atoms(); ++k) {
    EXPECT_NEAR(d.atoms().col(k).norm(), 1.0, 1e-12) << "atom " << k;
  }
  EXPECT_GE(d.lambda(), 1.0);
}

TEST(OvercompleteDct, FirstAtomIsConstant) {
  const Dictionary d = build_overcomplete_dct(64, 128);
  for (int i = 0; i < 64; ++i) EXPECT_NEAR(d.atoms()(i, 0), 1.0 / 8.0, 1e-15);
}

TEST(OvercompleteDct, HigherAtomsAreCentred) {
  const Dictionary d = build_overcomplete_dct(64, 128);
  for (int k = 1; k < d.m_atoms(); ++k) EXPECT_NEAR(d.atoms().col(k).sum(), 0.0, 1e-12);
}

TEST(OvercompleteDct, SquareCaseIsOrthonormalBasis) {
  const Dictionary d = build_overcomplete_dct(64, 64, false);
  const Eigen::MatrixXd gram = d.atoms().transpose() * d.atoms();
  EXPECT_LE((gram - Eigen::MatrixXd::Identity(64, 64)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(d.lambda(), 1.0, 1e-8);
}

TEST(OvercompleteDct, RejectsTooFewAtoms) {
  EXPECT_THROW(build_overcomplete_dct(64, 32), ParameterError);
}

TEST(Dictionary, RejectsNonUnitColumns) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(3, 4);
  a(0, 3) = 0.5;
  EXPECT_THROW(Dictionary{a}, ParameterError);
}

TEST(OperatorNorm, StackedIdentitiesGiveTwo) {
  Eigen::MatrixXd d(8, 16);
  d << Eigen::MatrixXd::Identity(8, 8), Eigen::MatrixXd::Identity(8, 8);
  EXPECT_NEAR(operator_norm_sq(d), 2.0, 1e-10);
}

TEST(OperatorNorm, MatchesDenseEigensolver) {
  const Dictionary d = build_overcomplete_dct(64, 128);
  EXPECT_NEAR(operator_norm_sq(d), oracle::dense_norm_sq(d.atoms()), 1e-6);
  EXPECT_NEAR(d.lambda(), oracle::dense_norm_sq(d.atoms()), 1e-6);
  for (int m : {64, 80, 96, 200}) {
    const Dictionary e = build_overcomplete_dct(32, m);
    EXPECT_NEAR(e.lambda(), oracle::dense_norm_sq(e.atoms()), 1e-6) << m;
  }
}

TEST(OperatorNorm, TallMatrixUsesColumnGram) {
  Rng rng(1);
  const Eigen::MatrixXd d = oracle::random_matrix(rng, 30, 10);
  EXPECT_NEAR(operator_norm_sq(d), oracle::dense_norm_sq(d),
              1e-6 * oracle::dense_norm_sq(d));
}

TEST(Dct2d, ConstantImageIsDcOnly) {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Constant(6, 10, 3.0);
  const Eigen::MatrixXd s = dct2d(x);
  EXPECT_NEAR(s(0, 0), 3.0 * std::sqrt(60.0), 1e-12);
  Eigen::MatrixXd rest = s;
  rest(0, 0) = 0.0;
  EXPECT_LE(rest.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Dct2d, RoundTripAndParseval) {
  Rng rng(2);
  for (auto [r, c] : {std::pair{16, 16}, std::pair{7, 12}, std::pair{1, 5}}) {
    const Eigen::MatrixXd x = oracle::random_matrix(rng, r, c, 50.0);
    const Eigen::MatrixXd s = dct2d(x);
    EXPECT_LE((idct2d(s) - x).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_NEAR(s.norm(), x.norm(), 1e-10 * x.norm());
  }
}

TEST(Dct2d, Linearity) {
  Rng rng(3);
  const Dct2d t(9, 14);
  const Eigen::MatrixXd x = oracle::random_matrix(rng, 9, 14);
  const Eigen::MatrixXd y = oracle::random_matrix(rng, 9, 14);
  const double a = 2.5;
  const double b = -0.75;
  EXPECT_LE((t.forward(a * x + b * y) - (a * t.forward(x) + b * t.forward(y)))
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
  EXPECT_LE((t.inverse(a * x + b * y) - (a * t.inverse(x) + b * t.inverse(y)))
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
}

TEST(Dct2d, MatchesSeparableCosineSum) {
  Rng rng(4);
  const int rows = 5;
  const int cols = 4;
  const Eigen::MatrixXd x = oracle::random_matrix(rng, rows, cols);
  const Eigen::MatrixXd s = dct2d(x);
  for (int u = 0; u < rows; ++u) {
    for (int v = 0; v < cols; ++v) {
      double acc = 0.0;
      for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
          acc += x(i, j) * std::cos(M_PI * u * (2 * i + 1) / (2.0 * rows)) *
                 std::cos(M_PI * v * (2 * j + 1) / (2.0 * cols));
        }
      }
      const double au = u == 0 ? std::sqrt(1.0 / rows) : std::sqrt(2.0 / rows);
      const double av = v == 0 ? std::sqrt(1.0 / cols) : std::sqrt(2.0 / cols);
      EXPECT_NEAR(s(u, v), au * av * acc, 1e-12);
    }
  }
}

TEST(Dct2d, ShapeMismatchRejected) {
  const Dct2d t(4, 4);
  EXPECT_THROW(t.forward(Eigen::MatrixXd::Zero(4, 5)), ShapeError);
}

}  // namespace
}  // namespace csimrec

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cone_lpv/errors.hpp"
#include "cone_lpv/linalg.hpp"
#include "test_support.hpp"

using namespace cone_lpv;
using namespace cone_lpv::testing_support;

namespace {

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double d = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) d = std::max(d, std::abs(a(r, c) - b(r, c)));
  return d;
}

Matrix reconstruct(const SymEigen& e) {
  const std::size_t n = e.values.size();
  Matrix d(n, n);
  for (std::size_t k = 0; k < n; ++k) d(k, k) = e.values[k];
  return e.vectors * d * e.vectors.transpose();
}

}  // namespace

TEST(SymMatrix, ConstructionSymmetrizes) {
  const SymMatrix s(Matrix::from_rows({{1.0, 2.0}, {4.0, 3.0}}));
  EXPECT_EQ(s(0, 1), 3.0);
  EXPECT_EQ(s(1, 0), s(0, 1));
}

TEST(SymMatrix, RejectsNonSquareAndNonFinite) {
  EXPECT_THROW(SymMatrix(Matrix(2, 3)), ContractError);
  EXPECT_THROW(SymMatrix(Matrix::from_rows({{NAN}})), ContractError);
}

TEST(EigSym, DiagonalInput) {
  const SymEigen e = eig_sym(SymMatrix::from_rows({{2.0, 0.0}, {0.0, 3.0}}));
  EXPECT_DOUBLE_EQ(e.values[0], 2.0);
  EXPECT_DOUBLE_EQ(e.values[1], 3.0);
  EXPECT_NEAR(std::abs(e.vectors(0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(e.vectors(1, 1)), 1.0, 1e-15);
}

TEST(EigSym, ExchangeMatrix) {
  const SymEigen e = eig_sym(SymMatrix::from_rows({{0.0, 1.0}, {1.0, 0.0}}));
  EXPECT_NEAR(e.values[0], -1.0, 1e-14);
  EXPECT_NEAR(e.values[1], 1.0, 1e-14);
}

TEST(EigSym, GramOfUnscaledVertexMatchesQuadraticFormula) {
  const Matrix a = Matrix::from_rows({{0.80, 0.65}, {-0.34, 0.90}});
  const SymMatrix g(a.transpose() * a);
  const double t = g.trace();
  const double d = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
  const double root = std::sqrt(t * t / 4.0 - d);
  const SymEigen e = eig_sym(g);
  EXPECT_NEAR(e.values[0], t / 2.0 - root, 1e-13);
  EXPECT_NEAR(e.values[1], t / 2.0 + root, 1e-13);
  EXPECT_NEAR(e.values[0], 0.6737, 5e-5);
  EXPECT_NEAR(e.values[1], 1.3144, 5e-5);
}

TEST(EigSym, RandomReconstructionAndOrthogonality) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 9;
    const SymMatrix m = random_sym(rng, n);
    const SymEigen e = eig_sym(m);
    for (std::size_t k = 1; k < n; ++k) EXPECT_LE(e.values[k - 1], e.values[k]);
    const double scale = 1.0 + m.frobenius_norm();
    EXPECT_LE((reconstruct(e) - m.matrix()).frobenius_norm(), 1e-10 * scale);
    EXPECT_LE((e.vectors.transpose() * e.vectors - Matrix::identity(n)).frobenius_norm(), 1e-10);
  }
}

TEST(ProjectPsd, ClipsNegativeEigenvalue) {
  const SymMatrix p = project_psd(SymMatrix::from_rows({{1.0, 0.0}, {0.0, -1.0}}));
  EXPECT_NEAR(p(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(p(1, 1), 0.0, 1e-15);
  EXPECT_NEAR(p(0, 1), 0.0, 1e-15);
}

TEST(ProjectPsd, ExchangeMatrix) {
  const SymMatrix p = project_psd(SymMatrix::from_rows({{0.0, 1.0}, {1.0, 0.0}}));
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 2; ++c) EXPECT_NEAR(p(r, c), 0.5, 1e-14);
}

TEST(ProjectPsd, LeavesFeasibleInputUnchanged) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const SymMatrix m = random_psd(rng, 4) + 0.3 * SymMatrix::identity(4);
    EXPECT_LE(max_abs_diff(project_psd(m, 0.25).matrix(), m.matrix()), 1e-12);
  }
}

TEST(ProjectPsd, FloorIsRespected) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const SymMatrix p = project_psd(random_sym(rng, 5), 0.1);
    EXPECT_GE(min_eigenvalue(p), 0.1 - 1e-12);
  }
}

TEST(ProjectPsd, IdempotentAndNearest) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + trial % 4;
    const SymMatrix m = 3.0 * random_sym(rng, n);
    const SymMatrix p = project_psd(m);
    EXPECT_LE(max_abs_diff(project_psd(p).matrix(), p.matrix()), 1e-12);
    const double dist = (m - p).frobenius_norm();
    for (int k = 0; k < 100; ++k) {
      const SymMatrix x = random_psd(rng, n);
      EXPECT_LE(dist, (m - x).frobenius_norm() + 1e-12);
    }
  }
}

TEST(InnerProduct, Examples) {
  const BlockDiagSym x({SymMatrix::identity(2), SymMatrix::identity(2)});
  const BlockDiagSym y({SymMatrix::identity(2), 2.0 * SymMatrix::identity(2)});
  EXPECT_DOUBLE_EQ(inner_product(x, y), 6.0);
  const std::vector<std::size_t> dims{2, 2};
  EXPECT_DOUBLE_EQ(inner_product(x, BlockDiagSym::zero(dims)), 0.0);
  EXPECT_DOUBLE_EQ(inner_product(SymMatrix::from_rows({{1, 2}, {2, 3}}),
                                 SymMatrix::from_rows({{0, 1}, {1, 0}})),
                   4.0);
}

TEST(InnerProduct, ElementwiseOracle) {
  const SymMatrix a = SymMatrix::from_rows({{1, 2}, {2, 3}});
  const SymMatrix b = SymMatrix::from_rows({{0, 1}, {1, 0}});
  double oracle = 0.0;
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 2; ++c) oracle += a(r, c) * b(r, c);
  EXPECT_DOUBLE_EQ(inner_product(BlockDiagSym({a}), BlockDiagSym({b})), oracle);
}

TEST(InnerProduct, StructureMismatchThrows) {
  const BlockDiagSym x({SymMatrix::identity(2)});
  const BlockDiagSym y({SymMatrix::identity(3)});
  const BlockDiagSym z({SymMatrix::identity(2), SymMatrix::identity(2)});
  EXPECT_THROW(inner_product(x, y), ContractError);
  EXPECT_THROW(inner_product(x, z), ContractError);
}

TEST(InnerProduct, SymmetricAndBilinear) {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const BlockDiagSym x({random_sym(rng, 2), random_sym(rng, 3)});
    const BlockDiagSym y({random_sym(rng, 2), random_sym(rng, 3)});
    const BlockDiagSym z({random_sym(rng, 2), random_sym(rng, 3)});
    const double a = u(rng), b = u(rng);
    const double scale = 1.0 + x.frobenius_norm() * (y.frobenius_norm() + z.frobenius_norm());
    EXPECT_NEAR(inner_product(x, y), inner_product(y, x), 1e-12 * scale);
    EXPECT_NEAR(inner_product(x, a * y + b * z), a * inner_product(x, y) + b * inner_product(x, z),
                1e-12 * scale * (1.0 + std::abs(a) + std::abs(b)));
  }
}

TEST(Svec, IsometryAndRoundTrip) {
  std::mt19937_64 rng(16);
  for (std::size_t n = 1; n <= 6; ++n) {
    const SymMatrix x = random_sym(rng, n), y = random_sym(rng, n);
    std::vector<double> vx(svec_size(n)), vy(svec_size(n));
    svec(x, vx);
    svec(y, vy);
    double d = 0.0;
    for (std::size_t k = 0; k < vx.size(); ++k) d += vx[k] * vy[k];
    EXPECT_NEAR(d, inner_product(x, y), 1e-13);
    EXPECT_LE(max_abs_diff(smat(vx, n).matrix(), x.matrix()), 1e-15);
  }
}

TEST(EigGeneral, MatchesQuadraticFormulaOn2x2) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix a = random_matrix(rng, 2, 2, -2.0, 2.0);
    double r = 0.0;
    for (auto z : eig_general(a)) r = std::max(r, std::abs(z));
    EXPECT_NEAR(r, radius_2x2(a), 1e-12 * (1.0 + r));
  }
}

TEST(EigGeneral, RotationAndTriangular) {
  const auto rot = eig_general(Matrix::from_rows({{0.0, 1.0}, {-1.0, 0.0}}));
  ASSERT_EQ(rot.size(), 2u);
  for (auto z : rot) {
    EXPECT_NEAR(z.real(), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(z.imag()), 1.0, 1e-14);
  }
  const auto tri = eig_general(Matrix::from_rows({{2.0, 5.0, 1.0}, {0.0, -3.0, 4.0}, {0.0, 0.0, 0.5}}));
  std::vector<double> re;
  for (auto z : tri) re.push_back(z.real());
  std::sort(re.begin(), re.end());
  EXPECT_NEAR(re[0], -3.0, 1e-12);
  EXPECT_NEAR(re[1], 0.5, 1e-12);
  EXPECT_NEAR(re[2], 2.0, 1e-12);
}

TEST(SpectralNorm, MatchesGramEigenvalue) {
  std::mt19937_64 rng(18);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix a = random_matrix(rng, 3, 3);
    const SymEigen e = eig_sym(SymMatrix(a.transpose() * a));
    EXPECT_NEAR(spectral_norm(a), std::sqrt(e.values.back()), 1e-12);
  }
}

TEST(PinvSym, InvertsOnRange) {
  const SymMatrix m = SymMatrix::from_rows({{2.0, 0.0, 0.0}, {0.0, 4.0, 0.0}, {0.0, 0.0, 0.0}});
  const SymMatrix p = pinv_sym(m);
  EXPECT_NEAR(p(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(p(1, 1), 0.25, 1e-15);
  EXPECT_NEAR(p(2, 2), 0.0, 1e-15);
}

#pragma once

// Dense real linear algebra for small matrices: general and symmetric
// matrix types, a cyclic Jacobi eigensolver, a Hessenberg-QR eigenvalue
// routine for non-symmetric matrices, projection onto the shifted PSD cone
// and the block trace inner product.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace cone_lpv {

/// Row-major dense matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  static Matrix identity(std::size_t n);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  Matrix transpose() const;
  double frobenius_norm() const;
  bool all_finite() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);

/// Symmetric matrix. Construction from a general square matrix stores
/// (M + M^T)/2, so entries(r, c) == entries(c, r) holds bit for bit.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& m);

  static SymMatrix zero(std::size_t n);
  static SymMatrix identity(std::size_t n);
  static SymMatrix diagonal(std::span<const double> d);
  static SymMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t dim() const { return m_.rows(); }
  double operator()(std::size_t r, std::size_t c) const { return m_(r, c); }
  const Matrix& matrix() const { return m_; }
  std::span<const double> data() const { return m_.data(); }

  double trace() const;
  double frobenius_norm() const { return m_.frobenius_norm(); }

  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  Matrix m_;
};

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator*(double s, const SymMatrix& a);

/// L * X * L^T.
SymMatrix congruence(const Matrix& left, const SymMatrix& x);
/// Symmetric part of an arbitrary square matrix.
SymMatrix sym_part(const Matrix& m);

/// Ordered list of symmetric blocks, possibly of different sizes.
class BlockDiagSym {
 public:
  BlockDiagSym() = default;
  explicit BlockDiagSym(std::vector<SymMatrix> blocks) : blocks_(std::move(blocks)) {}

  static BlockDiagSym zero(std::span<const std::size_t> dims);

  std::size_t size() const { return blocks_.size(); }
  const SymMatrix& operator[](std::size_t k) const { return blocks_[k]; }
  const std::vector<SymMatrix>& blocks() const { return blocks_; }
  std::vector<std::size_t> dims() const;

  double frobenius_norm() const;

  friend bool operator==(const BlockDiagSym&, const BlockDiagSym&) = default;

 private:
  std::vector<SymMatrix> blocks_;
};

BlockDiagSym operator+(const BlockDiagSym& a, const BlockDiagSym& b);
BlockDiagSym operator-(const BlockDiagSym& a, const BlockDiagSym& b);
BlockDiagSym operator*(double s, const BlockDiagSym& a);

struct SymEigen {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column k pairs with values[k]
};

/// Cyclic Jacobi eigendecomposition. Throws NumericalFailure if the sweep
/// cap is hit before the off-diagonal mass vanishes.
SymEigen eig_sym(const SymMatrix& m);

double min_eigenvalue(const SymMatrix& m);

/// Frobenius-nearest point of {X : X >= floor * I}.
SymMatrix project_psd(const SymMatrix& m, double floor = 0.0);

/// Moore-Penrose pseudo-inverse of a symmetric matrix; eigenvalues with
/// |lambda| <= rel_tol * max|lambda| are treated as zero.
SymMatrix pinv_sym(const SymMatrix& m, double rel_tol = 1e-12);

/// sum_k Tr(X_k Y_k). Throws ContractError if the block structures differ.
double inner_product(const BlockDiagSym& x, const BlockDiagSym& y);
double inner_product(const SymMatrix& x, const SymMatrix& y);

/// Eigenvalues of a general real square matrix (balancing, Hessenberg
/// reduction and shifted QR). Order is unspecified.
std::vector<std::complex<double>> eig_general(const Matrix& a);

/// Largest singular value.
double spectral_norm(const Matrix& a);

// Half-vectorization with sqrt(2)-scaled off-diagonals, so that
// dot(svec(X), svec(Y)) == Tr(XY). Packing order is row-major upper
// triangle.
std::size_t svec_size(std::size_t n);
void svec(const SymMatrix& m, std::span<double> out);
SymMatrix smat(std::span<const double> v, std::size_t n);

}  // namespace cone_lpv

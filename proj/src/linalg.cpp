#include "cone_lpv/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "cone_lpv/errors.hpp"
#include "cone_lpv/kernels.hpp"

namespace cone_lpv {

namespace {

constexpr int kMaxJacobiSweeps = 100;
constexpr int kMaxQrIterations = 60;

void require(bool ok, const std::string& what) {
  if (!ok) throw ContractError(what);
}

}  // namespace

// ---------------------------------------------------------------- Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  std::vector<std::vector<double>> v;
  for (const auto& r : rows) v.emplace_back(r);
  return from_rows(v);
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  const std::size_t cols = rows.front().size();
  Matrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    require(rows[r].size() == cols, "Matrix::from_rows: ragged rows");
    std::copy(rows[r].begin(), rows[r].end(), m.data_.begin() + static_cast<std::ptrdiff_t>(r * cols));
  }
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

double Matrix::frobenius_norm() const { return std::sqrt(kernels::dot(data_, data_)); }

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require(rows_ == other.rows_ && cols_ == other.cols_, "Matrix +=: shape mismatch");
  kernels::axpy(1.0, other.data_, data_);
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require(rows_ == other.rows_ && cols_ == other.cols_, "Matrix -=: shape mismatch");
  kernels::axpy(-1.0, other.data_, data_);
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& x : data_) x *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), "Matrix *: inner dimension mismatch");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

// ------------------------------------------------------------- SymMatrix

SymMatrix::SymMatrix(const Matrix& m) : m_(m.rows(), m.cols()) {
  require(m.is_square(), "SymMatrix: matrix is not square");
  require(m.all_finite(), "SymMatrix: non-finite entry");
  const std::size_t n = m.rows();
  for (std::size_t r = 0; r < n; ++r) {
    m_(r, r) = m(r, r);
    for (std::size_t c = r + 1; c < n; ++c) {
      const double v = 0.5 * (m(r, c) + m(c, r));
      m_(r, c) = v;
      m_(c, r) = v;
    }
  }
}

SymMatrix SymMatrix::zero(std::size_t n) { return SymMatrix(Matrix(n, n)); }
SymMatrix SymMatrix::identity(std::size_t n) { return SymMatrix(Matrix::identity(n)); }

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return SymMatrix(m);
}

SymMatrix SymMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  return SymMatrix(Matrix::from_rows(rows));
}

double SymMatrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) t += m_(i, i);
  return t;
}

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
  return SymMatrix(a.matrix() + b.matrix());
}
SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
  return SymMatrix(a.matrix() - b.matrix());
}
SymMatrix operator*(double s, const SymMatrix& a) { return SymMatrix(s * a.matrix()); }

SymMatrix congruence(const Matrix& left, const SymMatrix& x) {
  return SymMatrix(left * x.matrix() * left.transpose());
}

SymMatrix sym_part(const Matrix& m) { return SymMatrix(m); }

// ---------------------------------------------------------- BlockDiagSym

BlockDiagSym BlockDiagSym::zero(std::span<const std::size_t> dims) {
  std::vector<SymMatrix> blocks;
  blocks.reserve(dims.size());
  for (std::size_t d : dims) blocks.push_back(SymMatrix::zero(d));
  return BlockDiagSym(std::move(blocks));
}

std::vector<std::size_t> BlockDiagSym::dims() const {
  std::vector<std::size_t> d;
  d.reserve(blocks_.size());
  for (const auto& b : blocks_) d.push_back(b.dim());
  return d;
}

double BlockDiagSym::frobenius_norm() const { return std::sqrt(inner_product(*this, *this)); }

namespace {

void require_conformant(const BlockDiagSym& a, const BlockDiagSym& b, const char* what) {
  require(a.dims() == b.dims(), std::string(what) + ": block structure mismatch");
}

}  // namespace

BlockDiagSym operator+(const BlockDiagSym& a, const BlockDiagSym& b) {
  require_conformant(a, b, "BlockDiagSym +");
  std::vector<SymMatrix> out;
  for (std::size_t k = 0; k < a.size(); ++k) out.push_back(a[k] + b[k]);
  return BlockDiagSym(std::move(out));
}

BlockDiagSym operator-(const BlockDiagSym& a, const BlockDiagSym& b) {
  require_conformant(a, b, "BlockDiagSym -");
  std::vector<SymMatrix> out;
  for (std::size_t k = 0; k < a.size(); ++k) out.push_back(a[k] - b[k]);
  return BlockDiagSym(std::move(out));
}

BlockDiagSym operator*(double s, const BlockDiagSym& a) {
  std::vector<SymMatrix> out;
  for (const auto& blk : a.blocks()) out.push_back(s * blk);
  return BlockDiagSym(std::move(out));
}

double inner_product(const SymMatrix& x, const SymMatrix& y) {
  require(x.dim() == y.dim(), "inner_product: dimension mismatch");
  return kernels::dot(x.data(), y.data());
}

double inner_product(const BlockDiagSym& x, const BlockDiagSym& y) {
  require_conformant(x, y, "inner_product");
  double acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) acc += inner_product(x[k], y[k]);
  return acc;
}

// ------------------------------------------------------- eigen routines

SymEigen eig_sym(const SymMatrix& m) {
  const std::size_t n = m.dim();
  Matrix a = m.matrix();
  Matrix v = Matrix::identity(n);
  const double scale = a.frobenius_norm();
  const double eps = std::numeric_limits<double>::epsilon();

  bool converged = (n <= 1) || scale == 0.0;
  for (int sweep = 0; sweep < kMaxJacobiSweeps && !converged; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(2.0 * off) <= eps * scale) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        if (sweep > 3 && std::abs(apq) * 1e2 + std::abs(app) == std::abs(app) &&
            std::abs(apq) * 1e2 + std::abs(aqq) == std::abs(aqq)) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = std::abs(tau) > 1e150
                             ? 0.5 / tau
                             : std::copysign(1.0, tau) / (std::abs(tau) + std::hypot(1.0, tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (!converged) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(2.0 * off) > 1e3 * eps * scale)
      throw NumericalFailure("eig_sym: Jacobi iteration did not converge (dim " +
                             std::to_string(n) + ")");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  SymEigen out{std::vector<double>(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

double min_eigenvalue(const SymMatrix& m) {
  if (m.dim() == 0) return std::numeric_limits<double>::infinity();
  return eig_sym(m).values.front();
}

namespace {

SymMatrix reassemble(const SymEigen& e, const std::vector<double>& lambda) {
  const std::size_t n = lambda.size();
  Matrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    if (lambda[k] == 0.0) continue;
    for (std::size_t r = 0; r < n; ++r) {
      const double vr = lambda[k] * e.vectors(r, k);
      for (std::size_t c = 0; c < n; ++c) out(r, c) += vr * e.vectors(c, k);
    }
  }
  return SymMatrix(out);
}

}  // namespace

SymMatrix project_psd(const SymMatrix& m, double floor) {
  if (m.dim() == 0) return m;
  const SymEigen e = eig_sym(m);
  if (e.values.front() >= floor) return m;
  std::vector<double> clipped(e.values);
  for (double& l : clipped) l = std::max(l, floor);
  return reassemble(e, clipped);
}

SymMatrix pinv_sym(const SymMatrix& m, double rel_tol) {
  if (m.dim() == 0) return m;
  const SymEigen e = eig_sym(m);
  double max_abs = 0.0;
  for (double l : e.values) max_abs = std::max(max_abs, std::abs(l));
  std::vector<double> inv(e.values.size(), 0.0);
  for (std::size_t k = 0; k < inv.size(); ++k)
    if (std::abs(e.values[k]) > rel_tol * max_abs) inv[k] = 1.0 / e.values[k];
  return reassemble(e, inv);
}

namespace {

void balance(Matrix& a) {
  constexpr double radix = 2.0;
  const double sqrdx = radix * radix;
  const std::size_t n = a.rows();
  bool done = false;
  while (!done) {
    done = true;
    for (std::size_t i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) {
          c += std::abs(a(j, i));
          r += std::abs(a(i, j));
        }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        g = 1.0 / f;
        for (std::size_t j = 0; j < n; ++j) a(i, j) *= g;
        for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
}

// Reduction to upper Hessenberg form by stabilized elementary similarity
// transformations.
void to_hessenberg(Matrix& a) {
  const std::size_t n = a.rows();
  for (std::size_t m = 1; m + 1 < n; ++m) {
    double x = 0.0;
    std::size_t piv = m;
    for (std::size_t j = m; j < n; ++j)
      if (std::abs(a(j, m - 1)) > std::abs(x)) {
        x = a(j, m - 1);
        piv = j;
      }
    if (piv != m) {
      for (std::size_t j = m - 1; j < n; ++j) std::swap(a(piv, j), a(m, j));
      for (std::size_t j = 0; j < n; ++j) std::swap(a(j, piv), a(j, m));
    }
    if (x == 0.0) continue;
    for (std::size_t i = m + 1; i < n; ++i) {
      double y = a(i, m - 1);
      if (y == 0.0) continue;
      y /= x;
      a(i, m - 1) = y;
      for (std::size_t j = m; j < n; ++j) a(i, j) -= y * a(m, j);
      for (std::size_t j = 0; j < n; ++j) a(j, m) += y * a(j, i);
    }
  }
  for (std::size_t i = 2; i < n; ++i)
    for (std::size_t j = 0; j + 1 < i; ++j) a(i, j) = 0.0;
}

// Francis double-shift QR on an upper Hessenberg matrix (destroys a).
std::vector<std::complex<double>> hessenberg_qr(Matrix& a) {
  const int n = static_cast<int>(a.rows());
  const double eps = std::numeric_limits<double>::epsilon();
  std::vector<std::complex<double>> w(static_cast<std::size_t>(n));
  auto A = [&a](int r, int c) -> double& {
    return a(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
  };
  auto sign = [](double x, double y) { return y >= 0.0 ? std::abs(x) : -std::abs(x); };

  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(A(i, j));

  int nn = n - 1;
  double t = 0.0;
  double p = 0, q = 0, r = 0, s = 0, x = 0, y = 0, z = 0, ww = 0;
  while (nn >= 0) {
    int its = 0;
    int l = 0;
    do {
      for (l = nn; l > 0; --l) {
        s = std::abs(A(l - 1, l - 1)) + std::abs(A(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(A(l, l - 1)) <= eps * s) {
          A(l, l - 1) = 0.0;
          break;
        }
      }
      x = A(nn, nn);
      if (l == nn) {
        w[static_cast<std::size_t>(nn--)] = x + t;
      } else {
        y = A(nn - 1, nn - 1);
        ww = A(nn, nn - 1) * A(nn - 1, nn);
        if (l == nn - 1) {
          p = 0.5 * (y - x);
          q = p * p + ww;
          z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign(z, p);
            w[static_cast<std::size_t>(nn - 1)] = w[static_cast<std::size_t>(nn)] = x + z;
            if (z != 0.0) w[static_cast<std::size_t>(nn)] = x - ww / z;
          } else {
            w[static_cast<std::size_t>(nn)] = {x + p, -z};
            w[static_cast<std::size_t>(nn - 1)] = {x + p, z};
          }
          nn -= 2;
        } else {
          if (its == kMaxQrIterations)
            throw NumericalFailure("eig_general: QR iteration did not converge");
          if (its == 10 || its == 20) {
            t += x;
            for (int i = 0; i <= nn; ++i) A(i, i) -= x;
            s = std::abs(A(nn, nn - 1)) + std::abs(A(nn - 1, nn - 2));
            y = x = 0.75 * s;
            ww = -0.4375 * s * s;
          }
          ++its;
          int m = nn - 2;
          for (; m >= l; --m) {
            z = A(m, m);
            r = x - z;
            s = y - z;
            p = (r * s - ww) / A(m + 1, m) + A(m, m + 1);
            q = A(m + 1, m + 1) - z - r - s;
            r = A(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(A(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v =
                std::abs(p) * (std::abs(A(m - 1, m - 1)) + std::abs(z) + std::abs(A(m + 1, m + 1)));
            if (u <= eps * v) break;
          }
          for (int i = m; i < nn - 1; ++i) {
            A(i + 2, i) = 0.0;
            if (i != m) A(i + 2, i - 1) = 0.0;
          }
          for (int k = m; k < nn; ++k) {
            if (k != m) {
              p = A(k, k - 1);
              q = A(k + 1, k - 1);
              r = 0.0;
              if (k + 1 != nn) r = A(k + 2, k - 1);
              if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            if ((s = sign(std::sqrt(p * p + q * q + r * r), p)) != 0.0) {
              if (k == m) {
                if (l != m) A(k, k - 1) = -A(k, k - 1);
              } else {
                A(k, k - 1) = -s * x;
              }
              p += s;
              x = p / s;
              y = q / s;
              z = r / s;
              q /= p;
              r /= p;
              for (int j = k; j <= nn; ++j) {
                p = A(k, j) + q * A(k + 1, j);
                if (k + 1 != nn) {
                  p += r * A(k + 2, j);
                  A(k + 2, j) -= p * z;
                }
                A(k + 1, j) -= p * y;
                A(k, j) -= p * x;
              }
              const int mmin = nn < k + 3 ? nn : k + 3;
              for (int i = l; i <= mmin; ++i) {
                p = x * A(i, k) + y * A(i, k + 1);
                if (k + 1 != nn) {
                  p += z * A(i, k + 2);
                  A(i, k + 2) -= p * r;
                }
                A(i, k + 1) -= p * q;
                A(i, k) -= p;
              }
            }
          }
        }
      }
    } while (l + 1 < nn);
  }
  return w;
}

}  // namespace

std::vector<std::complex<double>> eig_general(const Matrix& a) {
  require(a.is_square(), "eig_general: matrix is not square");
  require(a.all_finite(), "eig_general: non-finite entry");
  if (a.rows() == 0) return {};
  Matrix h = a;
  balance(h);
  to_hessenberg(h);
  return hessenberg_qr(h);
}

double spectral_norm(const Matrix& a) {
  if (a.empty()) return 0.0;
  const SymEigen e = eig_sym(SymMatrix(a.transpose() * a));
  return std::sqrt(std::max(0.0, e.values.back()));
}

// ------------------------------------------------------------ svec/smat

std::size_t svec_size(std::size_t n) { return n * (n + 1) / 2; }

void svec(const SymMatrix& m, std::span<double> out) {
  const std::size_t n = m.dim();
  require(out.size() == svec_size(n), "svec: output length mismatch");
  std::size_t k = 0;
  for (std::size_t r = 0; r < n; ++r) {
    out[k++] = m(r, r);
    for (std::size_t c = r + 1; c < n; ++c) out[k++] = M_SQRT2 * m(r, c);
  }
}

SymMatrix smat(std::span<const double> v, std::size_t n) {
  require(v.size() == svec_size(n), "smat: input length mismatch");
  Matrix m(n, n);
  std::size_t k = 0;
  for (std::size_t r = 0; r < n; ++r) {
    m(r, r) = v[k++];
    for (std::size_t c = r + 1; c < n; ++c) {
      const double x = v[k++] / M_SQRT2;
      m(r, c) = x;
      m(c, r) = x;
    }
  }
  return SymMatrix(m);
}

}  // namespace cone_lpv

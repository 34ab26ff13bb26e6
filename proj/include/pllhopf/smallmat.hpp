#pragma once

// Minimal dense linear algebra for the small systems of this library (n <= 12),
// plus the closed-form exponential of the 6x6 coupling generator used by the
// center-manifold solves.

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "pllhopf/errors.hpp"

namespace pllhopf {

inline constexpr int kMaxDim = 12;

// Fixed-capacity row-major matrix, dimensions set at runtime.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::array<double, kMaxDim * kMaxDim> a{};

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c) {
    if (r <= 0 || c <= 0 || r > kMaxDim || c > kMaxDim)
      throw DimensionMismatch("Mat: dimensions must be in [1, 12]");
  }

  double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Mat zero(int r, int c) { return Mat(r, c); }
};

inline Mat operator*(const Mat& x, const Mat& y) {
  if (x.cols != y.rows) throw DimensionMismatch("Mat product: inner dimensions differ");
  Mat z(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      double v = x(i, k);
      if (v == 0.0) continue;
      for (int j = 0; j < y.cols; ++j) z(i, j) += v * y(k, j);
    }
  return z;
}

inline Mat operator+(const Mat& x, const Mat& y) {
  if (x.rows != y.rows || x.cols != y.cols) throw DimensionMismatch("Mat sum: shapes differ");
  Mat z = x;
  for (int i = 0; i < x.rows * x.cols; ++i) z.a[i] += y.a[i];
  return z;
}

inline Mat operator-(const Mat& x, const Mat& y) {
  if (x.rows != y.rows || x.cols != y.cols) throw DimensionMismatch("Mat diff: shapes differ");
  Mat z = x;
  for (int i = 0; i < x.rows * x.cols; ++i) z.a[i] -= y.a[i];
  return z;
}

inline Mat operator*(double s, const Mat& x) {
  Mat z = x;
  for (int i = 0; i < x.rows * x.cols; ++i) z.a[i] *= s;
  return z;
}

inline std::vector<double> mat_vec(const Mat& m, const std::vector<double>& v) {
  if (static_cast<int>(v.size()) != m.cols) throw DimensionMismatch("mat_vec: length mismatch");
  std::vector<double> out(m.rows, 0.0);
  for (int i = 0; i < m.rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < m.cols; ++j) s += m(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

// Pair of complex components, kept as explicit real/imaginary 2-vectors where needed.
struct CVec2 {
  double re1 = 0.0, im1 = 0.0;
  double re2 = 0.0, im2 = 0.0;
};

// Gaussian elimination with partial pivoting.  Problem sizes here never exceed 12,
// so no factorization reuse.  A pivot is declared singular when it falls below
// 1e-13 of the largest entry initially present in its column.
inline std::vector<double> solve_linear(Mat A, std::vector<double> b) {
  if (A.rows != A.cols) throw DimensionMismatch("solve_linear: matrix not square");
  const int n = A.rows;
  if (static_cast<int>(b.size()) != n) throw DimensionMismatch("solve_linear: rhs length");

  std::array<double, kMaxDim> colscale{};
  for (int j = 0; j < n; ++j) {
    double m = 0.0;
    for (int i = 0; i < n; ++i) m = std::max(m, std::fabs(A(i, j)));
    colscale[j] = m;
  }

  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::fabs(A(i, k)) > std::fabs(A(piv, k))) piv = i;
    const double scale = colscale[k] > 0.0 ? colscale[k] : 1.0;
    if (std::fabs(A(piv, k)) < 1e-13 * scale)
      throw SingularMatrix("solve_linear: pivot below 1e-13 of initial column scale");
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(A(k, j), A(piv, j));
      std::swap(b[k], b[piv]);
    }
    const double inv = 1.0 / A(k, k);
    for (int i = k + 1; i < n; ++i) {
      const double m = A(i, k) * inv;
      if (m == 0.0) continue;
      for (int j = k; j < n; ++j) A(i, j) -= m * A(k, j);
      b[i] -= m * b[k];
    }
  }

  std::vector<double> x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= A(i, j) * x[j];
    x[i] = s / A(i, i);
  }
  return x;
}

// The 6x6 generator C = omega * [[0,-2I,0],[I,0,-I],[0,2I,0]] acting on stacked
// 2-vector blocks.  Its minimal polynomial is lambda (lambda^2 + 4 omega^2).
inline Mat c_matrix(double omega) {
  Mat C(6, 6);
  C(0, 2) = -2.0 * omega;
  C(1, 3) = -2.0 * omega;
  C(2, 0) = omega;
  C(3, 1) = omega;
  C(2, 4) = -omega;
  C(3, 5) = -omega;
  C(4, 2) = 2.0 * omega;
  C(5, 3) = 2.0 * omega;
  return C;
}

// exp(C theta) in closed form:
//   e^{C theta} = I + C sin(2 w theta)/(2 w) + C^2 (1 - cos(2 w theta))/(4 w^2)
// exact because C^3 = -4 w^2 C.
inline Mat exp_c(double omega, double theta) {
  if (!(omega > 0.0)) throw InvalidParams("exp_c: omega must be positive");
  const Mat C = c_matrix(omega);
  const Mat C2 = C * C;
  const double s = std::sin(2.0 * omega * theta) / (2.0 * omega);
  const double c = (1.0 - std::cos(2.0 * omega * theta)) / (4.0 * omega * omega);
  Mat E = Mat::identity(6);
  for (int i = 0; i < 36; ++i) E.a[i] += s * C.a[i] + c * C2.a[i];
  return E;
}

}  // namespace pllhopf

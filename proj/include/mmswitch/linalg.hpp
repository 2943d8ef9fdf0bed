#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace mmswitch {

// Dense row-major matrix. Everything here is sized by the number of hidden
// states (single digits in practice), so plain O(n^3) algorithms are fine.
class Mat {
 public:
  Mat() : rows_(0), cols_(0) {}
  Mat(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, fill) {}
  Mat(int rows, int cols, std::initializer_list<double> vals) : Mat(rows, cols) {
    assert(static_cast<size_t>(rows) * cols == vals.size());
    std::copy(vals.begin(), vals.end(), a_.begin());
  }

  static Mat identity(int n) {
    Mat I(n, n);
    for (int i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }
  double* data() { return a_.data(); }
  const double* data() const { return a_.data(); }
  const double* row(int i) const { return a_.data() + static_cast<size_t>(i) * cols_; }
  double* row(int i) { return a_.data() + static_cast<size_t>(i) * cols_; }
  bool empty() const { return a_.empty(); }

  Mat& operator+=(const Mat& o) {
    assert(rows_ == o.rows_ && cols_ == o.cols_);
    for (size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
  }
  Mat& operator-=(const Mat& o) {
    assert(rows_ == o.rows_ && cols_ == o.cols_);
    for (size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
  }
  Mat& operator*=(double s) {
    for (double& v : a_) v *= s;
    return *this;
  }

 private:
  int rows_, cols_;
  std::vector<double> a_;
};

inline Mat operator+(Mat a, const Mat& b) { return a += b; }
inline Mat operator-(Mat a, const Mat& b) { return a -= b; }
inline Mat operator*(Mat a, double s) { return a *= s; }
inline Mat operator*(double s, Mat a) { return a *= s; }

inline Mat operator*(const Mat& a, const Mat& b) {
  assert(a.cols() == b.rows());
  Mat c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* brow = b.row(k);
      double* crow = c.row(i);
      for (int j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

// out = v * M for a row vector v of length M.rows().
inline void vec_mat(const double* v, const Mat& M, double* out) {
  const int r = M.rows(), c = M.cols();
  for (int j = 0; j < c; ++j) out[j] = 0.0;
  for (int i = 0; i < r; ++i) {
    const double vi = v[i];
    if (vi == 0.0) continue;
    const double* mrow = M.row(i);
    for (int j = 0; j < c; ++j) out[j] += vi * mrow[j];
  }
}

inline double norm1(const Mat& m) {
  double best = 0.0;
  for (int j = 0; j < m.cols(); ++j) {
    double s = 0.0;
    for (int i = 0; i < m.rows(); ++i) s += std::fabs(m(i, j));
    best = std::max(best, s);
  }
  return best;
}

// Solves A X = B in place by Gaussian elimination with partial pivoting.
inline Mat solve(Mat a, Mat b) {
  assert(a.rows() == a.cols() && a.rows() == b.rows());
  const int n = a.rows();
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int i = col + 1; i < n; ++i)
      if (std::fabs(a(i, col)) > std::fabs(a(piv, col))) piv = i;
    if (a(piv, col) == 0.0) throw std::runtime_error("solve: singular matrix");
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
      for (int j = 0; j < b.cols(); ++j) std::swap(b(col, j), b(piv, j));
    }
    const double inv = 1.0 / a(col, col);
    for (int i = col + 1; i < n; ++i) {
      const double f = a(i, col) * inv;
      if (f == 0.0) continue;
      a(i, col) = 0.0;
      for (int j = col + 1; j < n; ++j) a(i, j) -= f * a(col, j);
      for (int j = 0; j < b.cols(); ++j) b(i, j) -= f * b(col, j);
    }
  }
  for (int col = n - 1; col >= 0; --col) {
    const double inv = 1.0 / a(col, col);
    for (int j = 0; j < b.cols(); ++j) b(col, j) *= inv;
    for (int i = 0; i < col; ++i) {
      const double f = a(i, col);
      if (f == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) b(i, j) -= f * b(col, j);
    }
  }
  return b;
}

inline std::vector<double> solve(const Mat& a, const std::vector<double>& b) {
  Mat rhs(static_cast<int>(b.size()), 1);
  for (size_t i = 0; i < b.size(); ++i) rhs(static_cast<int>(i), 0) = b[i];
  Mat x = solve(a, rhs);
  std::vector<double> out(b.size());
  for (size_t i = 0; i < b.size(); ++i) out[i] = x(static_cast<int>(i), 0);
  return out;
}

// Matrix exponential by scaling-and-squaring with the degree-13 Pade
// approximant (Higham 2005). Exact to machine precision at the scales used
// here (sub-generator matrices of a handful of states).
inline Mat expm(const Mat& a) {
  assert(a.rows() == a.cols());
  const int n = a.rows();
  static const double b[] = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
      1187353796428800.0,  129060195264000.0,   10559470521600.0,
      670442572800.0,      33522128640.0,       1323241920.0,
      40840800.0,          960960.0,            16380.0,
      182.0,               1.0};
  const double theta13 = 5.371920351148152;

  int squarings = 0;
  const double nrm = norm1(a);
  if (nrm > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
  }
  Mat as = a;
  if (squarings > 0) as *= std::ldexp(1.0, -squarings);

  const Mat I = Mat::identity(n);
  const Mat a2 = as * as;
  const Mat a4 = a2 * a2;
  const Mat a6 = a2 * a4;

  Mat u = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2);
  u += b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * I;
  u = as * u;
  Mat v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2);
  v += b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * I;

  Mat f = solve(v - u, v + u);
  for (int s = 0; s < squarings; ++s) f = f * f;
  return f;
}

// First-order exponential moments over one step:
//   M0 = \int_0^h e^{uA} (1 - u/h) du,   M1 = \int_0^h e^{uA} (u/h) du,
// via the Van Loan block exponential of [[A, I, 0], [0, 0, I], [0, 0, 0]],
// whose top-right block is \int_0^h e^{(h-s)A} s ds.
inline void expm_step_moments(const Mat& a, double h, Mat* m0, Mat* m1) {
  const int n = a.rows();
  Mat block(3 * n, 3 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) block(i, j) = h * a(i, j);
    block(i, n + i) = h;
    block(n + i, 2 * n + i) = h;
  }
  Mat e = expm(block);
  Mat F(n, n), D(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      F(i, j) = e(i, n + j);
      D(i, j) = e(i, 2 * n + j);
    }
  // D = \int_0^h e^{(h-s)A} s ds = \int_0^h e^{vA} (h-v) dv, so M0 = D / h.
  if (m0) {
    *m0 = D;
    *m0 *= 1.0 / h;
  }
  if (m1) {
    *m1 = F - D * (1.0 / h);
  }
}

// Computes both e^{tA} and the integral F(t) = \int_0^t e^{uA} du via the
// exponential of the block matrix [[A, I], [0, 0]].
inline void expm_with_integral(const Mat& a, double t, Mat* exp_out, Mat* int_out) {
  const int n = a.rows();
  Mat block(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) block(i, j) = t * a(i, j);
    block(i, n + i) = t;
  }
  Mat e = expm(block);
  if (exp_out) {
    *exp_out = Mat(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) (*exp_out)(i, j) = e(i, j);
  }
  if (int_out) {
    *int_out = Mat(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) (*int_out)(i, j) = e(i, n + j);
  }
}

}  // namespace mmswitch

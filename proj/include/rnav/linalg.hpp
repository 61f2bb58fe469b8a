#pragma once

#include <array>
#include <cmath>
#include <initializer_list>
#include <vector>

#include "rnav/dual.hpp"
#include "rnav/errors.hpp"

namespace rnav {

// Largest chart dimension handled by the inline containers below.
inline constexpr int kMaxDim = 6;

inline void check_dim(int n) {
  if (n < 0 || n > kMaxDim) throw InvalidArgument("dimension out of range [0, 6]");
}

template <class T>
class Vec {
 public:
  Vec() = default;
  explicit Vec(int n) : n_(n) {
    check_dim(n);
    d_.fill(T(0.0));
  }
  Vec(std::initializer_list<T> xs) : n_(static_cast<int>(xs.size())) {
    check_dim(n_);
    d_.fill(T(0.0));
    int i = 0;
    for (const T& x : xs) d_[i++] = x;
  }
  static Vec unit(int n, int i) {
    Vec e(n);
    e[i] = T(1.0);
    return e;
  }
  static Vec from(const std::vector<double>& xs) {
    Vec out(static_cast<int>(xs.size()));
    for (int i = 0; i < out.size(); ++i) out[i] = T(xs[i]);
    return out;
  }

  int size() const { return n_; }
  T& operator[](int i) { return d_[i]; }
  const T& operator[](int i) const { return d_[i]; }
  T* begin() { return d_.data(); }
  T* end() { return d_.data() + n_; }
  const T* begin() const { return d_.data(); }
  const T* end() const { return d_.data() + n_; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < n_; ++i) d_[i] += o[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < n_; ++i) d_[i] -= o[i];
    return *this;
  }

 private:
  std::array<T, kMaxDim> d_{};
  int n_ = 0;
};

template <class T>
Vec<T> operator+(Vec<T> a, const Vec<T>& b) {
  a += b;
  return a;
}
template <class T>
Vec<T> operator-(Vec<T> a, const Vec<T>& b) {
  a -= b;
  return a;
}
template <class T>
Vec<T> operator-(Vec<T> a) {
  for (auto& x : a) x = -x;
  return a;
}
template <class T>
Vec<T> operator*(const T& s, Vec<T> a) {
  for (auto& x : a) x = s * x;
  return a;
}
template <class T>
Vec<T> operator*(double s, Vec<T> a)
  requires(!std::is_same_v<T, double>)
{
  for (auto& x : a) x = s * x;
  return a;
}
template <class T>
Vec<T> operator/(Vec<T> a, const T& s) {
  for (auto& x : a) x = x / s;
  return a;
}

template <class T>
T dot(const Vec<T>& a, const Vec<T>& b) {
  T s(0.0);
  for (int i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vec<double>& a) { return std::sqrt(dot(a, a)); }

inline double max_abs(const Vec<double>& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::fabs(x));
  return m;
}

template <class T>
Vec<double> values(const Vec<T>& a) {
  Vec<double> out(a.size());
  for (int i = 0; i < a.size(); ++i) out[i] = value_of(a[i]);
  return out;
}

// Lifts a vector into a wider scalar type with zero tangents.
template <class U, class T>
Vec<U> lift(const Vec<T>& a) {
  Vec<U> out(a.size());
  for (int i = 0; i < a.size(); ++i) out[i] = U(a[i]);
  return out;
}

// x + eps * dir as a dual vector.
template <class T>
Vec<Dual<T>> seed(const Vec<T>& x, const Vec<T>& dir) {
  Vec<Dual<T>> out(x.size());
  for (int i = 0; i < x.size(); ++i) out[i] = Dual<T>(x[i], dir[i]);
  return out;
}

template <class T>
Vec<T> tangent(const Vec<Dual<T>>& a) {
  Vec<T> out(a.size());
  for (int i = 0; i < a.size(); ++i) out[i] = a[i].d;
  return out;
}
template <class T>
Vec<T> primal(const Vec<Dual<T>>& a) {
  Vec<T> out(a.size());
  for (int i = 0; i < a.size(); ++i) out[i] = a[i].v;
  return out;
}

template <class T>
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols) : r_(rows), c_(cols) {
    check_dim(rows);
    check_dim(cols);
    d_.fill(T(0.0));
  }
  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1.0);
    return m;
  }
  static Mat from_rows(const std::vector<std::vector<double>>& rows) {
    const int r = static_cast<int>(rows.size());
    const int c = r ? static_cast<int>(rows[0].size()) : 0;
    Mat m(r, c);
    for (int i = 0; i < r; ++i) {
      if (static_cast<int>(rows[i].size()) != c) throw InvalidArgument("ragged matrix rows");
      for (int j = 0; j < c; ++j) m(i, j) = T(rows[i][j]);
    }
    return m;
  }

  int rows() const { return r_; }
  int cols() const { return c_; }
  T& operator()(int i, int j) { return d_[i * kMaxDim + j]; }
  const T& operator()(int i, int j) const { return d_[i * kMaxDim + j]; }

  Vec<T> col(int j) const {
    Vec<T> v(r_);
    for (int i = 0; i < r_; ++i) v[i] = (*this)(i, j);
    return v;
  }
  Vec<T> row(int i) const {
    Vec<T> v(c_);
    for (int j = 0; j < c_; ++j) v[j] = (*this)(i, j);
    return v;
  }
  void set_col(int j, const Vec<T>& v) {
    for (int i = 0; i < r_; ++i) (*this)(i, j) = v[i];
  }

  Mat transpose() const {
    Mat t(c_, r_);
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

 private:
  std::array<T, kMaxDim * kMaxDim> d_{};
  int r_ = 0;
  int c_ = 0;
};

template <class T>
Mat<T> operator+(Mat<T> a, const Mat<T>& b) {
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) a(i, j) += b(i, j);
  return a;
}
template <class T>
Mat<T> operator-(Mat<T> a, const Mat<T>& b) {
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) a(i, j) -= b(i, j);
  return a;
}
template <class T>
Mat<T> operator*(const T& s, Mat<T> a) {
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) a(i, j) = s * a(i, j);
  return a;
}
template <class T>
Mat<T> operator*(const Mat<T>& a, const Mat<T>& b) {
  Mat<T> c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) {
      T s(0.0);
      for (int k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}
template <class T>
Vec<T> operator*(const Mat<T>& a, const Vec<T>& x) {
  Vec<T> y(a.rows());
  for (int i = 0; i < a.rows(); ++i) {
    T s(0.0);
    for (int k = 0; k < a.cols(); ++k) s += a(i, k) * x[k];
    y[i] = s;
  }
  return y;
}

// u^T A v
template <class T>
T bilinear(const Mat<T>& a, const Vec<T>& u, const Vec<T>& v) {
  return dot(u, a * v);
}

template <class T>
Mat<double> values(const Mat<T>& a) {
  Mat<double> out(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(i, j) = value_of(a(i, j));
  return out;
}

template <class T>
Mat<T> tangent(const Mat<Dual<T>>& a) {
  Mat<T> out(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(i, j) = a(i, j).d;
  return out;
}
template <class T>
Mat<T> primal(const Mat<Dual<T>>& a) {
  Mat<T> out(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(i, j) = a(i, j).v;
  return out;
}

template <class U, class T>
Mat<U> lift(const Mat<T>& a) {
  Mat<U> out(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(i, j) = U(a(i, j));
  return out;
}

inline double max_abs(const Mat<double>& a) {
  double m = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) m = std::max(m, std::fabs(a(i, j)));
  return m;
}

// Gauss-Jordan with partial pivoting on primal values; derivatives flow
// through the arithmetic unchanged.
template <class T>
Mat<T> inverse(const Mat<T>& a) {
  const int n = a.rows();
  if (n != a.cols()) throw InvalidArgument("inverse of non-square matrix");
  Mat<T> m = a;
  Mat<T> inv = Mat<T>::identity(n);
  for (int c = 0; c < n; ++c) {
    int p = c;
    for (int r = c + 1; r < n; ++r)
      if (std::fabs(value_of(m(r, c))) > std::fabs(value_of(m(p, c)))) p = r;
    if (value_of(m(p, c)) == 0.0) throw DomainError("singular matrix");
    if (p != c)
      for (int j = 0; j < n; ++j) {
        std::swap(m(p, j), m(c, j));
        std::swap(inv(p, j), inv(c, j));
      }
    T piv = m(c, c);
    for (int j = 0; j < n; ++j) {
      m(c, j) = m(c, j) / piv;
      inv(c, j) = inv(c, j) / piv;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      T f = m(r, c);
      if (value_of(f) == 0.0 && !is_dual<T>::value) continue;
      for (int j = 0; j < n; ++j) {
        m(r, j) = m(r, j) - f * m(c, j);
        inv(r, j) = inv(r, j) - f * inv(c, j);
      }
    }
  }
  return inv;
}

template <class T>
T determinant(const Mat<T>& a) {
  const int n = a.rows();
  if (n != a.cols()) throw InvalidArgument("determinant of non-square matrix");
  Mat<T> m = a;
  T det(1.0);
  for (int c = 0; c < n; ++c) {
    int p = c;
    for (int r = c + 1; r < n; ++r)
      if (std::fabs(value_of(m(r, c))) > std::fabs(value_of(m(p, c)))) p = r;
    if (value_of(m(p, c)) == 0.0) return T(0.0);
    if (p != c) {
      for (int j = 0; j < n; ++j) std::swap(m(p, j), m(c, j));
      det = -det;
    }
    det = det * m(c, c);
    for (int r = c + 1; r < n; ++r) {
      T f = m(r, c) / m(c, c);
      for (int j = c; j < n; ++j) m(r, j) = m(r, j) - f * m(c, j);
    }
  }
  return det;
}

// Solves A x = b.
template <class T>
Vec<T> solve(const Mat<T>& a, const Vec<T>& b) {
  return inverse(a) * b;
}

// Three-index array T[i][j][k], all indices of the same extent.
template <class T>
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(int n) : n_(n) {
    check_dim(n);
    d_.fill(T(0.0));
  }
  int dim() const { return n_; }
  T& operator()(int i, int j, int k) { return d_[(i * kMaxDim + j) * kMaxDim + k]; }
  const T& operator()(int i, int j, int k) const { return d_[(i * kMaxDim + j) * kMaxDim + k]; }

 private:
  std::array<T, kMaxDim * kMaxDim * kMaxDim> d_{};
  int n_ = 0;
};

template <class T>
Tensor3<double> values(const Tensor3<T>& a) {
  Tensor3<double> out(a.dim());
  const int n = a.dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) out(i, j, k) = value_of(a(i, j, k));
  return out;
}

}  // namespace rnav

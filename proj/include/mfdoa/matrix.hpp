// SPDX-License-Identifier: Apache-2.0
//
// mfdoa - gridless multi-frequency direction-of-arrival estimation
// Copyright (C) 2026 mfdoa contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef MFDOA_MATRIX_HPP
#define MFDOA_MATRIX_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "common.hpp"

namespace mfdoa {

// Small dense matrices, row-major storage. The library works at desk scale
// (dimensions of a few hundred at most), so there is no sparse storage and
// no BLAS dependency; loops are simple and cache-friendly.
template <typename T>
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols) : r_(rows), c_(cols), a_(rows * cols, T{}) {}

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  std::size_t rows() const { return r_; }
  std::size_t cols() const { return c_; }
  bool empty() const { return a_.empty(); }

  T& operator()(std::size_t i, std::size_t j) { return a_[i * c_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return a_[i * c_ + j]; }

  const std::vector<T>& data() const { return a_; }
  std::vector<T>& data() { return a_; }

  Mat operator+(const Mat& o) const {
    check_same(o);
    Mat out(r_, c_);
    for (std::size_t k = 0; k < a_.size(); ++k) out.a_[k] = a_[k] + o.a_[k];
    return out;
  }
  Mat operator-(const Mat& o) const {
    check_same(o);
    Mat out(r_, c_);
    for (std::size_t k = 0; k < a_.size(); ++k) out.a_[k] = a_[k] - o.a_[k];
    return out;
  }
  Mat& operator+=(const Mat& o) {
    check_same(o);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
  }
  Mat& operator-=(const Mat& o) {
    check_same(o);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
  }
  Mat operator*(const T& s) const {
    Mat out(r_, c_);
    for (std::size_t k = 0; k < a_.size(); ++k) out.a_[k] = a_[k] * s;
    return out;
  }
  Mat& operator*=(const T& s) {
    for (auto& v : a_) v *= s;
    return *this;
  }

  Mat operator*(const Mat& o) const {
    if (c_ != o.r_) throw dim_error("matrix product: inner dimensions differ");
    Mat out(r_, o.c_);
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t k = 0; k < c_; ++k) {
        const T v = a_[i * c_ + k];
        if (v == T{}) continue;
        const T* src = &o.a_[k * o.c_];
        T* dst = &out.a_[i * o.c_];
        for (std::size_t j = 0; j < o.c_; ++j) dst[j] += v * src[j];
      }
    return out;
  }

  std::vector<T> operator*(const std::vector<T>& x) const {
    if (c_ != x.size()) throw dim_error("matrix-vector product: dimensions differ");
    std::vector<T> out(r_, T{});
    for (std::size_t i = 0; i < r_; ++i) {
      T acc{};
      for (std::size_t j = 0; j < c_; ++j) acc += a_[i * c_ + j] * x[j];
      out[i] = acc;
    }
    return out;
  }

  Mat transpose() const {
    Mat out(c_, r_);
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t j = 0; j < c_; ++j) out(j, i) = (*this)(i, j);
    return out;
  }

  T trace() const {
    if (r_ != c_) throw dim_error("trace: matrix not square");
    T t{};
    for (std::size_t i = 0; i < r_; ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius() const {
    double s = 0;
    for (const auto& v : a_) s += std::norm(cx(v));
    return std::sqrt(s);
  }

  Mat block(std::size_t i0, std::size_t j0, std::size_t nr, std::size_t nc) const {
    if (i0 + nr > r_ || j0 + nc > c_) throw dim_error("block: out of range");
    Mat out(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) out(i, j) = (*this)(i0 + i, j0 + j);
    return out;
  }

  void set_block(std::size_t i0, std::size_t j0, const Mat& m) {
    if (i0 + m.r_ > r_ || j0 + m.c_ > c_) throw dim_error("set_block: out of range");
    for (std::size_t i = 0; i < m.r_; ++i)
      for (std::size_t j = 0; j < m.c_; ++j) (*this)(i0 + i, j0 + j) = m(i, j);
  }

  bool all_finite() const {
    for (const auto& v : a_) {
      const cx z(v);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
  }

 private:
  void check_same(const Mat& o) const {
    if (r_ != o.r_ || c_ != o.c_) throw dim_error("elementwise op: shapes differ");
  }
  std::size_t r_ = 0, c_ = 0;
  std::vector<T> a_;
};

using CMat = Mat<cx>;
using RMat = Mat<double>;

// --- complex-specific helpers ------------------------------------------------

inline CMat adjoint(const CMat& m) {
  CMat out(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = std::conj(m(i, j));
  return out;
}

inline CMat conj(const CMat& m) {
  CMat out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = std::conj(m(i, j));
  return out;
}

// (M + M^H)/2 — nearest Hermitian matrix
inline CMat hermitian_part(const CMat& m) {
  if (m.rows() != m.cols()) throw dim_error("hermitian_part: matrix not square");
  CMat out(m.rows(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      out(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
  return out;
}

inline double hermitian_deviation(const CMat& m) {
  if (m.rows() != m.cols()) throw dim_error("hermitian_deviation: matrix not square");
  double s = 0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) s += std::norm(m(i, j) - std::conj(m(j, i)));
  return std::sqrt(s);
}

// Real inner product <A,B>_R = Re sum conj(A_ij) B_ij (Hilbert-Schmidt)
inline double inner_re(const CMat& a, const CMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw dim_error("inner_re: shapes differ");
  double s = 0;
  for (std::size_t k = 0; k < a.data().size(); ++k)
    s += std::real(std::conj(a.data()[k]) * b.data()[k]);
  return s;
}

// --- vector helpers ----------------------------------------------------------

inline double norm2(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double norm2(const std::vector<cx>& v) {
  double s = 0;
  for (const cx& x : v) s += std::norm(x);
  return std::sqrt(s);
}

// sum conj(a_i) b_i
inline cx dot(const std::vector<cx>& a, const std::vector<cx>& b) {
  if (a.size() != b.size()) throw dim_error("dot: lengths differ");
  cx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw dim_error("dot: lengths differ");
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Rank-one Hermitian update m += alpha * v v^H
inline void her_rank1(CMat& m, double alpha, const std::vector<cx>& v) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) += alpha * v[i] * std::conj(v[j]);
}

}  // namespace mfdoa

#endif  // MFDOA_MATRIX_HPP

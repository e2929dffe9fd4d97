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

#ifndef MFDOA_EIG_HPP
#define MFDOA_EIG_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "common.hpp"
#include "matrix.hpp"

namespace mfdoa {

// ---------------------------------------------------------------------------
// Complex <-> real embedding. A Hermitian H = A + jB maps to the symmetric
// [[A, -B], [B, A]] of twice the size; eigenvalues appear twice and
// <H1,H2>_R = (1/2) <embed(H1), embed(H2)>.
// ---------------------------------------------------------------------------

inline RMat real_embed(const CMat& h) {
  if (h.rows() != h.cols()) throw dim_error("real_embed: matrix not square");
  const std::size_t n = h.rows();
  RMat e(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double a = h(i, j).real(), b = h(i, j).imag();
      e(i, j) = a;
      e(i + n, j + n) = a;
      e(i, j + n) = -b;
      e(i + n, j) = b;
    }
  return e;
}

inline CMat real_extract(const RMat& e) {
  if (e.rows() != e.cols() || e.rows() % 2 != 0)
    throw dim_error("real_extract: matrix must be square with even size");
  const std::size_t n = e.rows() / 2;
  CMat h(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double a = 0.5 * (e(i, j) + e(i + n, j + n));
      const double b = 0.5 * (e(i + n, j) - e(i, j + n));
      h(i, j) = cx(a, b);
    }
  return h;
}

// ---------------------------------------------------------------------------
// Real symmetric eigensolver: Householder reduction to tridiagonal form with
// transformation accumulation, then implicit-shift QL on the tridiagonal.
// Eigenvalues ascending, eigenvectors in the matching columns.
// ---------------------------------------------------------------------------

struct SymEig {
  std::vector<double> values;  // ascending
  RMat vectors;                // column k pairs with values[k]
};

namespace detail {

// Householder reduction of a symmetric matrix (overwritten in place) to
// tridiagonal form; returns diagonal d and subdiagonal e, and leaves the
// accumulated orthogonal transform in z
inline void householder_tridiag(RMat& z, std::vector<double>& d, std::vector<double>& e) {
  const int n = static_cast<int>(z.rows());
  d.assign(n, 0.0);
  e.assign(n, 0.0);
  for (int i = n - 1; i >= 1; --i) {
    const int l = i - 1;
    double h = 0.0;
    if (l > 0) {
      double scale = 0.0;
      for (int k = 0; k <= l; ++k) scale += std::abs(z(i, k));
      if (scale == 0.0) {
        e[i] = z(i, l);
      } else {
        for (int k = 0; k <= l; ++k) {
          z(i, k) /= scale;
          h += z(i, k) * z(i, k);
        }
        double f = z(i, l);
        double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        z(i, l) = f - g;
        f = 0.0;
        for (int j = 0; j <= l; ++j) {
          z(j, i) = z(i, j) / h;  // stored for the accumulation pass
          g = 0.0;
          for (int k = 0; k <= j; ++k) g += z(j, k) * z(i, k);
          for (int k = j + 1; k <= l; ++k) g += z(k, j) * z(i, k);
          e[j] = g / h;
          f += e[j] * z(i, j);
        }
        const double hh = f / (h + h);
        for (int j = 0; j <= l; ++j) {
          f = z(i, j);
          g = e[j] - hh * f;
          e[j] = g;
          for (int k = 0; k <= j; ++k) z(j, k) -= f * e[k] + g * z(i, k);
        }
      }
    } else {
      e[i] = z(i, l);
    }
    d[i] = h;
  }
  d[0] = 0.0;
  e[0] = 0.0;
  // accumulate the product of the Householder reflections
  for (int i = 0; i < n; ++i) {
    const int l = i - 1;
    if (d[i] != 0.0) {
      for (int j = 0; j <= l; ++j) {
        double g = 0.0;
        for (int k = 0; k <= l; ++k) g += z(i, k) * z(k, j);
        for (int k = 0; k <= l; ++k) z(k, j) -= g * z(k, i);
      }
    }
    d[i] = z(i, i);
    z(i, i) = 1.0;
    for (int j = 0; j <= l; ++j) {
      z(j, i) = 0.0;
      z(i, j) = 0.0;
    }
  }
}

// Implicit-shift QL iteration on a symmetric tridiagonal (d, e), rotating the
// columns of z along. Converges cubically; 50 sweeps per eigenvalue is far
// beyond what is ever needed
inline void tridiag_ql(std::vector<double>& d, std::vector<double>& e, RMat& z) {
  const int n = static_cast<int>(d.size());
  const double eps = std::numeric_limits<double>::epsilon();
  for (int i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m != l) {
        if (iter++ == 50) throw numeric_error("eig: tridiagonal QL failed to converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        int i;
        for (i = m - 1; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          for (int k = 0; k < n; ++k) {
            f = z(k, i + 1);
            z(k, i + 1) = s * z(k, i) + c * f;
            z(k, i) = c * z(k, i) - s * f;
          }
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace detail

inline SymEig symmetric_eig(const RMat& a) {
  if (a.rows() != a.cols()) throw dim_error("symmetric_eig: matrix not square");
  if (!a.all_finite()) throw numeric_error("symmetric_eig: non-finite entries");
  const int n = static_cast<int>(a.rows());
  SymEig out;
  if (n == 0) return out;
  // symmetrize to guard against rounding-level asymmetry in the input
  RMat z(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) z(i, j) = 0.5 * (a(i, j) + a(j, i));
  std::vector<double> d, e;
  detail::householder_tridiag(z, d, e);
  detail::tridiag_ql(d, e, z);
  // sort ascending, permuting eigenvector columns along
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int i, int j) { return d[i] < d[j]; });
  out.values.resize(n);
  out.vectors = RMat(n, n);
  for (int k = 0; k < n; ++k) {
    out.values[k] = d[idx[k]];
    for (int i = 0; i < n; ++i) out.vectors(i, k) = z(i, idx[k]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition via the real embedding. Each eigenvalue of the
// embedded matrix appears twice; paired eigenvectors are mapped back to one
// complex eigenvector per pair and re-orthonormalized per eigenvalue cluster.
// ---------------------------------------------------------------------------

struct HermitianEig {
  std::vector<double> values;  // ascending
  CMat vectors;                // orthonormal columns, M = V diag(values) V^H
};

inline HermitianEig hermitian_eig(const CMat& m) {
  if (m.rows() != m.cols()) throw dim_error("hermitian_eig: matrix not square");
  if (!m.all_finite()) throw numeric_error("hermitian_eig: non-finite entries");
  const int n = static_cast<int>(m.rows());
  HermitianEig out;
  if (n == 0) return out;
  const CMat h = hermitian_part(m);
  const SymEig se = symmetric_eig(real_embed(h));

  // group the 2n eigenvalues into even-sized clusters of (numerically)
  // equal values; each cluster of size 2c yields c complex eigenvectors
  double scale = 1.0;
  for (double v : se.values) scale = std::max(scale, std::abs(v));
  const double tau = 1e-12 * scale * n;
  std::vector<std::pair<int, int>> clusters;  // [begin, end)
  {
    int i = 0;
    while (i < 2 * n) {
      int j = i + 1;
      while (j < 2 * n && se.values[j] - se.values[j - 1] <= tau) ++j;
      if ((j - i) % 2 != 0) ++j;  // embedding duplicates values; force pairs
      clusters.push_back({i, std::min(j, 2 * n)});
      i = std::min(j, 2 * n);
    }
    // a trailing odd cluster can only arise from pathological rounding;
    // merge it backward so every cluster stays even
    while (clusters.size() > 1 && (clusters.back().second - clusters.back().first) % 2 != 0) {
      auto last = clusters.back();
      clusters.pop_back();
      clusters.back().second = last.second;
    }
  }

  out.values.reserve(n);
  out.vectors = CMat(n, n);
  int col = 0;
  for (const auto& [b, eidx] : clusters) {
    const int take = (eidx - b) / 2;
    // map each embedded eigenvector [p; q] to the complex candidate p + jq,
    // then pick an orthonormal set by pivoted modified Gram-Schmidt
    std::vector<std::vector<cx>> cand(eidx - b, std::vector<cx>(n));
    for (int t = b; t < eidx; ++t)
      for (int i = 0; i < n; ++i)
        cand[t - b][i] = cx(se.vectors(i, t), se.vectors(i + n, t));
    std::vector<std::vector<cx>> chosen;
    std::vector<bool> used(cand.size(), false);
    for (int pick = 0; pick < take; ++pick) {
      int best = -1;
      double best_norm = 0.0;
      for (std::size_t t = 0; t < cand.size(); ++t) {
        if (used[t]) continue;
        const double nn = norm2(cand[t]);
        if (nn > best_norm) {
          best_norm = nn;
          best = static_cast<int>(t);
        }
      }
      if (best < 0 || best_norm < 1e-6)
        throw numeric_error("hermitian_eig: eigenvector pairing failed");
      used[best] = true;
      auto v = cand[best];
      const double inv = 1.0 / norm2(v);
      for (auto& x : v) x *= inv;
      // deflate remaining candidates
      for (std::size_t t = 0; t < cand.size(); ++t) {
        if (used[t]) continue;
        const cx proj = dot(v, cand[t]);
        for (int i = 0; i < n; ++i) cand[t][i] -= proj * v[i];
      }
      chosen.push_back(std::move(v));
    }
    for (int t = 0; t < take; ++t) {
      out.values.push_back(0.5 * (se.values[b + 2 * t] + se.values[b + 2 * t + 1]));
      for (int i = 0; i < n; ++i) out.vectors(i, col) = chosen[t][i];
      ++col;
    }
  }

  // final polish: one modified Gram-Schmidt pass across all columns so that
  // V^H V = I holds tightly even across adjacent clusters
  for (int j = 0; j < n; ++j) {
    std::vector<cx> v(n);
    for (int i = 0; i < n; ++i) v[i] = out.vectors(i, j);
    for (int jj = 0; jj < j; ++jj) {
      std::vector<cx> u(n);
      for (int i = 0; i < n; ++i) u[i] = out.vectors(i, jj);
      const cx proj = dot(u, v);
      for (int i = 0; i < n; ++i) v[i] -= proj * u[i];
    }
    const double nn = norm2(v);
    if (nn < 1e-8) throw numeric_error("hermitian_eig: degenerate basis after polish");
    for (int i = 0; i < n; ++i) out.vectors(i, j) = v[i] / nn;
  }
  return out;
}

// Projection onto the positive semidefinite cone: clip negative eigenvalues
// to zero. Works on the real symmetric embedding so no eigenvector pairing is
// needed, and rebuilds from whichever of the positive / negative eigenvalue
// sets is smaller. The result is exactly Hermitian.
inline CMat psd_project(const CMat& m) {
  if (m.rows() != m.cols()) throw dim_error("psd_project: matrix not square");
  const int n = static_cast<int>(m.rows());
  if (n == 0) return CMat(0, 0);
  const RMat e = real_embed(hermitian_part(m));
  const SymEig eg = symmetric_eig(e);
  const int nn = 2 * n;
  int n_neg = 0, n_pos = 0;
  for (double v : eg.values) {
    if (v < 0) ++n_neg;
    else if (v > 0) ++n_pos;
  }
  RMat r(nn, nn);
  if (n_pos <= n_neg) {
    for (int k = 0; k < nn; ++k) {
      const double lam = eg.values[k];
      if (lam <= 0) continue;
      for (int i = 0; i < nn; ++i) {
        const double s = lam * eg.vectors(i, k);
        for (int j = i; j < nn; ++j) r(i, j) += s * eg.vectors(j, k);
      }
    }
  } else {
    for (int i = 0; i < nn; ++i)
      for (int j = i; j < nn; ++j) r(i, j) = e(i, j);
    for (int k = 0; k < nn; ++k) {
      const double lam = eg.values[k];
      if (lam >= 0) continue;
      for (int i = 0; i < nn; ++i) {
        const double s = lam * eg.vectors(i, k);
        for (int j = i; j < nn; ++j) r(i, j) -= s * eg.vectors(j, k);
      }
    }
  }
  for (int i = 0; i < nn; ++i)
    for (int j = 0; j < i; ++j) r(i, j) = r(j, i);
  return real_extract(r);
}

// Count of eigenvalues above the shared significance threshold
// max(1e-6, 1e-8 * largest), for spectra of nominally PSD solves where tiny
// positive values are solver noise.
inline int numerical_rank(const std::vector<double>& values) {
  double mx = 0.0;
  for (double v : values) mx = std::max(mx, v);
  const double thr = std::max(1e-6, 1e-8 * mx);
  int r = 0;
  for (double v : values)
    if (v > thr) ++r;
  return r;
}

}  // namespace mfdoa

#endif  // MFDOA_EIG_HPP

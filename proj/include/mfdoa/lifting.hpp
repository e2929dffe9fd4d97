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

#ifndef MFDOA_LIFTING_HPP
#define MFDOA_LIFTING_HPP

#include <algorithm>
#include <vector>

#include "common.hpp"
#include "matrix.hpp"
#include "model.hpp"

namespace mfdoa {

// ---------------------------------------------------------------------------
// Lifting plan: precomputed row tables for the zero-padding maps that embed a
// per-frequency measurement block into the shared space-frequency axis.
//
// For frequency index f the map places sensor row m at product index f*m —
// either at row f*m of a length-N output (full form) or at the position of
// f*m within the sorted deduplicated product set U (compact form, length
// N_u). Indexing is 0-based throughout.
// ---------------------------------------------------------------------------
struct LiftingPlan {
  GeometryConfig geometry;
  int n_total;                           // N, full lifted length
  std::vector<int> u;                    // sorted deduplicated products {m*f}
  std::vector<std::vector<int>> rows_full;     // [freq pos][sensor pos] -> f*m
  std::vector<std::vector<int>> rows_compact;  // [freq pos][sensor pos] -> index of f*m in u
  // offset_realized[k] is true iff some pair (i,j) has u[j] - u[i] = k;
  // offsets in 0..N-1 with the flag false never enter the compact matrix
  // T(u) and stay genuinely free in the full-size problem
  std::vector<char> offset_realized;
  std::vector<int> free_offsets;         // ascending list of unrealized offsets

  explicit LiftingPlan(GeometryConfig g) : geometry(std::move(g)) {
    n_total = geometry.n_lifted();
    u = geometry.u_set();
    for (int fi = 0; fi < geometry.n_freqs(); ++fi) {
      const int f = geometry.freqs()[fi];
      std::vector<int> full, compact;
      for (int m : geometry.sensors()) {
        full.push_back(f * m);
        compact.push_back(u_pos(f * m));
      }
      rows_full.push_back(std::move(full));
      rows_compact.push_back(std::move(compact));
    }
    offset_realized.assign(n_total, 0);
    for (std::size_t i = 0; i < u.size(); ++i)
      for (std::size_t j = i; j < u.size(); ++j) offset_realized[u[j] - u[i]] = 1;
    for (int k = 0; k < n_total; ++k)
      if (!offset_realized[k]) free_offsets.push_back(k);
  }

  int n_u() const { return static_cast<int>(u.size()); }

  // Position of a product value within u
  int u_pos(int value) const {
    auto it = std::lower_bound(u.begin(), u.end(), value);
    if (it == u.end() || *it != value) throw domain_error("lifting: value not in product set");
    return static_cast<int>(it - u.begin());
  }
};

// Vector parameterizing a (possibly entry-free) Hermitian Toeplitz-structured
// matrix: entry (i,j) of the structured matrix is u[offset] for offset =
// gamma_j - gamma_i >= 0 and conj(u[-offset]) otherwise.
struct ToeplitzVector {
  std::vector<cx> u;        // length N; u[0] real (matrix diagonal)
  std::vector<char> mask;   // mask[k] true iff offset k appears in the compact matrix
};

// --- zero-padding maps and adjoints ----------------------------------------

// Full form: rows {f*m} of a length n_total output hold the rows of q;
// every other row is zero
inline CMat lift_R(const LiftingPlan& p, const CMat& q, int f) {
  const int fi = p.geometry.freq_pos(f);
  if (static_cast<int>(q.rows()) != p.geometry.n_sensors())
    throw dim_error("lift_R: row count differs from sensor count");
  CMat out(p.n_total, q.cols());
  for (int mi = 0; mi < p.geometry.n_sensors(); ++mi)
    for (std::size_t l = 0; l < q.cols(); ++l) out(p.rows_full[fi][mi], l) = q(mi, l);
  return out;
}

// Adjoint of lift_R under the real inner product: select rows {f*m}
inline CMat adjoint_R(const LiftingPlan& p, const CMat& y, int f) {
  const int fi = p.geometry.freq_pos(f);
  if (static_cast<int>(y.rows()) != p.n_total)
    throw dim_error("adjoint_R: row count differs from lifted length");
  CMat out(p.geometry.n_sensors(), y.cols());
  for (int mi = 0; mi < p.geometry.n_sensors(); ++mi)
    for (std::size_t l = 0; l < y.cols(); ++l) out(mi, l) = y(p.rows_full[fi][mi], l);
  return out;
}

// Compact form: same embedding with rows indexed by position within u
// (length n_u output; rows of the full form that no product ever uses are
// dropped)
inline CMat lift_R1(const LiftingPlan& p, const CMat& q, int f) {
  const int fi = p.geometry.freq_pos(f);
  if (static_cast<int>(q.rows()) != p.geometry.n_sensors())
    throw dim_error("lift_R1: row count differs from sensor count");
  CMat out(p.n_u(), q.cols());
  for (int mi = 0; mi < p.geometry.n_sensors(); ++mi)
    for (std::size_t l = 0; l < q.cols(); ++l) out(p.rows_compact[fi][mi], l) = q(mi, l);
  return out;
}

inline CMat adjoint_R1(const LiftingPlan& p, const CMat& y, int f) {
  const int fi = p.geometry.freq_pos(f);
  if (static_cast<int>(y.rows()) != p.n_u())
    throw dim_error("adjoint_R1: row count differs from compact length");
  CMat out(p.geometry.n_sensors(), y.cols());
  for (int mi = 0; mi < p.geometry.n_sensors(); ++mi)
    for (std::size_t l = 0; l < y.cols(); ++l) out(mi, l) = y(p.rows_compact[fi][mi], l);
  return out;
}

// --- Toeplitz-structured matrices ------------------------------------------

// Hermitian Toeplitz matrix from its first row: entry (i,j) = u[j-i] for
// j >= i, conjugate below the diagonal
inline CMat toep(const std::vector<cx>& u) {
  const std::size_t n = u.size();
  CMat t(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    t(i, i) = cx(u[0].real(), 0.0);
    for (std::size_t j = i + 1; j < n; ++j) {
      t(i, j) = u[j - i];
      t(j, i) = std::conj(u[j - i]);
    }
  }
  return t;
}

// Irregular counterpart: entry (i,j) = u[u_j - u_i] over the product set,
// i.e. the principal submatrix of toep(u) at rows/columns u. Offsets that
// never occur as a product-set difference are simply never read.
inline CMat irregular_toep(const std::vector<cx>& u, const LiftingPlan& p) {
  if (static_cast<int>(u.size()) != p.n_total)
    throw dim_error("irregular_toep: vector length differs from lifted length");
  const int n = p.n_u();
  CMat t(n, n);
  for (int i = 0; i < n; ++i) {
    t(i, i) = cx(u[0].real(), 0.0);
    for (int j = i + 1; j < n; ++j) {
      const cx v = u[p.u[j] - p.u[i]];
      t(i, j) = v;
      t(j, i) = std::conj(v);
    }
  }
  return t;
}

inline CMat irregular_toep(const ToeplitzVector& u, const LiftingPlan& p) {
  return irregular_toep(u.u, p);
}

// Offset mask for a plan, packaged with a coefficient vector
inline ToeplitzVector make_toeplitz_vector(std::vector<cx> u, const LiftingPlan& p) {
  if (static_cast<int>(u.size()) != p.n_total)
    throw dim_error("make_toeplitz_vector: vector length differs from lifted length");
  ToeplitzVector t;
  t.u = std::move(u);
  t.mask.assign(p.offset_realized.begin(), p.offset_realized.end());
  return t;
}

// Restriction: keep rows and columns of a full-size matrix indexed by the
// product set, so that irregular_toep(u) == select_PU(toep(u))
inline CMat select_PU(const CMat& m, const LiftingPlan& p) {
  if (static_cast<int>(m.rows()) != p.n_total || static_cast<int>(m.cols()) != p.n_total)
    throw dim_error("select_PU: matrix size differs from lifted length");
  const int n = p.n_u();
  CMat out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = m(p.u[i], p.u[j]);
  return out;
}

}  // namespace mfdoa

#endif  // MFDOA_LIFTING_HPP

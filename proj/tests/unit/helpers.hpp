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
//
// Shared test utilities: an independent cyclic-Jacobi eigensolver used as a
// cross-check oracle for the production eigensolver, and random matrix
// generators.

#ifndef MFDOA_TEST_HELPERS_HPP
#define MFDOA_TEST_HELPERS_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "mfdoa/eig.hpp"
#include "mfdoa/matrix.hpp"
#include "mfdoa/rng.hpp"

namespace test_helpers {

// Cyclic Jacobi eigensolver for real symmetric matrices. Deliberately a
// different algorithm from the production solver so the two can check each
// other; O(n^3) per sweep, fine for the small matrices used in tests.
inline mfdoa::SymEig jacobi_eig(mfdoa::RMat a, int max_sweeps = 100) {
  const int n = static_cast<int>(a.rows());
  mfdoa::RMat v = mfdoa::RMat::identity(n);
  const double target = 1e-12 * std::max(1.0, a.frobenius());
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += 2.0 * a(p, q) * a(p, q);
    if (std::sqrt(off) <= target) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }
  mfdoa::SymEig out;
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int i, int j) { return a(i, i) < a(j, j); });
  out.values.resize(n);
  out.vectors = mfdoa::RMat(n, n);
  for (int k = 0; k < n; ++k) {
    out.values[k] = a(idx[k], idx[k]);
    for (int i = 0; i < n; ++i) out.vectors(i, k) = v(i, idx[k]);
  }
  return out;
}

inline mfdoa::RMat random_symmetric(int n, mfdoa::Rng& rng) {
  mfdoa::RMat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double v = rng.gaussian();
      a(i, j) = v;
      a(j, i) = v;
    }
  return a;
}

inline mfdoa::CMat random_hermitian(int n, mfdoa::Rng& rng) {
  mfdoa::CMat a(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = mfdoa::cx(rng.gaussian(), 0.0);
    for (int j = i + 1; j < n; ++j) {
      const mfdoa::cx v = rng.cgaussian();
      a(i, j) = v;
      a(j, i) = std::conj(v);
    }
  }
  return a;
}

inline mfdoa::CMat random_complex(int rows, int cols, mfdoa::Rng& rng) {
  mfdoa::CMat a(rows, cols);
  for (auto& v : a.data()) v = rng.cgaussian();
  return a;
}

// Random Hermitian PSD of given rank: sum of rank-one terms
inline mfdoa::CMat random_psd(int n, int rank, mfdoa::Rng& rng) {
  mfdoa::CMat a(n, n);
  for (int r = 0; r < rank; ++r) {
    std::vector<mfdoa::cx> v(n);
    for (auto& x : v) x = rng.cgaussian();
    mfdoa::her_rank1(a, 1.0, v);
  }
  return a;
}

}  // namespace test_helpers

#endif  // MFDOA_TEST_HELPERS_HPP

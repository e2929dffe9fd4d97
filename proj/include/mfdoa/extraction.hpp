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

#ifndef MFDOA_EXTRACTION_HPP
#define MFDOA_EXTRACTION_HPP

// Back half of the recovery pipeline: split a solved structured corner into
// signal and noise subspaces, scan the null spectrum over the unit circle,
// refine its minima, and report angles plus nonnegative source powers.  Also
// hosts the Vandermonde decomposition of PSD Toeplitz matrices that the
// reconstruction property tests lean on.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <ostream>
#include <utility>
#include <vector>

#include "mfdoa/common.hpp"
#include "mfdoa/eig.hpp"
#include "mfdoa/lifting.hpp"
#include "mfdoa/matrix.hpp"
#include "mfdoa/model.hpp"

namespace mfdoa {

// Signal/noise eigenvector split of a Hermitian matrix.
struct EigenSplit {
  CMat u_signal;                      // n x k, paired with signal_values
  std::vector<double> signal_values;  // k largest eigenvalues, descending
  CMat u_noise;                       // n x (n - k)
  CMat projector;                     // u_noise * u_noise^H
};

// Options for the circle scan.
struct ExtractOptions {
  int grid_points = 1 << 16;  // angular resolution ~9.6e-5 rad before refinement
  int refine_iters = 30;      // golden-section steps inside one grid bracket
};

// One batch of recovered directions.  All per-source vectors share one order:
// ascending reported angle.
struct DoaEstimate {
  int k = 0;
  std::vector<cx> z_hat;        // unit-modulus nodes (built by polar form)
  std::vector<double> w_hat;    // cosine variable, -angle(z) / (2 pi)
  std::vector<double> thetas_deg;
  std::vector<double> powers;   // nonnegative least-squares fit
  std::vector<double> null_spectrum_minima;  // spectrum value at each node
};

inline EigenSplit eigen_split(const CMat& t, int k) {
  const int n = static_cast<int>(t.rows());
  if (t.cols() != t.rows()) throw dim_error("eigen_split: matrix not square");
  if (k < 1 || k > n - 1)
    throw dim_error("eigen_split: subspace split needs 1 <= k <= n-1");
  const auto e = hermitian_eig(t);  // ascending

  EigenSplit s;
  s.u_signal = CMat(n, k);
  s.u_noise = CMat(n, n - k);
  for (int c = 0; c < k; ++c) {
    s.signal_values.push_back(e.values[n - 1 - c]);
    for (int i = 0; i < n; ++i) s.u_signal(i, c) = e.vectors(i, n - 1 - c);
  }
  for (int c = 0; c < n - k; ++c)
    for (int i = 0; i < n; ++i) s.u_noise(i, c) = e.vectors(i, c);
  s.projector = CMat(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cx acc(0.0, 0.0);
      for (int c = 0; c < n - k; ++c) acc += s.u_noise(i, c) * std::conj(s.u_noise(j, c));
      s.projector(i, j) = acc;
    }
  return s;
}

// Squared projection of the probe vector w(gamma, z)_i = z^{gamma_i} onto the
// noise subspace.  Nonnegative, zero at true nodes of an exact decomposition,
// and bounded by the probe norm n.
inline double null_spectrum(const EigenSplit& split, const std::vector<int>& gamma, cx z) {
  const int n = static_cast<int>(split.u_noise.rows());
  if (static_cast<int>(gamma.size()) != n)
    throw dim_error("null_spectrum: exponent list length differs from subspace dimension");
  const double mag = std::abs(z);
  if (!(mag > 0.0)) throw domain_error("null_spectrum: zero probe point");
  const double phi = std::arg(z);  // unit-modulus projection
  std::vector<cx> w(n);
  for (int i = 0; i < n; ++i) w[i] = std::polar(1.0, phi * gamma[i]);
  double acc = 0.0;
  for (std::size_t c = 0; c < split.u_noise.cols(); ++c) {
    cx dot(0.0, 0.0);
    for (int i = 0; i < n; ++i) dot += std::conj(split.u_noise(i, c)) * w[i];
    acc += std::norm(dot);
  }
  return acc;
}

namespace detail {

// Autocorrelation coefficients of the noise projector along the exponent
// offsets: spectrum(phi) = g[0] + 2 sum_{k>0} Re(g[k] e^{j k phi}).  This
// turns each circle-scan evaluation into an O(span) sum.
inline std::vector<cx> projector_autocorr(const CMat& g, const std::vector<int>& gamma) {
  const int n = static_cast<int>(gamma.size());
  int span = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) span = std::max(span, gamma[j] - gamma[i]);
  std::vector<cx> acc(span + 1, cx(0.0, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int k = gamma[j] - gamma[i];
      if (k >= 0) acc[k] += g(i, j);
    }
  return acc;
}

inline double eval_autocorr(const std::vector<cx>& g, double phi) {
  double v = g[0].real();
  const cx rot = std::polar(1.0, phi);
  cx e = rot;
  for (std::size_t k = 1; k < g.size(); ++k) {
    v += 2.0 * (g[k].real() * e.real() - g[k].imag() * e.imag());
    e *= rot;
  }
  return v;
}

// Nonnegative least squares min ||a x - b|| s.t. x >= 0 by the active-set
// method: grow the passive set greedily on the dual, backtrack whenever the
// unconstrained sub-solution leaves the feasible cone.
inline std::vector<double> nnls(const RMat& a, const std::vector<double>& b) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  if (static_cast<int>(b.size()) != m) throw dim_error("nnls: rhs length mismatch");

  std::vector<double> x(n, 0.0);
  std::vector<char> passive(n, 0);
  std::vector<double> resid(b), w(n, 0.0), s(n, 0.0);

  const auto compute_dual = [&] {
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int i = 0; i < m; ++i) acc += a(i, j) * resid[i];
      w[j] = acc;
    }
  };
  const auto solve_passive = [&] {
    // normal equations on the passive columns, Gaussian elimination with
    // partial pivoting (the systems here are tiny)
    std::vector<int> idx;
    for (int j = 0; j < n; ++j)
      if (passive[j]) idx.push_back(j);
    const int p = static_cast<int>(idx.size());
    std::vector<double> g(p * (p + 1));
    for (int r = 0; r < p; ++r) {
      for (int c = 0; c < p; ++c) {
        double acc = 0.0;
        for (int i = 0; i < m; ++i) acc += a(i, idx[r]) * a(i, idx[c]);
        g[r * (p + 1) + c] = acc;
      }
      double acc = 0.0;
      for (int i = 0; i < m; ++i) acc += a(i, idx[r]) * b[i];
      g[r * (p + 1) + p] = acc;
    }
    for (int c = 0; c < p; ++c) {
      int piv = c;
      for (int r = c + 1; r < p; ++r)
        if (std::abs(g[r * (p + 1) + c]) > std::abs(g[piv * (p + 1) + c])) piv = r;
      for (int c2 = 0; c2 <= p; ++c2) std::swap(g[c * (p + 1) + c2], g[piv * (p + 1) + c2]);
      const double d = g[c * (p + 1) + c];
      if (std::abs(d) < 1e-14) {
        // rank-deficient normal system: zero out this direction
        for (int c2 = 0; c2 <= p; ++c2) g[c * (p + 1) + c2] = 0.0;
        continue;
      }
      for (int r = 0; r < p; ++r) {
        if (r == c) continue;
        const double f = g[r * (p + 1) + c] / d;
        for (int c2 = c; c2 <= p; ++c2) g[r * (p + 1) + c2] -= f * g[c * (p + 1) + c2];
      }
    }
    std::fill(s.begin(), s.end(), 0.0);
    for (int r = 0; r < p; ++r) {
      const double d = g[r * (p + 1) + r];
      s[idx[r]] = std::abs(d) < 1e-14 ? 0.0 : g[r * (p + 1) + p] / d;
    }
  };
  const auto update_resid = [&] {
    for (int i = 0; i < m; ++i) {
      double acc = b[i];
      for (int j = 0; j < n; ++j)
        if (x[j] != 0.0) acc -= a(i, j) * x[j];
      resid[i] = acc;
    }
  };

  double scale = 0.0;
  for (int i = 0; i < m; ++i) scale = std::max(scale, std::abs(b[i]));
  const double tol = 1e-12 * std::max(1.0, scale);

  for (int outer = 0; outer < 3 * n + 10; ++outer) {
    compute_dual();
    int best = -1;
    double best_w = tol;
    for (int j = 0; j < n; ++j)
      if (!passive[j] && w[j] > best_w) {
        best_w = w[j];
        best = j;
      }
    if (best < 0) break;
    passive[best] = 1;
    for (int inner = 0; inner < 3 * n + 10; ++inner) {
      solve_passive();
      double alpha = 1.0;
      for (int j = 0; j < n; ++j)
        if (passive[j] && s[j] <= 0.0 && x[j] - s[j] > 0.0)
          alpha = std::min(alpha, x[j] / (x[j] - s[j]));
      if (alpha >= 1.0) {
        for (int j = 0; j < n; ++j) x[j] = passive[j] ? std::max(0.0, s[j]) : 0.0;
        break;
      }
      for (int j = 0; j < n; ++j)
        if (passive[j]) {
          x[j] += alpha * (s[j] - x[j]);
          if (x[j] <= 1e-14 * std::max(1.0, scale)) {
            x[j] = 0.0;
            passive[j] = 0;
          }
        }
    }
    update_resid();
  }
  return x;
}

// Nonnegative power fit over the offsets realized in gamma: the per-offset
// averages of the matrix obey avg_k = sum_i d_i z_i^{-k} for an exact
// decomposition.
inline std::vector<double> fit_powers(const CMat& t, const std::vector<int>& gamma,
                                      const std::vector<double>& phis) {
  const int n = static_cast<int>(gamma.size());
  const int k = static_cast<int>(phis.size());
  std::vector<int> offsets;
  std::vector<cx> avg;
  {
    int span = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) span = std::max(span, gamma[j] - gamma[i]);
    std::vector<cx> sum(span + 1, cx(0.0, 0.0));
    std::vector<int> cnt(span + 1, 0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const int off = gamma[j] - gamma[i];
        if (off < 0) continue;
        sum[off] += t(i, j);
        ++cnt[off];
      }
    for (int off = 0; off <= span; ++off)
      if (cnt[off] > 0) {
        offsets.push_back(off);
        avg.push_back(sum[off] / static_cast<double>(cnt[off]));
      }
  }
  const int rows = 2 * static_cast<int>(offsets.size()) - 1;  // offset 0 is real
  RMat a(rows, k);
  std::vector<double> b(rows, 0.0);
  int r = 0;
  for (std::size_t oi = 0; oi < offsets.size(); ++oi) {
    const int off = offsets[oi];
    for (int c = 0; c < k; ++c) a(r, c) = std::cos(off * phis[c]);
    b[r] = avg[oi].real();
    ++r;
    if (off == 0) continue;
    for (int c = 0; c < k; ++c) a(r, c) = -std::sin(off * phis[c]);
    b[r] = avg[oi].imag();
    ++r;
  }
  return nnls(a, b);
}

}  // namespace detail

// Scan the null spectrum over the unit circle, refine every local minimum,
// and report the k smallest as directions.  Deterministic: minima are ranked
// by refined value with the angle as tie-break, then reported in ascending
// angle order.
inline DoaEstimate extract_doas(const CMat& t, const std::vector<int>& gamma, int k,
                                const ExtractOptions& opts = {}) {
  const int n = static_cast<int>(gamma.size());
  if (static_cast<int>(t.rows()) != n || static_cast<int>(t.cols()) != n)
    throw dim_error("extract_doas: matrix size differs from exponent list");
  if (opts.grid_points < 8) throw config_error("extract_doas: grid too coarse");
  if (opts.refine_iters < 0) throw config_error("extract_doas: negative refinement count");

  const EigenSplit split = eigen_split(t, k);
  const auto g = detail::projector_autocorr(split.projector, gamma);

  const int m = opts.grid_points;
  const double step = 2.0 * pi / m;
  std::vector<double> val(m);
  for (int i = 0; i < m; ++i) val[i] = detail::eval_autocorr(g, -pi + i * step);

  struct Minimum {
    double phi;
    double value;
  };
  std::vector<Minimum> minima;
  constexpr double golden = 0.6180339887498949;
  for (int i = 0; i < m; ++i) {
    const double prev = val[(i + m - 1) % m];
    const double next = val[(i + 1) % m];
    if (!(val[i] < prev && val[i] < next)) continue;
    double lo = -pi + (i - 1) * step, hi = -pi + (i + 1) * step;
    double x1 = hi - golden * (hi - lo), x2 = lo + golden * (hi - lo);
    double f1 = detail::eval_autocorr(g, x1), f2 = detail::eval_autocorr(g, x2);
    for (int it = 0; it < opts.refine_iters; ++it) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - golden * (hi - lo);
        f1 = detail::eval_autocorr(g, x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + golden * (hi - lo);
        f2 = detail::eval_autocorr(g, x2);
      }
    }
    double phi = 0.5 * (lo + hi);
    if (phi >= pi) phi -= 2.0 * pi;
    if (phi < -pi) phi += 2.0 * pi;
    // report the exact subspace projection at the refined point
    minima.push_back({phi, null_spectrum(split, gamma, std::polar(1.0, phi))});
  }

  if (static_cast<int>(minima.size()) < k) {
    std::vector<double> angles, values;
    for (const auto& mn : minima) {
      angles.push_back(rad2deg(std::acos(std::clamp(-mn.phi / pi, -1.0, 1.0))));
      values.push_back(mn.value);
    }
    throw degenerate_spectrum_error("extract_doas: fewer spectrum minima than requested sources",
                                    angles, values);
  }

  std::sort(minima.begin(), minima.end(), [](const Minimum& a, const Minimum& b) {
    if (a.value != b.value) return a.value < b.value;
    return a.phi < b.phi;
  });
  minima.resize(k);
  // ascending angle: theta = acos(-phi/pi) grows with phi, so sort phi ascending
  std::sort(minima.begin(), minima.end(),
            [](const Minimum& a, const Minimum& b) { return a.phi < b.phi; });

  DoaEstimate est;
  est.k = k;
  std::vector<double> phis;
  for (const auto& mn : minima) {
    phis.push_back(mn.phi);
    est.z_hat.push_back(std::polar(1.0, mn.phi));
    est.w_hat.push_back(-mn.phi / (2.0 * pi));
    est.thetas_deg.push_back(rad2deg(std::acos(std::clamp(-mn.phi / pi, -1.0, 1.0))));
    est.null_spectrum_minima.push_back(mn.value);
  }
  est.powers = detail::fit_powers(t, gamma, phis);
  return est;
}

// Node/power/rank factorization of a PSD Toeplitz matrix.
struct VandermondeResult {
  std::vector<cx> z;
  std::vector<double> d;
  int rank = 0;
};

inline VandermondeResult vandermonde_decompose(const CMat& t_reg,
                                               const ExtractOptions& opts = {}) {
  const int n = static_cast<int>(t_reg.rows());
  if (t_reg.cols() != t_reg.rows()) throw dim_error("vandermonde_decompose: matrix not square");
  if (n == 0) return {};
  const auto e = hermitian_eig(t_reg);
  const double top = e.values.empty() ? 0.0 : e.values.back();
  if (e.values.front() < -1e-8 * std::max(1.0, std::abs(top)))
    throw domain_error("vandermonde_decompose: matrix is indefinite");

  VandermondeResult r;
  r.rank = numerical_rank(e.values);
  if (r.rank == 0) return r;
  std::vector<int> gamma(n);
  for (int i = 0; i < n; ++i) gamma[i] = i;
  const DoaEstimate est = extract_doas(t_reg, gamma, r.rank, opts);
  r.z = est.z_hat;
  r.d = est.powers;
  return r;
}

// Reconstruction check for the structured corner: factor the irregular
// Toeplitz matrix of u through k nodes and report the relative residual.
struct IvdResult {
  CMat w_mat;             // probe matrix, entry (i, c) = z_c^{gamma_i}
  std::vector<double> d;  // nonnegative powers
  double residual = 0.0;  // ||T - W diag(d) W^H||_F / ||T||_F
  DoaEstimate est;
};

inline IvdResult ivd_reconstruct(const ToeplitzVector& u, const LiftingPlan& plan, int k,
                                 const ExtractOptions& opts = {}) {
  const CMat t = irregular_toep(u, plan);
  const auto e = hermitian_eig(t);
  const double top = e.values.empty() ? 0.0 : e.values.back();
  if (e.values.front() < -1e-8 * std::max(1.0, std::abs(top)))
    throw domain_error("ivd_reconstruct: structured matrix is indefinite");
  if (numerical_rank(e.values) > k)
    throw domain_error("ivd_reconstruct: matrix rank exceeds the requested atom count");

  IvdResult r;
  r.est = extract_doas(t, plan.u, k, opts);
  r.d = r.est.powers;
  const int n = plan.n_u();
  r.w_mat = CMat(n, k);
  for (int c = 0; c < k; ++c) {
    const double phi = std::arg(r.est.z_hat[c]);
    for (int i = 0; i < n; ++i) r.w_mat(i, c) = std::polar(1.0, phi * plan.u[i]);
  }
  CMat rec(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cx acc(0.0, 0.0);
      for (int c = 0; c < k; ++c) acc += r.d[c] * r.w_mat(i, c) * std::conj(r.w_mat(j, c));
      rec(i, j) = acc;
    }
  double diff = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) diff += std::norm(t(i, j) - rec(i, j));
  const double base = t.frobenius();
  r.residual = base > 0.0 ? std::sqrt(diff) / base : std::sqrt(diff);
  return r;
}

// Plot-friendly dump: angle_deg,null_spectrum rows over an inclusive angular
// sweep of (0, 180) endpoints.
inline void write_null_spectrum_csv(std::ostream& os, const CMat& t,
                                    const std::vector<int>& gamma, int k, int n_points = 2048) {
  if (n_points < 2) throw config_error("write_null_spectrum_csv: need at least two points");
  const EigenSplit split = eigen_split(t, k);
  os << "angle_deg,null_spectrum\n";
  for (int i = 0; i < n_points; ++i) {
    const double theta = 180.0 * i / (n_points - 1);
    const double w = std::cos(deg2rad(theta)) / 2.0;
    const double v = null_spectrum(split, gamma, std::polar(1.0, -2.0 * pi * w));
    os << theta << "," << v << "\n";
  }
}

}  // namespace mfdoa

#endif  // MFDOA_EXTRACTION_HPP

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

#ifndef MFDOA_CONIC_HPP
#define MFDOA_CONIC_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"
#include "eig.hpp"
#include "matrix.hpp"

namespace mfdoa {

// ---------------------------------------------------------------------------
// Standard-form conic program over a product of Hermitian PSD blocks and real
// free scalars:
//
//   minimize    <C, X>_R + c_free . t
//   subject to  <A_i, X>_R + a_i . t = b_i          (i = 1..m)
//               X_b positive semidefinite per block, t free in R^{n_free}
//
// where <A, X>_R = Re tr(A^H X). Every linear functional is stored sparsely:
// Hermitian entries on the upper triangle — an off-diagonal entry (i,j), i<j,
// with coefficient c contributes 2 Re(conj(c) X_ij); a diagonal entry must
// carry a real coefficient — plus real coefficients on the free scalars.
// Entries given below the diagonal are folded to (j,i) with the conjugate
// coefficient.
// ---------------------------------------------------------------------------

enum class SolveStatus { optimal, max_iter, infeasible_suspected };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::max_iter: return "max_iter";
    case SolveStatus::infeasible_suspected: return "infeasible_suspected";
  }
  return "unknown";
}

struct BlockEntry {
  int block = 0;
  int i = 0;
  int j = 0;
  cx coeff;
};

struct FreeEntry {
  int index = 0;
  double coeff = 0.0;
};

// One linear functional (the objective, or the left side of one constraint)
struct LinearTerm {
  std::vector<BlockEntry> entries;
  std::vector<FreeEntry> free_entries;
};

struct ConicProblem {
  std::vector<int> block_sizes;
  int n_free = 0;
  LinearTerm objective;
  std::vector<LinearTerm> constraints;
  std::vector<double> rhs;

  int n_constraints() const { return static_cast<int>(constraints.size()); }

  // Dimension of the real coordinate vector: n^2 per Hermitian block (n real
  // diagonal coordinates plus a (Re, Im) pair per off-diagonal entry above
  // the diagonal) plus the free scalars
  int vec_dim() const {
    int d = n_free;
    for (int n : block_sizes) d += n * n;
    return d;
  }
};

struct SolverOptions {
  double tol = 1e-7;             // stopping tolerance on the relative residuals
  int max_iter = 50000;
  double over_relaxation = 1.6;  // in (0, 2)
  double rho = 1.0;              // initial penalty; adapted during the run
  bool adaptive_rho = true;
  int check_every = 20;          // residual / stopping cadence, in iterations
};

// Residual conventions (operator-splitting standard):
//  * primal_residual = ||A(X) - b|| / max(1, ||b||) on the returned
//    cone-feasible X, in the original (unscaled) problem data;
//  * dual_residual = rho ||z_k - z_{k-1}|| / max(1, ||rho u_k||) in the
//    internally scaled problem, where z is the cone-projected iterate and u
//    the scaled dual iterate.
// status == optimal additionally requires the relative duality gap
// |objective - dual_objective| / (1 + |objective| + |dual_objective|) to be
// at most 10 * tol, which bounds the complementary-slackness defect.
struct ConicSolution {
  SolveStatus status = SolveStatus::max_iter;
  std::vector<CMat> blocks;       // cone-feasible primal blocks
  std::vector<double> free_vars;
  std::vector<double> dual;       // y, one multiplier per constraint
  std::vector<CMat> dual_slacks;  // C - A*(y) restricted to each block
  double objective = 0.0;         // <C, X>_R + c_free . t
  double dual_objective = 0.0;    // b . y
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
  double solve_seconds = 0.0;
};

namespace detail {

// Real coordinate layout of the product cone. Per block of size n: n diagonal
// coordinates X_00..X_{n-1,n-1}, then for each upper-triangle pair (i,j) in
// row-major order the pair (sqrt2 Re X_ij, sqrt2 Im X_ij); free scalars at
// the tail. The sqrt2 weighting makes the flattening an isometry, so
// Euclidean projection in coordinates equals Frobenius projection on blocks.
struct VecLayout {
  std::vector<int> sizes;
  std::vector<int> offsets;
  int psd_dim = 0;
  int n_free = 0;

  explicit VecLayout(const ConicProblem& p) : sizes(p.block_sizes), n_free(p.n_free) {
    for (int n : sizes) {
      if (n < 1) throw construction_error("conic: block sizes must be >= 1");
      offsets.push_back(psd_dim);
      psd_dim += n * n;
    }
    if (n_free < 0) throw construction_error("conic: negative free-variable count");
  }

  int dim() const { return psd_dim + n_free; }
  int pair_index(int n, int i, int j) const { return i * n - i * (i + 1) / 2 + (j - i - 1); }
  int diag_coord(int b, int i) const { return offsets[b] + i; }
  int re_coord(int b, int i, int j) const {
    return offsets[b] + sizes[b] + 2 * pair_index(sizes[b], i, j);
  }
  int free_coord(int k) const { return psd_dim + k; }
};

inline void unpack_block(const std::vector<double>& v, const VecLayout& lay, int b, CMat& out) {
  const int n = lay.sizes[b];
  out = CMat(n, n);
  const double inv_s2 = 1.0 / std::sqrt(2.0);
  int c = lay.offsets[b];
  for (int i = 0; i < n; ++i) out(i, i) = cx(v[c + i], 0.0);
  c += n;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const cx val(v[c] * inv_s2, v[c + 1] * inv_s2);
      out(i, j) = val;
      out(j, i) = std::conj(val);
      c += 2;
    }
}

inline void pack_block(const CMat& h, const VecLayout& lay, int b, std::vector<double>& v) {
  const int n = lay.sizes[b];
  const double s2 = std::sqrt(2.0);
  int c = lay.offsets[b];
  for (int i = 0; i < n; ++i) v[c + i] = h(i, i).real();
  c += n;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      v[c] = s2 * h(i, j).real();
      v[c + 1] = s2 * h(i, j).imag();
      c += 2;
    }
}

struct SparseVec {
  std::vector<int> idx;  // ascending, unique
  std::vector<double> val;
};

// Flatten one linear functional into real coordinates, validating indices and
// Hermitian structure; duplicate entries accumulate, exact zeros are dropped
inline SparseVec compile_term(const LinearTerm& t, const VecLayout& lay, const char* what) {
  std::vector<std::pair<int, double>> acc;
  const double s2 = std::sqrt(2.0);
  for (const BlockEntry& e : t.entries) {
    if (e.block < 0 || e.block >= static_cast<int>(lay.sizes.size()))
      throw construction_error(std::string(what) + ": block index out of range");
    const int n = lay.sizes[e.block];
    int i = e.i, j = e.j;
    cx c = e.coeff;
    if (i < 0 || i >= n || j < 0 || j >= n)
      throw construction_error(std::string(what) + ": entry index out of range");
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw construction_error(std::string(what) + ": non-finite coefficient");
    if (i > j) {
      std::swap(i, j);
      c = std::conj(c);
    }
    if (i == j) {
      if (std::abs(c.imag()) > 1e-12 * (1.0 + std::abs(c)))
        throw construction_error(std::string(what) + ": diagonal coefficient must be real");
      acc.push_back({lay.diag_coord(e.block, i), c.real()});
    } else {
      const int rc = lay.re_coord(e.block, i, j);
      acc.push_back({rc, s2 * c.real()});
      acc.push_back({rc + 1, s2 * c.imag()});
    }
  }
  for (const FreeEntry& e : t.free_entries) {
    if (e.index < 0 || e.index >= lay.n_free)
      throw construction_error(std::string(what) + ": free index out of range");
    if (!std::isfinite(e.coeff))
      throw construction_error(std::string(what) + ": non-finite coefficient");
    acc.push_back({lay.free_coord(e.index), e.coeff});
  }
  std::sort(acc.begin(), acc.end());
  SparseVec out;
  for (const auto& [k, v] : acc) {
    if (!out.idx.empty() && out.idx.back() == k)
      out.val.back() += v;
    else {
      out.idx.push_back(k);
      out.val.push_back(v);
    }
  }
  // drop exact cancellations
  SparseVec clean;
  for (std::size_t k = 0; k < out.idx.size(); ++k)
    if (out.val[k] != 0.0) {
      clean.idx.push_back(out.idx[k]);
      clean.val.push_back(out.val[k]);
    }
  return clean;
}

// Dense Cholesky of a symmetric positive definite matrix, with a relative
// pivot threshold used as the constraint-independence test
struct Cholesky {
  int n = 0;
  std::vector<double> a;  // row-major, lower triangle holds the factor

  bool factor(std::vector<double> g, int nn, double rel_tol) {
    n = nn;
    a = std::move(g);
    double max_diag = 0.0;
    for (int i = 0; i < n; ++i) max_diag = std::max(max_diag, a[static_cast<std::size_t>(i) * n + i]);
    const double thresh = rel_tol * std::max(1.0, max_diag);
    for (int j = 0; j < n; ++j) {
      double* rj = &a[static_cast<std::size_t>(j) * n];
      double d = rj[j];
      for (int k = 0; k < j; ++k) d -= rj[k] * rj[k];
      if (!(d > thresh)) return false;
      const double l = std::sqrt(d);
      rj[j] = l;
      for (int i = j + 1; i < n; ++i) {
        double* ri = &a[static_cast<std::size_t>(i) * n];
        double s = ri[j];
        for (int k = 0; k < j; ++k) s -= ri[k] * rj[k];
        ri[j] = s / l;
      }
    }
    return true;
  }

  void solve(std::vector<double>& x) const {
    for (int i = 0; i < n; ++i) {
      const double* ri = &a[static_cast<std::size_t>(i) * n];
      double s = x[i];
      for (int k = 0; k < i; ++k) s -= ri[k] * x[k];
      x[i] = s / ri[i];
    }
    for (int i = n - 1; i >= 0; --i) {
      double s = x[i];
      for (int k = i + 1; k < n; ++k) s -= a[static_cast<std::size_t>(k) * n + i] * x[k];
      x[i] = s / a[static_cast<std::size_t>(i) * n + i];
    }
  }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Operator-splitting solve. Splitting: f(x) = <c,x> + indicator{Ax = b},
// g(z) = indicator{product cone}. The x-update is an affine projection using
// one Cholesky factorization of A A^T (rows normalized, so the affine set —
// and hence the factorization — never depends on the penalty rho); the
// z-update projects each block onto the PSD cone and passes free scalars
// through; over-relaxation blends the two. Dual multipliers come from the
// x-update's KKT system, the dual slack from the scaled dual iterate. The
// run is deterministic: fixed iteration order, no randomness.
// ---------------------------------------------------------------------------
inline ConicSolution solve(const ConicProblem& prob, const SolverOptions& opts = {}) {
  const auto t_start = std::chrono::steady_clock::now();
  if (prob.rhs.size() != prob.constraints.size())
    throw construction_error("conic: rhs length differs from constraint count");
  if (!(opts.tol > 0) || opts.max_iter < 1 || opts.check_every < 1)
    throw config_error("conic: bad solver options");
  if (!(opts.over_relaxation > 0 && opts.over_relaxation < 2))
    throw config_error("conic: over-relaxation must lie in (0, 2)");
  if (!(opts.rho > 0)) throw config_error("conic: penalty must be positive");

  const detail::VecLayout lay(prob);
  const int d = lay.dim();
  const int m = prob.n_constraints();
  const int n_blocks = static_cast<int>(lay.sizes.size());

  // objective, flattened dense
  std::vector<double> cvec(d, 0.0);
  {
    const detail::SparseVec c = detail::compile_term(prob.objective, lay, "conic objective");
    for (std::size_t k = 0; k < c.idx.size(); ++k) cvec[c.idx[k]] = c.val[k];
  }

  // constraints: flatten, normalize rows to unit norm, then scale the right
  // side once more so its overall norm is moderate (cone programs scale
  // linearly in b, so this is undone exactly on the way out)
  std::vector<detail::SparseVec> rows(m);
  std::vector<double> row_scale(m, 1.0), bt(m, 0.0);
  double bnorm_orig = 0.0, bnorm1 = 0.0;
  for (int i = 0; i < m; ++i) {
    rows[i] = detail::compile_term(prob.constraints[i], lay, "conic constraint");
    if (!std::isfinite(prob.rhs[i]))
      throw construction_error("conic: non-finite right-hand side");
    double nrm = 0.0;
    for (double v : rows[i].val) nrm += v * v;
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) throw construction_error("conic: zero constraint row");
    row_scale[i] = nrm;
    for (double& v : rows[i].val) v /= nrm;
    bt[i] = prob.rhs[i] / nrm;
    bnorm_orig += prob.rhs[i] * prob.rhs[i];
    bnorm1 += bt[i] * bt[i];
  }
  bnorm_orig = std::sqrt(bnorm_orig);
  bnorm1 = std::sqrt(bnorm1);
  const double sigma_b = 1.0 / std::max(1.0, bnorm1);
  for (double& v : bt) v *= sigma_b;
  const double bt_norm = sigma_b * bnorm1;

  double cnorm = 0.0;
  for (double v : cvec) cnorm += v * v;
  cnorm = std::sqrt(cnorm);
  const double sigma_c = 1.0 / std::max(1.0, cnorm);
  std::vector<double> ct(cvec);
  for (double& v : ct) v *= sigma_c;

  // Gram matrix A A^T of the normalized rows, accumulated column-wise
  detail::Cholesky chol;
  if (m > 0) {
    std::vector<std::vector<std::pair<int, double>>> cols(d);
    for (int i = 0; i < m; ++i)
      for (std::size_t k = 0; k < rows[i].idx.size(); ++k)
        cols[rows[i].idx[k]].push_back({i, rows[i].val[k]});
    std::vector<double> gram(static_cast<std::size_t>(m) * m, 0.0);
    for (int c = 0; c < d; ++c)
      for (std::size_t a = 0; a < cols[c].size(); ++a)
        for (std::size_t b = a; b < cols[c].size(); ++b)
          gram[static_cast<std::size_t>(cols[c][a].first) * m + cols[c][b].first] +=
              cols[c][a].second * cols[c][b].second;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < i; ++j)
        gram[static_cast<std::size_t>(i) * m + j] = gram[static_cast<std::size_t>(j) * m + i];
    if (!chol.factor(std::move(gram), m, 1e-10))
      throw construction_error(
          "conic: constraint rows linearly dependent (rank tolerance 1e-10)");
  }

  // iteration state
  std::vector<double> x(d, 0.0), z(d, 0.0), u(d, 0.0), zp(d, 0.0), v(d, 0.0);
  std::vector<double> w(m, 0.0), r(m, 0.0);
  double rho = opts.rho;
  const double alpha = opts.over_relaxation;

  auto a_apply = [&](const std::vector<double>& in, std::vector<double>& out) {
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      const detail::SparseVec& rw = rows[i];
      for (std::size_t k = 0; k < rw.idx.size(); ++k) s += rw.val[k] * in[rw.idx[k]];
      out[i] = s;
    }
  };

  SolveStatus status = SolveStatus::max_iter;
  double pri_un = 0.0, dua = 0.0;
  std::vector<double> stall_hist;
  CMat hblk;
  int iters_done = 0;
  int last_adapt = 0;

  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    iters_done = iter;
    // x-step: project z - u - c/rho onto the affine set {A x = b}
    for (int k = 0; k < d; ++k) v[k] = z[k] - u[k] - ct[k] / rho;
    if (m > 0) {
      a_apply(v, r);
      for (int i = 0; i < m; ++i) r[i] -= bt[i];
      w = r;
      chol.solve(w);
      x = v;
      for (int i = 0; i < m; ++i) {
        const double wi = w[i];
        if (wi == 0.0) continue;
        const detail::SparseVec& rw = rows[i];
        for (std::size_t k = 0; k < rw.idx.size(); ++k) x[rw.idx[k]] -= rw.val[k] * wi;
      }
    } else {
      x = v;
    }

    // over-relaxed target for the cone step: v := alpha x + (1-alpha) z + u
    for (int k = 0; k < d; ++k) v[k] = alpha * x[k] + (1.0 - alpha) * z[k] + u[k];
    zp.swap(z);
    for (int b = 0; b < n_blocks; ++b) {
      detail::unpack_block(v, lay, b, hblk);
      detail::pack_block(psd_project(hblk), lay, b, z);
    }
    for (int k = lay.psd_dim; k < d; ++k) z[k] = v[k];
    // scaled dual update; on free coordinates v == z keeps u at exactly zero
    for (int k = 0; k < d; ++k) u[k] = v[k] - z[k];

    if (iter % opts.check_every != 0 && iter != opts.max_iter) continue;

    // primal residual, scaled and unscaled
    double rs = 0.0, run = 0.0;
    if (m > 0) {
      a_apply(z, r);
      for (int i = 0; i < m; ++i) {
        const double ri = r[i] - bt[i];
        rs += ri * ri;
        const double riu = row_scale[i] * ri / sigma_b;
        run += riu * riu;
      }
    }
    const double pri_s = std::sqrt(rs) / std::max(1.0, bt_norm);
    pri_un = std::sqrt(run) / std::max(1.0, bnorm_orig);

    // dual residual (operator-splitting convention)
    double dz = 0.0, un = 0.0;
    for (int k = 0; k < d; ++k) {
      const double e = z[k] - zp[k];
      dz += e * e;
      un += u[k] * u[k];
    }
    dua = rho * std::sqrt(dz) / std::max(1.0, rho * std::sqrt(un));

    // duality gap on the unscaled data
    double p_obj = 0.0;
    for (int k = 0; k < d; ++k) p_obj += cvec[k] * z[k];
    p_obj /= sigma_b;
    double d_obj = 0.0;
    for (int i = 0; i < m; ++i) d_obj += prob.rhs[i] * (-rho * w[i]) / (row_scale[i] * sigma_c);
    const double gap_rel = std::abs(p_obj - d_obj) / (1.0 + std::abs(p_obj) + std::abs(d_obj));

    if (pri_s <= opts.tol && pri_un <= opts.tol && dua <= opts.tol &&
        gap_rel <= 10.0 * opts.tol) {
      status = SolveStatus::optimal;
      break;
    }

    // plateau heuristic: residuals that stop improving far from tolerance
    // indicate an infeasible (or pathological) instance
    stall_hist.push_back(std::max(pri_s, dua));
    const std::size_t window = 100;
    if (iter >= 5000 && stall_hist.size() >= 2 * window) {
      double recent = stall_hist.back(), older = stall_hist.front();
      for (std::size_t k = stall_hist.size() - window; k < stall_hist.size(); ++k)
        recent = std::min(recent, stall_hist[k]);
      for (std::size_t k = 0; k + window < stall_hist.size(); ++k)
        older = std::min(older, stall_hist[k]);
      if (recent > 0.99 * older && recent > 100.0 * opts.tol) {
        status = SolveStatus::infeasible_suspected;
        break;
      }
    }

    // penalty adaptation by residual balancing; the affine projection is
    // rho-independent, so no refactorization is needed — only the scaled
    // dual variable is rescaled to keep rho * u invariant.  Each change
    // perturbs the iterate, so adaptations are spaced at least ten checks
    // apart: back-to-back flips can otherwise lock into an oscillation that
    // keeps the residuals from ever entering the tolerance region
    if (opts.adaptive_rho && iter - last_adapt >= 10 * opts.check_every) {
      if (pri_s > 10.0 * dua && rho < 1e6) {
        rho *= 2.0;
        for (double& uk : u) uk *= 0.5;
        last_adapt = iter;
      } else if (dua > 10.0 * pri_s && rho > 1e-6) {
        rho *= 0.5;
        for (double& uk : u) uk *= 2.0;
        last_adapt = iter;
      }
    }
  }

  // unscale and package
  ConicSolution sol;
  sol.status = status;
  sol.iterations = iters_done;
  std::vector<double> xun(d);
  for (int k = 0; k < d; ++k) xun[k] = z[k] / sigma_b;
  sol.blocks.resize(n_blocks);
  for (int b = 0; b < n_blocks; ++b) detail::unpack_block(xun, lay, b, sol.blocks[b]);
  sol.free_vars.assign(xun.begin() + lay.psd_dim, xun.end());
  sol.dual.resize(m);
  for (int i = 0; i < m; ++i) sol.dual[i] = (-rho * w[i]) / (row_scale[i] * sigma_c);
  // dual slack C - A*(y) in coordinates, then per block
  std::vector<double> slack(cvec);
  for (int i = 0; i < m; ++i) {
    const double yi = sol.dual[i] * row_scale[i];  // back to the original rows
    if (yi == 0.0) continue;
    const detail::SparseVec& rw = rows[i];
    for (std::size_t k = 0; k < rw.idx.size(); ++k) slack[rw.idx[k]] -= rw.val[k] * yi;
  }
  sol.dual_slacks.resize(n_blocks);
  for (int b = 0; b < n_blocks; ++b) detail::unpack_block(slack, lay, b, sol.dual_slacks[b]);
  double p_obj = 0.0;
  for (int k = 0; k < d; ++k) p_obj += cvec[k] * xun[k];
  sol.objective = p_obj;
  double d_obj = 0.0;
  for (int i = 0; i < m; ++i) d_obj += prob.rhs[i] * sol.dual[i];
  sol.dual_objective = d_obj;
  sol.primal_residual = pri_un;
  sol.dual_residual = dua;
  sol.solve_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return sol;
}

// ---------------------------------------------------------------------------
// Problem dump / load, a plain-text round-trippable format for debugging
// against external solvers:
//
//   mfdoa-conic-v1
//   blocks <K> <n_1> ... <n_K>
//   free <F>
//   objective <#entries> <#free-entries>
//   e <block> <i> <j> <re> <im>     (one line per entry)
//   f <index> <coeff>               (one line per free entry)
//   constraints <M>
//   constraint <b_i> <#entries> <#free-entries>
//   ... entry / free lines as above ...
//   end
// ---------------------------------------------------------------------------

inline void dump_problem(std::ostream& os, const ConicProblem& p) {
  os << std::setprecision(17);
  os << "mfdoa-conic-v1\n";
  os << "blocks " << p.block_sizes.size();
  for (int n : p.block_sizes) os << ' ' << n;
  os << "\nfree " << p.n_free << '\n';
  auto put_term = [&os](const LinearTerm& t) {
    for (const BlockEntry& e : t.entries)
      os << "e " << e.block << ' ' << e.i << ' ' << e.j << ' ' << e.coeff.real() << ' '
         << e.coeff.imag() << '\n';
    for (const FreeEntry& e : t.free_entries) os << "f " << e.index << ' ' << e.coeff << '\n';
  };
  os << "objective " << p.objective.entries.size() << ' ' << p.objective.free_entries.size()
     << '\n';
  put_term(p.objective);
  os << "constraints " << p.constraints.size() << '\n';
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    os << "constraint " << p.rhs[i] << ' ' << p.constraints[i].entries.size() << ' '
       << p.constraints[i].free_entries.size() << '\n';
    put_term(p.constraints[i]);
  }
  os << "end\n";
}

namespace detail {

inline void expect_token(std::istream& is, const char* token) {
  std::string got;
  if (!(is >> got) || got != token)
    throw construction_error(std::string("conic load: expected '") + token + "', got '" + got +
                             "'");
}

inline LinearTerm read_term(std::istream& is, std::size_t n_entries, std::size_t n_free) {
  LinearTerm t;
  for (std::size_t k = 0; k < n_entries; ++k) {
    expect_token(is, "e");
    BlockEntry e;
    double re = 0, im = 0;
    if (!(is >> e.block >> e.i >> e.j >> re >> im))
      throw construction_error("conic load: malformed entry line");
    e.coeff = cx(re, im);
    t.entries.push_back(e);
  }
  for (std::size_t k = 0; k < n_free; ++k) {
    expect_token(is, "f");
    FreeEntry e;
    if (!(is >> e.index >> e.coeff))
      throw construction_error("conic load: malformed free-entry line");
    t.free_entries.push_back(e);
  }
  return t;
}

}  // namespace detail

inline ConicProblem load_problem(std::istream& is) {
  detail::expect_token(is, "mfdoa-conic-v1");
  ConicProblem p;
  detail::expect_token(is, "blocks");
  std::size_t n_blocks = 0;
  if (!(is >> n_blocks)) throw construction_error("conic load: malformed block count");
  for (std::size_t k = 0; k < n_blocks; ++k) {
    int n = 0;
    if (!(is >> n)) throw construction_error("conic load: malformed block size");
    p.block_sizes.push_back(n);
  }
  detail::expect_token(is, "free");
  if (!(is >> p.n_free)) throw construction_error("conic load: malformed free count");
  detail::expect_token(is, "objective");
  std::size_t ne = 0, nf = 0;
  if (!(is >> ne >> nf)) throw construction_error("conic load: malformed objective header");
  p.objective = detail::read_term(is, ne, nf);
  detail::expect_token(is, "constraints");
  std::size_t mcount = 0;
  if (!(is >> mcount)) throw construction_error("conic load: malformed constraint count");
  for (std::size_t i = 0; i < mcount; ++i) {
    detail::expect_token(is, "constraint");
    double b = 0;
    if (!(is >> b >> ne >> nf))
      throw construction_error("conic load: malformed constraint header");
    p.rhs.push_back(b);
    p.constraints.push_back(detail::read_term(is, ne, nf));
  }
  detail::expect_token(is, "end");
  return p;
}

}  // namespace mfdoa

#endif  // MFDOA_CONIC_HPP

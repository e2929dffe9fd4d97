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

#ifndef MFDOA_FORMULATIONS_HPP
#define MFDOA_FORMULATIONS_HPP

// Semidefinite programs for gridless multi-frequency line-spectrum recovery.
//
// Two primal forms share one layout: a single Hermitian PSD block
//
//     [ T    Ytilde ]
//     [ *    W      ]
//
// whose upper-left corner is tied to a Hermitian Toeplitz structure (entries
// on a common diagonal offset are forced equal), whose off-diagonal block is
// pinned to the measurements at lifted row positions, and whose objective is
// the weighted trace (diag(T) / (2 ts) + diag(W) / 2, with ts the corner
// size).  That weighting makes the program the exact convex partner of the
// dual form below: the two optimal values coincide, which the tests use as a
// cross-solver correctness oracle.  (An unweighted whole-block trace reaches
// the same minimizer support -- the substitution T -> c T, W -> W / c is a
// feasibility-preserving bijection that leaves the data block untouched --
// but scales the optimal value by 2 sqrt(ts), breaking the value-matching
// oracle.)  The "fast" form works in the compact product coordinate set and
// exists for any geometry; the "full" form works on the complete lifted grid
// and requires gap-free sensor and frequency sets.
//
// The matching dual forms use a block
//
//     [ P0      Qtilde ]
//     [ *       I      ]
//
// with a delta trace pattern on P0 (diagonal sums vanish except offset zero,
// which sums to one), identity pins on the lower-right corner, zero pins on
// padded rows of Qtilde, and objective <C,G> = -Re<Q,Y> so that the reported
// dual value is the negated solver optimum.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "mfdoa/common.hpp"
#include "mfdoa/conic.hpp"
#include "mfdoa/eig.hpp"
#include "mfdoa/lifting.hpp"
#include "mfdoa/matrix.hpp"
#include "mfdoa/model.hpp"

namespace mfdoa {

// Which coordinate set a program was built in.
enum class SdpForm { fast, full };

// Solved primal block, split into its structured pieces.
struct PrimalSdpResult {
  ToeplitzVector u;  // per-offset average of the structured corner; mask
                     // marks offsets that actually appear there
  CMat t_mat;        // structured upper-left corner as solved
  CMat y_tilde;      // lifted data block (rows x (n_freqs * n_snapshots))
  CMat w_mat;        // lower-right Gram corner
  double objective = 0.0;  // weighted-trace optimum; equals the matching
                           // dual program's value at convergence
  ConicSolution solution;  // full solver output for diagnostics
};

// Solved dual block, split into multiplier slices.
struct DualCertificate {
  std::vector<CMat> q;  // per frequency: n_sensors x n_snapshots multiplier
  CMat p0;              // upper-left Hermitian block
  double objective = 0.0;  // Re<Q,Y> at the optimum (= negated solver value)
  ConicSolution solution;
};

namespace detail {

// Pairs (i, j), i < j, of positions in gamma sharing each diagonal offset
// gamma[j] - gamma[i]; bucket index is the offset value.
inline std::vector<std::vector<std::pair<int, int>>> pairs_by_offset(
    const std::vector<int>& gamma, int n_offsets) {
  std::vector<std::vector<std::pair<int, int>>> buckets(n_offsets);
  const int n = static_cast<int>(gamma.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) buckets[gamma[j] - gamma[i]].push_back({i, j});
  return buckets;
}

inline void check_tensor_shape(const MeasurementTensor& y, const LiftingPlan& plan) {
  const auto& g = plan.geometry;
  if (y.geometry.sensors() != g.sensors() || y.geometry.freqs() != g.freqs())
    throw dim_error("sdp build: measurement geometry differs from plan geometry");
  if (static_cast<int>(y.slices.size()) != g.n_freqs())
    throw dim_error("sdp build: frequency slice count mismatch");
  const int nl = y.n_l();
  if (nl < 1) throw dim_error("sdp build: measurement tensor has no snapshots");
  for (const auto& s : y.slices) {
    if (static_cast<int>(s.rows()) != g.n_sensors() || static_cast<int>(s.cols()) != nl)
      throw dim_error("sdp build: slice shape mismatch");
    if (!s.all_finite()) throw numeric_error("sdp build: measurement tensor not finite");
  }
}

// Equality chains forcing all entries of the upper-left ts x ts corner that
// share one diagonal offset to a common value.  Row conventions: a diagonal
// entry with coefficient c contributes c * X_ii; an off-diagonal entry with
// coefficient c contributes 2 Re(conj(c) X_ij).  So (1, -1) chains the real
// diagonal and (1/2, -1/2) / (i/2, -i/2) chain real/imaginary parts of
// off-diagonal entries.
inline void add_toeplitz_ties(ConicProblem& p, const std::vector<int>& gamma,
                              int n_offsets) {
  const int n = static_cast<int>(gamma.size());
  for (int i = 0; i + 1 < n; ++i) {
    LinearTerm t;
    t.entries.push_back({0, i, i, cx(1.0, 0.0)});
    t.entries.push_back({0, i + 1, i + 1, cx(-1.0, 0.0)});
    p.constraints.push_back(std::move(t));
    p.rhs.push_back(0.0);
  }
  const auto buckets = pairs_by_offset(gamma, n_offsets);
  for (const auto& pairs : buckets) {
    for (std::size_t t = 0; t + 1 < pairs.size(); ++t) {
      LinearTerm re, im;
      re.entries.push_back({0, pairs[t].first, pairs[t].second, cx(0.5, 0.0)});
      re.entries.push_back({0, pairs[t + 1].first, pairs[t + 1].second, cx(-0.5, 0.0)});
      im.entries.push_back({0, pairs[t].first, pairs[t].second, cx(0.0, 0.5)});
      im.entries.push_back({0, pairs[t + 1].first, pairs[t + 1].second, cx(0.0, -0.5)});
      p.constraints.push_back(std::move(re));
      p.rhs.push_back(0.0);
      p.constraints.push_back(std::move(im));
      p.rhs.push_back(0.0);
    }
  }
}

// Pin the complex entry (r, c) of block 0 to a value (two real rows).
inline void add_entry_pin(ConicProblem& p, int r, int c, cx value) {
  if (r == c) {
    LinearTerm d;
    d.entries.push_back({0, r, r, cx(1.0, 0.0)});
    p.constraints.push_back(std::move(d));
    p.rhs.push_back(value.real());
    return;
  }
  LinearTerm re, im;
  re.entries.push_back({0, r, c, cx(0.5, 0.0)});
  im.entries.push_back({0, r, c, cx(0.0, 0.5)});
  p.constraints.push_back(std::move(re));
  p.rhs.push_back(value.real());
  p.constraints.push_back(std::move(im));
  p.rhs.push_back(value.imag());
}

// Shared primal assembly: ts is the structured corner size, row_map gives the
// corner row holding sensor mi of frequency slice fi.
inline ConicProblem build_primal(const MeasurementTensor& y, const LiftingPlan& plan,
                                 int ts, const std::vector<int>& gamma,
                                 const std::vector<std::vector<int>>& row_map) {
  check_tensor_shape(y, plan);
  const int nf = plan.geometry.n_freqs();
  const int nl = y.n_l();
  const int bs = ts + nf * nl;
  ConicProblem p;
  p.block_sizes = {bs};
  const double corner_w = 0.5 / ts;
  for (int i = 0; i < ts; ++i) p.objective.entries.push_back({0, i, i, cx(corner_w, 0.0)});
  for (int i = ts; i < bs; ++i) p.objective.entries.push_back({0, i, i, cx(0.5, 0.0)});
  add_toeplitz_ties(p, gamma, plan.n_total);
  for (int fi = 0; fi < nf; ++fi)
    for (int mi = 0; mi < plan.geometry.n_sensors(); ++mi)
      for (int l = 0; l < nl; ++l)
        add_entry_pin(p, row_map[fi][mi], ts + fi * nl + l, y.slices[fi](mi, l));
  return p;
}

// Shared dual assembly.  trace_rows(k) returns the entry list of the trace
// pattern at offset k (empty when the offset never occurs in the corner).
inline ConicProblem build_dual(const MeasurementTensor& y, const LiftingPlan& plan,
                               int ts, const std::vector<int>& gamma,
                               const std::vector<std::vector<int>>& row_map) {
  check_tensor_shape(y, plan);
  const int nf = plan.geometry.n_freqs();
  const int nm = plan.geometry.n_sensors();
  const int nl = y.n_l();
  const int bs = ts + nf * nl;
  ConicProblem p;
  p.block_sizes = {bs};

  // objective: <C,G> = -Re<Q,Y> with C supported on the lifted data entries
  for (int fi = 0; fi < nf; ++fi)
    for (int mi = 0; mi < nm; ++mi)
      for (int l = 0; l < nl; ++l) {
        const cx v = y.slices[fi](mi, l);
        if (v != cx(0.0, 0.0))
          p.objective.entries.push_back({0, row_map[fi][mi], ts + fi * nl + l, -0.5 * v});
      }

  // delta trace pattern on the upper-left corner
  {
    LinearTerm diag;
    for (int i = 0; i < static_cast<int>(gamma.size()); ++i)
      diag.entries.push_back({0, i, i, cx(1.0, 0.0)});
    p.constraints.push_back(std::move(diag));
    p.rhs.push_back(1.0);
  }
  const auto buckets = pairs_by_offset(gamma, plan.n_total);
  for (const auto& pairs : buckets) {
    if (pairs.empty()) continue;
    LinearTerm re, im;
    for (const auto& pr : pairs) {
      re.entries.push_back({0, pr.first, pr.second, cx(0.5, 0.0)});
      im.entries.push_back({0, pr.first, pr.second, cx(0.0, 0.5)});
    }
    p.constraints.push_back(std::move(re));
    p.rhs.push_back(0.0);
    p.constraints.push_back(std::move(im));
    p.rhs.push_back(0.0);
  }

  // lower-right corner pinned to the identity
  for (int c = 0; c < nf * nl; ++c)
    for (int c2 = c; c2 < nf * nl; ++c2)
      add_entry_pin(p, ts + c, ts + c2, c == c2 ? cx(1.0, 0.0) : cx(0.0, 0.0));

  // padded rows of each frequency column block pinned to zero
  for (int fi = 0; fi < nf; ++fi) {
    std::vector<char> lifted(ts, 0);
    for (int mi = 0; mi < nm; ++mi) lifted[row_map[fi][mi]] = 1;
    for (int r = 0; r < ts; ++r)
      if (!lifted[r])
        for (int l = 0; l < nl; ++l)
          add_entry_pin(p, r, ts + fi * nl + l, cx(0.0, 0.0));
  }
  return p;
}

inline std::vector<int> full_gamma(int n) {
  std::vector<int> g(n);
  std::iota(g.begin(), g.end(), 0);
  return g;
}

}  // namespace detail

// Compact-coordinate primal: corner indexed by the product set, Toeplitz ties
// only over offsets that occur there, data pinned at compact row positions.
// Rows of the lifted data block that carry no measurement stay free.
inline ConicProblem build_fast_primal(const MeasurementTensor& y, const LiftingPlan& plan) {
  return detail::build_primal(y, plan, plan.n_u(), plan.u, plan.rows_compact);
}

// Full-grid primal: corner indexed by the complete lifted range, ties over all
// offsets.  Requires gap-free sensor and frequency index sets.
inline ConicProblem build_full_primal(const MeasurementTensor& y, const LiftingPlan& plan) {
  if (!plan.geometry.is_uniform())
    throw unsupported_error("build_full_primal: gap-free sensor and frequency sets required");
  return detail::build_primal(y, plan, plan.n_total, detail::full_gamma(plan.n_total),
                              plan.rows_full);
}

// Full-grid dual with the delta trace pattern over every offset.
inline ConicProblem build_dual_uniform(const MeasurementTensor& y, const LiftingPlan& plan) {
  if (!plan.geometry.is_uniform())
    throw unsupported_error("build_dual_uniform: gap-free sensor and frequency sets required");
  return detail::build_dual(y, plan, plan.n_total, detail::full_gamma(plan.n_total),
                            plan.rows_full);
}

// Compact-coordinate dual: trace pattern runs over equal-offset entry classes
// of the product set, so unrealized offsets contribute no constraint.
inline ConicProblem build_dual_fast(const MeasurementTensor& y, const LiftingPlan& plan) {
  return detail::build_dual(y, plan, plan.n_u(), plan.u, plan.rows_compact);
}

// Split a solved primal block into its structured pieces and read the
// Toeplitz vector back by averaging equal-offset entries of the corner.
inline PrimalSdpResult extract_primal(const ConicSolution& sol, const LiftingPlan& plan,
                                      SdpForm form) {
  if (sol.blocks.size() != 1) throw dim_error("extract_primal: expected one block");
  const CMat& g = sol.blocks[0];
  const int ts = form == SdpForm::fast ? plan.n_u() : plan.n_total;
  const int bs = static_cast<int>(g.rows());
  if (bs <= ts) throw dim_error("extract_primal: block too small for corner split");
  const int ws = bs - ts;

  PrimalSdpResult r;
  r.t_mat = g.block(0, 0, ts, ts);
  r.y_tilde = g.block(0, ts, ts, ws);
  r.w_mat = g.block(ts, ts, ws, ws);
  r.objective = sol.objective;
  r.solution = sol;

  const std::vector<int> gamma =
      form == SdpForm::fast ? plan.u : detail::full_gamma(plan.n_total);
  r.u.u.assign(plan.n_total, cx(0.0, 0.0));
  r.u.mask.assign(plan.n_total, 0);
  double d = 0.0;
  for (int i = 0; i < ts; ++i) d += r.t_mat(i, i).real();
  r.u.u[0] = cx(d / ts, 0.0);
  r.u.mask[0] = 1;
  const auto buckets = detail::pairs_by_offset(gamma, plan.n_total);
  for (int k = 1; k < plan.n_total; ++k) {
    if (buckets[k].empty()) continue;
    cx sum(0.0, 0.0);
    for (const auto& pr : buckets[k]) sum += r.t_mat(pr.first, pr.second);
    r.u.u[k] = sum / static_cast<double>(buckets[k].size());
    r.u.mask[k] = 1;
  }
  return r;
}

// Read the dual multipliers back out of a solved dual block: the per-frequency
// slices live at the lifted row positions of the off-diagonal corner.
inline DualCertificate extract_dual(const ConicSolution& sol, const LiftingPlan& plan,
                                    SdpForm form) {
  if (sol.blocks.size() != 1) throw dim_error("extract_dual: expected one block");
  const CMat& g = sol.blocks[0];
  const int ts = form == SdpForm::fast ? plan.n_u() : plan.n_total;
  const int bs = static_cast<int>(g.rows());
  const int nf = plan.geometry.n_freqs();
  const int nm = plan.geometry.n_sensors();
  if (bs <= ts || (bs - ts) % nf != 0)
    throw dim_error("extract_dual: block size inconsistent with corner split");
  const int nl = (bs - ts) / nf;
  const auto& row_map = form == SdpForm::fast ? plan.rows_compact : plan.rows_full;

  DualCertificate d;
  d.p0 = g.block(0, 0, ts, ts);
  d.objective = -sol.objective;
  d.solution = sol;
  for (int fi = 0; fi < nf; ++fi) {
    CMat qf(nm, nl);
    for (int mi = 0; mi < nm; ++mi)
      for (int l = 0; l < nl; ++l) qf(mi, l) = g(row_map[fi][mi], ts + fi * nl + l);
    d.q.push_back(std::move(qf));
  }
  return d;
}

// Vector dual polynomial evaluated at one point of the cosine variable.
struct DualPolyValue {
  CMat psi;        // n_freqs x n_snapshots matrix of inner products
  double frob = 0.0;  // Frobenius norm of psi
  double r_w = 0.0;   // 1 - frob^2; nonnegative across the circle at a
                      // feasible dual point
};

// Evaluate psi(fi, l) = q_f(:, l)^H a(f, w) for every frequency.  The value is
// computed twice -- directly on the physical rows and through the zero-padded
// lifted rows -- and the two paths are required to agree, which guards the
// row bookkeeping of the lifting tables.
inline DualPolyValue dual_polynomial(const std::vector<CMat>& q, double w,
                                     const LiftingPlan& plan) {
  const auto& g = plan.geometry;
  const int nf = g.n_freqs();
  const int nm = g.n_sensors();
  if (static_cast<int>(q.size()) != nf)
    throw dim_error("dual_polynomial: one multiplier slice per frequency required");
  const int nl = static_cast<int>(q[0].cols());
  for (const auto& s : q)
    if (static_cast<int>(s.rows()) != nm || static_cast<int>(s.cols()) != nl)
      throw dim_error("dual_polynomial: multiplier slice shape mismatch");

  DualPolyValue out;
  out.psi = CMat(nf, nl);
  CMat lifted_psi(nf, nl);
  std::vector<cx> zpow(plan.n_total);
  for (int r = 0; r < plan.n_total; ++r)
    zpow[r] = std::polar(1.0, -2.0 * pi * w * r);
  double qn = 0.0;
  for (int fi = 0; fi < nf; ++fi) {
    const auto a = manifold_vector(g, g.freqs()[fi], w);
    const CMat lifted = lift_R(plan, q[fi], g.freqs()[fi]);
    for (int l = 0; l < nl; ++l) {
      cx direct(0.0, 0.0), via_lift(0.0, 0.0);
      for (int mi = 0; mi < nm; ++mi) direct += std::conj(q[fi](mi, l)) * a[mi];
      for (int r = 0; r < plan.n_total; ++r)
        via_lift += std::conj(lifted(r, l)) * zpow[r];
      out.psi(fi, l) = direct;
      lifted_psi(fi, l) = via_lift;
    }
    qn += q[fi].frobenius() * q[fi].frobenius();
  }
  double diff = 0.0;
  for (int fi = 0; fi < nf; ++fi)
    for (int l = 0; l < nl; ++l) diff = std::max(diff, std::abs(out.psi(fi, l) - lifted_psi(fi, l)));
  if (diff > 1e-9 * (1.0 + std::sqrt(qn)))
    throw numeric_error("dual_polynomial: direct and lifted evaluations disagree");
  out.frob = out.psi.frobenius();
  out.r_w = 1.0 - out.frob * out.frob;
  return out;
}

// Solve the compact primal and its dual on one instance and return the
// relative objective gap |p - d| / max(1, |p|).  Guarded to small corners so
// both solves stay cheap at the tight tolerance used here.
inline double verify_duality_gap(const MeasurementTensor& y, const LiftingPlan& plan,
                                 double tol = 1e-8) {
  if (plan.n_u() > 12)
    throw config_error("verify_duality_gap: compact dimension above 12 not supported");
  SolverOptions opts;
  opts.tol = tol;
  const ConicSolution ps = solve(build_fast_primal(y, plan), opts);
  const ConicSolution ds = solve(build_dual_fast(y, plan), opts);
  if (ps.status == SolveStatus::infeasible_suspected || ds.status == SolveStatus::infeasible_suspected)
    throw numeric_error("verify_duality_gap: solver flagged an infeasibility plateau");
  const double p = ps.objective;
  const double d = -ds.objective;
  return std::abs(p - d) / std::max(1.0, std::abs(p));
}

// Outcome of the exact-recovery rank probe.
struct RankTestResult {
  int rank = 0;        // numerical rank of the solved Toeplitz corner
  int k = 0;           // number of sources in the probed set
  double lambda_max = 0.0;
};

// Noise-free single-snapshot probe on a gap-free geometry: synthesize, solve
// the full-grid primal, and count significant eigenvalues of the Toeplitz
// matrix rebuilt from the averaged readout.  Exact recovery shows up as
// rank == k.
inline RankTestResult atomic_l0_ranktest(const SourceSet& sources, const LiftingPlan& plan,
                                         std::uint64_t seed = 0, double tol = 1e-8) {
  const auto& g = plan.geometry;
  if (!g.is_uniform())
    throw unsupported_error("atomic_l0_ranktest: gap-free sensor and frequency sets required");
  if (sources.k() > plan.n_total - 1)
    throw config_error("atomic_l0_ranktest: too many sources for the lifted length");
  for (int i = 0; i < sources.k(); ++i)
    for (int j = i + 1; j < sources.k(); ++j)
      if (std::abs(sources.w[i] - sources.w[j]) < 1e-12)
        throw config_error("atomic_l0_ranktest: coincident source nodes");

  SourceSet copy = sources;
  const MeasurementTensor y = synthesize(g, copy, 1, {}, seed);
  SolverOptions opts;
  opts.tol = tol;
  const ConicSolution sol = solve(build_full_primal(y, plan), opts);
  const PrimalSdpResult pr = extract_primal(sol, plan, SdpForm::full);
  const auto eig = hermitian_eig(toep(pr.u.u));

  RankTestResult r;
  r.k = sources.k();
  r.lambda_max = eig.values.empty() ? 0.0 : eig.values.back();
  r.rank = numerical_rank(eig.values);
  return r;
}

}  // namespace mfdoa

#endif  // MFDOA_FORMULATIONS_HPP

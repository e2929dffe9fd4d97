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

#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "helpers.hpp"
#include "mfdoa/eig.hpp"
#include "mfdoa/lifting.hpp"
#include "mfdoa/model.hpp"

using namespace mfdoa;
using Catch::Matchers::WithinAbs;

namespace {

CMat random_cmat(int r, int c, Rng& rng) {
  CMat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = rng.cgaussian();
  return m;
}

}  // namespace

TEST_CASE("lifting plan - row maps and offset bookkeeping", "[lifting]") {
  // uniform 4 sensors x 2 frequencies: N = 7, U = {0,1,2,3,4,6}
  GeometryConfig g = GeometryConfig::uniform(4, 2);
  LiftingPlan plan(g);
  REQUIRE(plan.n_total == 7);
  REQUIRE(plan.u == std::vector<int>{0, 1, 2, 3, 4, 6});
  REQUIRE(plan.n_u() == 6);
  // f = 1 places rows at {0,1,2,3}; f = 2 at {0,2,4,6}
  REQUIRE(plan.rows_full[0] == std::vector<int>{0, 1, 2, 3});
  REQUIRE(plan.rows_full[1] == std::vector<int>{0, 2, 4, 6});
  // compact rows index into U
  REQUIRE(plan.rows_compact[0] == std::vector<int>{0, 1, 2, 3});
  REQUIRE(plan.rows_compact[1] == std::vector<int>{0, 2, 4, 5});
  // every offset 0..6 occurs as a difference of U elements (5 = 6 - 1),
  // even though 5 itself is not a product
  std::vector<char> want = {1, 1, 1, 1, 1, 1, 1};
  REQUIRE(plan.offset_realized == want);
  REQUIRE(plan.free_offsets.empty());
}

TEST_CASE("lifting plan - sparse geometry free offsets", "[lifting]") {
  // sensors {0,1,3,4}, freqs {1,3,4}: U = {0,1,3,4,9,12,16}, N = 17.
  // Realized differences |u_i - u_j| cover 0..16 except 10 and 14.
  GeometryConfig g({0, 1, 3, 4}, {1, 3, 4});
  LiftingPlan plan(g);
  REQUIRE(plan.n_total == 17);
  REQUIRE(plan.u == std::vector<int>{0, 1, 3, 4, 9, 12, 16});
  REQUIRE(plan.free_offsets == std::vector<int>{10, 14});
  REQUIRE(plan.u_pos(9) == 4);
  REQUIRE(plan.u_pos(16) == 6);
  REQUIRE_THROWS_AS(plan.u_pos(10), domain_error);
}

TEST_CASE("lift_R - row placement against hand-built matrix", "[lifting]") {
  // 4x2 uniform geometry, f = 2, payload rows become rows {0,2,4,6} of the
  // 7-row output; the other rows are zero
  GeometryConfig g = GeometryConfig::uniform(4, 2);
  LiftingPlan plan(g);
  Rng rng(3);
  CMat p = random_cmat(4, 3, rng);
  CMat lifted = lift_R(plan, p, 2);
  REQUIRE(lifted.rows() == 7);
  REQUIRE(lifted.cols() == 3);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) REQUIRE(std::abs(lifted(2 * i, j) - p(i, j)) < 1e-15);
  for (int r : {1, 3, 5})
    for (int j = 0; j < 3; ++j) REQUIRE(std::abs(lifted(r, j)) == 0.0);

  // compact variant places the same payload at U-positions {0,2,4,5}
  CMat lifted1 = lift_R1(plan, p, 2);
  REQUIRE(lifted1.rows() == 6);
  const int dest[] = {0, 2, 4, 5};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) REQUIRE(std::abs(lifted1(dest[i], j) - p(i, j)) < 1e-15);
  for (int j = 0; j < 3; ++j) {
    REQUIRE(std::abs(lifted1(1, j)) == 0.0);
    REQUIRE(std::abs(lifted1(3, j)) == 0.0);
  }

  REQUIRE_THROWS_AS(lift_R(plan, p, 3), domain_error);
  REQUIRE_THROWS_AS(lift_R(plan, random_cmat(3, 3, rng), 2), dim_error);
}

TEST_CASE("lift/adjoint - selection identities", "[lifting]") {
  // adjoint_R(lift_R(p)) == p and <lift_R(p), y> == <p, adjoint_R(y)> for
  // both the full and compact maps, across random geometries
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int n_m = 2 + static_cast<int>(rng.uniform_int(4));
    const int n_f = 1 + static_cast<int>(rng.uniform_int(4));
    const int n_l = 1 + static_cast<int>(rng.uniform_int(3));
    GeometryConfig g = GeometryConfig::uniform(n_m, n_f);
    LiftingPlan plan(g);
    const int f = g.freqs()[rng.uniform_int(g.freqs().size())];
    CMat p = random_cmat(n_m, n_l, rng);
    CMat yf = random_cmat(plan.n_total, n_l, rng);
    CMat yc = random_cmat(static_cast<int>(plan.n_u()), n_l, rng);

    CMat back = adjoint_R(plan, lift_R(plan, p, f), f);
    CMat back1 = adjoint_R1(plan, lift_R1(plan, p, f), f);
    REQUIRE((back - p).frobenius() < 1e-14 * (1.0 + p.frobenius()));
    REQUIRE((back1 - p).frobenius() < 1e-14 * (1.0 + p.frobenius()));

    // adjoint pairing, complex inner product Re part
    const double lhs = inner_re(lift_R(plan, p, f), yf);
    const double rhs = inner_re(p, adjoint_R(plan, yf, f));
    REQUIRE_THAT(lhs, WithinAbs(rhs, 1e-12 * (1.0 + std::abs(lhs))));
    const double lhs1 = inner_re(lift_R1(plan, p, f), yc);
    const double rhs1 = inner_re(p, adjoint_R1(plan, yc, f));
    REQUIRE_THAT(lhs1, WithinAbs(rhs1, 1e-12 * (1.0 + std::abs(lhs1))));
  }
}

TEST_CASE("lift maps - isometry on payloads", "[lifting]") {
  // rows are plain selections, so Frobenius norms and pairwise inner
  // products are preserved exactly
  Rng rng(29);
  GeometryConfig g({0, 2, 3}, {1, 4});
  LiftingPlan plan(g);
  for (int f : g.freqs()) {
    CMat p = random_cmat(3, 2, rng);
    CMat q = random_cmat(3, 2, rng);
    REQUIRE_THAT(lift_R(plan, p, f).frobenius(), WithinAbs(p.frobenius(), 1e-14));
    REQUIRE_THAT(lift_R1(plan, p, f).frobenius(), WithinAbs(p.frobenius(), 1e-14));
    REQUIRE_THAT(inner_re(lift_R(plan, p, f), lift_R(plan, q, f)),
                 WithinAbs(inner_re(p, q), 1e-13));
    REQUIRE_THAT(inner_re(lift_R1(plan, p, f), lift_R1(plan, q, f)),
                 WithinAbs(inner_re(p, q), 1e-13));
  }
}

TEST_CASE("uniform-case compact map - selection by realized sums", "[lifting]") {
  // Even for uniform geometries the product set U generally omits values
  // (4 sensors x 2 freqs skips 5), so the compact map equals the full map
  // with the rows no product uses deleted -- not the full map itself.
  GeometryConfig g = GeometryConfig::uniform(4, 2);
  LiftingPlan plan(g);
  Rng rng(31);
  CMat p = random_cmat(4, 2, rng);
  for (int f : g.freqs()) {
    CMat full = lift_R(plan, p, f);
    CMat compact = lift_R1(plan, p, f);
    for (std::size_t k = 0; k < plan.u.size(); ++k)
      for (int j = 0; j < 2; ++j)
        REQUIRE(std::abs(compact(static_cast<int>(k), j) - full(plan.u[k], j)) < 1e-15);
  }
  // single frequency: U = {0..N-1} and the two maps coincide entirely
  GeometryConfig g1 = GeometryConfig::uniform(5, 1);
  LiftingPlan plan1(g1);
  REQUIRE(plan1.u == std::vector<int>{0, 1, 2, 3, 4});
  CMat p1 = random_cmat(5, 2, rng);
  REQUIRE((lift_R(plan1, p1, 1) - lift_R1(plan1, p1, 1)).frobenius() == 0.0);
}

TEST_CASE("toep - Hermitian Toeplitz from first row", "[lifting]") {
  std::vector<cx> u = {cx(2, 0), cx(0.5, -0.25), cx(0.1, 0.3)};
  CMat t = toep(u);
  REQUIRE(t.rows() == 3);
  for (int i = 0; i < 3; ++i) REQUIRE(std::abs(t(i, i) - cx(2, 0)) < 1e-15);
  REQUIRE(std::abs(t(0, 1) - u[1]) < 1e-15);
  REQUIRE(std::abs(t(1, 0) - std::conj(u[1])) < 1e-15);
  REQUIRE(std::abs(t(0, 2) - u[2]) < 1e-15);
  REQUIRE(std::abs(t(2, 0) - std::conj(u[2])) < 1e-15);
  REQUIRE(hermitian_deviation(t) < 1e-15);
}

TEST_CASE("irregular_toep - entry probing with symbolic offsets", "[lifting]") {
  // encode u_k = k + j*k so each entry reveals which offset filled it
  GeometryConfig g({0, 1, 3, 4}, {1, 3, 4});
  LiftingPlan plan(g);
  std::vector<cx> u(plan.n_total);
  for (int k = 0; k < plan.n_total; ++k) u[k] = cx(k, k);
  u[0] = cx(0, 0);  // zero-offset entry is real
  CMat t = irregular_toep(u, plan);
  REQUIRE(t.rows() == 7);
  // U = {0,1,3,4,9,12,16}: entry (0,6) is offset 16-0, entry (4,3) is
  // conj of offset 9-4 = 5
  REQUIRE(std::abs(t(0, 6) - cx(16, 16)) < 1e-15);
  REQUIRE(std::abs(t(4, 3) - std::conj(cx(5, 5))) < 1e-15);
  REQUIRE(std::abs(t(2, 2) - cx(0, 0)) < 1e-15);
  REQUIRE(std::abs(t(1, 4) - cx(8, 8)) < 1e-15);
  REQUIRE(hermitian_deviation(t) < 1e-15);

  // the free offsets 10 and 14 never appear in any entry
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) {
      const double re = t(i, j).real();
      REQUIRE(std::abs(std::abs(re) - 10.0) > 0.5);
      REQUIRE(std::abs(std::abs(re) - 14.0) > 0.5);
    }
}

TEST_CASE("irregular_toep - selection from the full Toeplitz matrix", "[lifting]") {
  // T_irregular(u) = P_U Toep(u) P_U^H where P_U selects rows at U
  GeometryConfig g({0, 1, 3, 4}, {1, 3, 4});
  LiftingPlan plan(g);
  Rng rng(41);
  std::vector<cx> u(plan.n_total);
  u[0] = cx(rng.gaussian() + 3.0, 0);
  for (int k = 1; k < plan.n_total; ++k) u[k] = rng.cgaussian();
  CMat full = toep(u);
  CMat pu = select_PU(full, plan);
  CMat direct = irregular_toep(u, plan);
  REQUIRE((pu - direct).frobenius() < 1e-14);
}

TEST_CASE("irregular_toep - PSD inheritance from uniform parent", "[lifting]") {
  // if Toep(u) is PSD, its principal submatrix on U is PSD as well
  GeometryConfig g({0, 1, 3, 4}, {1, 3, 4});
  LiftingPlan plan(g);
  // build a PSD Toeplitz vector from a few unit-circle atoms
  std::vector<double> ws = {0.11, -0.27, 0.38};
  std::vector<double> ds = {1.0, 2.0, 0.5};
  std::vector<cx> u(plan.n_total, cx(0, 0));
  for (std::size_t a = 0; a < ws.size(); ++a)
    for (int k = 0; k < plan.n_total; ++k)
      u[k] += ds[a] * std::polar(1.0, -2.0 * pi * ws[a] * k);
  CMat t = irregular_toep(u, plan);
  auto eig = hermitian_eig(t);
  for (double v : eig.values) REQUIRE(v > -1e-10);
}

TEST_CASE("make_toeplitz_vector - mask marks free offsets", "[lifting]") {
  GeometryConfig g({0, 1, 3, 4}, {1, 3, 4});
  LiftingPlan plan(g);
  std::vector<cx> raw(plan.n_total, cx(1, 0));
  ToeplitzVector tv = make_toeplitz_vector(raw, plan);
  REQUIRE(tv.u.size() == 17);
  REQUIRE(tv.mask.size() == 17);
  for (int k = 0; k < 17; ++k) {
    const bool free_k = (k == 10 || k == 14);
    REQUIRE(tv.mask[k] == static_cast<char>(!free_k));
  }
}

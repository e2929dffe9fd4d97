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

#ifndef MFDOA_MODEL_HPP
#define MFDOA_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "common.hpp"
#include "matrix.hpp"
#include "rng.hpp"

namespace mfdoa {

// ---------------------------------------------------------------------------
// Array / frequency geometry.
//
// Sensors sit on a uniform grid with spacing d = speed / (2 * f1_hz), i.e.
// half a wavelength of the base frequency; operating frequencies are integer
// multiples f * f1_hz. Under that convention the directional cosine
// w = cos(theta)/2 is the single frequency variable of the manifold
// e^{-j 2 pi w f m} for sensor index m and frequency index f.
// ---------------------------------------------------------------------------
class GeometryConfig {
 public:
  GeometryConfig(std::vector<int> sensor_indices, std::vector<int> freq_indices,
                 double f1_hz = 100.0, double speed = 1500.0)
      : sensors_(std::move(sensor_indices)), freqs_(std::move(freq_indices)),
        f1_hz_(f1_hz), speed_(speed) {
    if (sensors_.empty()) throw config_error("geometry: sensor index set empty");
    if (freqs_.empty()) throw config_error("geometry: frequency index set empty");
    if (sensors_.front() < 0) throw config_error("geometry: sensor indices must be >= 0");
    if (freqs_.front() < 1) throw config_error("geometry: frequency indices must be >= 1");
    for (std::size_t i = 1; i < sensors_.size(); ++i)
      if (sensors_[i] <= sensors_[i - 1])
        throw config_error("geometry: sensor indices must be strictly increasing");
    for (std::size_t i = 1; i < freqs_.size(); ++i)
      if (freqs_[i] <= freqs_[i - 1])
        throw config_error("geometry: frequency indices must be strictly increasing");
    if (!(f1_hz_ > 0)) throw config_error("geometry: base frequency must be > 0");
    if (!(speed_ > 0)) throw config_error("geometry: propagation speed must be > 0");
    // space-frequency index set: sorted, deduplicated {m * f}
    for (int m : sensors_)
      for (int f : freqs_) u_.push_back(m * f);
    std::sort(u_.begin(), u_.end());
    u_.erase(std::unique(u_.begin(), u_.end()), u_.end());
  }

  // All sensors 0..n_m-1 present, all frequency indices 1..n_f present
  static GeometryConfig uniform(int n_m, int n_f, double f1_hz = 100.0, double speed = 1500.0) {
    if (n_m < 1 || n_f < 1) throw config_error("geometry: grid sizes must be >= 1");
    std::vector<int> s(n_m), f(n_f);
    for (int i = 0; i < n_m; ++i) s[i] = i;
    for (int i = 0; i < n_f; ++i) f[i] = i + 1;
    return GeometryConfig(std::move(s), std::move(f), f1_hz, speed);
  }

  const std::vector<int>& sensors() const { return sensors_; }
  const std::vector<int>& freqs() const { return freqs_; }
  double f1_hz() const { return f1_hz_; }
  double speed() const { return speed_; }
  double spacing() const { return speed_ / (2.0 * f1_hz_); }

  int n_sensors() const { return static_cast<int>(sensors_.size()); }
  int sensor_grid_size() const { return sensors_.back() + 1; }  // max index + 1
  int n_freqs() const { return static_cast<int>(freqs_.size()); }
  int freq_grid_size() const { return freqs_.back(); }  // max index

  // Size of the lifted space the index products live in
  int n_lifted() const { return freq_grid_size() * (sensor_grid_size() - 1) + 1; }

  const std::vector<int>& u_set() const { return u_; }
  int n_u() const { return static_cast<int>(u_.size()); }

  bool is_uniform() const {
    return sensor_grid_size() == n_sensors() && freq_grid_size() == n_freqs();
  }

  bool has_freq(int f) const { return std::binary_search(freqs_.begin(), freqs_.end(), f); }

  // Position of frequency index f within the ascending frequency list
  int freq_pos(int f) const {
    auto it = std::lower_bound(freqs_.begin(), freqs_.end(), f);
    if (it == freqs_.end() || *it != f) throw domain_error("geometry: frequency index not in set");
    return static_cast<int>(it - freqs_.begin());
  }

 private:
  std::vector<int> sensors_;  // strictly increasing, min >= 0
  std::vector<int> freqs_;    // strictly increasing, min >= 1
  double f1_hz_;
  double speed_;
  std::vector<int> u_;        // sorted deduplicated {m * f}
};

// ---------------------------------------------------------------------------
// Sources
// ---------------------------------------------------------------------------

enum class AmpStyle {
  gaussian,       // i.i.d. complex Gaussian entries, normalized per source
  deterministic,  // all entries equal, normalized per source
};

struct SourceSet {
  std::vector<double> thetas_deg;   // K angles in (0, 180)
  std::vector<double> w;            // directional cosines, w = cos(theta)/2
  std::vector<double> powers;       // positive per-source scale factors
  std::vector<CMat> amplitudes;     // per source: n_freqs x n_snapshots, unit Frobenius norm
  AmpStyle amp_style = AmpStyle::gaussian;  // used when amplitudes are filled lazily

  int k() const { return static_cast<int>(thetas_deg.size()); }
};

// --- angle parameterization conversions -------------------------------------
// theta in degrees in (0, 180); w = cos(theta)/2 in [-1/2, 1/2];
// z = e^{-j 2 pi w} on the unit circle. Round trips compose to identity.

inline double theta_to_w(double theta_deg) {
  if (!(theta_deg > 0.0 && theta_deg < 180.0))
    throw domain_error("theta_to_w: angle must lie in (0, 180) degrees");
  return 0.5 * std::cos(deg2rad(theta_deg));
}

inline double w_to_theta(double w) {
  if (!(w >= -0.5 && w <= 0.5)) throw domain_error("w_to_theta: cosine out of [-1/2, 1/2]");
  return rad2deg(std::acos(2.0 * w));
}

inline cx w_to_z(double w) {
  if (!(w >= -0.5 && w <= 0.5)) throw domain_error("w_to_z: cosine out of [-1/2, 1/2]");
  return std::polar(1.0, -2.0 * pi * w);
}

inline double z_to_w(cx z) {
  if (std::abs(std::abs(z) - 1.0) > 1e-6) throw domain_error("z_to_w: |z| must be 1");
  double ang = std::arg(z);  // [-pi, pi]
  return -ang / (2.0 * pi);
}

inline double z_to_theta(cx z) { return w_to_theta(z_to_w(z)); }

// Build a SourceSet from fixed angles; powers default to 1, amplitudes are
// filled later (explicitly or by synthesize)
inline SourceSet make_sources(const std::vector<double>& thetas_deg,
                              const std::vector<double>& powers = {},
                              AmpStyle style = AmpStyle::gaussian) {
  SourceSet s;
  s.thetas_deg = thetas_deg;
  s.amp_style = style;
  for (double t : thetas_deg) s.w.push_back(theta_to_w(t));
  if (powers.empty()) {
    s.powers.assign(thetas_deg.size(), 1.0);
  } else {
    if (powers.size() != thetas_deg.size())
      throw config_error("make_sources: power list length differs from angle list");
    for (double p : powers)
      if (!(p > 0)) throw config_error("make_sources: powers must be positive");
    s.powers = powers;
  }
  return s;
}

// Fill per-source amplitude matrices (n_freqs x n_snapshots, unit Frobenius
// norm; any overall scaling belongs to SourceSet::powers)
inline void fill_amplitudes(SourceSet& s, int n_freqs, int n_snapshots, Rng& rng) {
  s.amplitudes.clear();
  for (int k = 0; k < s.k(); ++k) {
    CMat a(n_freqs, n_snapshots);
    if (s.amp_style == AmpStyle::deterministic) {
      const double v = 1.0 / std::sqrt(static_cast<double>(n_freqs) * n_snapshots);
      for (auto& e : a.data()) e = v;
    } else {
      for (auto& e : a.data()) e = rng.cgaussian();
      const double nrm = a.frobenius();
      if (nrm == 0) throw numeric_error("fill_amplitudes: zero draw");
      a *= cx(1.0 / nrm, 0.0);
    }
    s.amplitudes.push_back(std::move(a));
  }
}

// ---------------------------------------------------------------------------
// Measurements
// ---------------------------------------------------------------------------

struct MeasurementTensor {
  // slices[i]: n_sensors x n_snapshots matrix for the i-th frequency index
  // in ascending order
  std::vector<CMat> slices;
  GeometryConfig geometry;
  std::optional<SourceSet> truth;
  std::optional<double> noise_snr_db;

  explicit MeasurementTensor(GeometryConfig g) : geometry(std::move(g)) {}

  int n_l() const { return slices.empty() ? 0 : static_cast<int>(slices[0].cols()); }

  double hs_norm() const {
    double s = 0;
    for (const auto& m : slices)
      for (const auto& v : m.data()) s += std::norm(v);
    return std::sqrt(s);
  }
};

// Manifold vector for frequency index f at directional cosine w:
// entry for sensor m is e^{-j 2 pi w f m}
inline std::vector<cx> manifold_vector(const GeometryConfig& g, int f, double w) {
  if (!g.has_freq(f)) throw domain_error("manifold_vector: frequency index not in set");
  if (!(w >= -0.5 && w <= 0.5)) throw domain_error("manifold_vector: cosine out of range");
  std::vector<cx> a;
  a.reserve(g.n_sensors());
  for (int m : g.sensors()) a.push_back(std::polar(1.0, -2.0 * pi * w * f * m));
  return a;
}

// Multi-frequency multi-snapshot synthesis. The noise-free tensor is the sum
// over sources of power * a(f, w) * amplitude_row(f); when snr_db is given,
// i.i.d. CN(0,1) noise is drawn and then scaled globally so that
// 20 log10(||signal|| / ||noise||) equals snr_db exactly.
inline MeasurementTensor synthesize(const GeometryConfig& g, const SourceSet& sources,
                                    int n_snapshots, std::optional<double> snr_db, Rng& rng) {
  if (n_snapshots < 1) throw config_error("synthesize: need at least one snapshot");
  SourceSet src = sources;
  if (src.amplitudes.empty() && src.k() > 0)
    fill_amplitudes(src, g.n_freqs(), n_snapshots, rng);
  for (const auto& a : src.amplitudes)
    if (static_cast<int>(a.rows()) != g.n_freqs() || static_cast<int>(a.cols()) != n_snapshots)
      throw dim_error("synthesize: amplitude shape mismatch");

  MeasurementTensor y(g);
  for (int fi = 0; fi < g.n_freqs(); ++fi) {
    const int f = g.freqs()[fi];
    CMat slice(g.n_sensors(), n_snapshots);
    for (int k = 0; k < src.k(); ++k) {
      const auto a = manifold_vector(g, f, src.w[k]);
      for (int m = 0; m < g.n_sensors(); ++m)
        for (int l = 0; l < n_snapshots; ++l)
          slice(m, l) += src.powers[k] * a[m] * src.amplitudes[k](fi, l);
    }
    y.slices.push_back(std::move(slice));
  }
  y.truth = src;

  if (snr_db) {
    const double sig = y.hs_norm();
    if (sig == 0) throw domain_error("synthesize: zero signal cannot be SNR-calibrated");
    std::vector<CMat> noise;
    double nrm2 = 0;
    for (int fi = 0; fi < g.n_freqs(); ++fi) {
      CMat n(g.n_sensors(), n_snapshots);
      for (auto& e : n.data()) {
        e = rng.cgaussian();
        nrm2 += std::norm(e);
      }
      noise.push_back(std::move(n));
    }
    const double scale = sig / (std::sqrt(nrm2) * std::pow(10.0, *snr_db / 20.0));
    for (int fi = 0; fi < g.n_freqs(); ++fi) {
      for (std::size_t i = 0; i < noise[fi].data().size(); ++i)
        y.slices[fi].data()[i] += scale * noise[fi].data()[i];
    }
    y.noise_snr_db = snr_db;
  }
  return y;
}

inline MeasurementTensor synthesize(const GeometryConfig& g, const SourceSet& sources,
                                    int n_snapshots, std::optional<double> snr_db = {},
                                    std::uint64_t rng_seed = 0) {
  Rng rng(rng_seed);
  return synthesize(g, sources, n_snapshots, snr_db, rng);
}

// ---------------------------------------------------------------------------
// Collisions: two sources share a manifold vector at frequency index f > 1
// exactly when |w_i - w_j| = k/f for an integer 1 <= k < f. A near collision
// is the same condition within near_tol.
// ---------------------------------------------------------------------------

struct CollisionPair {
  int i, j;         // source indices, i < j
  int f;            // frequency index at which the cosines (nearly) alias
  int k;            // integer in 1..f-1
  double residual;  // | |w_i - w_j| - k/f |; 0 exactly for exact collisions
};

struct CollisionReport {
  std::vector<CollisionPair> pairs;
  bool empty() const { return pairs.empty(); }
};

inline CollisionReport collision_scan(const SourceSet& s, const GeometryConfig& g,
                                      double near_tol) {
  if (near_tol < 0) throw domain_error("collision_scan: tolerance must be >= 0");
  CollisionReport rep;
  for (int i = 0; i < s.k(); ++i)
    for (int j = i + 1; j < s.k(); ++j) {
      const double dw = std::abs(s.w[i] - s.w[j]);
      for (int f : g.freqs()) {
        if (f <= 1) continue;
        for (int k = 1; k < f; ++k) {
          const double res = std::abs(dw - static_cast<double>(k) / f);
          if (res <= near_tol) rep.pairs.push_back({i, j, f, k, res});
        }
      }
    }
  return rep;
}

// Rejection-sample K angles, i.i.d. uniform on [range_lo, range_hi] degrees,
// until all pairwise cosine gaps are >= min_sep_cos
inline SourceSet random_doas(int k, double range_lo, double range_hi, double min_sep_cos,
                             Rng& rng) {
  if (k < 1) throw config_error("random_doas: need at least one source");
  if (!(range_lo > 0 && range_hi < 180 && range_lo < range_hi))
    throw config_error("random_doas: angle range must lie inside (0, 180)");
  const int max_attempts = 100000;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<double> th(k);
    for (auto& t : th) t = rng.uniform(range_lo, range_hi);
    bool ok = true;
    for (int a = 0; a < k && ok; ++a)
      for (int b = a + 1; b < k && ok; ++b)
        if (std::abs(std::cos(deg2rad(th[a])) - std::cos(deg2rad(th[b]))) < min_sep_cos)
          ok = false;
    if (ok) {
      std::sort(th.begin(), th.end());
      return make_sources(th);
    }
  }
  throw config_error("random_doas: separation constraint infeasible after bounded retries");
}

inline SourceSet random_doas(int k, double range_lo, double range_hi, double min_sep_cos,
                             std::uint64_t seed) {
  Rng rng(seed);
  return random_doas(k, range_lo, range_hi, min_sep_cos, rng);
}

}  // namespace mfdoa

#endif  // MFDOA_MODEL_HPP

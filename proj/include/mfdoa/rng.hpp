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

#ifndef MFDOA_RNG_HPP
#define MFDOA_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include "common.hpp"

namespace mfdoa {

// Seedable, portable random generator. The mt19937_64 bit stream is fully
// specified by the C++ standard; the uniform and Gaussian mappings below are
// fixed here rather than taken from std::*_distribution, whose sequences are
// implementation-defined and would break byte-identical reproducibility of
// Monte Carlo outputs across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}

  std::uint64_t raw() { return gen_(); }

  // Uniform on [0, 1): top 53 bits of the stream scaled by 2^-53
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform on {0, ..., n-1} by rejection (unbiased)
  std::uint64_t uniform_int(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % n;
  }

  // Standard normal via Box-Muller; one spare value cached
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  // Circularly-symmetric complex normal CN(0,1): E|z|^2 = 1
  cx cgaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return cx(re, im) * (1.0 / std::sqrt(2.0));
  }

  // Stream mixing for derived seeds (per-trial streams in Monte Carlo runs).
  // Passing neighboring integers straight into mt19937_64 yields correlated
  // early output; splitmix64 whitens the seed first.
  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0;
};

}  // namespace mfdoa

#endif  // MFDOA_RNG_HPP

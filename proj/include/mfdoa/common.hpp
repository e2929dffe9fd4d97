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

#ifndef MFDOA_COMMON_HPP
#define MFDOA_COMMON_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfdoa {

using cx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

// Error hierarchy. Every failure mode raised by the library derives from
// mfdoa::error so callers can catch library errors as one family.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid scenario / geometry / file configuration (CLI exit code 2)
class config_error : public error {
 public:
  explicit config_error(const std::string& msg) : error(msg) {}
};

// Shape or size mismatch between operands
class dim_error : public error {
 public:
  explicit dim_error(const std::string& msg) : error(msg) {}
};

// Input outside the mathematical domain of an operation
class domain_error : public error {
 public:
  explicit domain_error(const std::string& msg) : error(msg) {}
};

// Non-finite values or failed numerical invariants
class numeric_error : public error {
 public:
  explicit numeric_error(const std::string& msg) : error(msg) {}
};

// Valid input that this build deliberately does not handle
class unsupported_error : public error {
 public:
  explicit unsupported_error(const std::string& msg) : error(msg) {}
};

// Ill-posed optimization problem (dependent constraints, empty cone, ...)
class construction_error : public error {
 public:
  explicit construction_error(const std::string& msg) : error(msg) {}
};

// Estimate/truth bookkeeping mismatch while scoring
class scoring_error : public error {
 public:
  explicit scoring_error(const std::string& msg) : error(msg) {}
};

// Spectrum search found fewer minima than requested. Carries what was found
// so the caller can retry with a finer grid or accept the partial result.
class degenerate_spectrum_error : public error {
 public:
  degenerate_spectrum_error(const std::string& msg, std::vector<double> angles,
                            std::vector<double> values)
      : error(msg), found_angles(std::move(angles)), found_values(std::move(values)) {}
  std::vector<double> found_angles;  // unit-circle angles of the minima found
  std::vector<double> found_values;  // spectrum values at those minima
};

inline double deg2rad(double deg) { return deg * pi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / pi; }

}  // namespace mfdoa

#endif  // MFDOA_COMMON_HPP

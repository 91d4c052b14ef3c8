// Copyright 2026 The bbwork Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstddef>
#include <string_view>

namespace bbwork {

/// Every tolerance used by the library and its tests lives here.
struct NumericPolicy {
  /// ||A - A^dag||_max after symmetrization.
  double hermiticity = 1e-12;
  /// Inputs farther than this (relative to ||A||_max) from Hermitian are rejected.
  double hermiticity_input = 1e-9;
  /// Minimum eigenvalue slack for density matrices.
  double psd_slack = 1e-10;
  /// Trace slack for density matrices.
  double trace_slack = 1e-10;
  /// Eigen-reconstruction error relative to ||A||_F.
  double reconstruction = 1e-10;
  /// Support detection for relative entropy.
  double relent_support = 1e-12;
  /// Support detection for D_min / D_max.
  double divergence_support = 1e-10;
  /// Black-box deduplication radius in trace distance.
  double dedup_radius = 1e-10;
  /// Incoherence predicate threshold, ||P(M) - M||_max.
  double incoherence = 1e-10;
  /// Largest total Hilbert-space dimension any dense operator may have.
  std::size_t dim_cap = 4096;
  /// Matrices up to this size are diagonalized with cyclic Jacobi.
  std::size_t jacobi_max_dim = 64;
  int jacobi_max_sweeps = 60;
};

inline constexpr NumericPolicy kPolicy{};

/// Logarithm base in which divergences and work values are reported.
enum class LogBase { kNats, kBits };

/// Converts a value computed in nats into `base`.
inline double in_base(double nats, LogBase base) {
  return base == LogBase::kNats ? nats : nats / std::log(2.0);
}

inline std::string_view to_string(LogBase base) {
  return base == LogBase::kNats ? "nats" : "bits";
}

}  // namespace bbwork

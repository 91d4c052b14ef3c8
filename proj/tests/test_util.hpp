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
#include <vector>

#include "bbwork/operator.hpp"

namespace bbwork::test {

inline ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

inline ComplexMatrix hadamard() {
  ComplexMatrix m(2, 2);
  const double r = 1.0 / std::sqrt(2.0);
  m << r, r, r, -r;
  return m;
}

inline DensityMatrix plus_state() {
  ComplexVector v(2);
  v << 1.0, 1.0;
  return DensityMatrix::pure(v);
}

inline DensityMatrix minus_state() {
  ComplexVector v(2);
  v << 1.0, -1.0;
  return DensityMatrix::pure(v);
}

inline DensityMatrix diag2(double p0, double p1) {
  RealVector v(2);
  v << p0, p1;
  return DensityMatrix::diagonal(v);
}

inline RealVector vec(std::initializer_list<double> xs) {
  RealVector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

/// Random probability vector with entries bounded away from zero.
inline RealVector random_probabilities(Index dim, Rng& rng, double floor = 0.02) {
  std::uniform_real_distribution<double> u(floor, 1.0);
  RealVector p(dim);
  for (Index i = 0; i < dim; ++i) p(i) = u(rng);
  return p / p.sum();
}

/// Full-rank random state, mixed with the maximally mixed state.
inline DensityMatrix random_full_rank(Index dim, Rng& rng, double mix = 0.1) {
  const DensityMatrix r = random_density(dim, rng);
  return DensityMatrix(r.op() * (1.0 - mix) + HermitianOperator::identity(dim) * (mix / static_cast<double>(dim)));
}

}  // namespace bbwork::test

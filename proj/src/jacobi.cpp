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

// Hermitian eigensolvers.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bbwork/error.hpp"
#include "bbwork/operator.hpp"

namespace bbwork {

namespace {

double off_diagonal_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      if (i != j) s += std::norm(a(i, j));
    }
  }
  return std::sqrt(s);
}

std::string condition_report(const HermitianOperator& a, const ComplexMatrix& work) {
  std::ostringstream os;
  os << "dim=" << a.dim() << " ||A||_F=" << a.matrix().norm()
     << " ||A||_max=" << max_abs(a.matrix()) << " residual off-diagonal norm="
     << off_diagonal_norm(work);
  return os.str();
}

// Sorts ascending and fixes each eigenvector's phase so that its
// largest-magnitude component (lowest index on ties) is real positive.
EigenDecomposition canonicalize(const RealVector& values, const ComplexMatrix& vectors) {
  const Index n = values.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return values(a) < values(b); });
  EigenDecomposition out;
  out.values.resize(n);
  out.vectors.resize(vectors.rows(), n);
  for (Index k = 0; k < n; ++k) {
    out.values(k) = values(order[k]);
    ComplexVector v = vectors.col(order[k]);
    Index pivot = 0;
    double best = -1.0;
    for (Index i = 0; i < v.size(); ++i) {
      const double mag = std::abs(v(i));
      if (mag > best * (1.0 + 1e-12)) {
        best = mag;
        pivot = i;
      }
    }
    if (best > 0.0) v *= std::conj(v(pivot)) / best;
    out.vectors.col(k) = v;
  }
  return out;
}

}  // namespace

EigenDecomposition eig_jacobi(const HermitianOperator& a, int max_sweeps) {
  const Index n = a.dim();
  ComplexMatrix w = a.matrix();
  ComplexMatrix v = ComplexMatrix::Identity(n, n);
  const double scale = w.norm();
  const double target = std::numeric_limits<double>::epsilon() * std::max(scale, 1e-300);

  int sweep = 0;
  while (off_diagonal_norm(w) > target) {
    if (sweep++ >= max_sweeps) {
      throw ConvergenceError("Jacobi eigensolver did not converge: " + condition_report(a, w));
    }
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const Complex apq = w(p, q);
        const double mag = std::abs(apq);
        if (mag <= target / static_cast<double>(n)) {
          w(p, q) = 0.0;
          w(q, p) = 0.0;
          continue;
        }
        // Phase rotation makes the (p, q) entry real, then a real Jacobi
        // rotation annihilates it.
        const Complex phase = apq / mag;
        const double app = w(p, p).real();
        const double aqq = w(q, q).real();
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const Complex sp = s * std::conj(phase);
        const Complex cp = c * std::conj(phase);
        // A <- G^dag A G with G = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on
        // (p, q). Rows p, q of the result are the adjoints of its columns.
        for (Index k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const Complex akp = w(k, p);
          const Complex akq = w(k, q);
          const Complex new_kp = c * akp - sp * akq;
          const Complex new_kq = s * akp + cp * akq;
          w(k, p) = new_kp;
          w(k, q) = new_kq;
          w(p, k) = std::conj(new_kp);
          w(q, k) = std::conj(new_kq);
        }
        w(p, p) = app - t * mag;
        w(q, q) = aqq + t * mag;
        for (Index k = 0; k < n; ++k) {
          const Complex vkp = v(k, p);
          const Complex vkq = v(k, q);
          v(k, p) = c * vkp - sp * vkq;
          v(k, q) = s * vkp + cp * vkq;
        }
        w(p, q) = 0.0;
        w(q, p) = 0.0;
      }
    }
  }
  return canonicalize(w.diagonal().real(), v);
}

EigenDecomposition eig_tridiagonal(const HermitianOperator& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a.matrix());
  if (es.info() != Eigen::Success) {
    throw ConvergenceError("tridiagonal QL eigensolver did not converge: " +
                           condition_report(a, a.matrix()));
  }
  return canonicalize(es.eigenvalues(), es.eigenvectors());
}

EigenDecomposition eig_hermitian(const HermitianOperator& a) {
  const Index n = a.dim();
  if (a.is_diagonal()) {
    return canonicalize(a.diagonal_real(), ComplexMatrix::Identity(n, n));
  }
  if (static_cast<std::size_t>(n) <= kPolicy.jacobi_max_dim) return eig_jacobi(a);
  return eig_tridiagonal(a);
}

}  // namespace bbwork

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

// Dense complex Hermitian linear algebra shared by every other module.

#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "bbwork/numeric_policy.hpp"

namespace bbwork {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Largest absolute entry, 0 for an empty matrix.
double max_abs(const ComplexMatrix& a);

/// Throws ArgumentError unless every entry is finite.
void require_finite(const ComplexMatrix& a, const char* what);

/// Square complex matrix equal to its adjoint.
///
/// Construction symmetrizes A <- (A + A^dag)/2 after rejecting inputs whose
/// anti-Hermitian part exceeds `kPolicy.hermiticity_input` relative to
/// ||A||_max. Values are immutable once built.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  explicit HermitianOperator(const ComplexMatrix& m);

  static HermitianOperator zero(Index dim);
  static HermitianOperator identity(Index dim);
  static HermitianOperator diagonal(const RealVector& diag);
  /// |v><v| for a (not necessarily normalized) vector.
  static HermitianOperator projector(const ComplexVector& v);

  Index dim() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }
  Complex operator()(Index i, Index j) const { return m_(i, j); }

  double trace() const { return m_.trace().real(); }
  /// Tr[this * other] for Hermitian operands (always real).
  double inner(const HermitianOperator& other) const;
  /// True if every off-diagonal entry is at most `tol` in magnitude.
  bool is_diagonal(double tol = 0.0) const;
  RealVector diagonal_real() const { return m_.diagonal().real(); }

  HermitianOperator operator+(const HermitianOperator& o) const;
  HermitianOperator operator-(const HermitianOperator& o) const;
  HermitianOperator operator-() const;
  HermitianOperator operator*(double s) const;
  friend HermitianOperator operator*(double s, const HermitianOperator& a) { return a * s; }

  /// U A U^dag.
  HermitianOperator conjugate_by(const ComplexMatrix& u) const;

 private:
  struct Trusted {};
  HermitianOperator(ComplexMatrix m, Trusted) : m_(std::move(m)) {}
  ComplexMatrix m_;

  friend HermitianOperator make_hermitian_unchecked(ComplexMatrix m);
};

/// Symmetrizes without validating; for results that are Hermitian by construction.
HermitianOperator make_hermitian_unchecked(ComplexMatrix m);

/// Positive semidefinite, unit-trace Hermitian operator.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  /// Validates eigenvalues >= -psd_slack and |Tr - 1| <= trace_slack.
  explicit DensityMatrix(HermitianOperator op);
  explicit DensityMatrix(const ComplexMatrix& m) : DensityMatrix(HermitianOperator(m)) {}

  static DensityMatrix maximally_mixed(Index dim);
  static DensityMatrix pure(const ComplexVector& psi);
  static DensityMatrix diagonal(const RealVector& probabilities);
  /// Basis projector |i><i|.
  static DensityMatrix basis(Index dim, Index i);

  Index dim() const { return op_.dim(); }
  const HermitianOperator& op() const { return op_; }
  const ComplexMatrix& matrix() const { return op_.matrix(); }
  Complex operator()(Index i, Index j) const { return op_(i, j); }

 private:
  HermitianOperator op_;
};

struct EigenDecomposition {
  /// Ascending real eigenvalues.
  RealVector values;
  /// Orthonormal eigenvectors stored as columns.
  ComplexMatrix vectors;

  /// V diag(f(values)) V^dag.
  HermitianOperator map(const std::function<double(double)>& f) const;
};

/// Deterministic Hermitian eigendecomposition: cyclic Jacobi up to
/// `kPolicy.jacobi_max_dim`, Householder tridiagonalization + implicit QL/QR
/// above. Each eigenvector is phase-fixed so that its largest-magnitude
/// component is real and positive.
EigenDecomposition eig_hermitian(const HermitianOperator& a);

/// Cyclic complex Jacobi on its own; throws ConvergenceError at the sweep cap.
EigenDecomposition eig_jacobi(const HermitianOperator& a, int max_sweeps = kPolicy.jacobi_max_sweeps);

/// Householder tridiagonalization followed by implicit QL/QR iterations.
EigenDecomposition eig_tridiagonal(const HermitianOperator& a);

/// Eigenvalues only (ascending).
RealVector eigenvalues(const HermitianOperator& a);

/// Kronecker product; the (i*dimB+k, j*dimB+l) entry is A_ij B_kl.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b, std::size_t cap = kPolicy.dim_cap);
HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b,
                       std::size_t cap = kPolicy.dim_cap);
DensityMatrix kron(const DensityMatrix& a, const DensityMatrix& b, std::size_t cap = kPolicy.dim_cap);

/// n-fold tensor power, n >= 1.
ComplexMatrix kron_power(const ComplexMatrix& a, int n, std::size_t cap = kPolicy.dim_cap);
DensityMatrix kron_power(const DensityMatrix& a, int n, std::size_t cap = kPolicy.dim_cap);

/// Traces out the subsystems listed in `traced` from an operator on the
/// tensor product of spaces with dimensions `dims`.
ComplexMatrix partial_trace(const ComplexMatrix& a, std::span<const Index> dims,
                            std::span<const Index> traced);
HermitianOperator partial_trace(const HermitianOperator& a, std::span<const Index> dims,
                                std::span<const Index> traced);
DensityMatrix partial_trace(const DensityMatrix& a, std::span<const Index> dims,
                            std::span<const Index> traced);

/// Reorders tensor factors: output factor k is input factor perm[k].
ComplexMatrix permute_subsystems(const ComplexMatrix& a, std::span<const Index> dims,
                                 std::span<const Index> perm);

/// Square fidelity ||sqrt(rho) sqrt(sigma)||_1^2.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);
/// Schatten-1 norm of a Hermitian operator.
double trace_norm(const HermitianOperator& a);
/// (1/2)||rho - sigma||_1.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);
double trace_distance(const HermitianOperator& a, const HermitianOperator& b);

/// Umegaki relative entropy in nats; +infinity when supp(rho) is not inside supp(sigma).
double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);
/// von Neumann entropy in nats.
double von_neumann_entropy(const DensityMatrix& rho);

/// Positive part: negative eigenvalues clipped to zero.
HermitianOperator psd_part(const HermitianOperator& a);
/// Projector onto the span of eigenvectors with eigenvalue > threshold.
HermitianOperator support_projector(const HermitianOperator& a, double threshold);

/// Nearest unit-trace PSD operator obtained by eigen-clipping then renormalizing.
DensityMatrix project_to_density(const HermitianOperator& a);

/// exp(-i H t).
ComplexMatrix time_evolution(const HermitianOperator& h, double t);

/// ||U^dag U - I||_max.
double unitarity_defect(const ComplexMatrix& u);

using Rng = std::mt19937_64;

/// Deterministic generator for (seed, stream): independent streams from one master seed.
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

/// Ginibre sample G G^dag / Tr normalized.
DensityMatrix random_density(Index dim, std::uint64_t seed);
DensityMatrix random_density(Index dim, Rng& rng);
/// Normalized complex Gaussian vector projector.
DensityMatrix random_pure(Index dim, std::uint64_t seed);
DensityMatrix random_pure(Index dim, Rng& rng);
/// Haar-random unitary (QR of a Ginibre matrix with phase correction).
ComplexMatrix random_unitary(Index dim, Rng& rng);
/// Haar-random isometry from `in` to `out` dimensions (out >= in).
ComplexMatrix random_isometry(Index in, Index out, Rng& rng);
/// Random Hermitian with standard Gaussian entries.
HermitianOperator random_hermitian(Index dim, Rng& rng);

}  // namespace bbwork

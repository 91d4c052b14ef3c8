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

#include "bbwork/operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "bbwork/error.hpp"

namespace bbwork {

double max_abs(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().maxCoeff();
}

void require_finite(const ComplexMatrix& a, const char* what) {
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) {
        std::ostringstream os;
        os << what << ": non-finite entry at (" << i << ", " << j << ")";
        throw ArgumentError(os.str());
      }
    }
  }
}

// ---------------------------------------------------------------------------
// HermitianOperator

HermitianOperator::HermitianOperator(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << "Hermitian operator must be square, got " << m.rows() << "x" << m.cols();
    throw ArgumentError(os.str());
  }
  require_finite(m, "Hermitian operator");
  const double scale = std::max(1.0, max_abs(m));
  const double defect = max_abs(m - m.adjoint());
  if (defect > kPolicy.hermiticity_input * scale) {
    std::ostringstream os;
    os << "matrix is not Hermitian: ||A - A^dag||_max = " << defect;
    throw ArgumentError(os.str());
  }
  m_ = (m + m.adjoint()) * 0.5;
}

HermitianOperator make_hermitian_unchecked(ComplexMatrix m) {
  ComplexMatrix sym = (m + m.adjoint()) * 0.5;
  return HermitianOperator(std::move(sym), HermitianOperator::Trusted{});
}

HermitianOperator HermitianOperator::zero(Index dim) {
  return make_hermitian_unchecked(ComplexMatrix::Zero(dim, dim));
}

HermitianOperator HermitianOperator::identity(Index dim) {
  return make_hermitian_unchecked(ComplexMatrix::Identity(dim, dim));
}

HermitianOperator HermitianOperator::diagonal(const RealVector& diag) {
  ComplexMatrix m = ComplexMatrix::Zero(diag.size(), diag.size());
  for (Index i = 0; i < diag.size(); ++i) m(i, i) = diag(i);
  require_finite(m, "diagonal operator");
  return make_hermitian_unchecked(std::move(m));
}

HermitianOperator HermitianOperator::projector(const ComplexVector& v) {
  return make_hermitian_unchecked(v * v.adjoint());
}

double HermitianOperator::inner(const HermitianOperator& other) const {
  // Tr[A B] = sum_ij A_ij B_ji = sum_ij A_ij conj(B_ij) for Hermitian B.
  return (m_.array() * other.m_.array().conjugate()).sum().real();
}

bool HermitianOperator::is_diagonal(double tol) const {
  for (Index j = 0; j < m_.cols(); ++j) {
    for (Index i = 0; i < m_.rows(); ++i) {
      if (i != j && std::abs(m_(i, j)) > tol) return false;
    }
  }
  return true;
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& o) const {
  return make_hermitian_unchecked(m_ + o.m_);
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& o) const {
  return make_hermitian_unchecked(m_ - o.m_);
}

HermitianOperator HermitianOperator::operator-() const { return make_hermitian_unchecked(-m_); }

HermitianOperator HermitianOperator::operator*(double s) const {
  return make_hermitian_unchecked(m_ * s);
}

HermitianOperator HermitianOperator::conjugate_by(const ComplexMatrix& u) const {
  return make_hermitian_unchecked(u * m_ * u.adjoint());
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(HermitianOperator op) : op_(std::move(op)) {
  if (op_.dim() < 1) throw ArgumentError("density matrix must have dimension >= 1");
  const double tr = op_.trace();
  if (std::abs(tr - 1.0) > kPolicy.trace_slack) {
    std::ostringstream os;
    os << "density matrix trace " << tr << " differs from 1";
    throw ArgumentError(os.str());
  }
  if (!op_.is_diagonal()) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(op_.matrix(), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw ConvergenceError("density matrix validation failed");
    if (es.eigenvalues().minCoeff() < -kPolicy.psd_slack) {
      std::ostringstream os;
      os << "density matrix has negative eigenvalue " << es.eigenvalues().minCoeff();
      throw ArgumentError(os.str());
    }
  } else if (op_.diagonal_real().minCoeff() < -kPolicy.psd_slack) {
    throw ArgumentError("density matrix has a negative diagonal entry");
  }
}

DensityMatrix DensityMatrix::maximally_mixed(Index dim) {
  return DensityMatrix(HermitianOperator::identity(dim) * (1.0 / static_cast<double>(dim)));
}

DensityMatrix DensityMatrix::pure(const ComplexVector& psi) {
  const double n = psi.norm();
  if (!(n > 0.0)) throw ArgumentError("pure state vector must be nonzero");
  return DensityMatrix(HermitianOperator::projector(psi / n));
}

DensityMatrix DensityMatrix::diagonal(const RealVector& probabilities) {
  return DensityMatrix(HermitianOperator::diagonal(probabilities));
}

DensityMatrix DensityMatrix::basis(Index dim, Index i) {
  if (i < 0 || i >= dim) throw ArgumentError("basis index out of range");
  RealVector p = RealVector::Zero(dim);
  p(i) = 1.0;
  return diagonal(p);
}

HermitianOperator EigenDecomposition::map(const std::function<double(double)>& f) const {
  ComplexMatrix scaled = vectors;
  for (Index k = 0; k < values.size(); ++k) scaled.col(k) *= f(values(k));
  return make_hermitian_unchecked(scaled * vectors.adjoint());
}

RealVector eigenvalues(const HermitianOperator& a) {
  if (a.is_diagonal()) {
    RealVector d = a.diagonal_real();
    std::sort(d.data(), d.data() + d.size());
    return d;
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a.matrix(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw ConvergenceError("eigenvalue iteration did not converge");
  return es.eigenvalues();
}

// ---------------------------------------------------------------------------
// Tensor products and partial traces

namespace {

std::size_t checked_product(std::size_t a, std::size_t b, std::size_t cap) {
  if (a != 0 && b > cap / a) {
    std::ostringstream os;
    os << "tensor dimension " << a << " x " << b << " exceeds cap " << cap;
    throw SizeError(os.str());
  }
  const std::size_t p = a * b;
  if (p > cap) {
    std::ostringstream os;
    os << "tensor dimension " << p << " exceeds cap " << cap;
    throw SizeError(os.str());
  }
  return p;
}

}  // namespace

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b, std::size_t cap) {
  checked_product(static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(b.rows()), cap);
  checked_product(static_cast<std::size_t>(a.cols()), static_cast<std::size_t>(b.cols()), cap);
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b, std::size_t cap) {
  return make_hermitian_unchecked(kron(a.matrix(), b.matrix(), cap));
}

DensityMatrix kron(const DensityMatrix& a, const DensityMatrix& b, std::size_t cap) {
  return DensityMatrix(kron(a.op(), b.op(), cap));
}

ComplexMatrix kron_power(const ComplexMatrix& a, int n, std::size_t cap) {
  if (n < 1) throw ArgumentError("tensor power requires n >= 1");
  ComplexMatrix out = a;
  for (int k = 1; k < n; ++k) out = kron(out, a, cap);
  return out;
}

DensityMatrix kron_power(const DensityMatrix& a, int n, std::size_t cap) {
  return DensityMatrix(make_hermitian_unchecked(kron_power(a.matrix(), n, cap)));
}

namespace {

struct Factorization {
  std::vector<Index> kept_offsets;
  std::vector<Index> traced_offsets;
  Index kept_dim = 1;
};

// Offsets of the kept and traced multi-indices inside the full row-major index.
Factorization factorize(Index total, std::span<const Index> dims, std::span<const Index> traced) {
  Index prod = 1;
  for (Index d : dims) {
    if (d < 1) throw ArgumentError("subsystem dimensions must be >= 1");
    prod *= d;
  }
  if (prod != total) {
    std::ostringstream os;
    os << "subsystem dimensions multiply to " << prod << " but operator has dimension " << total;
    throw ArgumentError(os.str());
  }
  const auto n = static_cast<Index>(dims.size());
  std::vector<bool> is_traced(dims.size(), false);
  for (Index t : traced) {
    if (t < 0 || t >= n) throw ArgumentError("traced subsystem index out of range");
    if (is_traced[t]) throw ArgumentError("traced subsystem listed twice");
    is_traced[t] = true;
  }
  std::vector<Index> strides(dims.size());
  Index s = 1;
  for (Index k = n - 1; k >= 0; --k) {
    strides[k] = s;
    s *= dims[k];
  }
  Factorization f;
  f.kept_offsets = {0};
  f.traced_offsets = {0};
  for (Index k = 0; k < n; ++k) {
    auto& target = is_traced[k] ? f.traced_offsets : f.kept_offsets;
    std::vector<Index> next;
    next.reserve(target.size() * dims[k]);
    for (Index base : target) {
      for (Index v = 0; v < dims[k]; ++v) next.push_back(base + v * strides[k]);
    }
    target = std::move(next);
  }
  f.kept_dim = static_cast<Index>(f.kept_offsets.size());
  return f;
}

}  // namespace

ComplexMatrix partial_trace(const ComplexMatrix& a, std::span<const Index> dims,
                            std::span<const Index> traced) {
  if (a.rows() != a.cols()) throw ArgumentError("partial trace needs a square operator");
  const Factorization f = factorize(a.rows(), dims, traced);
  ComplexMatrix out = ComplexMatrix::Zero(f.kept_dim, f.kept_dim);
  for (Index c = 0; c < f.kept_dim; ++c) {
    for (Index r = 0; r < f.kept_dim; ++r) {
      Complex acc = 0.0;
      for (Index t : f.traced_offsets) acc += a(f.kept_offsets[r] + t, f.kept_offsets[c] + t);
      out(r, c) = acc;
    }
  }
  return out;
}

HermitianOperator partial_trace(const HermitianOperator& a, std::span<const Index> dims,
                                std::span<const Index> traced) {
  return make_hermitian_unchecked(partial_trace(a.matrix(), dims, traced));
}

DensityMatrix partial_trace(const DensityMatrix& a, std::span<const Index> dims,
                            std::span<const Index> traced) {
  return DensityMatrix(partial_trace(a.op(), dims, traced));
}

ComplexMatrix permute_subsystems(const ComplexMatrix& a, std::span<const Index> dims,
                                 std::span<const Index> perm) {
  const auto n = static_cast<Index>(dims.size());
  if (static_cast<Index>(perm.size()) != n) throw ArgumentError("permutation length mismatch");
  std::vector<bool> seen(dims.size(), false);
  for (Index p : perm) {
    if (p < 0 || p >= n || seen[p]) throw ArgumentError("invalid subsystem permutation");
    seen[p] = true;
  }
  Index total = 1;
  for (Index d : dims) total *= d;
  if (total != a.rows() || a.rows() != a.cols()) throw ArgumentError("permutation dims mismatch");

  std::vector<Index> in_strides(dims.size());
  Index s = 1;
  for (Index k = n - 1; k >= 0; --k) {
    in_strides[k] = s;
    s *= dims[k];
  }
  // Map each output index to the input index it reads from.
  std::vector<Index> source(static_cast<std::size_t>(total));
  std::vector<Index> digits(dims.size());
  for (Index out = 0; out < total; ++out) {
    Index rem = out;
    for (Index k = n - 1; k >= 0; --k) {
      const Index d = dims[perm[k]];
      digits[k] = rem % d;
      rem /= d;
    }
    Index in = 0;
    for (Index k = 0; k < n; ++k) in += digits[k] * in_strides[perm[k]];
    source[out] = in;
  }
  ComplexMatrix out(total, total);
  for (Index c = 0; c < total; ++c) {
    for (Index r = 0; r < total; ++r) out(r, c) = a(source[r], source[c]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Distances and divergences

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw ArgumentError("fidelity: dimension mismatch");
  const HermitianOperator sqrt_rho =
      eig_hermitian(rho.op()).map([](double x) { return std::sqrt(std::max(x, 0.0)); });
  const HermitianOperator inner = sigma.op().conjugate_by(sqrt_rho.matrix());
  const RealVector ev = eigenvalues(inner);
  double s = 0.0;
  for (Index i = 0; i < ev.size(); ++i) s += std::sqrt(std::max(ev(i), 0.0));
  return std::clamp(s * s, 0.0, 1.0);
}

double trace_norm(const HermitianOperator& a) { return eigenvalues(a).cwiseAbs().sum(); }

double trace_distance(const HermitianOperator& a, const HermitianOperator& b) {
  if (a.dim() != b.dim()) throw ArgumentError("trace distance: dimension mismatch");
  return 0.5 * trace_norm(a - b);
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return std::clamp(trace_distance(rho.op(), sigma.op()), 0.0, 1.0);
}

double von_neumann_entropy(const DensityMatrix& rho) {
  const RealVector ev = eigenvalues(rho.op());
  double s = 0.0;
  for (Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > 0.0) s -= ev(i) * std::log(ev(i));
  }
  return s;
}

double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw ArgumentError("relative entropy: dimension mismatch");
  const double thr = kPolicy.relent_support;
  const EigenDecomposition es = eig_hermitian(sigma.op());
  // Diagonal of rho in sigma's eigenbasis.
  const ComplexMatrix rho_in_sigma = es.vectors.adjoint() * rho.matrix() * es.vectors;
  double cross = 0.0;
  for (Index j = 0; j < es.values.size(); ++j) {
    const double w = rho_in_sigma(j, j).real();
    if (es.values(j) > thr) {
      cross += w * std::log(es.values(j));
    } else if (w > thr) {
      return std::numeric_limits<double>::infinity();
    }
  }
  const double d = -von_neumann_entropy(rho) - cross;
  return std::max(d, 0.0);
}

HermitianOperator psd_part(const HermitianOperator& a) {
  if (a.is_diagonal()) {
    return HermitianOperator::diagonal(a.diagonal_real().cwiseMax(0.0));
  }
  return eig_hermitian(a).map([](double x) { return std::max(x, 0.0); });
}

HermitianOperator support_projector(const HermitianOperator& a, double threshold) {
  return eig_hermitian(a).map([threshold](double x) { return x > threshold ? 1.0 : 0.0; });
}

DensityMatrix project_to_density(const HermitianOperator& a) {
  const EigenDecomposition es = eig_hermitian(a);
  RealVector clipped = es.values.cwiseMax(0.0);
  double total = clipped.sum();
  if (!(total > 0.0)) return DensityMatrix::maximally_mixed(a.dim());
  ComplexMatrix scaled = es.vectors;
  for (Index k = 0; k < clipped.size(); ++k) scaled.col(k) *= clipped(k) / total;
  return DensityMatrix(make_hermitian_unchecked(scaled * es.vectors.adjoint()));
}

ComplexMatrix time_evolution(const HermitianOperator& h, double t) {
  const EigenDecomposition es = eig_hermitian(h);
  ComplexMatrix scaled = es.vectors;
  for (Index k = 0; k < es.values.size(); ++k) {
    scaled.col(k) *= std::exp(Complex(0.0, -es.values(k) * t));
  }
  return scaled * es.vectors.adjoint();
}

double unitarity_defect(const ComplexMatrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  return max_abs(u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols()));
}

// ---------------------------------------------------------------------------
// Random fixtures

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x62627772u};
  return Rng(seq);
}

namespace {

ComplexMatrix ginibre(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix g(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  }
  return g;
}

}  // namespace

DensityMatrix random_density(Index dim, Rng& rng) {
  if (dim < 1) throw ArgumentError("random_density: dim must be >= 1");
  const ComplexMatrix g = ginibre(dim, dim, rng);
  ComplexMatrix m = g * g.adjoint();
  m /= m.trace().real();
  return DensityMatrix(make_hermitian_unchecked(std::move(m)));
}

DensityMatrix random_density(Index dim, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return random_density(dim, rng);
}

DensityMatrix random_pure(Index dim, Rng& rng) {
  if (dim < 1) throw ArgumentError("random_pure: dim must be >= 1");
  const ComplexVector v = ginibre(dim, 1, rng).col(0);
  return DensityMatrix::pure(v);
}

DensityMatrix random_pure(Index dim, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return random_pure(dim, rng);
}

ComplexMatrix random_unitary(Index dim, Rng& rng) {
  const ComplexMatrix g = ginibre(dim, dim, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index k = 0; k < dim; ++k) {
    const Complex d = r(k, k);
    const double mag = std::abs(d);
    if (mag > 0.0) q.col(k) *= d / mag;
  }
  return q;
}

ComplexMatrix random_isometry(Index in, Index out, Rng& rng) {
  if (out < in) throw ArgumentError("isometry needs out >= in");
  return random_unitary(out, rng).leftCols(in);
}

HermitianOperator random_hermitian(Index dim, Rng& rng) {
  const ComplexMatrix g = ginibre(dim, dim, rng);
  return make_hermitian_unchecked(g);
}

}  // namespace bbwork

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

#include "bbwork/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bbwork/error.hpp"

namespace bbwork {

namespace {

double to_double(const Rational& r) { return boost::rational_cast<double>(r); }

// Stable ascending order of eigenpairs by `key`.
template <typename Key>
std::vector<Index> ascending_order(Index n, const Key& key) {
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return key(a) < key(b); });
  return order;
}

// For a permutation matrix, the row holding the single entry of column k.
Index pivot_row(const ComplexMatrix& v, Index k) {
  Index row = 0;
  v.col(k).cwiseAbs().maxCoeff(&row);
  return row;
}

EnergyBlockStructure group(const HermitianOperator& op, const EigenDecomposition& eig,
                           const std::optional<std::vector<Rational>>& exact, double tol) {
  const Index n = op.dim();
  EnergyBlockStructure out;
  out.dim = n;
  out.grouping_tolerance = tol;
  out.exact = exact.has_value();
  out.computational_basis = op.is_diagonal();
  out.basis = out.computational_basis ? ComplexMatrix::Identity(n, n) : eig.vectors;
  out.label.assign(static_cast<std::size_t>(n), 0);

  // Consecutive columns are in ascending order of energy.
  std::vector<std::vector<Index>> clusters;
  for (Index k = 0; k < n; ++k) {
    bool split = k == 0;
    if (k > 0) {
      if (exact) {
        split = (*exact)[k] != (*exact)[k - 1];
      } else {
        const double gap = eig.values(k) - eig.values(k - 1);
        split = gap > tol;
        if (gap > tol / 10.0 && gap <= 10.0 * tol) out.ambiguous = true;
      }
    }
    if (split) clusters.emplace_back();
    clusters.back().push_back(k);
  }

  for (const auto& cluster : clusters) {
    EnergyBlock block;
    double sum = 0.0;
    ComplexMatrix v(n, static_cast<Index>(cluster.size()));
    for (std::size_t j = 0; j < cluster.size(); ++j) {
      const Index col = cluster[j];
      sum += eig.values(col);
      v.col(static_cast<Index>(j)) = eig.vectors.col(col);
      const Index member = out.computational_basis ? pivot_row(eig.vectors, col) : col;
      block.members.push_back(member);
      out.label[static_cast<std::size_t>(member)] = static_cast<Index>(out.blocks.size());
    }
    std::sort(block.members.begin(), block.members.end());
    if (exact) {
      block.exact_energy = (*exact)[cluster.front()];
      block.energy = to_double(*block.exact_energy);
    } else {
      block.energy = sum / static_cast<double>(cluster.size());
    }
    block.projector = make_hermitian_unchecked(v * v.adjoint());
    out.blocks.push_back(std::move(block));
  }
  return out;
}

}  // namespace

Hamiltonian::Hamiltonian(HermitianOperator op, std::optional<std::vector<Rational>> rational_eigenvalues)
    : op_(std::move(op)), eig_(eig_hermitian(op_)) {
  if (rational_eigenvalues) {
    auto& r = *rational_eigenvalues;
    if (static_cast<Index>(r.size()) != dim()) {
      throw ArgumentError("expected " + std::to_string(dim()) + " rational eigenvalues, got " +
                          std::to_string(r.size()));
    }
    std::sort(r.begin(), r.end());
    for (Index k = 0; k < dim(); ++k) {
      const double diff = std::abs(to_double(r[static_cast<std::size_t>(k)]) - eig_.values(k));
      if (diff > 1e-9) {
        std::ostringstream os;
        os << "rational eigenvalue " << r[static_cast<std::size_t>(k)] << " does not match numeric eigenvalue "
           << eig_.values(k) << " (difference " << diff << ")";
        throw ArgumentError(os.str());
      }
    }
    exact_ = std::move(r);
  }
  build_blocks();
}

Hamiltonian::Hamiltonian(HermitianOperator op, EigenDecomposition eig,
                         std::optional<std::vector<Rational>> exact, Parts)
    : op_(std::move(op)), eig_(std::move(eig)), exact_(std::move(exact)) {
  build_blocks();
}

void Hamiltonian::build_blocks() {
  blocks_ = std::make_shared<const EnergyBlockStructure>(group(op_, eig_, exact_, default_grouping_tolerance()));
}

Hamiltonian Hamiltonian::zero(Index dim) { return Hamiltonian(HermitianOperator::zero(dim)); }

Hamiltonian Hamiltonian::diagonal(const RealVector& energies) {
  return Hamiltonian(HermitianOperator::diagonal(energies));
}

Hamiltonian Hamiltonian::diagonal(const std::vector<Rational>& energies) {
  RealVector e(static_cast<Index>(energies.size()));
  for (std::size_t i = 0; i < energies.size(); ++i) e(static_cast<Index>(i)) = to_double(energies[i]);
  return Hamiltonian(HermitianOperator::diagonal(e), energies);
}

double Hamiltonian::default_grouping_tolerance() const { return 1e-9 * max_abs(op_.matrix()); }

ThermalContext gibbs_state(const Hamiltonian& h, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw ArgumentError("inverse temperature must be finite and positive, got " + std::to_string(beta));
  }
  const EigenDecomposition& eig = h.eigen();
  const double lowest = eig.values.minCoeff();
  RealVector w = (-beta * (eig.values.array() - lowest)).exp().matrix();
  const double z_shifted = w.sum();
  w /= z_shifted;
  if (w.minCoeff() <= 0.0) {
    throw PreconditionError("exp(-beta H) underflows: Gibbs state is numerically rank-deficient at beta=" +
                            std::to_string(beta));
  }
  ThermalContext ctx;
  ctx.beta = beta;
  ctx.hamiltonian = h;
  ComplexMatrix tau = eig.vectors * w.asDiagonal() * eig.vectors.adjoint();
  if (h.op().is_diagonal()) {
    // Keep the state exactly diagonal.
    RealVector d = tau.diagonal().real();
    tau = ComplexMatrix(d.cast<Complex>().asDiagonal());
  }
  ctx.gibbs = DensityMatrix(make_hermitian_unchecked(tau));
  ctx.log_partition_function = std::log(z_shifted) - beta * lowest;
  ctx.partition_function = std::exp(ctx.log_partition_function);
  return ctx;
}

BatteryState battery_state(double m) {
  if (!(m >= 1.0) || !std::isfinite(m)) {
    throw ArgumentError("battery parameter m must be finite and >= 1, got " + std::to_string(m));
  }
  RealVector p(2);
  p << (m - 1.0) / m, 1.0 / m;
  return BatteryState{m, DensityMatrix::diagonal(p)};
}

EnergyBlockStructure energy_blocks(const Hamiltonian& h, double grouping_tol) {
  if (grouping_tol < 0.0 || grouping_tol == h.default_grouping_tolerance() || h.has_exact()) {
    return h.blocks();
  }
  return group(h.op(), h.eigen(), std::nullopt, grouping_tol);
}

HermitianOperator pinch(const HermitianOperator& a, const EnergyBlockStructure& blocks) {
  if (a.dim() != blocks.dim) {
    throw ArgumentError("pinch: operator dim " + std::to_string(a.dim()) + " does not match block dim " +
                        std::to_string(blocks.dim));
  }
  const Index n = a.dim();
  ComplexMatrix w = blocks.computational_basis ? a.matrix()
                                               : ComplexMatrix(blocks.basis.adjoint() * a.matrix() * blocks.basis);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      if (blocks.label[static_cast<std::size_t>(i)] != blocks.label[static_cast<std::size_t>(j)]) w(i, j) = 0.0;
    }
  }
  if (!blocks.computational_basis) w = blocks.basis * w * blocks.basis.adjoint();
  return make_hermitian_unchecked(std::move(w));
}

DensityMatrix pinch(const DensityMatrix& rho, const EnergyBlockStructure& blocks) {
  return DensityMatrix(pinch(rho.op(), blocks));
}

BlackBox::BlackBox(std::vector<DensityMatrix> states, std::vector<std::string> labels) {
  if (states.empty()) throw ArgumentError("black box must contain at least one state");
  if (!labels.empty() && labels.size() != states.size()) {
    throw ArgumentError("black box has " + std::to_string(states.size()) + " states but " +
                        std::to_string(labels.size()) + " labels");
  }
  const Index d = states.front().dim();
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].dim() != d) {
      throw ArgumentError("black box state " + std::to_string(i) + " has dim " + std::to_string(states[i].dim()) +
                          ", expected " + std::to_string(d));
    }
    bool duplicate = false;
    for (const auto& kept : states_) {
      if (trace_distance(kept, states[i]) <= kPolicy.dedup_radius) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) continue;
    states_.push_back(states[i]);
    labels_.push_back(labels.empty() ? "rho_" + std::to_string(i) : labels[i]);
    source_.push_back(i);
  }
}

BlackBox pinch_blackbox(const BlackBox& s, const EnergyBlockStructure& blocks) {
  std::vector<DensityMatrix> pinched;
  pinched.reserve(s.size());
  for (const auto& rho : s.states()) pinched.push_back(pinch(rho, blocks));
  return BlackBox(std::move(pinched), s.labels());
}

bool is_incoherent(const HermitianOperator& m, const EnergyBlockStructure& blocks) {
  return max_abs(pinch(m, blocks).matrix() - m.matrix()) <= kPolicy.incoherence;
}

std::size_t spec_count(const Hamiltonian& h, double grouping_tol) { return energy_blocks(h, grouping_tol).size(); }

std::size_t spec_count(const ThermalContext& ctx) { return ctx.hamiltonian.blocks().size(); }

Hamiltonian nfold_hamiltonian(const Hamiltonian& h, int n, std::size_t cap) {
  if (n < 1) throw ArgumentError("nfold_hamiltonian: n must be >= 1, got " + std::to_string(n));
  if (n == 1) return h;
  const Index d = h.dim();
  double total = 1.0;
  for (int j = 0; j < n; ++j) total *= static_cast<double>(d);
  if (total > static_cast<double>(cap)) {
    throw SizeError("nfold_hamiltonian: dimension " + std::to_string(d) + "^" + std::to_string(n) +
                    " exceeds cap " + std::to_string(cap));
  }
  const Index big = static_cast<Index>(total);

  ComplexMatrix op = ComplexMatrix::Zero(big, big);
  Index left = 1;
  for (int j = 0; j < n; ++j) {
    const Index right = big / (left * d);
    op += kron(ComplexMatrix::Identity(left, left),
               kron(h.op().matrix(), ComplexMatrix::Identity(right, right), cap), cap);
    left *= d;
  }

  // Product eigenbasis with summed energies.
  const EigenDecomposition& e1 = h.eigen();
  ComplexMatrix vectors = kron_power(e1.vectors, n, cap);
  RealVector values = RealVector::Zero(big);
  std::vector<Rational> exact(h.has_exact() ? static_cast<std::size_t>(big) : 0);
  for (Index idx = 0; idx < big; ++idx) {
    Index rest = idx;
    for (int j = 0; j < n; ++j) {
      const Index digit = rest % d;
      rest /= d;
      values(idx) += e1.values(digit);
      if (h.has_exact()) exact[static_cast<std::size_t>(idx)] += (*h.exact_eigenvalues())[static_cast<std::size_t>(digit)];
    }
  }
  const auto order = h.has_exact()
                         ? ascending_order(big, [&](Index k) { return exact[static_cast<std::size_t>(k)]; })
                         : ascending_order(big, [&](Index k) { return values(k); });
  EigenDecomposition eig;
  eig.values.resize(big);
  eig.vectors.resize(big, big);
  std::optional<std::vector<Rational>> sorted_exact;
  if (h.has_exact()) sorted_exact.emplace(static_cast<std::size_t>(big));
  for (Index k = 0; k < big; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    eig.values(k) = values(src);
    eig.vectors.col(k) = vectors.col(src);
    if (sorted_exact) (*sorted_exact)[static_cast<std::size_t>(k)] = exact[static_cast<std::size_t>(src)];
  }
  return Hamiltonian(make_hermitian_unchecked(std::move(op)), std::move(eig), std::move(sorted_exact),
                     Hamiltonian::Parts{});
}

RationalIndependenceResult is_rationally_independent(const Hamiltonian& h, int n_max) {
  if (!h.has_exact()) {
    throw UnsupportedError("rational independence needs exact rational eigenvalues");
  }
  if (n_max < 1) throw ArgumentError("N_max must be >= 1, got " + std::to_string(n_max));
  RationalIndependenceResult out;
  out.n_max = n_max;
  for (const auto& e : *h.exact_eigenvalues()) {
    if (out.energies.empty() || out.energies.back() != e) out.energies.push_back(e);
  }
  const std::size_t k = out.energies.size();
  if (k < 2) return out;

  // Integer coordinates (E_i - E_0) * lcm(denominators); Sum N_i = 0 makes
  // the shift harmless.
  std::int64_t lcm = 1;
  for (const auto& e : out.energies) lcm = std::lcm(lcm, e.denominator());
  std::vector<__int128> a(k);
  for (std::size_t i = 0; i < k; ++i) {
    const Rational shifted = out.energies[i] - out.energies[0];
    a[i] = static_cast<__int128>(shifted.numerator()) * (lcm / shifted.denominator());
  }

  std::vector<std::int64_t> n(k, 0);
  // Depth-first over the first k-1 entries; the last is fixed by Sum N_i = 0.
  auto search = [&](auto&& self, std::size_t i, std::int64_t level, std::int64_t sum, bool seen_nonzero,
                    bool hit_level) -> bool {
    if (i + 1 == k) {
      const std::int64_t last = -sum;
      if (std::abs(last) > level) return false;
      if (!seen_nonzero && last <= 0) return false;
      if (!hit_level && std::abs(last) != level) return false;
      n[i] = last;
      __int128 dot = 0;
      for (std::size_t j = 0; j < k; ++j) dot += a[j] * n[j];
      return dot == 0;
    }
    for (std::int64_t v = -level; v <= level; ++v) {
      if (!seen_nonzero && v < 0) continue;
      n[i] = v;
      if (self(self, i + 1, level, sum + v, seen_nonzero || v != 0, hit_level || std::abs(v) == level)) return true;
    }
    return false;
  };
  for (std::int64_t level = 1; level <= n_max; ++level) {
    if (search(search, 0, level, 0, false, false)) {
      out.independent = false;
      out.witness = n;
      return out;
    }
  }
  return out;
}

}  // namespace bbwork

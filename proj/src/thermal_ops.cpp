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

#include "bbwork/thermal_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "bbwork/error.hpp"
#include "bbwork/work.hpp"

namespace bbwork {

namespace {

constexpr double kProbabilitySumTolerance = 1e-12;
constexpr double kMatchTolerance = 1e-12;
constexpr double kProjectorTolerance = 1e-10;
constexpr double kLocalityTolerance = 1e-9;

Index product(const std::vector<Index>& dims) {
  Index p = 1;
  for (Index d : dims) p *= d;
  return p;
}

std::string dims_string(const std::vector<Index>& dims) {
  std::string out = "[";
  for (std::size_t i = 0; i < dims.size(); ++i) out += (i ? "," : "") + std::to_string(dims[i]);
  return out + "]";
}

/// Sum_k I (x) .. (x) H_k (x) .. (x) I.
HermitianOperator kron_sum(const std::vector<HermitianOperator>& terms) {
  std::vector<Index> dims;
  for (const auto& t : terms) dims.push_back(t.dim());
  const Index total = product(dims);
  ComplexMatrix out = ComplexMatrix::Zero(total, total);
  Index before = 1;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const Index after = total / (before * dims[k]);
    out += kron(kron(ComplexMatrix::Identity(before, before), terms[k].matrix()),
                ComplexMatrix::Identity(after, after));
    before *= dims[k];
  }
  return make_hermitian_unchecked(std::move(out));
}

bool same_operator(const HermitianOperator& a, const HermitianOperator& b) {
  return a.dim() == b.dim() && max_abs(a.matrix() - b.matrix()) <= kMatchTolerance;
}

}  // namespace

DilatedThermalOp::DilatedThermalOp(std::vector<Index> input_dims, Hamiltonian input_hamiltonian,
                                   std::vector<Index> ancilla_dims, Hamiltonian ancilla_hamiltonian, double beta,
                                   ComplexMatrix unitary, std::vector<Index> traced)
    : input_dims_(std::move(input_dims)),
      ancilla_dims_(std::move(ancilla_dims)),
      input_h_(std::move(input_hamiltonian)),
      ancilla_h_(std::move(ancilla_hamiltonian)),
      beta_(beta),
      u_(std::move(unitary)),
      traced_(std::move(traced)) {
  if (input_dims_.empty() || ancilla_dims_.empty()) {
    throw ArgumentError("thermal op: input and ancilla need at least one factor each");
  }
  factors_ = input_dims_;
  factors_.insert(factors_.end(), ancilla_dims_.begin(), ancilla_dims_.end());
  for (Index d : factors_) {
    if (d < 1) throw ArgumentError("thermal op: factor dimensions must be >= 1, got " + dims_string(factors_));
  }
  if (product(input_dims_) != input_h_.dim()) {
    throw ArgumentError("thermal op: input dims " + dims_string(input_dims_) + " do not match H_in of dimension " +
                        std::to_string(input_h_.dim()));
  }
  if (product(ancilla_dims_) != ancilla_h_.dim()) {
    throw ArgumentError("thermal op: ancilla dims " + dims_string(ancilla_dims_) +
                        " do not match H_E of dimension " + std::to_string(ancilla_h_.dim()));
  }
  const Index total = product(factors_);
  if (u_.rows() != total || u_.cols() != total) {
    throw ArgumentError("thermal op: unitary must be " + std::to_string(total) + "x" + std::to_string(total));
  }
  require_finite(u_, "thermal op unitary");
  std::sort(traced_.begin(), traced_.end());
  if (std::adjacent_find(traced_.begin(), traced_.end()) != traced_.end()) {
    throw ArgumentError("thermal op: repeated discarded factor");
  }
  for (Index t : traced_) {
    if (t < 0 || t >= static_cast<Index>(factors_.size())) {
      throw ArgumentError("thermal op: discarded factor " + std::to_string(t) + " out of range");
    }
  }
  for (Index k = 0; k < static_cast<Index>(factors_.size()); ++k) {
    if (!std::binary_search(traced_.begin(), traced_.end(), k)) kept_.push_back(k);
  }
  if (kept_.empty()) throw ArgumentError("thermal op: every factor is discarded");

  total_h_ = kron_sum({input_h_.op(), ancilla_h_.op()});
  unitarity_defect_ = bbwork::unitarity_defect(u_);
  if (unitarity_defect_ > kUnitarityTolerance) {
    throw PreconditionError("thermal op: U is not unitary, ||U^dag U - I||_max = " +
                            std::to_string(unitarity_defect_));
  }
  commutator_defect_ = energy_conservation_defect(u_, total_h_);
  if (commutator_defect_ > kCommutatorTolerance) {
    throw PreconditionError("thermal op: U does not conserve energy, ||[U, H_total]||_F = " +
                            std::to_string(commutator_defect_));
  }

  // Split H_total into kept and discarded parts.
  std::vector<Index> order = kept_;
  order.insert(order.end(), traced_.begin(), traced_.end());
  const ComplexMatrix h = permute_subsystems(total_h_.matrix(), factors_, order);
  Index dk = 1, dr = 1;
  for (Index k : kept_) dk *= factors_[static_cast<std::size_t>(k)];
  for (Index k : traced_) dr *= factors_[static_cast<std::size_t>(k)];
  const std::vector<Index> split{dk, dr};
  const std::vector<Index> second{1}, first{0};
  const ComplexMatrix hk = partial_trace(h, split, second) / static_cast<double>(dr);
  const ComplexMatrix hr = partial_trace(h, split, first) / static_cast<double>(dk);
  const double c = h.trace().real() / static_cast<double>(dk * dr);
  const ComplexMatrix local = kron(hk, ComplexMatrix::Identity(dr, dr)) + kron(ComplexMatrix::Identity(dk, dk), hr) -
                              c * ComplexMatrix::Identity(dk * dr, dk * dr);
  const double scale = std::max(1.0, max_abs(h));
  if (max_abs(h - local) > kLocalityTolerance * scale) {
    throw PreconditionError("thermal op: H_total couples kept and discarded factors; output Hamiltonian undefined");
  }
  output_h_ = Hamiltonian(make_hermitian_unchecked(hk));
  ancilla_gibbs_ = gibbs_state(ancilla_h_, beta_).gibbs;
  input_gibbs_ = gibbs_state(input_h_, beta_).gibbs;
  output_gibbs_ = gibbs_state(output_h_, beta_).gibbs;
}

std::vector<Index> DilatedThermalOp::output_dims() const {
  std::vector<Index> out;
  for (Index k : kept_) out.push_back(factors_[static_cast<std::size_t>(k)]);
  return out;
}

ComplexMatrix DilatedThermalOp::apply(const ComplexMatrix& x) const {
  if (x.rows() != input_dim() || x.cols() != input_dim()) {
    throw ArgumentError("thermal op: input operator must be " + std::to_string(input_dim()) + "-dimensional");
  }
  const ComplexMatrix y = u_ * kron(x, ancilla_gibbs_.matrix()) * u_.adjoint();
  if (traced_.empty()) return y;
  return partial_trace(y, factors_, traced_);
}

DensityMatrix dilation_apply(const DilatedThermalOp& op, const DensityMatrix& rho) {
  return DensityMatrix(make_hermitian_unchecked(op.apply(rho.matrix())));
}

double energy_conservation_defect(const ComplexMatrix& u, const HermitianOperator& h_total) {
  if (u.rows() != h_total.dim() || u.cols() != h_total.dim()) {
    throw ArgumentError("energy conservation: U and H_total dimensions differ");
  }
  return (u * h_total.matrix() - h_total.matrix() * u).norm();
}

DilatedThermalOp identity_thermal_op(const Hamiltonian& h, double beta) {
  return DilatedThermalOp({h.dim()}, h, {1}, Hamiltonian::zero(1), beta, ComplexMatrix::Identity(h.dim(), h.dim()),
                          {1});
}

DilatedThermalOp replacement_thermal_op(const Hamiltonian& h, double beta) {
  const Index d = h.dim();
  ComplexMatrix swap = ComplexMatrix::Zero(d * d, d * d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) swap(j * d + i, i * d + j) = 1.0;
  }
  return DilatedThermalOp({d}, h, {d}, h, beta, swap, {1});
}

MixedThermalOp mix_thermal_ops(const std::vector<std::pair<double, DilatedThermalOp>>& ops) {
  if (ops.empty()) throw ArgumentError("mix: no operations");
  double sum = 0.0;
  for (const auto& [p, op] : ops) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw ArgumentError("mix: probabilities must be nonnegative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kProbabilitySumTolerance) {
    throw ArgumentError("mix: probabilities sum to " + std::to_string(sum) + ", not 1");
  }
  const DilatedThermalOp& ref = ops.front().second;
  const auto n_in = static_cast<Index>(ref.input_dims().size());
  for (Index k : ref.kept()) {
    if (k >= n_in) throw ArgumentError("mix: outputs must be input factors; op 0 keeps ancilla factor");
  }
  for (std::size_t x = 1; x < ops.size(); ++x) {
    const DilatedThermalOp& op = ops[x].second;
    if (op.input_dims() != ref.input_dims() || !same_operator(op.input_hamiltonian().op(), ref.input_hamiltonian().op())) {
      throw ArgumentError("mix: op " + std::to_string(x) + " has a different input system");
    }
    if (std::abs(op.beta() - ref.beta()) > kMatchTolerance * ref.beta()) {
      throw ArgumentError("mix: op " + std::to_string(x) + " has a different beta");
    }
    if (op.kept() != ref.kept()) throw ArgumentError("mix: op " + std::to_string(x) + " keeps different factors");
  }

  MixedThermalOp out{ref, {}, {}, {}, {}};
  const double beta = ref.beta();
  const Index din = ref.input_dim();
  Index total_anc = 0;
  std::vector<std::size_t> used;
  for (std::size_t x = 0; x < ops.size(); ++x) {
    if (ops[x].first == 0.0) continue;
    used.push_back(x);
    out.offsets.push_back(total_anc);
    total_anc += ops[x].second.ancilla_dim();
  }
  ComplexMatrix h_anc = ComplexMatrix::Zero(total_anc, total_anc);
  ComplexMatrix u = ComplexMatrix::Zero(din * total_anc, din * total_anc);
  for (std::size_t k = 0; k < used.size(); ++k) {
    const auto& [p, op] = ops[used[k]];
    const Index off = out.offsets[k];
    const Index de = op.ancilla_dim();
    const double shift = -(std::log(p) - gibbs_state(op.ancilla_hamiltonian(), beta).log_partition_function) / beta;
    out.shifts.push_back(shift);
    out.probabilities.push_back(p);
    h_anc.block(off, off, de, de) = op.ancilla_hamiltonian().op().matrix() + shift * ComplexMatrix::Identity(de, de);
    for (Index e = 0; e < de; ++e) out.block_of.push_back(used[k]);
    for (Index i = 0; i < din; ++i) {
      for (Index j = 0; j < din; ++j) {
        u.block(i * total_anc + off, j * total_anc + off, de, de) = op.unitary().block(i * de, j * de, de, de);
      }
    }
  }
  std::vector<Index> traced;
  for (Index k = 0; k < n_in; ++k) {
    if (!std::binary_search(ref.kept().begin(), ref.kept().end(), k)) traced.push_back(k);
  }
  traced.push_back(n_in);
  out.op = DilatedThermalOp(ref.input_dims(), ref.input_hamiltonian(), {total_anc},
                            Hamiltonian(make_hermitian_unchecked(std::move(h_anc))), beta, std::move(u),
                            std::move(traced));
  return out;
}

std::vector<ComplexMatrix> pinching_unitaries(const EnergyBlockStructure& blocks) {
  const std::size_t m = blocks.size();
  std::vector<ComplexMatrix> out;
  for (std::size_t x = 0; x < m; ++x) {
    ComplexMatrix u = ComplexMatrix::Zero(blocks.dim, blocks.dim);
    for (std::size_t y = 0; y < m; ++y) {
      // Reduce x y mod m first so the phase stays exact for the identity.
      const double angle = 2.0 * std::numbers::pi * static_cast<double>((x * y) % m) / static_cast<double>(m);
      u += std::polar(1.0, angle) * blocks.blocks[y].projector.matrix();
    }
    out.push_back(std::move(u));
  }
  return out;
}

IncoherentProjectivePOVM::IncoherentProjectivePOVM(std::vector<HermitianOperator> projectors, Hamiltonian hamiltonian)
    : projectors_(std::move(projectors)), h_(std::move(hamiltonian)) {
  if (projectors_.empty()) throw PreconditionError("POVM: no elements");
  const Index d = h_.dim();
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (std::size_t i = 0; i < projectors_.size(); ++i) {
    const HermitianOperator& p = projectors_[i];
    if (p.dim() != d) throw PreconditionError("POVM: element " + std::to_string(i) + " has the wrong dimension");
    if (!is_incoherent(p, h_.blocks())) {
      throw PreconditionError("POVM: element " + std::to_string(i) + " is not incoherent");
    }
    for (std::size_t j = 0; j < projectors_.size(); ++j) {
      const ComplexMatrix prod = p.matrix() * projectors_[j].matrix();
      const double defect = i == j ? max_abs(prod - p.matrix()) : max_abs(prod);
      if (defect > kProjectorTolerance) {
        throw PreconditionError("POVM: elements " + std::to_string(i) + " and " + std::to_string(j) +
                                " are not orthogonal projectors");
      }
    }
    sum += p.matrix();
  }
  if (max_abs(sum - ComplexMatrix::Identity(d, d)) > kProjectorTolerance) {
    throw PreconditionError("POVM: elements do not sum to the identity");
  }
}

IncoherentProjectivePOVM IncoherentProjectivePOVM::energy_blocks(const Hamiltonian& h) {
  std::vector<HermitianOperator> p;
  for (const auto& b : h.blocks().blocks) p.push_back(b.projector);
  return IncoherentProjectivePOVM(std::move(p), h);
}

DilatedThermalOp compile_icpto(const IncoherentProjectivePOVM& povm, const std::vector<DilatedThermalOp>& ops) {
  if (ops.size() != povm.size()) {
    throw PreconditionError("compile: " + std::to_string(povm.size()) + " POVM elements but " +
                            std::to_string(ops.size()) + " operations");
  }
  const DilatedThermalOp& ref = ops.front();
  const auto n_b = static_cast<Index>(ref.input_dims().size());
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const DilatedThermalOp& op = ops[i];
    if (op.input_dims() != ref.input_dims() || !same_operator(op.input_hamiltonian().op(), ref.input_hamiltonian().op())) {
      throw PreconditionError("compile: op " + std::to_string(i) + " acts on a different system B");
    }
    if (std::abs(op.beta() - ref.beta()) > kMatchTolerance * ref.beta()) {
      throw PreconditionError("compile: op " + std::to_string(i) + " has a different beta");
    }
    if (op.output_dim() != op.input_dim()) {
      throw PreconditionError("compile: op " + std::to_string(i) + " has dim C = " + std::to_string(op.output_dim()) +
                              " != dim B = " + std::to_string(op.input_dim()) + "; pad with thermal states first");
    }
    std::vector<Index> expected(static_cast<std::size_t>(n_b));
    std::iota(expected.begin(), expected.end(), Index{0});
    if (op.kept() != expected) {
      throw PreconditionError("compile: op " + std::to_string(i) + " must return its output in the B factors");
    }
  }

  const Index da = povm.dim();
  const Index db = ref.input_dim();
  const std::size_t m = ops.size();
  std::vector<Index> anc_dims;
  std::vector<Index> flat{db};
  std::vector<HermitianOperator> anc_terms;
  Index anc_total = 1;
  for (const auto& op : ops) {
    anc_dims.insert(anc_dims.end(), op.ancilla_dims().begin(), op.ancilla_dims().end());
    flat.push_back(op.ancilla_dim());
    anc_terms.push_back(op.ancilla_hamiltonian().op());
    anc_total *= op.ancilla_dim();
  }
  if (static_cast<std::size_t>(da * db * anc_total) > kPolicy.dim_cap) {
    throw SizeError("compile: dilated dimension " + std::to_string(da * db * anc_total) + " exceeds the cap");
  }

  ComplexMatrix u = ComplexMatrix::Zero(da * db * anc_total, da * db * anc_total);
  for (std::size_t i = 0; i < m; ++i) {
    // U_i (x) I on [B, E_i, other E_j in order], then into [B, E_1, ..., E_m].
    std::vector<Index> order_dims{db, flat[i + 1]};
    Index rest = 1;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      order_dims.push_back(flat[j + 1]);
      rest *= flat[j + 1];
    }
    const ComplexMatrix local = kron(ops[i].unitary(), ComplexMatrix::Identity(rest, rest));
    std::vector<Index> perm{0};
    for (std::size_t j = 0; j < m; ++j) {
      perm.push_back(j == i ? 1 : static_cast<Index>(2 + (j < i ? j : j - 1)));
    }
    u += kron(povm[i].matrix(), permute_subsystems(local, order_dims, perm));
  }

  std::vector<Index> input_dims{da};
  input_dims.insert(input_dims.end(), ref.input_dims().begin(), ref.input_dims().end());
  const Hamiltonian h_in(kron_sum({povm.hamiltonian().op(), ref.input_hamiltonian().op()}));
  const Hamiltonian h_anc(kron_sum(anc_terms));
  std::vector<Index> traced{0};
  for (Index k = 0; k < static_cast<Index>(anc_dims.size()); ++k) traced.push_back(1 + n_b + k);
  return DilatedThermalOp(std::move(input_dims), h_in, std::move(anc_dims), h_anc, ref.beta(), std::move(u),
                          std::move(traced));
}

DilatedThermalOp pad_with_thermal(const DilatedThermalOp& op, const Hamiltonian& extra, PadSide side) {
  const Index dx = extra.dim();
  const ComplexMatrix u = kron(op.unitary(), ComplexMatrix::Identity(dx, dx));
  if (side == PadSide::kOutput) {
    std::vector<Index> anc = op.ancilla_dims();
    anc.push_back(dx);
    return DilatedThermalOp(op.input_dims(), op.input_hamiltonian(), std::move(anc),
                            Hamiltonian(kron_sum({op.ancilla_hamiltonian().op(), extra.op()})), op.beta(), u,
                            op.traced());
  }
  const auto n_in = static_cast<Index>(op.input_dims().size());
  const auto n = static_cast<Index>(op.factor_dims().size());
  std::vector<Index> dims = op.factor_dims();
  dims.push_back(dx);
  // Output factor order: inputs, X, ancillas.
  std::vector<Index> perm;
  for (Index k = 0; k < n_in; ++k) perm.push_back(k);
  perm.push_back(n);
  for (Index k = n_in; k < n; ++k) perm.push_back(k);
  std::vector<Index> input_dims = op.input_dims();
  input_dims.push_back(dx);
  std::vector<Index> traced;
  for (Index t : op.traced()) traced.push_back(t < n_in ? t : t + 1);
  traced.push_back(n_in);
  return DilatedThermalOp(std::move(input_dims), Hamiltonian(kron_sum({op.input_hamiltonian().op(), extra.op()})),
                          op.ancilla_dims(), op.ancilla_hamiltonian(), op.beta(), permute_subsystems(u, dims, perm),
                          std::move(traced));
}

ComplexMatrix ChoiMatrix::apply(const ComplexMatrix& x) const {
  if (x.rows() != input_dim || x.cols() != input_dim) throw ArgumentError("choi apply: wrong input dimension");
  const ComplexMatrix& c = matrix.matrix();
  ComplexMatrix out = ComplexMatrix::Zero(output_dim, output_dim);
  for (Index i = 0; i < input_dim; ++i) {
    for (Index j = 0; j < input_dim; ++j) {
      if (x(j, i) == Complex(0.0, 0.0)) continue;
      out += x(j, i) * c.block(j * output_dim, i * output_dim, output_dim, output_dim);
    }
  }
  return out;
}

ComplexMatrix ChoiMatrix::superoperator() const {
  const ComplexMatrix& c = matrix.matrix();
  ComplexMatrix s(output_dim * output_dim, input_dim * input_dim);
  for (Index i = 0; i < input_dim; ++i) {
    for (Index j = 0; j < input_dim; ++j) {
      for (Index a = 0; a < output_dim; ++a) {
        for (Index b = 0; b < output_dim; ++b) s(a + output_dim * b, i + input_dim * j) = c(i * output_dim + a, j * output_dim + b);
      }
    }
  }
  return s;
}

ChoiMatrix choi(const LinearMap& channel, Index input_dim, Index output_dim) {
  if (input_dim < 1 || output_dim < 1) throw ArgumentError("choi: dimensions must be >= 1");
  ComplexMatrix c(input_dim * output_dim, input_dim * output_dim);
  for (Index i = 0; i < input_dim; ++i) {
    for (Index j = 0; j < input_dim; ++j) {
      ComplexMatrix e = ComplexMatrix::Zero(input_dim, input_dim);
      e(i, j) = 1.0;
      const ComplexMatrix out = channel(e);
      if (out.rows() != output_dim || out.cols() != output_dim) {
        throw ArgumentError("choi: channel output is not " + std::to_string(output_dim) + "-dimensional");
      }
      c.block(i * output_dim, j * output_dim, output_dim, output_dim) = out;
    }
  }
  return ChoiMatrix{input_dim, output_dim, HermitianOperator(c)};
}

ChoiMatrix choi(const DilatedThermalOp& op) {
  return choi([&op](const ComplexMatrix& x) { return op.apply(x); }, op.input_dim(), op.output_dim());
}

ChoiMatrix choi(const ExtractionChannel& channel) {
  const ComplexMatrix& m = channel.test_operator.matrix();
  return choi(
      [&m](const ComplexMatrix& x) {
        const Complex t = (m * x).trace();
        ComplexMatrix out = ComplexMatrix::Zero(2, 2);
        out(0, 0) = x.trace() - t;
        out(1, 1) = t;
        return out;
      },
      m.rows(), 2);
}

ChoiMatrix conditional_choi(const IncoherentProjectivePOVM& povm, const std::vector<DilatedThermalOp>& ops) {
  if (ops.size() != povm.size() || ops.empty()) throw PreconditionError("conditional channel: size mismatch");
  const Index da = povm.dim();
  const Index db = ops.front().input_dim();
  const Index dc = ops.front().output_dim();
  for (const auto& op : ops) {
    if (op.input_dim() != db || op.output_dim() != dc) throw PreconditionError("conditional channel: dim mismatch");
  }
  const std::vector<Index> dims{da, db};
  const std::vector<Index> traced{0};
  return choi(
      [&](const ComplexMatrix& x) {
        ComplexMatrix out = ComplexMatrix::Zero(dc, dc);
        for (std::size_t i = 0; i < ops.size(); ++i) {
          const ComplexMatrix branch = kron(povm[i].matrix(), ComplexMatrix::Identity(db, db)) * x;
          out += ops[i].apply(partial_trace(branch, dims, traced));
        }
        return out;
      },
      da * db, dc);
}

double choi_distance(const ChoiMatrix& a, const ChoiMatrix& b) {
  if (a.input_dim != b.input_dim || a.output_dim != b.output_dim) {
    throw ArgumentError("choi distance: dimension mismatch");
  }
  return max_abs(a.matrix.matrix() - b.matrix.matrix());
}

}  // namespace bbwork

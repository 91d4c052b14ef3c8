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

// Thermal operations given by their dilation
//
//   E(rho) = Tr_discarded[U (rho (x) tau_E) U^dag],  [U, H_in (x) I + I (x) H_E] = 0,
//
// together with convex mixing, pinching as a mixture of energy-conserving
// phases, compilation of incoherently conditioned thermal operations into a
// single thermal operation, and Choi matrices for channel comparisons.
//
// The dilated space is the tensor product of the input factors followed by
// the ancilla factors. Discarded factors are indexed in that list; the
// output is the product of the kept factors in their original order.

#pragma once

#include <functional>
#include <vector>

#include "bbwork/operator.hpp"
#include "bbwork/thermo.hpp"

namespace bbwork {

struct ExtractionChannel;

inline constexpr double kUnitarityTolerance = 1e-10;
inline constexpr double kCommutatorTolerance = 1e-9;

class DilatedThermalOp {
 public:
  /// Throws ArgumentError on inconsistent dimensions or indices and
  /// PreconditionError if U is not unitary within 1e-10, if
  /// ||[U, H_total]||_F > 1e-9, or if H_total couples kept and discarded
  /// factors (the output Hamiltonian would be undefined).
  DilatedThermalOp(std::vector<Index> input_dims, Hamiltonian input_hamiltonian, std::vector<Index> ancilla_dims,
                   Hamiltonian ancilla_hamiltonian, double beta, ComplexMatrix unitary, std::vector<Index> traced);

  const std::vector<Index>& input_dims() const { return input_dims_; }
  const std::vector<Index>& ancilla_dims() const { return ancilla_dims_; }
  const Hamiltonian& input_hamiltonian() const { return input_h_; }
  const Hamiltonian& ancilla_hamiltonian() const { return ancilla_h_; }
  double beta() const { return beta_; }
  const ComplexMatrix& unitary() const { return u_; }
  /// Sorted discarded factor indices.
  const std::vector<Index>& traced() const { return traced_; }
  /// Kept factor indices, sorted.
  const std::vector<Index>& kept() const { return kept_; }
  /// Input dims followed by ancilla dims.
  const std::vector<Index>& factor_dims() const { return factors_; }

  Index input_dim() const { return input_h_.dim(); }
  Index ancilla_dim() const { return ancilla_h_.dim(); }
  Index output_dim() const { return output_h_.dim(); }
  std::vector<Index> output_dims() const;

  /// H_in (x) I + I (x) H_E.
  const HermitianOperator& total_hamiltonian() const { return total_h_; }
  /// Kept part of the total Hamiltonian, up to an additive constant.
  const Hamiltonian& output_hamiltonian() const { return output_h_; }
  const DensityMatrix& ancilla_gibbs() const { return ancilla_gibbs_; }
  const DensityMatrix& input_gibbs() const { return input_gibbs_; }
  const DensityMatrix& output_gibbs() const { return output_gibbs_; }

  /// ||U^dag U - I||_max and ||[U, H_total]||_F at construction.
  double unitarity_defect() const { return unitarity_defect_; }
  double commutator_defect() const { return commutator_defect_; }

  /// Linear extension to any operator on the input.
  ComplexMatrix apply(const ComplexMatrix& x) const;

 private:
  std::vector<Index> input_dims_;
  std::vector<Index> ancilla_dims_;
  std::vector<Index> factors_;
  Hamiltonian input_h_;
  Hamiltonian ancilla_h_;
  double beta_ = 1.0;
  ComplexMatrix u_;
  std::vector<Index> traced_;
  std::vector<Index> kept_;
  HermitianOperator total_h_;
  Hamiltonian output_h_;
  DensityMatrix ancilla_gibbs_;
  DensityMatrix input_gibbs_;
  DensityMatrix output_gibbs_;
  double unitarity_defect_ = 0.0;
  double commutator_defect_ = 0.0;
};

/// Throws ArgumentError if the input dimension does not match.
DensityMatrix dilation_apply(const DilatedThermalOp& op, const DensityMatrix& rho);

/// ||U H - H U||_F. Throws ArgumentError on a dimension mismatch.
double energy_conservation_defect(const ComplexMatrix& u, const HermitianOperator& h_total);

/// Trivial dilation: identity unitary and a discarded one-level ancilla.
DilatedThermalOp identity_thermal_op(const Hamiltonian& h, double beta);
/// Swaps the system with an ancilla of the same Hamiltonian and discards the
/// ancilla: the output is always the Gibbs state.
DilatedThermalOp replacement_thermal_op(const Hamiltonian& h, double beta);

struct MixedThermalOp {
  DilatedThermalOp op;
  /// Delta_x = -(1/beta) log(p_x / Z_x) added to ancilla Hamiltonian x.
  std::vector<double> shifts;
  /// Source op of each combined-ancilla basis index.
  std::vector<std::size_t> block_of;
  /// First combined-ancilla index of each source op.
  std::vector<Index> offsets;
  std::vector<double> probabilities;
};

/// Sum_x p_x E_x as one thermal operation on the direct-sum ancilla
/// (+)_x (H_x + Delta_x I) with unitary (+)_x U_x. Entries with p_x = 0 are
/// dropped. Throws ArgumentError unless the probabilities are nonnegative and
/// sum to 1 within 1e-12, and every op shares the input system, beta and kept
/// factors, which must all be input factors.
MixedThermalOp mix_thermal_ops(const std::vector<std::pair<double, DilatedThermalOp>>& ops);

/// U_x = Sum_y exp(2 pi i x y / m) Pi_y for x = 0..m-1, Pi_y the energy
/// projectors. The uniform mixture of U_x (.) U_x^dag is the pinching map.
std::vector<ComplexMatrix> pinching_unitaries(const EnergyBlockStructure& blocks);

/// Complete set of orthogonal projectors that commute with the Hamiltonian.
class IncoherentProjectivePOVM {
 public:
  /// Throws PreconditionError unless Sum P_i = I, P_i P_j = delta_ij P_i and
  /// each P_i is incoherent, all within 1e-10.
  IncoherentProjectivePOVM(std::vector<HermitianOperator> projectors, Hamiltonian hamiltonian);

  std::size_t size() const { return projectors_.size(); }
  Index dim() const { return h_.dim(); }
  const std::vector<HermitianOperator>& projectors() const { return projectors_; }
  const HermitianOperator& operator[](std::size_t i) const { return projectors_[i]; }
  const Hamiltonian& hamiltonian() const { return h_; }

  /// Projectors onto each energy block.
  static IncoherentProjectivePOVM energy_blocks(const Hamiltonian& h);

 private:
  std::vector<HermitianOperator> projectors_;
  Hamiltonian h_;
};

/// Measures A with P_i, discards it and applies ops[i] to B, realised as the
/// single thermal operation with unitary Sum_i P_i (x) U_i on A, B and the
/// tensor product of all ancillas. Throws PreconditionError unless
/// |povm| = |ops|, every op maps B to itself (kept factors are exactly its
/// input factors, so dim B = dim C) and all ops share B's Hamiltonian and beta.
DilatedThermalOp compile_icpto(const IncoherentProjectivePOVM& povm, const std::vector<DilatedThermalOp>& ops);

enum class PadSide {
  /// Extra thermal factor appended to the input and discarded.
  kInput,
  /// Extra thermal factor appended to the ancilla and kept.
  kOutput,
};

/// Appends a system with Hamiltonian `extra` in its Gibbs state, untouched by U.
DilatedThermalOp pad_with_thermal(const DilatedThermalOp& op, const Hamiltonian& extra, PadSide side);

/// Choi matrix C = Sum_ij |i><j| (x) E(|i><j|) on input (x) output, so that
/// Tr_out C = I_in and E(X) = Tr_in[(X^T (x) I) C]. Reshuffling C gives the
/// superoperator S with vec(E(X)) = S vec(X) for column-stacking vec.
struct ChoiMatrix {
  Index input_dim = 0;
  Index output_dim = 0;
  HermitianOperator matrix;

  /// C / input_dim, a density matrix.
  HermitianOperator normalized() const { return matrix * (1.0 / static_cast<double>(input_dim)); }
  ComplexMatrix apply(const ComplexMatrix& x) const;
  /// Column-stacking superoperator.
  ComplexMatrix superoperator() const;
};

using LinearMap = std::function<ComplexMatrix(const ComplexMatrix&)>;

ChoiMatrix choi(const LinearMap& channel, Index input_dim, Index output_dim);
ChoiMatrix choi(const DilatedThermalOp& op);
/// Measure-and-prepare extraction channel onto the two-level battery.
ChoiMatrix choi(const ExtractionChannel& channel);

/// Sum_i P_i-branch of the conditional channel, computed branch by branch:
/// X_AB -> Sum_i E_i(Tr_A[(P_i (x) I) X_AB]).
ChoiMatrix conditional_choi(const IncoherentProjectivePOVM& povm, const std::vector<DilatedThermalOp>& ops);

/// max |C1 - C2|; throws ArgumentError on a dimension mismatch.
double choi_distance(const ChoiMatrix& a, const ChoiMatrix& b);

}  // namespace bbwork

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

// Hamiltonians, Gibbs and battery states, energy blocks and the pinching map.

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "bbwork/operator.hpp"

namespace bbwork {

using Rational = boost::rational<std::int64_t>;

struct EnergyBlock {
  double energy = 0.0;
  /// Exact energy when the Hamiltonian carries rational eigenvalues.
  std::optional<Rational> exact_energy;
  /// Columns of the eigenbasis spanning this block.
  std::vector<Index> members;
  HermitianOperator projector;
};

/// Energy eigenspaces of a Hamiltonian, ordered by increasing energy.
struct EnergyBlockStructure {
  Index dim = 0;
  std::vector<EnergyBlock> blocks;
  /// Eigenbasis in which every block is a set of columns.
  ComplexMatrix basis;
  /// Block index of each basis column.
  std::vector<Index> label;
  /// True if `basis` is the computational basis.
  bool computational_basis = false;
  double grouping_tolerance = 0.0;
  /// Some eigenvalue gap fell within a factor 10 of the grouping tolerance.
  bool ambiguous = false;
  /// Grouping was done on exact rational energies.
  bool exact = false;

  std::size_t size() const { return blocks.size(); }
};

/// Hermitian operator with an optional exact rational spectrum.
///
/// Rational eigenvalues are matched against the numeric spectrum as sorted
/// multisets (within 1e-9). The block structure for the default grouping
/// tolerance is computed once at construction and shared between copies.
class Hamiltonian {
 public:
  Hamiltonian() = default;
  explicit Hamiltonian(HermitianOperator op,
                       std::optional<std::vector<Rational>> rational_eigenvalues = std::nullopt);

  static Hamiltonian zero(Index dim);
  static Hamiltonian diagonal(const RealVector& energies);
  /// Diagonal Hamiltonian with exact energies, in basis order.
  static Hamiltonian diagonal(const std::vector<Rational>& energies);

  Index dim() const { return op_.dim(); }
  const HermitianOperator& op() const { return op_; }
  const EigenDecomposition& eigen() const { return eig_; }
  /// Exact eigenvalue of each eigenbasis column, if supplied.
  const std::optional<std::vector<Rational>>& exact_eigenvalues() const { return exact_; }
  bool has_exact() const { return exact_.has_value(); }
  /// 1e-9 * ||H||_max.
  double default_grouping_tolerance() const;
  const EnergyBlockStructure& blocks() const { return *blocks_; }

 private:
  struct Parts {};
  Hamiltonian(HermitianOperator op, EigenDecomposition eig,
              std::optional<std::vector<Rational>> exact, Parts);
  void build_blocks();

  HermitianOperator op_;
  EigenDecomposition eig_;
  std::optional<std::vector<Rational>> exact_;
  std::shared_ptr<const EnergyBlockStructure> blocks_;

  friend Hamiltonian nfold_hamiltonian(const Hamiltonian& h, int n, std::size_t cap);
};

/// Gibbs state of a Hamiltonian at inverse temperature beta.
struct ThermalContext {
  double beta = 1.0;
  Hamiltonian hamiltonian;
  DensityMatrix gibbs;
  double partition_function = 1.0;
  double log_partition_function = 0.0;
};

/// Throws ArgumentError for beta <= 0 and PreconditionError if exp(-beta H)
/// underflows to a rank-deficient matrix.
ThermalContext gibbs_state(const Hamiltonian& h, double beta);

struct BatteryState {
  double m = 1.0;
  /// diag((m-1)/m, 1/m).
  DensityMatrix state;
};

BatteryState battery_state(double m);

/// Groups eigenvalues whose consecutive gaps are at most `grouping_tol`.
/// A negative tolerance selects the Hamiltonian's default. Hamiltonians with
/// exact eigenvalues are grouped by exact equality instead.
EnergyBlockStructure energy_blocks(const Hamiltonian& h, double grouping_tol = -1.0);

/// Sum_E Pi_E A Pi_E.
HermitianOperator pinch(const HermitianOperator& a, const EnergyBlockStructure& blocks);
DensityMatrix pinch(const DensityMatrix& rho, const EnergyBlockStructure& blocks);

/// Finite ordered set of states on one Hilbert space.
///
/// States closer than `kPolicy.dedup_radius` in trace distance to an earlier
/// state are dropped; `source_index` records where each kept state came from.
class BlackBox {
 public:
  BlackBox() = default;
  explicit BlackBox(std::vector<DensityMatrix> states, std::vector<std::string> labels = {});

  Index dim() const { return states_.front().dim(); }
  std::size_t size() const { return states_.size(); }
  const DensityMatrix& operator[](std::size_t i) const { return states_[i]; }
  const std::vector<DensityMatrix>& states() const { return states_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<std::size_t>& source_index() const { return source_; }

 private:
  std::vector<DensityMatrix> states_;
  std::vector<std::string> labels_;
  std::vector<std::size_t> source_;
};

BlackBox pinch_blackbox(const BlackBox& s, const EnergyBlockStructure& blocks);

/// ||pinch(M) - M||_max <= kPolicy.incoherence.
bool is_incoherent(const HermitianOperator& m, const EnergyBlockStructure& blocks);

/// Number of distinct energies.
std::size_t spec_count(const Hamiltonian& h, double grouping_tol = -1.0);
std::size_t spec_count(const ThermalContext& ctx);

/// Sum_j I^{(j-1)} (x) H (x) I^{(n-j)}. Exact eigenvalues are carried over as
/// n-term sums on the product eigenbasis.
Hamiltonian nfold_hamiltonian(const Hamiltonian& h, int n, std::size_t cap = kPolicy.dim_cap);

struct RationalIndependenceResult {
  /// No relation found with |N_i| <= n_max. A bounded certificate only.
  bool independent = true;
  /// Integer relation over the distinct energies, when one exists.
  std::optional<std::vector<std::int64_t>> witness;
  /// Distinct exact energies in increasing order, aligned with `witness`.
  std::vector<Rational> energies;
  int n_max = 0;
};

/// Searches integer vectors N with Sum N_i = 0 and Sum N_i E_i = 0 over the
/// distinct exact energies, in order of increasing max|N_i|. Throws
/// UnsupportedError if `h` has no exact eigenvalues.
RationalIndependenceResult is_rationally_independent(const Hamiltonian& h, int n_max = 6);

}  // namespace bbwork

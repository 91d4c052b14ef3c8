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

// Learning pinched i.i.d. states with incoherent measurements.
//
// For a d-level system whose Hamiltonian is rationally independent, the
// energy blocks of H^(xn) are the type classes, and every nonzero entry of
// P(rho^(x)n) is a product of cyclic products rho_{s1 s2} rho_{s2 s3} ...
// rho_{sm s1} over strings of distinct letters. All of these appear in
// P(rho^(x)d), so d copies determine P(rho^(x)n) for every n.
//
// Letters are 0-based indices of the energy eigenbasis; states passed to the
// cyclic-product functions are written in that basis.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bbwork/operator.hpp"
#include "bbwork/thermo.hpp"

namespace bbwork {

using Cycle = std::vector<int>;

/// Rotates so the smallest letter leads. Orientation is kept.
Cycle canonical_rotation(const Cycle& cycle);

/// Cyclic products of one state, keyed by canonical cycle. Of the two
/// orientations only the one whose second letter is below its last letter is
/// stored; the other is its conjugate.
struct CyclicProductTable {
  Index dim = 0;
  std::map<Cycle, Complex> values;
  /// Cycles that could not be extracted.
  std::vector<Cycle> missing;

  bool complete() const { return missing.empty(); }
  /// Value of any rotation or orientation of `cycle`, if present.
  std::optional<Complex> value(const Cycle& cycle) const;
};

/// Reads every cyclic product from P(rho^(x)d), d = `dim`. Diagonal entries
/// are d-th roots of the all-equal strings; an m-cycle c is read from
/// <j^(d-m) c | P | j^(d-m) rot(c)> / rho_jj^(d-m) with j the smallest index
/// whose rho_jj >= 1e-8.
CyclicProductTable cyclic_products(const HermitianOperator& pinched_d, Index dim);

/// Splits prod_i rho_{s_i t_i} into disjoint-letter cycles. Throws
/// PreconditionError unless s and t are rearrangements of each other.
std::vector<Cycle> decompose_to_cycles(const std::vector<int>& s, const std::vector<int>& t);

/// P(rho^(x)n) rebuilt from cyclic products. Throws PreconditionError naming
/// the first needed cycle that is missing, SizeError above `cap`.
HermitianOperator reconstruct_pinched(const CyclicProductTable& table, int n, std::size_t cap = kPolicy.dim_cap);

/// P(rho^(x)d) for the d-level Hamiltonian `h`.
DensityMatrix pinched_copies(const DensityMatrix& rho, const Hamiltonian& h);

/// True if P(rho1^(x)d) and P(rho2^(x)d) are within 1e-9 in trace distance.
bool pinched_equal(const DensityMatrix& rho1, const DensityMatrix& rho2, const Hamiltonian& h);

/// ceil(C d^(2d) log(1/p_e) / delta'^2). Throws ArgumentError outside
/// delta' > 0, 0 < p_e < 1, C > 0.
std::uint64_t sample_count(Index d, double delta_prime, double p_e, double constant = 1.0);

struct TomographyEstimate {
  /// Block-diagonal, PSD, unit-trace estimate of P(rho^(x)d).
  DensityMatrix estimate;
  std::uint64_t samples = 0;
  std::size_t settings = 0;
  std::string scheme;
};

/// Incoherent measurement scheme on the d-copy space: each setting is an
/// orthonormal basis made of one basis per energy block. A block cycles
/// through its standard basis and, for each round of a round-robin pairing of
/// its letters, the bases (|a> +- |b>)/sqrt2 and (|a> +- i|b>)/sqrt2.
class IncoherentTomography {
 public:
  explicit IncoherentTomography(const Hamiltonian& h);

  Index dim() const { return h_.dim(); }
  std::size_t settings() const { return settings_; }
  const EnergyBlockStructure& blocks() const { return blocks_; }

  /// k Born-rule samples, setting i mod settings() for sample i, then
  /// least-squares inversion per block and projection onto states.
  /// Throws UnsupportedError if k < settings().
  TomographyEstimate estimate(const DensityMatrix& rho, std::uint64_t k, Rng& rng) const;
  /// Same inversion fed with exact outcome probabilities.
  TomographyEstimate estimate_exact(const DensityMatrix& rho) const;

  static constexpr const char* kScheme = "block-local-pairwise-bases-v1";

 private:
  struct Block {
    Index size = 0;
    /// Basis vectors per local basis, in the full d-copy space.
    std::vector<ComplexMatrix> bases;
    /// Maps stacked outcome frequencies to the real parameters of the block.
    Eigen::MatrixXd inverse;
  };

  TomographyEstimate invert(const std::vector<RealVector>& frequencies, std::uint64_t samples) const;
  RealVector probabilities(const ComplexMatrix& state, std::size_t setting) const;

  Hamiltonian h_;
  Hamiltonian hd_;
  EnergyBlockStructure blocks_;
  std::vector<Block> local_;
  std::size_t settings_ = 0;
};

TomographyEstimate simulate_incoherent_tomography(const DensityMatrix& rho, const Hamiltonian& h,
                                                  std::uint64_t k, Rng& rng);

struct IdentificationOutcome {
  std::size_t chosen = 0;
  /// ||estimate - P(rho_i^(x)d)||_1 for each state.
  std::vector<double> distances;
  double delta = 0.0;
  std::optional<bool> success;
};

/// P(rho_i^(x)d) for every state of the box.
std::vector<DensityMatrix> pinched_references(const BlackBox& s, const Hamiltonian& h);

/// Half the smallest trace-norm distance between distinct references;
/// +infinity if every pair is pinched-equal.
double separation_delta(const std::vector<DensityMatrix>& references);
double separation_delta(const BlackBox& s, const Hamiltonian& h);

/// Nearest reference in trace norm, ties to the lowest index. With a truth
/// index, success means the chosen and true references are pinched-equal.
IdentificationOutcome identify(const DensityMatrix& estimate, const std::vector<DensityMatrix>& references,
                               std::optional<std::size_t> truth = std::nullopt);
IdentificationOutcome identify(const DensityMatrix& estimate, const BlackBox& s, const Hamiltonian& h,
                               std::optional<std::size_t> truth = std::nullopt);

struct ProtocolConfig {
  /// Total single-system copies.
  std::int64_t n = 0;
  double epsilon = 0.05;
  /// Tomography accuracy; non-positive selects delta / 2.
  double delta_prime = 0.0;
  double p_e = 0.1;
  double constant = 1.0;
  LogBase base = LogBase::kNats;
  /// Use outcome probabilities instead of samples.
  bool exact_sampling = false;
};

struct ProtocolReport {
  std::size_t true_index = 0;
  std::size_t chosen_index = 0;
  bool success = false;
  /// Tomography samples of the d-copy state.
  std::uint64_t k = 0;
  /// Single-system copies spent on tomography, k d.
  std::int64_t copies_used = 0;
  std::int64_t n = 0;
  double delta = 0.0;
  double delta_prime = 0.0;
  /// D_H^eps(P(rho_chosen^(x)(n - k d)) || tau^(x)(n - k d)) / n.
  double rate = 0.0;
  /// copies_used / n.
  double overhead = 0.0;
};

/// Identifies the state with incoherent tomography on the pinched d-copy
/// state, then reports the one-shot work rate of the identified state on the
/// remaining copies. Pinching and tomography use `reference`, which must be
/// rationally independent when it carries exact eigenvalues; the rate uses
/// `ctx`. Throws ArgumentError if n <= k d.
class Protocol {
 public:
  Protocol(const BlackBox& s, const ThermalContext& ctx, const Hamiltonian& reference, const ProtocolConfig& config);

  ProtocolReport run(std::size_t true_index, Rng& rng) const;

  /// Trials 0..count-1 with streams make_rng(master_seed, trial); the true
  /// index is `true_index` or, if absent, trial mod |S|.
  std::vector<ProtocolReport> run_trials(std::size_t count, std::uint64_t master_seed,
                                         std::optional<std::size_t> true_index = std::nullopt,
                                         unsigned workers = 1) const;

  std::uint64_t k() const { return k_; }
  double delta() const { return delta_; }
  double delta_prime() const { return delta_prime_; }
  double rate(std::size_t index) const { return rates_[index]; }

 private:
  BlackBox s_;
  ProtocolConfig config_;
  IncoherentTomography tomography_;
  std::vector<DensityMatrix> references_;
  double delta_ = 0.0;
  double delta_prime_ = 0.0;
  std::uint64_t k_ = 0;
  std::vector<double> rates_;
};

ProtocolReport run_protocol(const BlackBox& s, std::size_t true_index, const ThermalContext& ctx,
                            const ProtocolConfig& config, Rng& rng);

}  // namespace bbwork

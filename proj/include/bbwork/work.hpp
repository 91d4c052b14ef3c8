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

// Black-box work extraction: one-shot work under Gibbs-preserving (GPO) and
// Gibbs-preserving covariant (GPC) operations, the measure-and-prepare
// extraction channel, n-copy box families and finite-n rate sequences.
//
// Work is reported as the dimensionless beta W = log m, where m labels the
// battery Gibbs state diag((m-1)/m, 1/m).

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bbwork/hypothesis.hpp"
#include "bbwork/operator.hpp"
#include "bbwork/thermo.hpp"

namespace bbwork {

enum class Regime { kGpo, kGpc };

std::string_view to_string(Regime regime);
/// Accepts "gpo" and "gpc"; throws ArgumentError otherwise.
Regime parse_regime(std::string_view text);

struct WorkResult {
  /// log m* in the solver's log base.
  double beta_work = 0.0;
  double m_star = 1.0;
  Regime regime = Regime::kGpo;
  double epsilon = 0.0;
  HTResult ht_result;
};

/// beta W under Gibbs-preserving operations: D_H^eps(S || tau).
WorkResult one_shot_work_gpo(const BlackBox& s, const ThermalContext& ctx, double epsilon,
                             const SolverOptions& options = {});

/// beta W under Gibbs-preserving covariant operations: D_H^eps(P(S) || tau)
/// with the test restricted to be block diagonal in energy.
WorkResult one_shot_work_gpc(const BlackBox& s, const ThermalContext& ctx, double epsilon,
                             const SolverOptions& options = {});

/// rho -> Tr[(I - M) rho] |0><0| + Tr[M rho] |1><1| on the battery, with
/// m = 1 / Tr[M tau] so that tau maps to the battery Gibbs state.
struct ExtractionChannel {
  HermitianOperator test_operator;
  double m = 1.0;

  DensityMatrix apply(const DensityMatrix& rho) const;
};

/// Throws PreconditionError unless 0 <= M <= I (within 1e-9) and
/// Tr[M tau] > 1e-14.
ExtractionChannel build_extraction_channel(const HermitianOperator& m, const ThermalContext& ctx);

/// min over S of F(channel(rho), |1><1|).
double worst_case_fidelity(const ExtractionChannel& channel, const BlackBox& s);

/// Which product states make up the n-copy box.
enum class BoxFamily {
  /// {rho^(x)n : rho in S}
  kIid,
  /// {rho_1 (x) ... (x) rho_n : rho_i in S}
  kTensor,
};

std::string_view to_string(BoxFamily family);
BoxFamily parse_box_family(std::string_view text);

inline constexpr std::size_t kEnumerationCap = 4096;

/// Throws SizeError if dim^n exceeds `dim_cap`.
BlackBox iid_blackbox(const BlackBox& s, int n, std::size_t dim_cap = kPolicy.dim_cap);
/// Enumerates all |S|^n words in lexicographic order. Throws SizeError if
/// |S|^n exceeds `enumeration_cap` or dim^n exceeds `dim_cap`.
BlackBox tensor_blackbox(const BlackBox& s, int n, std::size_t enumeration_cap = kEnumerationCap,
                         std::size_t dim_cap = kPolicy.dim_cap);

/// Limit of beta W(S_n) / n, in nats, shared by both regimes. For the tensor
/// family this is the minimum of D(sigma || tau) over the convex hull of S;
/// for the i.i.d. family it is the minimum over the states of S.
double asymptotic_target(const BlackBox& s, const ThermalContext& ctx, BoxFamily family = BoxFamily::kTensor);

struct RateOptions {
  SolverOptions solver;
  BoxFamily family = BoxFamily::kIid;
  /// Parallel evaluations of distinct n; 0 selects the hardware concurrency.
  unsigned workers = 1;
  std::size_t enumeration_cap = kEnumerationCap;
  std::size_t dim_cap = kPolicy.dim_cap;
  /// Largest n-copy dimension sent to the semidefinite solver.
  std::size_t sdp_dim_cap = 64;
};

struct RatePoint {
  int n = 0;
  /// beta W(S_n) / n in the solver's log base.
  double rate = 0.0;
  /// Duality gap of the n-copy solve (0 for exact classical paths).
  double gap = 0.0;
  SolveStatus status = SolveStatus::kConverged;
  /// "iid-classical", "classical", "blocked-classical" or "sdp".
  std::string path;
};

struct RateSequence {
  Regime regime = Regime::kGpo;
  BoxFamily family = BoxFamily::kIid;
  double epsilon = 0.0;
  LogBase base = LogBase::kNats;
  std::vector<RatePoint> points;
  /// asymptotic_target in `base`.
  double target = 0.0;
  /// False when a size cap stopped the sequence; `points` then holds the
  /// computed prefix and `diagnostic` names the first n that failed.
  bool complete = true;
  std::string diagnostic;
};

/// r_n = beta W(S_n) / n for each n in `n_list`. Diagonal i.i.d. singletons
/// use type classes, commuting problems use linear programming, and a single
/// state commuting with tau^(x)n is reduced blockwise to a classical problem.
RateSequence rate_sequence(const BlackBox& s, const ThermalContext& ctx, double epsilon,
                           const std::vector<int>& n_list, Regime regime, const RateOptions& options = {});

}  // namespace bbwork

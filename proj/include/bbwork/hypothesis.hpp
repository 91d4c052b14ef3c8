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

// Composite hypothesis-testing divergence D_H^eps(S || tau) and related
// divergences.
//
// The primal program is
//
//   minimize Tr[tau M]  s.t.  Tr[rho_i M] >= 1 - eps for all i,  0 <= M <= I,
//
// and D_H^eps = -log of its optimum. The Lagrange dual is
//
//   maximize (1 - eps) sum_i lambda_i - Tr[(sum_i lambda_i rho_i - tau)_+]
//
// over lambda >= 0; every lambda gives a lower bound on the primal optimum.

#pragma once

#include <limits>
#include <string_view>
#include <vector>

#include "bbwork/operator.hpp"
#include "bbwork/thermo.hpp"

namespace bbwork {

struct HTProblem {
  BlackBox null_hypothesis;
  DensityMatrix alternative;
  double epsilon = 0.0;
};

/// Throws ArgumentError unless dims agree and 0 <= eps < 1.
void validate(const HTProblem& problem);

enum class SolveStatus { kConverged, kUnconverged };

std::string_view to_string(SolveStatus status);

struct SolverOptions {
  /// Absolute duality gap on Tr[tau M].
  double tolerance = 1e-6;
  /// Gap relative to Tr[tau M] pursued once `tolerance` is met.
  double relative_tolerance = 1e-7;
  /// Newton iterations over all continuation stages.
  int max_iterations = 100000;
  LogBase base = LogBase::kNats;
  /// Restrict M to be block diagonal with respect to these blocks. Every
  /// state and tau must already be block diagonal.
  const EnergyBlockStructure* blocks = nullptr;
  /// If positive, M is averaged over all permutations of this many equal
  /// tensor factors. Valid when the null set is closed under permutations
  /// and tau is permutation invariant.
  int symmetrize_factors = 0;
};

struct HTResult {
  /// -log(primal_objective) in `base`.
  double value = 0.0;
  LogBase base = LogBase::kNats;
  HermitianOperator test_operator;
  std::vector<double> dual_multipliers;
  double primal_objective = 1.0;
  double dual_objective = 0.0;
  double gap = 0.0;
  int iterations = 0;
  SolveStatus status = SolveStatus::kConverged;
};

/// Solves the primal program with a dual certificate.
///
/// The dual is maximized by damped Newton steps on a smoothed barrier
/// objective, (1-eps) sum lambda - mu Tr softplus(A/mu) + nu sum log lambda
/// with A = sum lambda_i rho_i - tau, while mu and nu are driven to zero.
/// The primal iterate sigmoid(A/mu) is strictly inside 0 < M < I. At
/// eps = 0 the optimal M is the projector onto the span of the supports.
HTResult dh_epsilon(const HTProblem& problem, const SolverOptions& options = {});

/// (1 - eps) sum lambda_i - Tr[psd_part(sum lambda_i rho_i - tau)].
double dual_value(const HTProblem& problem, const std::vector<double>& lambda);

/// Exact linear-programming solve when every operator is diagonal within
/// 1e-12. A single null state uses Neyman-Pearson likelihood-ratio ordering.
HTResult dh_classical(const HTProblem& problem, LogBase base = LogBase::kNats);

/// D_H^eps(rho^(x)n || tau^(x)n) for diagonal rho and tau via type classes,
/// without building the n-fold operators.
double dh_iid_classical(const DensityMatrix& rho, const DensityMatrix& tau, double epsilon, int n,
                        LogBase base = LogBase::kNats);

/// -log Tr[Pi_supp(rho) tau]; +infinity if the overlap vanishes.
double d_min(const DensityMatrix& rho, const DensityMatrix& tau, LogBase base = LogBase::kNats);
/// log min{l : rho <= l sigma}; +infinity if supp(rho) is not inside supp(sigma).
double d_max(const DensityMatrix& rho, const DensityMatrix& sigma, LogBase base = LogBase::kNats);

struct HullOptions {
  /// Frank-Wolfe duality gap at which to stop.
  double tolerance = 1e-7;
  int max_iterations = 20000;
};

struct HullWeights {
  std::vector<double> weights;
  DensityMatrix mixed_state;
  /// Relative entropy of the mixture to tau, in nats.
  double value = std::numeric_limits<double>::infinity();
  double frank_wolfe_gap = 0.0;
  int iterations = 0;
  bool converged = true;
  std::string diagnostic;
};

/// min over the convex hull of S of D(sigma || tau), by Frank-Wolfe with
/// away steps and exact line search.
HullWeights min_relent_hull(const BlackBox& s, const DensityMatrix& tau, const HullOptions& options = {});

/// Gradient of p -> D(sum p_i rho_i || tau) up to an additive constant:
/// Tr[rho_i (log sigma_p - log tau)], with -infinity for states that leave
/// the support of sigma_p.
std::vector<double> relent_hull_gradient(const BlackBox& s, const DensityMatrix& tau, const std::vector<double>& p);

}  // namespace bbwork

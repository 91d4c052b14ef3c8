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

#include "bbwork/work.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <thread>

#include "bbwork/error.hpp"

namespace bbwork {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

WorkResult to_work(HTResult ht, Regime regime, double epsilon) {
  WorkResult out;
  out.regime = regime;
  out.epsilon = epsilon;
  out.beta_work = ht.value;
  out.m_star = 1.0 / ht.primal_objective;
  out.ht_result = std::move(ht);
  return out;
}

void require_dims(const BlackBox& s, const ThermalContext& ctx) {
  if (s.size() == 0) throw ArgumentError("black box is empty");
  if (s.dim() != ctx.gibbs.dim()) {
    throw ArgumentError("black box dim " + std::to_string(s.dim()) + " does not match Gibbs state dim " +
                        std::to_string(ctx.gibbs.dim()));
  }
}

std::size_t checked_power(std::size_t base, int n, std::size_t cap, const std::string& what) {
  std::size_t v = 1;
  for (int i = 0; i < n; ++i) {
    if (v > cap / std::max<std::size_t>(base, 1)) {
      throw SizeError(what + " " + std::to_string(base) + "^" + std::to_string(n) + " exceeds the cap " +
                      std::to_string(cap));
    }
    v *= base;
  }
  if (v > cap) throw SizeError(what + " exceeds the cap " + std::to_string(cap));
  return v;
}

bool all_diagonal(const BlackBox& s, const DensityMatrix& tau) {
  if (!tau.op().is_diagonal(1e-12)) return false;
  return std::all_of(s.states().begin(), s.states().end(),
                     [](const DensityMatrix& r) { return r.op().is_diagonal(1e-12); });
}

// D_H^eps for a single state that is block diagonal in energy. tau is a
// scalar on every block, so diagonalizing the state blockwise gives an
// equivalent classical problem.
HTResult blocked_classical(const DensityMatrix& sigma, const DensityMatrix& tau, const EnergyBlockStructure& blocks,
                           double epsilon, LogBase base) {
  std::vector<double> p, q;
  for (const auto& block : blocks.blocks) {
    const Index r = static_cast<Index>(block.members.size());
    ComplexMatrix v(blocks.dim, r);
    for (Index j = 0; j < r; ++j) v.col(j) = blocks.basis.col(block.members[static_cast<std::size_t>(j)]);
    const ComplexMatrix sub = v.adjoint() * sigma.matrix() * v;
    const ComplexMatrix tsub = v.adjoint() * tau.matrix() * v;
    const double qb = tsub.diagonal().real().mean();
    const RealVector ev = eig_tridiagonal(make_hermitian_unchecked(sub)).values;
    for (Index j = 0; j < r; ++j) {
      p.push_back(std::max(ev(j), 0.0));
      q.push_back(qb);
    }
  }
  RealVector pv = Eigen::Map<RealVector>(p.data(), static_cast<Index>(p.size()));
  RealVector qv = Eigen::Map<RealVector>(q.data(), static_cast<Index>(q.size()));
  pv /= pv.sum();
  qv /= qv.sum();
  return dh_classical({BlackBox({DensityMatrix::diagonal(pv)}), DensityMatrix::diagonal(qv), epsilon}, base);
}

}  // namespace

std::string_view to_string(Regime regime) { return regime == Regime::kGpo ? "gpo" : "gpc"; }

Regime parse_regime(std::string_view text) {
  if (text == "gpo") return Regime::kGpo;
  if (text == "gpc") return Regime::kGpc;
  throw ArgumentError("unknown regime '" + std::string(text) + "' (expected gpo or gpc)");
}

std::string_view to_string(BoxFamily family) { return family == BoxFamily::kIid ? "iid" : "tensor"; }

BoxFamily parse_box_family(std::string_view text) {
  if (text == "iid") return BoxFamily::kIid;
  if (text == "tensor") return BoxFamily::kTensor;
  throw ArgumentError("unknown box family '" + std::string(text) + "' (expected iid or tensor)");
}

WorkResult one_shot_work_gpo(const BlackBox& s, const ThermalContext& ctx, double epsilon,
                             const SolverOptions& options) {
  require_dims(s, ctx);
  return to_work(dh_epsilon({s, ctx.gibbs, epsilon}, options), Regime::kGpo, epsilon);
}

WorkResult one_shot_work_gpc(const BlackBox& s, const ThermalContext& ctx, double epsilon,
                             const SolverOptions& options) {
  require_dims(s, ctx);
  const EnergyBlockStructure& blocks = ctx.hamiltonian.blocks();
  SolverOptions blocked = options;
  blocked.blocks = &blocks;
  HTProblem problem{pinch_blackbox(s, blocks), pinch(ctx.gibbs, blocks), epsilon};
  return to_work(dh_epsilon(problem, blocked), Regime::kGpc, epsilon);
}

DensityMatrix ExtractionChannel::apply(const DensityMatrix& rho) const {
  if (rho.dim() != test_operator.dim()) throw ArgumentError("extraction channel: input dim mismatch");
  const double t = std::clamp(test_operator.inner(rho.op()), 0.0, 1.0);
  RealVector d(2);
  d << 1.0 - t, t;
  return DensityMatrix::diagonal(d);
}

ExtractionChannel build_extraction_channel(const HermitianOperator& m, const ThermalContext& ctx) {
  if (m.dim() != ctx.gibbs.dim()) throw ArgumentError("extraction channel: M and tau dims differ");
  const RealVector ev = eigenvalues(m);
  if (ev.minCoeff() < -1e-9 || ev.maxCoeff() > 1.0 + 1e-9) {
    throw PreconditionError("extraction channel: M must satisfy 0 <= M <= I, eigenvalues lie in [" +
                            std::to_string(ev.minCoeff()) + ", " + std::to_string(ev.maxCoeff()) + "]");
  }
  const double overlap = m.inner(ctx.gibbs.op());
  if (overlap <= 1e-14) {
    throw PreconditionError("degenerate extraction channel: Tr[M tau] = " + std::to_string(overlap) +
                            " leaves m unbounded");
  }
  return {m, 1.0 / overlap};
}

double worst_case_fidelity(const ExtractionChannel& channel, const BlackBox& s) {
  const DensityMatrix excited = DensityMatrix::basis(2, 1);
  double worst = 1.0;
  for (const auto& rho : s.states()) worst = std::min(worst, fidelity(channel.apply(rho), excited));
  return worst;
}

BlackBox iid_blackbox(const BlackBox& s, int n, std::size_t dim_cap) {
  if (n < 1) throw ArgumentError("n must be >= 1, got " + std::to_string(n));
  checked_power(static_cast<std::size_t>(s.dim()), n, dim_cap, "dimension");
  if (n == 1) return s;
  std::vector<DensityMatrix> states;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < s.size(); ++i) {
    states.push_back(kron_power(s[i], n, dim_cap));
    labels.push_back(s.labels()[i] + "^" + std::to_string(n));
  }
  return BlackBox(std::move(states), std::move(labels));
}

BlackBox tensor_blackbox(const BlackBox& s, int n, std::size_t enumeration_cap, std::size_t dim_cap) {
  if (n < 1) throw ArgumentError("n must be >= 1, got " + std::to_string(n));
  const std::size_t words = checked_power(s.size(), n, enumeration_cap, "word count");
  checked_power(static_cast<std::size_t>(s.dim()), n, dim_cap, "dimension");
  if (n == 1) return s;
  std::vector<DensityMatrix> states;
  std::vector<std::string> labels;
  std::vector<std::size_t> word(static_cast<std::size_t>(n), 0);
  for (std::size_t w = 0; w < words; ++w) {
    std::size_t rest = w;
    for (int k = n - 1; k >= 0; --k) {
      word[static_cast<std::size_t>(k)] = rest % s.size();
      rest /= s.size();
    }
    DensityMatrix state = s[word[0]];
    std::string label = s.labels()[word[0]];
    for (int k = 1; k < n; ++k) {
      state = kron(state, s[word[static_cast<std::size_t>(k)]], dim_cap);
      label += "," + s.labels()[word[static_cast<std::size_t>(k)]];
    }
    states.push_back(std::move(state));
    labels.push_back(std::move(label));
  }
  return BlackBox(std::move(states), std::move(labels));
}

double asymptotic_target(const BlackBox& s, const ThermalContext& ctx, BoxFamily family) {
  require_dims(s, ctx);
  if (family == BoxFamily::kIid) {
    double best = kInf;
    for (const auto& rho : s.states()) best = std::min(best, relative_entropy(rho, ctx.gibbs));
    return best;
  }
  const HullWeights hull = min_relent_hull(s, ctx.gibbs);
  if (!hull.converged) throw ConvergenceError("asymptotic target: " + hull.diagnostic);
  return hull.value;
}

namespace {

RatePoint rate_point(const BlackBox& s, const ThermalContext& ctx, double epsilon, int n, Regime regime,
                     const RateOptions& options) {
  if (n < 1) throw ArgumentError("n must be >= 1, got " + std::to_string(n));
  const LogBase base = options.solver.base;
  RatePoint point;
  point.n = n;

  const EnergyBlockStructure& single_blocks = ctx.hamiltonian.blocks();
  if (s.size() == 1 && all_diagonal(s, ctx.gibbs) && is_incoherent(s[0].op(), single_blocks)) {
    point.path = "iid-classical";
    point.rate = dh_iid_classical(s[0], ctx.gibbs, epsilon, n, base) / n;
    return point;
  }

  checked_power(static_cast<std::size_t>(s.dim()), n, options.dim_cap, "dimension");
  BlackBox box = options.family == BoxFamily::kIid ? iid_blackbox(s, n, options.dim_cap)
                                                     : tensor_blackbox(s, n, options.enumeration_cap, options.dim_cap);
  const Hamiltonian hn = nfold_hamiltonian(ctx.hamiltonian, n, options.dim_cap);
  const ThermalContext cn = gibbs_state(hn, ctx.beta);
  const EnergyBlockStructure& blocks = hn.blocks();
  DensityMatrix tau = cn.gibbs;
  if (regime == Regime::kGpc) {
    box = pinch_blackbox(box, blocks);
    tau = pinch(tau, blocks);
  }

  HTResult ht;
  if (all_diagonal(box, tau)) {
    point.path = "classical";
    ht = dh_classical({box, tau, epsilon}, base);
  } else if (box.size() == 1 && is_incoherent(box[0].op(), blocks)) {
    point.path = "blocked-classical";
    ht = blocked_classical(box[0], tau, blocks, epsilon, base);
  } else {
    point.path = "sdp";
    checked_power(static_cast<std::size_t>(s.dim()), n, options.sdp_dim_cap, "semidefinite solve dimension");
    SolverOptions solver = options.solver;
    if (regime == Regime::kGpc) solver.blocks = &blocks;
    ht = dh_epsilon({box, tau, epsilon}, solver);
  }
  point.rate = ht.value / n;
  point.gap = ht.gap;
  point.status = ht.status;
  return point;
}

}  // namespace

RateSequence rate_sequence(const BlackBox& s, const ThermalContext& ctx, double epsilon,
                           const std::vector<int>& n_list, Regime regime, const RateOptions& options) {
  require_dims(s, ctx);
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw ArgumentError("epsilon must lie in [0, 1), got " + std::to_string(epsilon));
  }
  RateSequence out;
  out.regime = regime;
  out.family = options.family;
  out.epsilon = epsilon;
  out.base = options.solver.base;
  out.target = in_base(asymptotic_target(s, ctx, options.family), out.base);

  const std::size_t count = n_list.size();
  std::vector<std::optional<RatePoint>> points(count);
  std::vector<std::string> failures(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        points[i] = rate_point(s, ctx, epsilon, n_list[i], regime, options);
      } catch (const SizeError& e) {
        failures[i] = e.what();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned workers = options.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.workers;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (std::size_t i = 0; i < count; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    if (!points[i]) {
      out.complete = false;
      out.diagnostic = "stopped at n = " + std::to_string(n_list[i]) + ": " + failures[i];
      break;
    }
    out.points.push_back(std::move(*points[i]));
  }
  return out;
}

}  // namespace bbwork

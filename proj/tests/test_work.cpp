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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "bbwork/error.hpp"
#include "bbwork/work.hpp"
#include "test_util.hpp"

namespace bbwork {
namespace {

using test::diag2;
using test::plus_state;
using test::vec;

// tau = diag(0.75, 0.25) at beta = 1.
ThermalContext qubit_context() { return gibbs_state(Hamiltonian::diagonal(vec({0.0, std::log(3.0)})), 1.0); }

ThermalContext random_context(Index dim, Rng& rng) {
  return gibbs_state(Hamiltonian(random_hermitian(dim, rng)), 1.0);
}

BlackBox random_box(Index dim, std::size_t k, Rng& rng) {
  std::vector<DensityMatrix> states;
  for (std::size_t i = 0; i < k; ++i) states.push_back(random_density(dim, rng));
  return BlackBox(std::move(states));
}

// Two-outcome Neyman-Pearson oracle: minimize q.m s.t. p.m >= 1 - eps.
double np_two_outcome(double p0, double p1, double q0, double q1, double eps) {
  const bool first_is_better = p0 * q1 > p1 * q0;
  const double pa = first_is_better ? p0 : p1, qa = first_is_better ? q0 : q1;
  const double pb = first_is_better ? p1 : p0, qb = first_is_better ? q1 : q0;
  const double need = 1.0 - eps;
  if (pa >= need) return qa * need / pa;
  return qa + qb * (need - pa) / pb;
}

TEST(one_shot_work, gibbs_singleton) {
  const ThermalContext ctx = qubit_context();
  for (double eps : {0.05, 0.1, 0.3}) {
    const WorkResult w = one_shot_work_gpo(BlackBox({ctx.gibbs}), ctx, eps);
    EXPECT_NEAR(w.beta_work, -std::log(1.0 - eps), 1e-6);
    EXPECT_NEAR(std::log(w.m_star), w.beta_work, 1e-12);
    EXPECT_EQ(w.regime, Regime::kGpo);
  }
}

TEST(one_shot_work, excited_state) {
  const ThermalContext ctx = qubit_context();
  const BlackBox s({DensityMatrix::basis(2, 1)});
  const double expected = -std::log(np_two_outcome(0.0, 1.0, 0.75, 0.25, 0.1));
  EXPECT_NEAR(expected, -std::log(0.225), 1e-15);
  EXPECT_NEAR(one_shot_work_gpo(s, ctx, 0.1).beta_work, expected, 1e-6);
}

TEST(one_shot_work, zero_epsilon_is_min_relative_entropy) {
  const ThermalContext ctx = qubit_context();
  const DensityMatrix excited = DensityMatrix::basis(2, 1);
  const WorkResult w = one_shot_work_gpo(BlackBox({excited}), ctx, 0.0);
  EXPECT_NEAR(w.beta_work, d_min(excited, ctx.gibbs), 1e-9);
  EXPECT_NEAR(w.beta_work, -std::log(0.25), 1e-9);
}

TEST(one_shot_work, gpc_equals_gpo_on_diagonal_boxes) {
  const ThermalContext ctx = qubit_context();
  const BlackBox s({diag2(0.1, 0.9), diag2(0.3, 0.7)});
  for (double eps : {0.0, 0.05, 0.2}) {
    EXPECT_NEAR(one_shot_work_gpc(s, ctx, eps).beta_work, one_shot_work_gpo(s, ctx, eps).beta_work, 1e-6);
  }
}

TEST(one_shot_work, gpc_plus_state_uses_pinched_state) {
  for (double q : {0.75, 0.6, 0.9}) {
    const ThermalContext ctx = gibbs_state(Hamiltonian::diagonal(vec({0.0, std::log(q / (1.0 - q))})), 1.0);
    const WorkResult w = one_shot_work_gpc(BlackBox({plus_state()}), ctx, 0.1);
    EXPECT_NEAR(w.beta_work, -std::log(np_two_outcome(0.5, 0.5, q, 1.0 - q, 0.1)), 1e-6);
    EXPECT_EQ(w.regime, Regime::kGpc);
    EXPECT_TRUE(is_incoherent(w.ht_result.test_operator, ctx.hamiltonian.blocks()));
  }
}

TEST(one_shot_work, gpc_never_exceeds_gpo) {
  Rng rng = make_rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const Index dim = trial % 2 == 0 ? 2 : 3;
    const ThermalContext ctx = random_context(dim, rng);
    const BlackBox s = random_box(dim, 1 + static_cast<std::size_t>(trial % 4), rng);
    const double gpo = one_shot_work_gpo(s, ctx, 0.1).beta_work;
    const double gpc = one_shot_work_gpc(s, ctx, 0.1).beta_work;
    EXPECT_LE(gpc, gpo + 1e-6) << "trial " << trial;
  }
}

TEST(one_shot_work, rejects_dim_mismatch) {
  const ThermalContext ctx = qubit_context();
  EXPECT_THROW(one_shot_work_gpo(BlackBox({DensityMatrix::maximally_mixed(3)}), ctx, 0.1), ArgumentError);
}

TEST(regime, parse_round_trip) {
  EXPECT_EQ(parse_regime(to_string(Regime::kGpo)), Regime::kGpo);
  EXPECT_EQ(parse_regime(to_string(Regime::kGpc)), Regime::kGpc);
  EXPECT_EQ(parse_box_family(to_string(BoxFamily::kTensor)), BoxFamily::kTensor);
  EXPECT_THROW(parse_regime("to"), ArgumentError);
  EXPECT_THROW(parse_box_family("pair"), ArgumentError);
}

TEST(extraction_channel, identity_test) {
  const ThermalContext ctx = qubit_context();
  const ExtractionChannel ch = build_extraction_channel(HermitianOperator::identity(2), ctx);
  EXPECT_NEAR(ch.m, 1.0, 1e-12);
  EXPECT_NEAR(trace_distance(ch.apply(DensityMatrix::basis(2, 0)), DensityMatrix::basis(2, 1)), 0.0, 1e-12);
  EXPECT_NEAR(trace_distance(ch.apply(ctx.gibbs), battery_state(1.0).state), 0.0, 1e-12);
}

TEST(extraction_channel, scaled_identity) {
  const ThermalContext ctx = qubit_context();
  const double eps = 0.2;
  const ExtractionChannel ch = build_extraction_channel(HermitianOperator::identity(2) * (1.0 - eps), ctx);
  EXPECT_NEAR(ch.m, 1.0 / (1.0 - eps), 1e-12);
  EXPECT_NEAR(worst_case_fidelity(ch, BlackBox({ctx.gibbs})), 1.0 - eps, 1e-12);
}

TEST(extraction_channel, solved_qubit_example) {
  const ThermalContext ctx = qubit_context();
  const BlackBox s({DensityMatrix::basis(2, 1)});
  const WorkResult w = one_shot_work_gpo(s, ctx, 0.1);
  const ExtractionChannel ch = build_extraction_channel(w.ht_result.test_operator, ctx);
  EXPECT_NEAR(ch.m, 1.0 / 0.225, 1e-4);
  const double f = fidelity(ch.apply(s[0]), DensityMatrix::basis(2, 1));
  EXPECT_GE(f, 0.9 - 1e-8);
  EXPECT_NEAR(f, 0.9, 1e-6);
  EXPECT_NEAR(trace_distance(ch.apply(ctx.gibbs), battery_state(ch.m).state), 0.0, 1e-12);
}

TEST(extraction_channel, degenerate_and_invalid_tests) {
  const ThermalContext ctx = qubit_context();
  EXPECT_THROW(build_extraction_channel(HermitianOperator::zero(2), ctx), PreconditionError);
  EXPECT_THROW(build_extraction_channel(HermitianOperator::identity(2) * 1.5, ctx), PreconditionError);
  EXPECT_THROW(build_extraction_channel(HermitianOperator::identity(3), ctx), ArgumentError);
  const ExtractionChannel zero{HermitianOperator::zero(2), std::numeric_limits<double>::infinity()};
  EXPECT_EQ(worst_case_fidelity(zero, BlackBox({ctx.gibbs, plus_state()})), 0.0);
}

TEST(blackbox_families, counts) {
  const BlackBox s({diag2(0.9, 0.1), plus_state()});
  EXPECT_EQ(iid_blackbox(s, 1).size(), 2u);
  EXPECT_EQ(tensor_blackbox(s, 1).size(), 2u);
  EXPECT_EQ(iid_blackbox(s, 3).size(), 2u);
  EXPECT_EQ(tensor_blackbox(s, 3).size(), 8u);
  EXPECT_EQ(tensor_blackbox(s, 3).dim(), 8);
}

TEST(blackbox_families, tensor_words_in_lexicographic_order) {
  const BlackBox s({diag2(0.9, 0.1), plus_state()});
  const BlackBox t = tensor_blackbox(s, 2);
  EXPECT_NEAR(trace_distance(t[1], kron(s[0], s[1])), 0.0, 1e-14);
  EXPECT_NEAR(trace_distance(t[2], kron(s[1], s[0])), 0.0, 1e-14);
  EXPECT_NEAR(trace_distance(iid_blackbox(s, 2)[1], kron(s[1], s[1])), 0.0, 1e-14);
}

TEST(blackbox_families, caps) {
  const BlackBox s({diag2(0.9, 0.1), diag2(0.5, 0.5)});
  EXPECT_THROW(tensor_blackbox(s, 13), SizeError);
  EXPECT_THROW(tensor_blackbox(s, 4, 15), SizeError);
  EXPECT_THROW(iid_blackbox(s, 13), SizeError);
  EXPECT_THROW(iid_blackbox(s, 0), ArgumentError);
}

TEST(asymptotic_target, examples) {
  const ThermalContext ctx = qubit_context();
  const BlackBox eigenstates({DensityMatrix::basis(2, 0), DensityMatrix::basis(2, 1)});
  EXPECT_NEAR(asymptotic_target(eigenstates, ctx, BoxFamily::kTensor), 0.0, 1e-9);
  EXPECT_NEAR(asymptotic_target(BlackBox({ctx.gibbs}), ctx), 0.0, 1e-12);
  EXPECT_NEAR(asymptotic_target(BlackBox({DensityMatrix::basis(2, 0)}), ctx), -std::log(0.75), 1e-9);
}

TEST(asymptotic_target, iid_family_uses_the_best_state) {
  const ThermalContext ctx = qubit_context();
  const BlackBox eigenstates({DensityMatrix::basis(2, 0), DensityMatrix::basis(2, 1)});
  EXPECT_NEAR(asymptotic_target(eigenstates, ctx, BoxFamily::kIid), -std::log(0.75), 1e-9);
}

TEST(rate_sequence, gibbs_singleton) {
  const ThermalContext ctx = qubit_context();
  const double eps = 0.05;
  const std::vector<int> ns = {1, 2, 3, 4, 5, 6};
  const RateSequence seq = rate_sequence(BlackBox({ctx.gibbs}), ctx, eps, ns, Regime::kGpo);
  ASSERT_TRUE(seq.complete);
  ASSERT_EQ(seq.points.size(), ns.size());
  EXPECT_NEAR(seq.target, 0.0, 1e-12);
  for (const RatePoint& p : seq.points) EXPECT_NEAR(p.rate, -std::log(1.0 - eps) / p.n, 1e-9);
}

TEST(rate_sequence, classical_stein_convergence) {
  const ThermalContext ctx = gibbs_state(Hamiltonian::zero(2), 1.0);
  const DensityMatrix rho = diag2(0.9, 0.1);
  const double d = relative_entropy(rho, ctx.gibbs);
  const RateSequence seq = rate_sequence(BlackBox({rho}), ctx, 0.05, {10, 50, 100, 200}, Regime::kGpo);
  ASSERT_EQ(seq.points.size(), 4u);
  EXPECT_NEAR(seq.target, d, 1e-12);
  EXPECT_EQ(seq.points.back().path, "iid-classical");
  EXPECT_LE(std::abs(seq.points.back().rate - d), 0.1);
  for (std::size_t i = 1; i < seq.points.size(); ++i) {
    EXPECT_LE(std::abs(seq.points[i].rate - d), std::abs(seq.points[i - 1].rate - d));
  }
}

TEST(rate_sequence, coherent_qubit_orderings) {
  const ThermalContext ctx = qubit_context();
  Rng rng = make_rng(5);
  const BlackBox s({random_density(2, rng)});
  const std::vector<int> ns = {1, 2, 3, 4, 5, 6};
  const RateSequence gpo = rate_sequence(s, ctx, 0.1, ns, Regime::kGpo);
  const RateSequence gpc = rate_sequence(s, ctx, 0.1, ns, Regime::kGpc);
  ASSERT_EQ(gpo.points.size(), ns.size());
  ASSERT_EQ(gpc.points.size(), ns.size());
  EXPECT_EQ(gpo.target, gpc.target);
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const int n = ns[i];
    EXPECT_EQ(gpo.points[i].path, "sdp");
    EXPECT_EQ(gpc.points[i].path, n == 1 ? "classical" : "blocked-classical");
    EXPECT_LE(gpc.points[i].rate, gpo.points[i].rate + 1e-6);
    // The relative-entropy version of the pinching sandwich on n copies.
    const Hamiltonian hn = nfold_hamiltonian(ctx.hamiltonian, n);
    const DensityMatrix tau_n = gibbs_state(hn, 1.0).gibbs;
    const DensityMatrix rho_n = kron_power(s[0], n);
    const double loss = relative_entropy(rho_n, tau_n) - relative_entropy(pinch(rho_n, hn.blocks()), tau_n);
    EXPECT_GE(loss, -1e-9);
    EXPECT_LE(loss, std::log(n + 1.0) + 1e-9);
  }
}

TEST(rate_sequence, coherent_gap_can_exceed_log_spectrum_count) {
  // |+>, tau = diag(0.75, 0.25), eps = 0.1. The rank-one test onto
  // cos(t)|0> + sin(t)|1> with t = pi/4 + acos(sqrt(0.9)) has overlap 0.9
  // with |+> and Tr[M tau] = 0.35, so the unrestricted value is at least
  // -log 0.35. The pinched state is diag(1/2, 1/2).
  const ThermalContext ctx = qubit_context();
  const double t = std::acos(-1.0) / 4.0 + std::acos(std::sqrt(0.9));
  const double c2 = std::cos(t) * std::cos(t);
  const double feasible = 0.75 * c2 + 0.25 * (1.0 - c2);
  EXPECT_NEAR(feasible, 0.35, 1e-12);
  const double gpc_exact = -std::log(np_two_outcome(0.5, 0.5, 0.75, 0.25, 0.1));
  EXPECT_GT(-std::log(feasible) - gpc_exact, std::log(2.0) + 0.19);

  const RateSequence gpo = rate_sequence(BlackBox({plus_state()}), ctx, 0.1, {1}, Regime::kGpo);
  const RateSequence gpc = rate_sequence(BlackBox({plus_state()}), ctx, 0.1, {1}, Regime::kGpc);
  EXPECT_GE(gpo.points[0].rate, -std::log(feasible) - 1e-6);
  EXPECT_NEAR(gpc.points[0].rate, gpc_exact, 1e-9);
}

TEST(rate_sequence, blocked_path_matches_semidefinite_solve) {
  const ThermalContext ctx = qubit_context();
  Rng rng = make_rng(6);
  const BlackBox s({random_density(2, rng)});
  for (int n : {1, 2, 3}) {
    const Hamiltonian hn = nfold_hamiltonian(ctx.hamiltonian, n);
    const ThermalContext cn = gibbs_state(hn, 1.0);
    const double direct = one_shot_work_gpc(iid_blackbox(s, n), cn, 0.1).beta_work / n;
    const RateSequence seq = rate_sequence(s, ctx, 0.1, {n}, Regime::kGpc);
    EXPECT_NEAR(seq.points[0].rate, direct, 1e-6) << "n = " << n;
  }
}

TEST(rate_sequence, no_work_from_eigenstate_box) {
  const ThermalContext ctx = qubit_context();
  const BlackBox eigenstates({DensityMatrix::basis(2, 0), DensityMatrix::basis(2, 1)});
  RateOptions options;
  options.family = BoxFamily::kTensor;
  const RateSequence seq = rate_sequence(eigenstates, ctx, 0.05, {1, 2, 3, 4, 5, 6}, Regime::kGpo, options);
  ASSERT_TRUE(seq.complete);
  EXPECT_NEAR(seq.target, 0.0, 1e-9);
  for (std::size_t i = 1; i < seq.points.size(); ++i) {
    EXPECT_LE(seq.points[i].rate, seq.points[i - 1].rate + 1e-12);
  }
}

TEST(rate_sequence, partial_prefix_on_cap) {
  const ThermalContext ctx = qubit_context();
  const BlackBox s({plus_state()});
  RateOptions options;
  options.sdp_dim_cap = 8;
  const RateSequence seq = rate_sequence(s, ctx, 0.1, {1, 2, 3, 4, 5}, Regime::kGpo, options);
  EXPECT_FALSE(seq.complete);
  ASSERT_EQ(seq.points.size(), 3u);
  EXPECT_NE(seq.diagnostic.find("n = 4"), std::string::npos);
}

TEST(rate_sequence, parallel_matches_serial) {
  const ThermalContext ctx = qubit_context();
  const BlackBox s({plus_state(), diag2(0.2, 0.8)});
  const std::vector<int> ns = {1, 2, 3, 4};
  RateOptions serial, parallel;
  parallel.workers = 3;
  const RateSequence a = rate_sequence(s, ctx, 0.1, ns, Regime::kGpc, serial);
  const RateSequence b = rate_sequence(s, ctx, 0.1, ns, Regime::kGpc, parallel);
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) EXPECT_EQ(a.points[i].rate, b.points[i].rate);
}

TEST(work_properties, round_trip) {
  Rng rng = make_rng(77);
  const double eps = 0.1;
  for (int trial = 0; trial < 20; ++trial) {
    const Index dim = trial % 2 == 0 ? 2 : 3;
    const ThermalContext ctx = random_context(dim, rng);
    const BlackBox s = random_box(dim, 1 + static_cast<std::size_t>(trial % 4), rng);
    const WorkResult w = one_shot_work_gpo(s, ctx, eps);
    const ExtractionChannel ch = build_extraction_channel(w.ht_result.test_operator, ctx);
    EXPECT_LE(2.0 * trace_distance(ch.apply(ctx.gibbs), battery_state(w.m_star).state), 1e-8);
    EXPECT_GE(worst_case_fidelity(ch, s), 1.0 - eps - 1e-8);
    EXPECT_NEAR(std::log(ch.m), w.beta_work, 1e-6);
    EXPECT_NEAR(std::log(w.m_star), -std::log(w.ht_result.dual_objective), 1e-6 / w.ht_result.dual_objective);
  }
}

TEST(work_properties, converse_for_hand_built_channels) {
  Rng rng = make_rng(78);
  const double eps = 0.1;
  for (int trial = 0; trial < 20; ++trial) {
    const Index dim = trial % 2 == 0 ? 2 : 3;
    const ThermalContext ctx = random_context(dim, rng);
    const BlackBox s = random_box(dim, 1 + static_cast<std::size_t>(trial % 3), rng);
    // Random 0 <= M <= I, mixed with I just enough to reach fidelity 1 - eps.
    const EigenDecomposition es = eig_hermitian(random_hermitian(dim, rng));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RealVector spectrum(dim);
    for (Index j = 0; j < dim; ++j) spectrum(j) = u(rng);
    const HermitianOperator m0 =
        make_hermitian_unchecked(es.vectors * spectrum.cast<Complex>().asDiagonal() * es.vectors.adjoint());
    double worst = 1.0;
    for (const auto& rho : s.states()) worst = std::min(worst, m0.inner(rho.op()));
    const double t = worst >= 1.0 - eps ? 0.0 : (1.0 - eps - worst) / (1.0 - worst);
    const HermitianOperator m = m0 * (1.0 - t) + HermitianOperator::identity(dim) * t;
    const ExtractionChannel ch = build_extraction_channel(m, ctx);
    ASSERT_GE(worst_case_fidelity(ch, s), 1.0 - eps - 1e-12);
    EXPECT_LE(std::log(ch.m), one_shot_work_gpo(s, ctx, eps).beta_work + 1e-6) << "trial " << trial;
  }
}

TEST(work_properties, monotone_under_box_growth) {
  Rng rng = make_rng(79);
  for (int trial = 0; trial < 20; ++trial) {
    const Index dim = trial % 2 == 0 ? 2 : 3;
    const ThermalContext ctx = random_context(dim, rng);
    std::vector<DensityMatrix> states;
    double previous = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 4; ++k) {
      states.push_back(random_density(dim, rng));
      const double w = one_shot_work_gpo(BlackBox(states), ctx, 0.05).beta_work;
      EXPECT_LE(w, previous + 1e-6);
      previous = w;
    }
  }
}

}  // namespace
}  // namespace bbwork

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

#include "bbwork/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bbwork/error.hpp"
#include "bbwork/linear_program.hpp"

namespace bbwork {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double log_cosh(double u) {
  const double a = std::abs(u);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

// log(sinh(d) / d).
double log_sinhc(double d) {
  const double a = std::abs(d);
  if (a < 1e-4) return a * a / 6.0;
  return a + std::log1p(-std::exp(-2.0 * a)) - std::log(2.0) - std::log(a);
}

// Divided difference (sigmoid(x) - sigmoid(y)) / (x - y), sigmoid'(x) at x = y.
double sigmoid_divided_difference(double x, double y) {
  return std::exp(log_sinhc(0.5 * (x - y)) - std::log(4.0) - log_cosh(0.5 * x) - log_cosh(0.5 * y));
}

double neg_log(double x, LogBase base) { return x > 0.0 ? in_base(-std::log(x), base) : kInf; }

// The problem restricted to a list of diagonal blocks.
struct Blocked {
  std::vector<ComplexMatrix> iso;
  std::vector<std::vector<ComplexMatrix>> rho;  // [state][block]
  std::vector<ComplexMatrix> tau;
  Index dim = 0;

  std::size_t k() const { return rho.size(); }
  std::size_t blocks() const { return tau.size(); }

  ComplexMatrix assemble(const std::vector<ComplexMatrix>& parts) const {
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    for (std::size_t b = 0; b < blocks(); ++b) m += iso[b] * parts[b] * iso[b].adjoint();
    return m;
  }
};

Blocked make_blocked(const HTProblem& problem, const EnergyBlockStructure* structure) {
  Blocked out;
  const Index d = problem.alternative.dim();
  out.dim = d;
  if (structure == nullptr) {
    out.iso.push_back(ComplexMatrix::Identity(d, d));
  } else {
    if (structure->dim != d) throw ArgumentError("block structure dim does not match the problem");
    auto check = [&](const HermitianOperator& x, const std::string& name) {
      if (max_abs(pinch(x, *structure).matrix() - x.matrix()) > kPolicy.incoherence) {
        throw PreconditionError(name + " is not block diagonal in the energy eigenbasis");
      }
    };
    check(problem.alternative.op(), "tau");
    for (std::size_t i = 0; i < problem.null_hypothesis.size(); ++i) {
      check(problem.null_hypothesis[i].op(), problem.null_hypothesis.labels()[i]);
    }
    for (const auto& block : structure->blocks) {
      ComplexMatrix v(d, static_cast<Index>(block.members.size()));
      for (std::size_t j = 0; j < block.members.size(); ++j) {
        v.col(static_cast<Index>(j)) = structure->basis.col(block.members[j]);
      }
      out.iso.push_back(std::move(v));
    }
  }
  for (const auto& v : out.iso) out.tau.push_back(v.adjoint() * problem.alternative.matrix() * v);
  for (const auto& rho : problem.null_hypothesis.states()) {
    std::vector<ComplexMatrix> parts;
    for (const auto& v : out.iso) parts.push_back(v.adjoint() * rho.matrix() * v);
    out.rho.push_back(std::move(parts));
  }
  return out;
}

ComplexMatrix combination(const Blocked& p, const Eigen::VectorXd& lambda, std::size_t b) {
  ComplexMatrix a = -p.tau[b];
  for (std::size_t i = 0; i < p.k(); ++i) a += lambda(static_cast<Index>(i)) * p.rho[i][b];
  return a;
}

double real_trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  // Tr[A B] for Hermitian A, B.
  return (a.array() * b.transpose().array()).sum().real();
}

// Exact dual objective at lambda.
double exact_dual(const Blocked& p, const Eigen::VectorXd& lambda, double eps) {
  double pos = 0.0;
  for (std::size_t b = 0; b < p.blocks(); ++b) {
    pos += eigenvalues(make_hermitian_unchecked(combination(p, lambda, b))).cwiseMax(0.0).sum();
  }
  return (1.0 - eps) * lambda.sum() - pos;
}

struct Certificate {
  std::vector<ComplexMatrix> m;
  double primal = kInf;
  Eigen::VectorXd lambda;
  double dual = -kInf;
};

// Makes M feasible by mixing with I, then evaluates Tr[tau M].
double repair_and_evaluate(const Blocked& p, std::vector<ComplexMatrix>& m, double eps) {
  double t = 0.0;
  for (std::size_t i = 0; i < p.k(); ++i) {
    double s = 0.0;
    for (std::size_t b = 0; b < p.blocks(); ++b) s += real_trace_product(p.rho[i][b], m[b]);
    if (s < 1.0 - eps && s < 1.0) t = std::max(t, (1.0 - eps - s) / (1.0 - s));
  }
  if (t > 0.0) {
    t = std::min(1.0, t * (1.0 + 1e-12) + 1e-15);
    for (auto& mb : m) {
      mb *= (1.0 - t);
      mb.diagonal().array() += t;
    }
  }
  double primal = 0.0;
  for (std::size_t b = 0; b < p.blocks(); ++b) primal += real_trace_product(p.tau[b], m[b]);
  return primal;
}

class DualNewton {
 public:
  DualNewton(const Blocked& p, double eps) : p_(p), eps_(eps), k_(static_cast<Index>(p.k())) {}

  // Smoothed barrier objective, or -inf outside lambda > 0.
  double value(const Eigen::VectorXd& lambda, double mu, double nu) const {
    if (lambda.minCoeff() <= 0.0) return -kInf;
    double sp = 0.0;
    for (std::size_t b = 0; b < p_.blocks(); ++b) {
      const RealVector a = eigenvalues(make_hermitian_unchecked(combination(p_, lambda, b)));
      for (Index j = 0; j < a.size(); ++j) sp += softplus(a(j) / mu);
    }
    return (1.0 - eps_) * lambda.sum() - mu * sp + nu * lambda.array().log().sum();
  }

  // Gradient and negated Hessian of the smoothed objective; fills M = sigmoid(A/mu).
  void derivatives(const Eigen::VectorXd& lambda, double mu, double nu, Eigen::VectorXd& grad,
                   Eigen::MatrixXd& neg_hess, std::vector<ComplexMatrix>& m) const {
    grad = Eigen::VectorXd::Constant(k_, 1.0 - eps_);
    grad.array() += nu / lambda.array();
    neg_hess = Eigen::MatrixXd::Zero(k_, k_);
    neg_hess.diagonal().array() += nu / lambda.array().square();
    m.resize(p_.blocks());
    for (std::size_t b = 0; b < p_.blocks(); ++b) {
      // Newton iterates need many decompositions; QL is several times faster
      // than Jacobi here at every size.
      const EigenDecomposition es = eig_tridiagonal(make_hermitian_unchecked(combination(p_, lambda, b)));
      const Index db = es.values.size();
      const RealVector x = es.values / mu;
      RealVector s(db);
      for (Index j = 0; j < db; ++j) s(j) = sigmoid(x(j));
      m[b] = es.vectors * s.cast<Complex>().asDiagonal() * es.vectors.adjoint();
      Eigen::MatrixXd gamma(db, db);
      for (Index c = 0; c < db; ++c) {
        for (Index r = 0; r < db; ++r) gamma(r, c) = sigmoid_divided_difference(x(r), x(c));
      }
      // Rotated states, one column per state.
      Eigen::MatrixXcd rotated(db * db, k_);
      for (Index i = 0; i < k_; ++i) {
        const ComplexMatrix ri = es.vectors.adjoint() * p_.rho[static_cast<std::size_t>(i)][b] * es.vectors;
        rotated.col(i) = Eigen::Map<const Eigen::VectorXcd>(ri.data(), db * db);
        grad(i) -= ri.diagonal().real().dot(s);
      }
      const Eigen::Map<const Eigen::VectorXd> g(gamma.data(), db * db);
      const Eigen::MatrixXcd weighted = g.cast<Complex>().asDiagonal() * rotated;
      neg_hess += (rotated.adjoint() * weighted).real() / mu;
    }
  }

 private:
  const Blocked& p_;
  double eps_;
  Index k_;
};

Certificate solve_dual(const Blocked& p, double eps, const SolverOptions& options, int& iterations,
                       bool& budget_exhausted) {
  const Index k = static_cast<Index>(p.k());
  const double d = static_cast<double>(p.dim);
  DualNewton f(p, eps);
  Eigen::VectorXd lambda = Eigen::VectorXd::Ones(k);
  Certificate best;
  best.lambda = Eigen::VectorXd::Zero(k);
  best.dual = 0.0;
  double mu = 1.0, nu = 1.0;
  const double mu_min = 1e-15;
  Eigen::VectorXd grad;
  Eigen::MatrixXd neg_hess;
  std::vector<ComplexMatrix> m;
  budget_exhausted = false;

  for (;;) {
    const double center_tol = 1e-3 * (static_cast<double>(k) * nu + d * mu);
    for (int step = 0; step < 200; ++step) {
      if (iterations >= options.max_iterations) {
        budget_exhausted = true;
        break;
      }
      f.derivatives(lambda, mu, nu, grad, neg_hess, m);
      Eigen::LDLT<Eigen::MatrixXd> ldlt(neg_hess);
      Eigen::VectorXd delta = ldlt.solve(grad);
      if (ldlt.info() != Eigen::Success || !delta.allFinite()) {
        const double shift = 1e-12 * std::max(1.0, neg_hess.diagonal().maxCoeff());
        delta = (neg_hess + shift * Eigen::MatrixXd::Identity(k, k)).ldlt().solve(grad);
      }
      const double decrement = grad.dot(delta);
      ++iterations;
      // Centered when the Newton decrement is small and every constraint
      // keeps at least half of its barrier slack nu / lambda_i.
      const bool centered = (grad.array().abs() * lambda.array()).maxCoeff() <= 0.5 * nu;
      if (!(decrement > 2.0 * center_tol) && centered) break;
      double t = 1.0;
      for (Index i = 0; i < k; ++i) {
        if (delta(i) < 0.0) t = std::min(t, -0.99 * lambda(i) / delta(i));
      }
      const double f0 = f.value(lambda, mu, nu);
      bool moved = false;
      if (decrement <= 1e-9 * (1.0 + std::abs(f0))) {
        // Inside the quadratic region, where objective differences are
        // below rounding: take the Newton step.
        lambda += t * delta;
        continue;
      }
      while (t > 1e-12) {
        const Eigen::VectorXd trial = lambda + t * delta;
        if (f.value(trial, mu, nu) >= f0 + 0.25 * t * decrement) {
          lambda = trial;
          moved = true;
          break;
        }
        t *= 0.5;
      }
      if (!moved) break;
    }
    if (!budget_exhausted || m.empty()) f.derivatives(lambda, mu, nu, grad, neg_hess, m);

    std::vector<ComplexMatrix> candidate = m;
    const double primal = repair_and_evaluate(p, candidate, eps);
    if (primal < best.primal) {
      best.primal = primal;
      best.m = std::move(candidate);
    }
    const double dual = exact_dual(p, lambda, eps);
    if (dual > best.dual) {
      best.dual = dual;
      best.lambda = lambda;
    }
    const double gap = best.primal - best.dual;
    if (budget_exhausted) break;
    if (gap <= options.tolerance && gap <= options.relative_tolerance * best.primal) break;
    if (mu < mu_min) break;
    mu *= 0.25;
    nu *= 0.25;
  }
  return best;
}

// Averages M over all permutations of `n` equal tensor factors.
ComplexMatrix symmetrize(const ComplexMatrix& m, int n) {
  const Index d = m.rows();
  const Index f = static_cast<Index>(std::llround(std::pow(static_cast<double>(d), 1.0 / n)));
  Index check = 1;
  for (int i = 0; i < n; ++i) check *= f;
  if (check != d) {
    throw ArgumentError("dimension " + std::to_string(d) + " is not a " + std::to_string(n) + "-th power");
  }
  if (n > 6) throw ArgumentError("permutation symmetrization supports at most 6 factors");
  std::vector<Index> dims(static_cast<std::size_t>(n), f);
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  int count = 0;
  do {
    sum += permute_subsystems(m, dims, perm);
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return sum / static_cast<double>(count);
}

bool is_diagonal_operator(const HermitianOperator& a) { return a.is_diagonal(1e-12); }

void require_classical(const HTProblem& problem) {
  std::vector<const HermitianOperator*> ops;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < problem.null_hypothesis.size(); ++i) {
    ops.push_back(&problem.null_hypothesis[i].op());
    names.push_back(problem.null_hypothesis.labels()[i]);
  }
  ops.push_back(&problem.alternative.op());
  names.push_back("tau");
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (is_diagonal_operator(*ops[i])) continue;
    for (std::size_t j = 0; j < ops.size(); ++j) {
      if (j == i) continue;
      const ComplexMatrix comm = ops[i]->matrix() * ops[j]->matrix() - ops[j]->matrix() * ops[i]->matrix();
      if (max_abs(comm) > 1e-12) {
        throw PreconditionError("classical solver needs commuting inputs: " + names[i] + " and " + names[j] +
                                " do not commute");
      }
    }
    throw PreconditionError("classical solver needs diagonal inputs: " + names[i] +
                            " is not diagonal in the computational basis");
  }
}

double classical_dual(const std::vector<RealVector>& p, const RealVector& q, const std::vector<double>& lambda,
                      double eps) {
  RealVector mix = -q;
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    mix += lambda[i] * p[i];
    sum += lambda[i];
  }
  return (1.0 - eps) * sum - mix.cwiseMax(0.0).sum();
}

}  // namespace

std::string_view to_string(SolveStatus status) {
  return status == SolveStatus::kConverged ? "converged" : "unconverged";
}

void validate(const HTProblem& problem) {
  if (!(problem.epsilon >= 0.0 && problem.epsilon < 1.0)) {
    throw ArgumentError("epsilon must lie in [0, 1), got " + std::to_string(problem.epsilon));
  }
  if (problem.null_hypothesis.size() == 0) throw ArgumentError("null hypothesis must contain at least one state");
  if (problem.null_hypothesis.dim() != problem.alternative.dim()) {
    throw ArgumentError("null states have dim " + std::to_string(problem.null_hypothesis.dim()) +
                        " but tau has dim " + std::to_string(problem.alternative.dim()));
  }
}

double dual_value(const HTProblem& problem, const std::vector<double>& lambda) {
  validate(problem);
  if (lambda.size() != problem.null_hypothesis.size()) {
    throw ArgumentError("expected " + std::to_string(problem.null_hypothesis.size()) + " multipliers, got " +
                        std::to_string(lambda.size()));
  }
  ComplexMatrix a = -problem.alternative.matrix();
  double sum = 0.0;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (!(lambda[i] >= 0.0)) throw ArgumentError("dual multipliers must be nonnegative");
    a += lambda[i] * problem.null_hypothesis[i].matrix();
    sum += lambda[i];
  }
  return (1.0 - problem.epsilon) * sum - psd_part(make_hermitian_unchecked(std::move(a))).trace();
}

HTResult dh_epsilon(const HTProblem& problem, const SolverOptions& options) {
  validate(problem);
  const double eps = problem.epsilon;
  const Blocked blocked = make_blocked(problem, options.blocks);

  HTResult out;
  out.base = options.base;
  bool exhausted = false;
  Certificate cert;
  if (eps > 0.0) {
    cert = solve_dual(blocked, eps, options, out.iterations, exhausted);
  } else {
    // M is forced to the identity on every support; the dual certificate
    // comes from a slightly relaxed problem, which is still a valid bound.
    ComplexMatrix support_sum = ComplexMatrix::Zero(blocked.dim, blocked.dim);
    for (const auto& rho : problem.null_hypothesis.states()) support_sum += rho.matrix();
    const HermitianOperator pi = support_projector(make_hermitian_unchecked(support_sum), kPolicy.divergence_support);
    for (const auto& v : blocked.iso) cert.m.push_back(v.adjoint() * pi.matrix() * v);
    cert.primal = 0.0;
    for (std::size_t b = 0; b < blocked.blocks(); ++b) cert.primal += real_trace_product(blocked.tau[b], cert.m[b]);
    SolverOptions relaxed = options;
    relaxed.relative_tolerance = 1e-9;
    const Certificate near = solve_dual(blocked, 1e-10, relaxed, out.iterations, exhausted);
    // The eps = 0 dual supremum may only be approached as lambda grows, so
    // also search along the ray t * lambda, t >= 1 (concave in t).
    auto along = [&](double log_t) { return exact_dual(blocked, std::exp(log_t) * near.lambda, 0.0); };
    // Rounding in the dual grows like 1e-16 * sum(lambda); keep it below 1e-9.
    double lo = 0.0, hi = std::max(0.0, std::log(1e7 / std::max(near.lambda.sum(), 1e-300)));
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 100 && hi - lo > 1e-9; ++it) {
      const double a = hi - golden * (hi - lo), b = lo + golden * (hi - lo);
      (along(a) < along(b) ? lo : hi) = (along(a) < along(b) ? a : b);
    }
    const double t = along(lo) >= along(0.0) ? std::exp(lo) : 1.0;
    cert.lambda = t * near.lambda;
    cert.dual = exact_dual(blocked, cert.lambda, 0.0);
    if (cert.dual < 0.0) {
      cert.lambda.setZero();
      cert.dual = 0.0;
    }
  }

  ComplexMatrix m = blocked.assemble(cert.m);
  if (options.symmetrize_factors > 1) {
    m = symmetrize(m, options.symmetrize_factors);
    const HermitianOperator sym = make_hermitian_unchecked(m);
    for (std::size_t i = 0; i < problem.null_hypothesis.size(); ++i) {
      if (sym.inner(problem.null_hypothesis[i].op()) < 1.0 - eps - 1e-9) {
        throw PreconditionError("permutation average of M is infeasible: the null set is not closed under "
                                "permutations of the tensor factors");
      }
    }
    cert.primal = sym.inner(problem.alternative.op());
  }
  out.test_operator = make_hermitian_unchecked(std::move(m));
  out.primal_objective = cert.primal;
  out.dual_objective = cert.dual;
  out.gap = cert.primal - cert.dual;
  out.dual_multipliers.assign(cert.lambda.data(), cert.lambda.data() + cert.lambda.size());
  out.value = neg_log(cert.primal, options.base);
  out.status = (!exhausted && out.gap <= options.tolerance) || (eps == 0.0 && !exhausted)
                   ? SolveStatus::kConverged
                   : SolveStatus::kUnconverged;
  return out;
}

HTResult dh_classical(const HTProblem& problem, LogBase base) {
  validate(problem);
  require_classical(problem);
  const double eps = problem.epsilon;
  const Index d = problem.alternative.dim();
  const RealVector q = problem.alternative.op().diagonal_real().cwiseMax(0.0);
  std::vector<RealVector> p;
  for (const auto& rho : problem.null_hypothesis.states()) p.push_back(rho.op().diagonal_real().cwiseMax(0.0));
  const std::size_t k = p.size();

  RealVector m = RealVector::Zero(d);
  std::vector<double> lambda(k, 0.0);
  if (k == 1) {
    // Neyman-Pearson: accept outcomes in decreasing order of p/q. Within a
    // tie the lowest index comes last and takes the fractional weight.
    std::vector<Index> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), Index{0});
    const RealVector& p0 = p[0];
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
      // p_a / q_a > p_b / q_b, cross-multiplied so that q = 0 ranks first.
      const double lhs = p0(a) * q(b);
      const double rhs = p0(b) * q(a);
      if (lhs != rhs) return lhs > rhs;
      return a > b;
    });
    double need = 1.0 - eps;
    for (Index j : order) {
      if (need <= 0.0 || p0(j) <= 0.0) break;
      m(j) = std::min(1.0, need / p0(j));
      need -= p0(j) * m(j);
      lambda[0] = q(j) / p0(j);
    }
  } else {
    // u = 1 - m: maximize q.u  s.t.  P u <= eps, 0 <= u <= 1.
    LinearProgram lp;
    lp.a.resize(static_cast<Index>(k), d);
    for (std::size_t i = 0; i < k; ++i) lp.a.row(static_cast<Index>(i)) = p[i].transpose();
    lp.b = Eigen::VectorXd::Constant(static_cast<Index>(k), eps);
    lp.c = q;
    lp.upper = Eigen::VectorXd::Ones(d);
    const LinearProgramSolution sol = solve_lp(lp);
    m = (RealVector::Ones(d) - sol.x).cwiseMax(0.0).cwiseMin(1.0);
    for (std::size_t i = 0; i < k; ++i) lambda[i] = sol.row_duals(static_cast<Index>(i));
  }

  HTResult out;
  out.base = base;
  out.test_operator = HermitianOperator::diagonal(m);
  out.primal_objective = q.dot(m);
  out.dual_multipliers = lambda;
  out.dual_objective = classical_dual(p, q, lambda, eps);
  out.gap = out.primal_objective - out.dual_objective;
  out.value = neg_log(out.primal_objective, base);
  out.status = SolveStatus::kConverged;
  return out;
}

double dh_iid_classical(const DensityMatrix& rho, const DensityMatrix& tau, double epsilon, int n, LogBase base) {
  if (n < 1) throw ArgumentError("dh_iid_classical: n must be >= 1, got " + std::to_string(n));
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw ArgumentError("epsilon must lie in [0, 1), got " + std::to_string(epsilon));
  }
  if (rho.dim() != tau.dim()) throw ArgumentError("rho and tau dims differ");
  if (!is_diagonal_operator(rho.op()) || !is_diagonal_operator(tau.op())) {
    throw PreconditionError("dh_iid_classical needs diagonal rho and tau");
  }
  const Index d = rho.dim();
  const RealVector p = rho.op().diagonal_real().cwiseMax(0.0);
  const RealVector q = tau.op().diagonal_real().cwiseMax(0.0);
  const double types = std::exp(std::lgamma(n + d) - std::lgamma(n + 1) - std::lgamma(d));
  if (types > 2e7) throw SizeError("too many type classes: " + std::to_string(types));

  struct Type {
    double log_ratio;
    double log_p;  // log P^n(type class)
    double log_q;  // log Q^n(type class)
  };
  std::vector<Type> list;
  std::vector<int> counts(static_cast<std::size_t>(d), 0);
  const double log_n_fact = std::lgamma(n + 1.0);
  auto visit = [&]() {
    double lp = log_n_fact, lq = log_n_fact;
    for (Index j = 0; j < d; ++j) {
      const int c = counts[static_cast<std::size_t>(j)];
      if (c == 0) continue;
      const double lf = std::lgamma(c + 1.0);
      lp += (p(j) > 0.0 ? c * std::log(p(j)) : -kInf) - lf;
      lq += (q(j) > 0.0 ? c * std::log(q(j)) : -kInf) - lf;
    }
    if (lp == -kInf) return;
    list.push_back({lq == -kInf ? kInf : lp - lq, lp, lq});
  };
  // Compositions of n into d nonnegative parts.
  auto recurse = [&](auto&& self, Index j, int remaining) -> void {
    if (j == d - 1) {
      counts[static_cast<std::size_t>(j)] = remaining;
      visit();
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      counts[static_cast<std::size_t>(j)] = c;
      self(self, j + 1, remaining - c);
    }
  };
  recurse(recurse, 0, n);
  std::stable_sort(list.begin(), list.end(), [](const Type& a, const Type& b) { return a.log_ratio > b.log_ratio; });

  long double need = 1.0L - static_cast<long double>(epsilon);
  double log_q_total = -kInf;
  auto accumulate = [&](double lq) {
    if (lq == -kInf) return;
    const double hi = std::max(log_q_total, lq);
    log_q_total = hi + std::log(std::exp(log_q_total - hi) + std::exp(lq - hi));
  };
  for (const Type& t : list) {
    if (need <= 0.0L) break;
    const long double mass = std::exp(static_cast<long double>(t.log_p));
    if (mass >= need) {
      accumulate(t.log_q + std::log(static_cast<double>(need / mass)));
      need = 0.0L;
      break;
    }
    accumulate(t.log_q);
    need -= mass;
  }
  return log_q_total == -kInf ? kInf : in_base(-log_q_total, base);
}

double d_min(const DensityMatrix& rho, const DensityMatrix& tau, LogBase base) {
  if (rho.dim() != tau.dim()) throw ArgumentError("d_min: dims differ");
  const HermitianOperator pi = support_projector(rho.op(), kPolicy.divergence_support);
  return neg_log(pi.inner(tau.op()), base);
}

double d_max(const DensityMatrix& rho, const DensityMatrix& sigma, LogBase base) {
  if (rho.dim() != sigma.dim()) throw ArgumentError("d_max: dims differ");
  const EigenDecomposition es = eig_hermitian(sigma.op());
  std::vector<Index> keep;
  for (Index j = 0; j < es.values.size(); ++j) {
    if (es.values(j) > kPolicy.divergence_support) keep.push_back(j);
  }
  ComplexMatrix v(rho.dim(), static_cast<Index>(keep.size()));
  RealVector inv_sqrt(static_cast<Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    v.col(static_cast<Index>(j)) = es.vectors.col(keep[j]);
    inv_sqrt(static_cast<Index>(j)) = 1.0 / std::sqrt(es.values(keep[j]));
  }
  // Weight of rho outside supp(sigma).
  const double inside = (v.adjoint() * rho.matrix() * v).trace().real();
  if (1.0 - inside > kPolicy.divergence_support) return kInf;
  const ComplexMatrix w = inv_sqrt.cast<Complex>().asDiagonal() * (v.adjoint() * rho.matrix() * v) *
                          inv_sqrt.cast<Complex>().asDiagonal();
  const double top = eigenvalues(make_hermitian_unchecked(w)).maxCoeff();
  return in_base(std::log(top), base);
}

}  // namespace bbwork

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

#include <cmath>
#include <limits>

#include "bbwork/error.hpp"
#include "bbwork/hypothesis.hpp"

namespace bbwork {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log of a PSD operator restricted to its support, plus the support projector.
struct SupportLog {
  ComplexMatrix log;
  ComplexMatrix projector;
};

SupportLog support_log(const ComplexMatrix& a) {
  const EigenDecomposition es = eig_hermitian(make_hermitian_unchecked(a));
  const Index n = es.values.size();
  RealVector l = RealVector::Zero(n);
  RealVector in = RealVector::Zero(n);
  for (Index j = 0; j < n; ++j) {
    if (es.values(j) > kPolicy.relent_support) {
      l(j) = std::log(es.values(j));
      in(j) = 1.0;
    }
  }
  return {es.vectors * l.cast<Complex>().asDiagonal() * es.vectors.adjoint(),
          es.vectors * in.cast<Complex>().asDiagonal() * es.vectors.adjoint()};
}

double tr(const ComplexMatrix& a, const ComplexMatrix& b) { return (a.array() * b.transpose().array()).sum().real(); }

// Tr[X log A] for PSD X, -infinity if X has weight outside supp(A).
double trace_log(const ComplexMatrix& x, const SupportLog& a) {
  const double outside = x.trace().real() - tr(x, a.projector);
  if (outside > kPolicy.relent_support) return -kInf;
  return tr(x, a.log);
}

class Hull {
 public:
  Hull(const BlackBox& s, const DensityMatrix& tau) : s_(s), tau_log_(support_log(tau.matrix())) {
    for (const auto& rho : s.states()) {
      if (rho.dim() != tau.dim()) throw ArgumentError("hull: state and tau dims differ");
      finite_.push_back(relative_entropy(rho, tau) < kInf);
      cross_.push_back(tr(rho.matrix(), tau_log_.log));
    }
  }

  ComplexMatrix mixture(const std::vector<double>& p) const {
    ComplexMatrix sigma = ComplexMatrix::Zero(s_.dim(), s_.dim());
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] != 0.0) sigma += p[i] * s_[i].matrix();
    }
    return sigma;
  }

  std::vector<double> gradient(const std::vector<double>& p) const {
    const SupportLog l = support_log(mixture(p));
    std::vector<double> g(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      g[i] = finite_[i] ? trace_log(s_[i].matrix(), l) - cross_[i] : kInf;
    }
    return g;
  }

  // d/dgamma D(sigma + gamma (P - N) || tau), where the direction is P - N.
  double directional(const ComplexMatrix& sigma, const ComplexMatrix& plus, const ComplexMatrix& minus) const {
    const SupportLog l = support_log(sigma);
    const double tm = trace_log(minus, l);
    if (tm == -kInf) return kInf;
    const double tp = trace_log(plus, l);
    if (tp == -kInf) return -kInf;
    return tp - tm - tr(plus - minus, tau_log_.log);
  }

  const std::vector<bool>& finite() const { return finite_; }

 private:
  const BlackBox& s_;
  SupportLog tau_log_;
  std::vector<bool> finite_;
  std::vector<double> cross_;
};

}  // namespace

std::vector<double> relent_hull_gradient(const BlackBox& s, const DensityMatrix& tau, const std::vector<double>& p) {
  if (p.size() != s.size()) throw ArgumentError("hull gradient: weight vector has the wrong length");
  return Hull(s, tau).gradient(p);
}

HullWeights min_relent_hull(const BlackBox& s, const DensityMatrix& tau, const HullOptions& options) {
  const Hull hull(s, tau);
  const std::size_t k = s.size();
  HullWeights out;
  out.weights.assign(k, 0.0);

  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < k; ++i) {
    if (hull.finite()[i]) active.push_back(i);
  }
  if (active.empty()) {
    out.value = kInf;
    out.frank_wolfe_gap = kInf;
    out.converged = true;
    out.diagnostic = "every state has support outside supp(tau): relative entropy is infinite on the whole hull";
    for (auto& w : out.weights) w = 1.0 / static_cast<double>(k);
    out.mixed_state = DensityMatrix(make_hermitian_unchecked(hull.mixture(out.weights)));
    return out;
  }
  std::vector<double>& p = out.weights;
  for (std::size_t i : active) p[i] = 1.0 / static_cast<double>(active.size());

  out.converged = false;
  for (out.iterations = 0; out.iterations < options.max_iterations; ++out.iterations) {
    const std::vector<double> g = hull.gradient(p);
    std::size_t fw = active.front(), away = active.front();
    double g_p = 0.0;
    for (std::size_t i : active) {
      if (g[i] < g[fw]) fw = i;
      if (p[i] > 0.0 && (p[away] == 0.0 || g[i] > g[away])) away = i;
      if (p[i] > 0.0) g_p += p[i] * g[i];
    }
    out.frank_wolfe_gap = g[fw] == -kInf ? kInf : g_p - g[fw];
    if (out.frank_wolfe_gap <= options.tolerance) {
      out.converged = true;
      break;
    }

    const ComplexMatrix sigma = hull.mixture(p);
    const bool use_away = p[away] < 1.0 && (g[away] - g_p) > (g_p - g[fw]);
    ComplexMatrix plus, minus;
    double gamma_max;
    if (use_away) {
      plus = sigma;
      minus = s[away].matrix();
      gamma_max = p[away] / (1.0 - p[away]);
    } else {
      plus = s[fw].matrix();
      minus = sigma;
      gamma_max = 1.0;
    }
    const ComplexMatrix dir = plus - minus;
    auto slope = [&](double gamma) { return hull.directional(sigma + gamma * dir, plus, minus); };

    double gamma;
    if (slope(gamma_max) <= 0.0) {
      gamma = gamma_max;
    } else {
      double lo = 0.0, hi = gamma_max;
      for (int it = 0; it < 60 && hi - lo > 1e-15 * gamma_max; ++it) {
        const double mid = 0.5 * (lo + hi);
        (slope(mid) > 0.0 ? hi : lo) = mid;
      }
      gamma = 0.5 * (lo + hi);
    }

    if (use_away) {
      for (std::size_t i : active) p[i] *= (1.0 + gamma);
      p[away] -= gamma;
      if (gamma == gamma_max) p[away] = 0.0;
    } else {
      for (std::size_t i : active) p[i] *= (1.0 - gamma);
      p[fw] += gamma;
    }
    double total = 0.0;
    for (std::size_t i : active) {
      p[i] = std::max(p[i], 0.0);
      total += p[i];
    }
    for (std::size_t i : active) p[i] /= total;
  }

  out.mixed_state = DensityMatrix(make_hermitian_unchecked(hull.mixture(p)));
  out.value = relative_entropy(out.mixed_state, tau);
  if (!out.converged) {
    out.diagnostic = "Frank-Wolfe gap " + std::to_string(out.frank_wolfe_gap) + " above tolerance after " +
                     std::to_string(out.iterations) + " iterations";
  }
  return out;
}

}  // namespace bbwork

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

#include "bbwork/tomography.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <thread>

#include "bbwork/error.hpp"
#include "bbwork/work.hpp"

namespace bbwork {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPaddingThreshold = 1e-8;
constexpr double kPinchedEqualTolerance = 1e-9;

std::string cycle_name(const Cycle& c) {
  std::string out = "(";
  for (std::size_t i = 0; i < c.size(); ++i) out += (i ? "," : "") + std::to_string(c[i]);
  return out + ")";
}

Index pow_index(Index base, int exp, std::size_t cap) {
  Index v = 1;
  for (int i = 0; i < exp; ++i) {
    if (static_cast<std::size_t>(v) > cap / static_cast<std::size_t>(base)) {
      throw SizeError("dimension " + std::to_string(base) + "^" + std::to_string(exp) + " exceeds the cap " +
                      std::to_string(cap));
    }
    v *= base;
  }
  return v;
}

Index string_index(const std::vector<int>& s, Index d) {
  Index idx = 0;
  for (int letter : s) idx = idx * d + letter;
  return idx;
}

std::vector<int> index_string(Index idx, Index d, int n) {
  std::vector<int> s(static_cast<std::size_t>(n));
  for (int k = n - 1; k >= 0; --k) {
    s[static_cast<std::size_t>(k)] = static_cast<int>(idx % d);
    idx /= d;
  }
  return s;
}

// Calls f on every sequence of m distinct letters below d whose first letter
// is the smallest and, for m >= 3, whose second letter is below its last.
template <typename F>
void for_each_canonical_cycle(int d, int m, F&& f) {
  Cycle c(static_cast<std::size_t>(m));
  std::vector<bool> used(static_cast<std::size_t>(d), false);
  auto rec = [&](auto&& self, int pos) -> void {
    if (pos == m) {
      if (m >= 3 && c[1] > c[static_cast<std::size_t>(m - 1)]) return;
      f(c);
      return;
    }
    for (int a = c[0] + 1; a < d; ++a) {
      if (used[static_cast<std::size_t>(a)]) continue;
      used[static_cast<std::size_t>(a)] = true;
      c[static_cast<std::size_t>(pos)] = a;
      self(self, pos + 1);
      used[static_cast<std::size_t>(a)] = false;
    }
  };
  for (int first = 0; first < d; ++first) {
    c[0] = first;
    used[static_cast<std::size_t>(first)] = true;
    rec(rec, 1);
    used[static_cast<std::size_t>(first)] = false;
  }
}

ComplexMatrix block_columns(const EnergyBlockStructure& blocks, const EnergyBlock& block) {
  ComplexMatrix v(blocks.dim, static_cast<Index>(block.members.size()));
  for (std::size_t j = 0; j < block.members.size(); ++j) v.col(static_cast<Index>(j)) = blocks.basis.col(block.members[j]);
  return v;
}

}  // namespace

Cycle canonical_rotation(const Cycle& cycle) {
  if (cycle.empty()) return cycle;
  const auto first = std::min_element(cycle.begin(), cycle.end());
  Cycle out(first, cycle.end());
  out.insert(out.end(), cycle.begin(), first);
  return out;
}

std::optional<Complex> CyclicProductTable::value(const Cycle& cycle) const {
  Cycle c = canonical_rotation(cycle);
  bool conjugate = false;
  if (c.size() >= 3 && c[1] > c.back()) {
    std::reverse(c.begin() + 1, c.end());
    conjugate = true;
  }
  const auto it = values.find(c);
  if (it == values.end()) return std::nullopt;
  return conjugate ? std::conj(it->second) : it->second;
}

CyclicProductTable cyclic_products(const HermitianOperator& pinched_d, Index dim) {
  if (dim < 1) throw ArgumentError("cyclic_products: dimension must be >= 1");
  const int d = static_cast<int>(dim);
  const Index total = pow_index(dim, d, kPolicy.dim_cap);
  if (pinched_d.dim() != total) {
    throw ArgumentError("cyclic_products: expected a " + std::to_string(total) + "-dimensional d-copy operator, got " +
                        std::to_string(pinched_d.dim()));
  }
  CyclicProductTable table;
  table.dim = dim;
  RealVector diag(dim);
  for (int i = 0; i < d; ++i) {
    const Index idx = string_index(std::vector<int>(static_cast<std::size_t>(d), i), dim);
    diag(i) = std::pow(std::max(pinched_d(idx, idx).real(), 0.0), 1.0 / d);
    table.values[{i}] = diag(i);
  }
  int pad = -1;
  for (int j = 0; j < d; ++j) {
    if (diag(j) >= kPaddingThreshold) {
      pad = j;
      break;
    }
  }
  for (int m = 2; m <= d; ++m) {
    for_each_canonical_cycle(d, m, [&](const Cycle& c) {
      if (m < d && pad < 0) {
        table.missing.push_back(c);
        return;
      }
      std::vector<int> s(static_cast<std::size_t>(d - m), pad), t(static_cast<std::size_t>(d - m), pad);
      for (int k = 0; k < m; ++k) {
        s.push_back(c[static_cast<std::size_t>(k)]);
        t.push_back(c[static_cast<std::size_t>((k + 1) % m)]);
      }
      const Complex entry = pinched_d(string_index(s, dim), string_index(t, dim));
      table.values[c] = entry / std::pow(m < d ? diag(pad) : 1.0, d - m);
    });
  }
  return table;
}

std::vector<Cycle> decompose_to_cycles(const std::vector<int>& s, const std::vector<int>& t) {
  std::vector<int> ss = s, ts = t;
  std::sort(ss.begin(), ss.end());
  std::sort(ts.begin(), ts.end());
  if (ss != ts) throw PreconditionError("decompose_to_cycles: strings are not in the same type class");

  std::vector<Cycle> cycles;
  std::vector<bool> used(s.size(), false);
  for (std::size_t start = 0; start < s.size(); ++start) {
    if (used[start]) continue;
    std::vector<int> path{s[start]};
    std::size_t p = start;
    while (true) {
      used[p] = true;
      const int b = t[p];
      const auto hit = std::find(path.begin(), path.end(), b);
      if (hit != path.end()) {
        const auto q = static_cast<std::size_t>(hit - path.begin());
        cycles.push_back(canonical_rotation(Cycle(path.begin() + static_cast<std::ptrdiff_t>(q), path.end())));
        path.resize(q + 1);
        if (q == 0) break;
      } else {
        path.push_back(b);
      }
      p = s.size();
      for (std::size_t k = 0; k < s.size(); ++k) {
        if (!used[k] && s[k] == path.back()) {
          p = k;
          break;
        }
      }
      if (p == s.size()) throw PreconditionError("decompose_to_cycles: unbalanced strings");
    }
  }
  return cycles;
}

HermitianOperator reconstruct_pinched(const CyclicProductTable& table, int n, std::size_t cap) {
  if (n < 1) throw ArgumentError("reconstruct_pinched: n must be >= 1");
  const Index d = table.dim;
  const Index total = pow_index(d, n, cap);
  std::map<std::vector<int>, std::vector<Index>> classes;
  for (Index idx = 0; idx < total; ++idx) {
    std::vector<int> counts(static_cast<std::size_t>(d), 0);
    for (int letter : index_string(idx, d, n)) ++counts[static_cast<std::size_t>(letter)];
    classes[counts].push_back(idx);
  }
  ComplexMatrix out = ComplexMatrix::Zero(total, total);
  for (const auto& [type, members] : classes) {
    for (std::size_t a = 0; a < members.size(); ++a) {
      const std::vector<int> s = index_string(members[a], d, n);
      for (std::size_t b = a; b < members.size(); ++b) {
        const std::vector<int> t = index_string(members[b], d, n);
        Complex v = 1.0;
        for (const Cycle& c : decompose_to_cycles(s, t)) {
          const std::optional<Complex> x = table.value(c);
          if (!x) throw PreconditionError("reconstruct_pinched: cyclic product " + cycle_name(c) + " is missing");
          v *= *x;
        }
        out(members[a], members[b]) = v;
        out(members[b], members[a]) = std::conj(v);
      }
    }
  }
  return make_hermitian_unchecked(std::move(out));
}

DensityMatrix pinched_copies(const DensityMatrix& rho, const Hamiltonian& h) {
  if (rho.dim() != h.dim()) throw ArgumentError("pinched_copies: state and Hamiltonian dims differ");
  const int d = static_cast<int>(h.dim());
  return pinch(kron_power(rho, d), nfold_hamiltonian(h, d).blocks());
}

bool pinched_equal(const DensityMatrix& rho1, const DensityMatrix& rho2, const Hamiltonian& h) {
  return trace_distance(pinched_copies(rho1, h), pinched_copies(rho2, h)) <= kPinchedEqualTolerance;
}

std::uint64_t sample_count(Index d, double delta_prime, double p_e, double constant) {
  if (d < 1) throw ArgumentError("sample_count: d must be >= 1");
  if (!(delta_prime > 0.0)) throw ArgumentError("sample_count: delta' must be positive");
  if (!(p_e > 0.0 && p_e < 1.0)) throw ArgumentError("sample_count: p_e must lie in (0, 1)");
  if (!(constant > 0.0)) throw ArgumentError("sample_count: C must be positive");
  const double dd = static_cast<double>(d);
  const double value = constant * std::pow(dd, 2.0 * dd) / (delta_prime * delta_prime) * std::log(1.0 / p_e);
  if (!(value < 1.8e19)) throw SizeError("sample_count: count overflows 64 bits");
  // Relative slack so exact products are not pushed up by rounding.
  return static_cast<std::uint64_t>(std::ceil(value * (1.0 - 1e-12)));
}

namespace {

// Standard basis, then for every round of a round-robin pairing of the
// letters two bases (|a> +- |b>)/sqrt2 and (|a> +- i|b>)/sqrt2.
std::vector<ComplexMatrix> pairwise_bases(Index r) {
  std::vector<ComplexMatrix> out{ComplexMatrix::Identity(r, r)};
  if (r < 2) return out;
  const Index players = r % 2 == 0 ? r : r + 1;
  const double h = 1.0 / std::sqrt(2.0);
  for (Index round = 0; round + 1 < players; ++round) {
    std::vector<std::pair<Index, Index>> pairs{{players - 1, round}};
    for (Index k = 1; k < players / 2; ++k) {
      pairs.emplace_back((round + k) % (players - 1), (round - k + players - 1) % (players - 1));
    }
    for (const Complex phase : {Complex(1.0, 0.0), Complex(0.0, 1.0)}) {
      ComplexMatrix u = ComplexMatrix::Zero(r, r);
      Index col = 0;
      for (auto [a, b] : pairs) {
        if (a >= r || b >= r) {
          const Index single = a >= r ? b : a;
          u(single, col++) = 1.0;
          continue;
        }
        u(a, col) = h;
        u(b, col++) = h * phase;
        u(a, col) = h;
        u(b, col++) = -h * phase;
      }
      out.push_back(std::move(u));
    }
  }
  return out;
}

}  // namespace

IncoherentTomography::IncoherentTomography(const Hamiltonian& h)
    : h_(h), hd_(nfold_hamiltonian(h, static_cast<int>(h.dim()))), blocks_(hd_.blocks()) {
  for (const auto& block : blocks_.blocks) {
    Block local;
    local.size = static_cast<Index>(block.members.size());
    const Index r = local.size;
    const ComplexMatrix v = block_columns(blocks_, block);
    for (const ComplexMatrix& u : pairwise_bases(r)) local.bases.push_back(v * u);
    // Rows: <u|X|u> for every vector of every local basis. Columns: X_aa,
    // then Re X_ab and Im X_ab for a < b.
    const Index params = r * r;
    Eigen::MatrixXd design(static_cast<Index>(local.bases.size()) * r, params);
    Index row = 0;
    for (const auto& full : local.bases) {
      const ComplexMatrix u = v.adjoint() * full;
      for (Index col = 0; col < r; ++col, ++row) {
        Index k = 0;
        for (Index a = 0; a < r; ++a) design(row, k++) = std::norm(u(a, col));
        for (Index a = 0; a < r; ++a) {
          for (Index b = a + 1; b < r; ++b) {
            const Complex w = std::conj(u(a, col)) * u(b, col);
            design(row, k++) = 2.0 * w.real();
            design(row, k++) = -2.0 * w.imag();
          }
        }
      }
    }
    local.inverse = design.completeOrthogonalDecomposition().pseudoInverse();
    settings_ = std::max(settings_, local.bases.size());
    local_.push_back(std::move(local));
  }
}

RealVector IncoherentTomography::probabilities(const ComplexMatrix& state, std::size_t setting) const {
  RealVector p(blocks_.dim);
  Index k = 0;
  for (const Block& local : local_) {
    const ComplexMatrix& full = local.bases[setting % local.bases.size()];
    for (Index col = 0; col < local.size; ++col) {
      p(k++) = std::max((full.col(col).adjoint() * state * full.col(col))(0, 0).real(), 0.0);
    }
  }
  return p / p.sum();
}

TomographyEstimate IncoherentTomography::invert(const std::vector<RealVector>& frequencies,
                                                std::uint64_t samples) const {
  const Index dim = blocks_.dim;
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  Index offset = 0;
  for (std::size_t b = 0; b < local_.size(); ++b) {
    const Block& local = local_[b];
    const Index r = local.size;
    RealVector data(static_cast<Index>(local.bases.size()) * r);
    data.setZero();
    // Settings that reuse a local basis are averaged into one row block.
    std::vector<int> uses(local.bases.size(), 0);
    for (std::size_t j = 0; j < frequencies.size(); ++j) {
      const std::size_t l = j % local.bases.size();
      data.segment(static_cast<Index>(l) * r, r) += frequencies[j].segment(offset, r);
      ++uses[l];
    }
    for (std::size_t l = 0; l < uses.size(); ++l) data.segment(static_cast<Index>(l) * r, r) /= uses[l];
    const RealVector x = local.inverse * data;

    ComplexMatrix block(r, r);
    Index k = 0;
    for (Index a = 0; a < r; ++a) block(a, a) = x(k++);
    for (Index a = 0; a < r; ++a) {
      for (Index c = a + 1; c < r; ++c) {
        block(a, c) = Complex(x(k), x(k + 1));
        block(c, a) = std::conj(block(a, c));
        k += 2;
      }
    }
    const EigenDecomposition es = eig_hermitian(make_hermitian_unchecked(block));
    const ComplexMatrix clipped =
        es.vectors * es.values.cwiseMax(0.0).cast<Complex>().asDiagonal() * es.vectors.adjoint();
    const EnergyBlock& eb = blocks_.blocks[b];
    if (blocks_.computational_basis) {
      for (Index a = 0; a < r; ++a) {
        for (Index c = 0; c < r; ++c) {
          out(eb.members[static_cast<std::size_t>(a)], eb.members[static_cast<std::size_t>(c)]) = clipped(a, c);
        }
      }
    } else {
      const ComplexMatrix v = block_columns(blocks_, eb);
      out += v * clipped * v.adjoint();
    }
    offset += r;
  }
  const double trace = out.trace().real();
  if (!(trace > 0.0)) throw PreconditionError("tomography: estimate has no positive part");
  out /= trace;
  TomographyEstimate est{DensityMatrix(make_hermitian_unchecked(std::move(out))), samples, settings_, kScheme};
  return est;
}

TomographyEstimate IncoherentTomography::estimate(const DensityMatrix& rho, std::uint64_t k, Rng& rng) const {
  if (rho.dim() != dim()) throw ArgumentError("tomography: state and Hamiltonian dims differ");
  if (k < settings_) {
    throw UnsupportedError("tomography: " + std::to_string(k) + " samples leave the inversion rank deficient; at least " +
                           std::to_string(settings_) + " are needed");
  }
  const ComplexMatrix state = kron_power(rho.matrix(), static_cast<int>(dim()));
  std::vector<RealVector> freq;
  for (std::size_t j = 0; j < settings_; ++j) {
    const std::uint64_t shots = k / settings_ + (j < k % settings_ ? 1 : 0);
    const RealVector p = probabilities(state, j);
    std::discrete_distribution<Index> outcome(p.data(), p.data() + p.size());
    RealVector counts = RealVector::Zero(p.size());
    for (std::uint64_t i = 0; i < shots; ++i) counts(outcome(rng)) += 1.0;
    freq.push_back(counts / static_cast<double>(shots));
  }
  return invert(freq, k);
}

TomographyEstimate IncoherentTomography::estimate_exact(const DensityMatrix& rho) const {
  if (rho.dim() != dim()) throw ArgumentError("tomography: state and Hamiltonian dims differ");
  const ComplexMatrix state = kron_power(rho.matrix(), static_cast<int>(dim()));
  std::vector<RealVector> freq;
  for (std::size_t j = 0; j < settings_; ++j) freq.push_back(probabilities(state, j));
  return invert(freq, 0);
}

TomographyEstimate simulate_incoherent_tomography(const DensityMatrix& rho, const Hamiltonian& h,
                                                  std::uint64_t k, Rng& rng) {
  return IncoherentTomography(h).estimate(rho, k, rng);
}

std::vector<DensityMatrix> pinched_references(const BlackBox& s, const Hamiltonian& h) {
  std::vector<DensityMatrix> out;
  if (s.size() == 0) return out;
  if (s.dim() != h.dim()) throw ArgumentError("pinched_references: box and Hamiltonian dims differ");
  const int d = static_cast<int>(h.dim());
  const Hamiltonian hd = nfold_hamiltonian(h, d);
  for (const auto& rho : s.states()) out.push_back(pinch(kron_power(rho, d), hd.blocks()));
  return out;
}

double separation_delta(const std::vector<DensityMatrix>& references) {
  double best = kInf;
  for (std::size_t i = 0; i < references.size(); ++i) {
    for (std::size_t j = i + 1; j < references.size(); ++j) {
      const double t = trace_distance(references[i], references[j]);
      if (t > kPinchedEqualTolerance) best = std::min(best, t);
    }
  }
  return best;
}

double separation_delta(const BlackBox& s, const Hamiltonian& h) { return separation_delta(pinched_references(s, h)); }

IdentificationOutcome identify(const DensityMatrix& estimate, const std::vector<DensityMatrix>& references,
                               std::optional<std::size_t> truth) {
  if (references.empty()) throw ArgumentError("identify: no reference states");
  IdentificationOutcome out;
  for (const auto& ref : references) {
    if (ref.dim() != estimate.dim()) throw ArgumentError("identify: estimate and reference dims differ");
    out.distances.push_back(trace_norm(estimate.op() - ref.op()));
  }
  for (std::size_t i = 1; i < out.distances.size(); ++i) {
    if (out.distances[i] < out.distances[out.chosen]) out.chosen = i;
  }
  out.delta = separation_delta(references);
  if (truth) {
    if (*truth >= references.size()) throw ArgumentError("identify: truth index out of range");
    out.success = trace_distance(references[out.chosen], references[*truth]) <= kPinchedEqualTolerance;
  }
  return out;
}

IdentificationOutcome identify(const DensityMatrix& estimate, const BlackBox& s, const Hamiltonian& h,
                               std::optional<std::size_t> truth) {
  return identify(estimate, pinched_references(s, h), truth);
}

Protocol::Protocol(const BlackBox& s, const ThermalContext& ctx, const Hamiltonian& reference,
                   const ProtocolConfig& config)
    : s_(s), config_(config), tomography_(reference) {
  if (s.size() == 0) throw ArgumentError("protocol: black box is empty");
  if (s.dim() != reference.dim() || s.dim() != ctx.gibbs.dim()) {
    throw ArgumentError("protocol: box, Gibbs state and reference Hamiltonian dims differ");
  }
  const Index d = s.dim();
  if (reference.has_exact()) {
    const RationalIndependenceResult ri = is_rationally_independent(reference, static_cast<int>(d));
    if (!ri.independent) {
      throw PreconditionError("protocol: the reference Hamiltonian is rationally dependent; supply a refining "
                              "rationally independent reference spectrum");
    }
  }
  references_ = pinched_references(s, reference);
  delta_ = separation_delta(references_);
  delta_prime_ = config.delta_prime > 0.0 ? config.delta_prime : delta_ / 2.0;
  k_ = std::isinf(delta_prime_) ? 0 : sample_count(d, delta_prime_, config.p_e, config.constant);
  const std::int64_t used = static_cast<std::int64_t>(k_) * d;
  if (config.n <= used) {
    throw ArgumentError("protocol: n = " + std::to_string(config.n) + " must exceed the " + std::to_string(used) +
                        " copies spent on tomography (k = " + std::to_string(k_) + ")");
  }
  const int remaining = static_cast<int>(config.n - used);
  RateOptions options;
  options.solver.base = config.base;
  for (const auto& rho : s.states()) {
    const RateSequence seq = rate_sequence(BlackBox({rho}), ctx, config.epsilon, {remaining}, Regime::kGpc, options);
    if (!seq.complete) throw SizeError("protocol: " + seq.diagnostic);
    rates_.push_back(seq.points.front().rate * remaining / static_cast<double>(config.n));
  }
}

ProtocolReport Protocol::run(std::size_t true_index, Rng& rng) const {
  if (true_index >= s_.size()) throw ArgumentError("protocol: true index out of range");
  ProtocolReport r;
  r.true_index = true_index;
  r.k = k_;
  r.copies_used = static_cast<std::int64_t>(k_) * s_.dim();
  r.n = config_.n;
  r.delta = delta_;
  r.delta_prime = delta_prime_;
  if (k_ == 0) {
    r.chosen_index = 0;
    r.success = trace_distance(references_[0], references_[true_index]) <= kPinchedEqualTolerance;
  } else {
    const TomographyEstimate est = config_.exact_sampling ? tomography_.estimate_exact(s_[true_index])
                                                          : tomography_.estimate(s_[true_index], k_, rng);
    const IdentificationOutcome id = identify(est.estimate, references_, true_index);
    r.chosen_index = id.chosen;
    r.success = *id.success;
  }
  r.rate = rates_[r.chosen_index];
  r.overhead = static_cast<double>(r.copies_used) / static_cast<double>(config_.n);
  return r;
}

std::vector<ProtocolReport> Protocol::run_trials(std::size_t count, std::uint64_t master_seed,
                                                 std::optional<std::size_t> true_index, unsigned workers) const {
  std::vector<ProtocolReport> out(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t t = next++; t < count; t = next++) {
      try {
        Rng rng = make_rng(master_seed, t);
        out[t] = run(true_index.value_or(t % s_.size()), rng);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

ProtocolReport run_protocol(const BlackBox& s, std::size_t true_index, const ThermalContext& ctx,
                            const ProtocolConfig& config, Rng& rng) {
  return Protocol(s, ctx, ctx.hamiltonian, config).run(true_index, rng);
}

}  // namespace bbwork

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

#include "bbwork/serialization.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "bbwork/error.hpp"

namespace bbwork {

namespace {

std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }
std::string dot(const std::string& path, const std::string& key) { return path + "." + key; }

/// Non-finite values become the strings "inf", "-inf" and "nan".
Json real(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

Json complex_pair(Complex z) { return Json::array({real(z.real()), real(z.imag())}); }

double number(const Json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw ArgumentError(path + ": expected a number");
}

std::int64_t integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ArgumentError(path + ": expected an integer");
  return j.get<std::int64_t>();
}

const Json& array_field(const Json& j, const std::string& key, const std::string& path) {
  const Json& a = field(j, key, path);
  if (!a.is_array()) throw ArgumentError(dot(path, key) + ": expected an array");
  return a;
}

std::vector<Index> index_list(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ArgumentError(path + ": expected an array of integers");
  std::vector<Index> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(static_cast<Index>(integer(j[i], at(path, i))));
  return out;
}

template <typename F>
auto rethrow_with_path(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ArgumentError& e) {
    throw ArgumentError(path + ": " + e.what());
  } catch (const PreconditionError& e) {
    throw PreconditionError(path + ": " + e.what());
  }
}

}  // namespace

const Json& field(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ArgumentError(path + ": expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw ArgumentError(dot(path, key) + ": missing field");
  return *it;
}

double number_field(const Json& j, const std::string& key, const std::string& path) {
  return number(field(j, key, path), dot(path, key));
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError(path + ": cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ArgumentError(path + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + e.what());
  }
}

Json to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back(complex_pair(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const HermitianOperator& a) { return to_json(a.matrix()); }
Json to_json(const DensityMatrix& rho) { return to_json(rho.matrix()); }

ComplexMatrix matrix_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ArgumentError(path + ": expected a non-empty array of rows");
  const auto rows = static_cast<Index>(j.size());
  if (!j[0].is_array()) throw ArgumentError(at(path, 0) + ": expected a row array");
  const auto cols = static_cast<Index>(j[0].size());
  ComplexMatrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    const std::string rpath = at(path, static_cast<std::size_t>(r));
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw ArgumentError(rpath + ": expected a row of " + std::to_string(cols) + " entries");
    }
    for (Index c = 0; c < cols; ++c) {
      const Json& e = row[static_cast<std::size_t>(c)];
      const std::string epath = at(rpath, static_cast<std::size_t>(c));
      if (e.is_number()) {
        m(r, c) = e.get<double>();
      } else if (e.is_array() && e.size() == 2) {
        m(r, c) = Complex(number(e[0], at(epath, 0)), number(e[1], at(epath, 1)));
      } else {
        throw ArgumentError(epath + ": expected [re, im]");
      }
    }
  }
  return m;
}

HermitianOperator hermitian_from_json(const Json& j, const std::string& path) {
  const ComplexMatrix m = matrix_from_json(j, path);
  return rethrow_with_path(path, [&] { return HermitianOperator(m); });
}

DensityMatrix density_from_json(const Json& j, const std::string& path) {
  const HermitianOperator a = hermitian_from_json(j, path);
  return rethrow_with_path(path, [&] { return DensityMatrix(a); });
}

Json to_json(const Hamiltonian& h) {
  Json out;
  out["dim"] = h.dim();
  out["matrix"] = to_json(h.op());
  if (h.has_exact()) {
    Json r = Json::array();
    for (const Rational& q : *h.exact_eigenvalues()) r.push_back(Json::array({q.numerator(), q.denominator()}));
    out["rational_eigenvalues"] = std::move(r);
  }
  return out;
}

Hamiltonian hamiltonian_from_json(const Json& j, const std::string& path) {
  const HermitianOperator op = hermitian_from_json(field(j, "matrix", path), dot(path, "matrix"));
  if (j.contains("dim") && integer(j["dim"], dot(path, "dim")) != op.dim()) {
    throw ArgumentError(dot(path, "dim") + ": does not match the matrix size " + std::to_string(op.dim()));
  }
  std::optional<std::vector<Rational>> exact;
  if (j.contains("rational_eigenvalues")) {
    const std::string rpath = dot(path, "rational_eigenvalues");
    const Json& r = j["rational_eigenvalues"];
    if (!r.is_array()) throw ArgumentError(rpath + ": expected an array of [num, den]");
    exact.emplace();
    for (std::size_t i = 0; i < r.size(); ++i) {
      const std::string epath = at(rpath, i);
      if (!r[i].is_array() || r[i].size() != 2) throw ArgumentError(epath + ": expected [num, den]");
      const std::int64_t den = integer(r[i][1], at(epath, 1));
      if (den == 0) throw ArgumentError(at(epath, 1) + ": zero denominator");
      exact->emplace_back(integer(r[i][0], at(epath, 0)), den);
    }
  }
  return rethrow_with_path(path, [&] { return Hamiltonian(op, exact); });
}

Json to_json(const ThermalContext& ctx) {
  Json out;
  out["beta"] = ctx.beta;
  out["hamiltonian"] = to_json(ctx.hamiltonian);
  out["gibbs"] = to_json(ctx.gibbs);
  out["log_partition_function"] = ctx.log_partition_function;
  return out;
}

namespace {

BlackBox box_from_json(const Json& j, const std::string& path) {
  const Json& states = array_field(j, "states", path);
  if (states.empty()) throw ArgumentError(dot(path, "states") + ": at least one state is required");
  std::vector<DensityMatrix> rhos;
  for (std::size_t i = 0; i < states.size(); ++i) rhos.push_back(density_from_json(states[i], at(dot(path, "states"), i)));
  std::vector<std::string> labels;
  if (j.contains("labels")) {
    const Json& l = array_field(j, "labels", path);
    if (l.size() != states.size()) throw ArgumentError(dot(path, "labels") + ": one label per state is required");
    for (std::size_t i = 0; i < l.size(); ++i) {
      if (!l[i].is_string()) throw ArgumentError(at(dot(path, "labels"), i) + ": expected a string");
      labels.push_back(l[i].get<std::string>());
    }
  }
  return rethrow_with_path(dot(path, "states"), [&] { return BlackBox(std::move(rhos), std::move(labels)); });
}

Json box_to_json(const BlackBox& s) {
  Json states = Json::array();
  for (const auto& rho : s.states()) states.push_back(to_json(rho));
  return states;
}

}  // namespace

Json to_json(const HTProblem& problem) {
  Json out;
  out["states"] = box_to_json(problem.null_hypothesis);
  out["tau"] = to_json(problem.alternative);
  out["epsilon"] = problem.epsilon;
  return out;
}

HTProblem ht_problem_from_json(const Json& j) {
  HTProblem p;
  p.null_hypothesis = box_from_json(j, "$");
  p.alternative = density_from_json(field(j, "tau", "$"), "$.tau");
  p.epsilon = j.contains("epsilon") ? number(j["epsilon"], "$.epsilon") : 0.05;
  rethrow_with_path("$", [&] {
    validate(p);
    return 0;
  });
  return p;
}

Json to_json(const HTResult& r) {
  Json out;
  out["value"] = real(r.value);
  out["base"] = std::string(to_string(r.base));
  out["status"] = std::string(to_string(r.status));
  out["primal_objective"] = real(r.primal_objective);
  out["dual_objective"] = real(r.dual_objective);
  out["gap"] = real(r.gap);
  out["iterations"] = r.iterations;
  Json lambda = Json::array();
  for (double l : r.dual_multipliers) lambda.push_back(real(l));
  out["dual_multipliers"] = std::move(lambda);
  out["test_operator"] = to_json(r.test_operator);
  return out;
}

BoxProblem box_problem_from_json(const Json& j) {
  BoxProblem p;
  p.box = box_from_json(j, "$");
  p.hamiltonian = hamiltonian_from_json(field(j, "hamiltonian", "$"), "$.hamiltonian");
  if (p.hamiltonian.dim() != p.box.dim()) {
    throw ArgumentError("$.hamiltonian: dimension " + std::to_string(p.hamiltonian.dim()) +
                        " does not match the states' " + std::to_string(p.box.dim()));
  }
  if (j.contains("beta")) p.beta = number(j["beta"], "$.beta");
  if (j.contains("epsilon")) p.epsilon = number(j["epsilon"], "$.epsilon");
  return p;
}

Json to_json(const BoxProblem& problem) {
  Json out;
  out["states"] = box_to_json(problem.box);
  if (!problem.box.labels().empty()) out["labels"] = problem.box.labels();
  out["hamiltonian"] = to_json(problem.hamiltonian);
  if (problem.beta) out["beta"] = *problem.beta;
  if (problem.epsilon) out["epsilon"] = *problem.epsilon;
  return out;
}

Json to_json(const WorkResult& result, int n) {
  Json out;
  out["regime"] = std::string(to_string(result.regime));
  out["epsilon"] = result.epsilon;
  out["n"] = n;
  out["beta_work"] = real(result.beta_work);
  out["m_star"] = real(result.m_star);
  out["gap"] = real(result.ht_result.gap);
  out["status"] = std::string(to_string(result.ht_result.status));
  out["base"] = std::string(to_string(result.ht_result.base));
  return out;
}

Json to_json(const ProtocolReport& r) {
  Json out;
  out["true_index"] = r.true_index;
  out["chosen_index"] = r.chosen_index;
  out["success"] = r.success;
  out["k"] = r.k;
  out["copies_used"] = r.copies_used;
  out["n"] = r.n;
  out["delta"] = real(r.delta);
  out["delta_prime"] = real(r.delta_prime);
  out["rate"] = real(r.rate);
  out["overhead"] = real(r.overhead);
  return out;
}

Json to_json(const CyclicProductTable& table) {
  Json out;
  out["dim"] = table.dim;
  Json values = Json::array();
  for (const auto& [cycle, value] : table.values) {
    Json entry;
    entry["cycle"] = cycle;
    entry["value"] = complex_pair(value);
    values.push_back(std::move(entry));
  }
  out["values"] = std::move(values);
  out["missing"] = table.missing;
  return out;
}

Json to_json(const DilatedThermalOp& op) {
  Json out;
  out["input_dims"] = op.input_dims();
  out["input_hamiltonian"] = to_json(op.input_hamiltonian());
  out["ancilla_dims"] = op.ancilla_dims();
  out["ancilla_hamiltonian"] = to_json(op.ancilla_hamiltonian());
  out["beta"] = op.beta();
  out["unitary"] = to_json(op.unitary());
  out["traced_indices"] = op.traced();
  return out;
}

DilatedThermalOp thermal_op_from_json(const Json& j, const std::string& path) {
  const std::vector<Index> input_dims = index_list(field(j, "input_dims", path), dot(path, "input_dims"));
  const Hamiltonian h_in = hamiltonian_from_json(field(j, "input_hamiltonian", path), dot(path, "input_hamiltonian"));
  const Hamiltonian h_e =
      hamiltonian_from_json(field(j, "ancilla_hamiltonian", path), dot(path, "ancilla_hamiltonian"));
  std::vector<Index> ancilla_dims{h_e.dim()};
  if (j.contains("ancilla_dims")) ancilla_dims = index_list(j["ancilla_dims"], dot(path, "ancilla_dims"));
  const double beta = number_field(j, "beta", path);
  const ComplexMatrix u = matrix_from_json(field(j, "unitary", path), dot(path, "unitary"));
  const std::vector<Index> traced = index_list(field(j, "traced_indices", path), dot(path, "traced_indices"));
  return rethrow_with_path(path, [&] { return DilatedThermalOp(input_dims, h_in, ancilla_dims, h_e, beta, u, traced); });
}

IncoherentProjectivePOVM povm_from_json(const Json& j, const std::string& path) {
  const Hamiltonian h = hamiltonian_from_json(field(j, "hamiltonian", path), dot(path, "hamiltonian"));
  const Json& p = array_field(j, "projectors", path);
  std::vector<HermitianOperator> projectors;
  for (std::size_t i = 0; i < p.size(); ++i) projectors.push_back(hermitian_from_json(p[i], at(dot(path, "projectors"), i)));
  return rethrow_with_path(path, [&] { return IncoherentProjectivePOVM(std::move(projectors), h); });
}

Json to_json(const ChoiMatrix& c) {
  Json out;
  out["convention"] = "sum_ij |i><j| (x) E(|i><j|), input factor first, Tr_out C = I";
  out["input_dim"] = c.input_dim;
  out["output_dim"] = c.output_dim;
  out["matrix"] = to_json(c.matrix);
  return out;
}

}  // namespace bbwork

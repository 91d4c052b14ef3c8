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

// JSON wire format. Complex matrices are row-major nested arrays of [re, im]
// pairs; a bare number is read as a real entry. Readers throw ArgumentError
// whose message starts with the JSON path of the offending field.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bbwork/hypothesis.hpp"
#include "bbwork/operator.hpp"
#include "bbwork/thermal_ops.hpp"
#include "bbwork/thermo.hpp"
#include "bbwork/tomography.hpp"
#include "bbwork/work.hpp"

namespace bbwork {

using Json = nlohmann::ordered_json;

/// Reads a JSON file. Syntax errors are reported as "path:line:column: ...".
Json read_json_file(const std::string& path);

Json to_json(const ComplexMatrix& m);
Json to_json(const HermitianOperator& a);
Json to_json(const DensityMatrix& rho);
ComplexMatrix matrix_from_json(const Json& j, const std::string& path);
HermitianOperator hermitian_from_json(const Json& j, const std::string& path);
DensityMatrix density_from_json(const Json& j, const std::string& path);

/// {"dim", "matrix", optional "rational_eigenvalues": [[num, den], ...]}.
Json to_json(const Hamiltonian& h);
Hamiltonian hamiltonian_from_json(const Json& j, const std::string& path);

/// Beta, Hamiltonian, tau and log Z.
Json to_json(const ThermalContext& ctx);

/// {"states": [matrix, ...], "tau": matrix, "epsilon": real}.
Json to_json(const HTProblem& problem);
HTProblem ht_problem_from_json(const Json& j);
Json to_json(const HTResult& result);

/// A black box with its Hamiltonian:
/// {"states": [matrix, ...], optional "labels", "hamiltonian", optional "beta",
///  optional "epsilon"}.
struct BoxProblem {
  BlackBox box;
  Hamiltonian hamiltonian;
  std::optional<double> beta;
  std::optional<double> epsilon;
};

BoxProblem box_problem_from_json(const Json& j);
Json to_json(const BoxProblem& problem);

/// {"regime", "epsilon", "n", "beta_work", "m_star", "gap", "status", ...}.
Json to_json(const WorkResult& result, int n = 1);
Json to_json(const ProtocolReport& report);
Json to_json(const CyclicProductTable& table);

/// {"input_dims", "input_hamiltonian", "ancilla_dims", "ancilla_hamiltonian",
///  "beta", "unitary", "traced_indices"}. "ancilla_dims" defaults to the
/// ancilla Hamiltonian's dimension.
Json to_json(const DilatedThermalOp& op);
DilatedThermalOp thermal_op_from_json(const Json& j, const std::string& path);

/// {"hamiltonian", "projectors": [matrix, ...]}.
IncoherentProjectivePOVM povm_from_json(const Json& j, const std::string& path);

/// {"convention", "input_dim", "output_dim", "matrix"}.
Json to_json(const ChoiMatrix& c);

/// Required numeric field.
double number_field(const Json& j, const std::string& key, const std::string& path);
/// Required field, or ArgumentError naming `path.key`.
const Json& field(const Json& j, const std::string& key, const std::string& path);

}  // namespace bbwork

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
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>

#include <gtest/gtest.h>

#include "bbwork/error.hpp"
#include "bbwork/serialization.hpp"

namespace bbwork {
namespace {

std::string thrown_message(const std::function<void()>& f) {
  try {
    f();
  } catch (const ArgumentError& e) {
    return e.what();
  }
  return "";
}

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

TEST(matrix_json, round_trip_is_exact) {
  Rng rng = make_rng(1);
  const ComplexMatrix u = random_unitary(3, rng);
  const Json j = to_json(u);
  ASSERT_EQ(j.size(), 3u);
  ASSERT_EQ(j[0].size(), 3u);
  ASSERT_EQ(j[0][0].size(), 2u);
  EXPECT_EQ(matrix_from_json(j, "$"), u);
  // Through text as well.
  EXPECT_EQ(matrix_from_json(Json::parse(j.dump()), "$"), u);
}

TEST(matrix_json, bare_numbers_are_real_entries) {
  const ComplexMatrix m = matrix_from_json(Json::parse("[[1, 2], [3, [4, -5]]]"), "$");
  EXPECT_EQ(m(0, 1), Complex(2, 0));
  EXPECT_EQ(m(1, 0), Complex(3, 0));
  EXPECT_EQ(m(1, 1), Complex(4, -5));
}

TEST(matrix_json, malformed_input_names_the_path) {
  EXPECT_TRUE(starts_with(thrown_message([] { matrix_from_json(Json::parse("[[1, 2], [3]]"), "$.m"); }), "$.m"));
  EXPECT_TRUE(starts_with(thrown_message([] { matrix_from_json(Json::parse("[[1, \"x\"], [3, 4]]"), "$.m"); }),
                          "$.m[0][1]"));
  EXPECT_TRUE(starts_with(thrown_message([] { matrix_from_json(Json::parse("{}"), "$.m"); }), "$.m"));
  EXPECT_TRUE(starts_with(thrown_message([] { hermitian_from_json(Json::parse("[[0, 1], [0, 0]]"), "$.h"); }), "$.h"));
  EXPECT_TRUE(
      starts_with(thrown_message([] { density_from_json(Json::parse("[[2, 0], [0, 0]]"), "$.rho"); }), "$.rho"));
}

TEST(hamiltonian_json, round_trip_keeps_rational_spectrum) {
  const Hamiltonian h = Hamiltonian::diagonal(std::vector<Rational>{Rational(0), Rational(1, 2), Rational(3, 2)});
  const Json j = to_json(h);
  EXPECT_EQ(j["dim"], 3);
  ASSERT_TRUE(j.contains("rational_eigenvalues"));
  const Hamiltonian back = hamiltonian_from_json(j, "$");
  ASSERT_TRUE(back.has_exact());
  EXPECT_EQ(*back.exact_eigenvalues(), *h.exact_eigenvalues());
  EXPECT_EQ(back.op().matrix(), h.op().matrix());
}

TEST(hamiltonian_json, dimension_mismatch_is_rejected) {
  const Json j = Json::parse(R"({"dim": 3, "matrix": [[0, 0], [0, 1]]})");
  EXPECT_TRUE(starts_with(thrown_message([&] { hamiltonian_from_json(j, "$.hamiltonian"); }), "$.hamiltonian.dim"));
}

TEST(box_json, round_trip) {
  Rng rng = make_rng(2);
  BoxProblem p{BlackBox({random_density(2, rng), random_density(2, rng)}, {"a", "b"}),
               Hamiltonian::diagonal(std::vector<Rational>{Rational(0), Rational(1)}), 0.7, 0.1};
  const BoxProblem back = box_problem_from_json(Json::parse(to_json(p).dump()));
  ASSERT_EQ(back.box.size(), 2u);
  EXPECT_EQ(back.box.labels(), p.box.labels());
  for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(back.box[i].matrix(), p.box[i].matrix());
  EXPECT_EQ(back.beta, 0.7);
  EXPECT_EQ(back.epsilon, 0.1);
}

TEST(box_json, errors_point_at_the_state) {
  const Json j = Json::parse(R"({"states": [[[1, 0], [0, 0]], [[1, 0], [0, 1]]],
                                 "hamiltonian": {"matrix": [[0, 0], [0, 1]]}})");
  EXPECT_TRUE(starts_with(thrown_message([&] { box_problem_from_json(j); }), "$.states[1]"));
  const Json missing = Json::parse(R"({"states": [[[1, 0], [0, 0]]]})");
  EXPECT_TRUE(starts_with(thrown_message([&] { box_problem_from_json(missing); }), "$.hamiltonian"));
}

TEST(ht_problem_json, epsilon_defaults) {
  const HTProblem p = ht_problem_from_json(Json::parse(R"({"states": [[[1, 0], [0, 0]]], "tau": [[0.5, 0], [0, 0.5]]})"));
  EXPECT_EQ(p.epsilon, 0.05);
  EXPECT_EQ(p.null_hypothesis.size(), 1u);
}

TEST(thermal_op_json, round_trip_and_default_ancilla_dims) {
  const Hamiltonian h = Hamiltonian::diagonal(std::vector<Rational>{Rational(0), Rational(1)});
  const DilatedThermalOp op = replacement_thermal_op(h, 0.8);
  Json j = to_json(op);
  const DilatedThermalOp back = thermal_op_from_json(Json::parse(j.dump()), "$");
  EXPECT_EQ(back.unitary(), op.unitary());
  EXPECT_EQ(back.traced(), op.traced());
  EXPECT_EQ(back.beta(), 0.8);
  j.erase("ancilla_dims");
  EXPECT_EQ(thermal_op_from_json(j, "$").ancilla_dims(), std::vector<Index>{2});
}

TEST(thermal_op_json, invalid_unitary_is_rejected) {
  const Hamiltonian h = Hamiltonian::diagonal(std::vector<Rational>{Rational(0), Rational(1)});
  Json j = to_json(identity_thermal_op(h, 1.0));
  j["unitary"] = Json::parse("[[0, 1], [1, 0]]");
  EXPECT_THROW(thermal_op_from_json(j, "$"), PreconditionError);
}

TEST(read_json_file, syntax_errors_carry_line_and_column) {
  const auto path = std::filesystem::temp_directory_path() / "bbwork_bad.json";
  {
    std::ofstream out(path);
    out << "{\n  \"a\": [1,\n  }\n";
  }
  const std::string msg = thrown_message([&] { read_json_file(path.string()); });
  EXPECT_NE(msg.find(path.string() + ":3:"), std::string::npos) << msg;
  std::filesystem::remove(path);
  EXPECT_THROW(read_json_file("/nonexistent/bbwork.json"), ArgumentError);
}

TEST(result_json, non_finite_values_are_strings) {
  HTResult r;
  r.value = std::numeric_limits<double>::infinity();
  r.primal_objective = 0.0;
  r.dual_objective = 0.0;
  r.gap = std::numeric_limits<double>::quiet_NaN();
  r.test_operator = HermitianOperator::identity(2);
  const Json j = to_json(r);
  EXPECT_EQ(j["value"], "inf");
  EXPECT_EQ(j["gap"], "nan");
  EXPECT_EQ(Json::parse(j.dump())["value"], "inf");
}

TEST(choi_json, records_convention) {
  const Hamiltonian h = Hamiltonian::diagonal(std::vector<Rational>{Rational(0), Rational(1)});
  const Json j = to_json(choi(identity_thermal_op(h, 1.0)));
  EXPECT_EQ(j["input_dim"], 2);
  EXPECT_EQ(j["output_dim"], 2);
  EXPECT_TRUE(j["convention"].is_string());
  EXPECT_EQ(matrix_from_json(j["matrix"], "$")(0, 3), Complex(1, 0));
}

}  // namespace
}  // namespace bbwork

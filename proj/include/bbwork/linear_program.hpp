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

// Small dense linear programs.

#pragma once

#include <Eigen/Dense>

namespace bbwork {

/// maximize c.x  subject to  A x <= b,  0 <= x <= upper,  with b >= 0.
struct LinearProgram {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  Eigen::VectorXd upper;
};

struct LinearProgramSolution {
  Eigen::VectorXd x;
  double objective = 0.0;
  /// Nonnegative multipliers of the rows of A.
  Eigen::VectorXd row_duals;
  /// Nonnegative multipliers of the upper bounds.
  Eigen::VectorXd upper_duals;
  int pivots = 0;
};

/// Tableau simplex with Bland's rule, started from the all-slack basis.
/// Throws ArgumentError on shape mismatch or negative b.
LinearProgramSolution solve_lp(const LinearProgram& lp, int max_pivots = 100000);

}  // namespace bbwork

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

#include "bbwork/linear_program.hpp"

#include <string>
#include <vector>

#include "bbwork/error.hpp"

namespace bbwork {

LinearProgramSolution solve_lp(const LinearProgram& lp, int max_pivots) {
  const Eigen::Index n = lp.c.size();
  const Eigen::Index rows_a = lp.a.rows();
  if (lp.a.cols() != n || lp.b.size() != rows_a || lp.upper.size() != n) {
    throw ArgumentError("linear program: inconsistent shapes");
  }
  if (rows_a > 0 && lp.b.minCoeff() < 0.0) throw ArgumentError("linear program: right-hand side must be >= 0");
  if (n > 0 && lp.upper.minCoeff() < 0.0) throw ArgumentError("linear program: upper bounds must be >= 0");

  // Rows: A x + s = b, then x + s' = upper. Columns: x, slacks, rhs.
  const Eigen::Index m = rows_a + n;
  const Eigen::Index cols = n + m + 1;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, cols);
  t.block(1, 0, rows_a, n) = lp.a;
  t.block(1 + rows_a, 0, n, n) = Eigen::MatrixXd::Identity(n, n);
  t.block(1, n, m, m) = Eigen::MatrixXd::Identity(m, m);
  t.block(1, cols - 1, rows_a, 1) = lp.b;
  t.block(1 + rows_a, cols - 1, n, 1) = lp.upper;
  t.block(0, 0, 1, n) = -lp.c.transpose();

  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  for (Eigen::Index r = 0; r < m; ++r) basis[static_cast<std::size_t>(r)] = n + r;

  const double eps = 1e-12 * std::max(1.0, lp.c.cwiseAbs().maxCoeff());
  LinearProgramSolution out;
  for (;;) {
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < n + m; ++j) {
      if (t(0, j) < -eps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;
    Eigen::Index leave = -1;
    double best = 0.0;
    for (Eigen::Index r = 1; r <= m; ++r) {
      if (t(r, enter) <= 1e-12) continue;
      const double ratio = t(r, cols - 1) / t(r, enter);
      const bool better = leave < 0 || ratio < best - 1e-15 ||
                          (ratio <= best + 1e-15 && basis[static_cast<std::size_t>(r - 1)] <
                                                         basis[static_cast<std::size_t>(leave - 1)]);
      if (better) {
        leave = r;
        best = ratio;
      }
    }
    if (leave < 0) throw ArgumentError("linear program is unbounded");
    if (++out.pivots > max_pivots) {
      throw ConvergenceError("simplex exceeded " + std::to_string(max_pivots) + " pivots");
    }
    t.row(leave) /= t(leave, enter);
    for (Eigen::Index r = 0; r <= m; ++r) {
      if (r != leave && t(r, enter) != 0.0) t.row(r) -= t(r, enter) * t.row(leave);
    }
    basis[static_cast<std::size_t>(leave - 1)] = enter;
  }

  out.x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index r = 0; r < m; ++r) {
    const Eigen::Index j = basis[static_cast<std::size_t>(r)];
    if (j < n) out.x(j) = t(r + 1, cols - 1);
  }
  out.objective = lp.c.dot(out.x);
  out.row_duals = t.block(0, n, 1, rows_a).transpose().cwiseMax(0.0);
  out.upper_duals = t.block(0, n + rows_a, 1, n).transpose().cwiseMax(0.0);
  return out;
}

}  // namespace bbwork

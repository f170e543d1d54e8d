#pragma once

#include <vector>

#include <Eigen/Dense>

namespace stabletail {

struct LpResult {
  enum class Status { optimal, infeasible, unbounded };
  Status status = Status::infeasible;
  double value = 0.0;
  Eigen::VectorXd x;
};

// maximize c.x subject to A x <= b; x_i >= 0 unless free_vars[i].
// Dense two-phase tableau simplex with Bland's anti-cycling rule.
LpResult solve_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                  const std::vector<bool>& free_vars = {});

}  // namespace stabletail

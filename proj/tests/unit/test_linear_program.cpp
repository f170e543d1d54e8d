#include <gtest/gtest.h>

#include "stabletail/errors.hpp"
#include "stabletail/linear_program.hpp"

using namespace stabletail;

TEST(LinearProgram, OptimalVertex) {
  Eigen::MatrixXd A(3, 2);
  A << 1, 1, 1, 3, -1, 0;
  Eigen::VectorXd b(3), c(2);
  b << 4, 6, 0;
  c << 3, 2;
  const auto r = solve_lp(A, b, c);
  ASSERT_EQ(r.status, LpResult::Status::optimal);
  EXPECT_NEAR(r.value, 12.0, 1e-10);
  EXPECT_NEAR(r.x[0], 4.0, 1e-10);
  EXPECT_NEAR(r.x[1], 0.0, 1e-10);
}

TEST(LinearProgram, NegativeRightHandSide) {
  Eigen::MatrixXd A(2, 2);
  A << -1, -1, 1, 0;
  Eigen::VectorXd b(2), c(2);
  b << -2, 5;
  c << -1, -1;
  const auto r = solve_lp(A, b, c);
  ASSERT_EQ(r.status, LpResult::Status::optimal);
  EXPECT_NEAR(r.value, -2.0, 1e-10);
}

TEST(LinearProgram, Infeasible) {
  Eigen::MatrixXd A(2, 1);
  A << 1, -1;
  Eigen::VectorXd b(2), c(1);
  b << 1, -2;
  c << 1;
  EXPECT_EQ(solve_lp(A, b, c).status, LpResult::Status::infeasible);
}

TEST(LinearProgram, Unbounded) {
  Eigen::MatrixXd A(1, 2);
  A << 1, -1;
  Eigen::VectorXd b(1), c(2);
  b << 1;
  c << 1, 0;
  EXPECT_EQ(solve_lp(A, b, c).status, LpResult::Status::unbounded);
}

TEST(LinearProgram, FreeVariables) {
  Eigen::MatrixXd A(2, 1);
  A << 1, -1;
  Eigen::VectorXd b(2), c(1);
  b << -1, 3;
  c << -1;
  const auto r = solve_lp(A, b, c, {true});
  ASSERT_EQ(r.status, LpResult::Status::optimal);
  EXPECT_NEAR(r.x[0], -3.0, 1e-10);
  EXPECT_EQ(solve_lp(A, b, c).status, LpResult::Status::infeasible);
}

TEST(LinearProgram, DimensionMismatch) {
  Eigen::MatrixXd A(2, 2);
  A.setOnes();
  EXPECT_THROW(solve_lp(A, Eigen::VectorXd::Ones(3), Eigen::VectorXd::Ones(2)), DomainError);
}

#include "stabletail/linear_program.hpp"

#include <cmath>
#include <limits>

#include "stabletail/errors.hpp"

namespace stabletail {

namespace {

constexpr double kEps = 1e-11;

struct Tableau {
  Eigen::MatrixXd T;  // m rows of [coefficients | rhs]
  std::vector<int> basis;
  int cols() const { return static_cast<int>(T.cols()) - 1; }
  int rows() const { return static_cast<int>(T.rows()); }

  void pivot(int r, int c) {
    T.row(r) /= T(r, c);
    for (int i = 0; i < rows(); ++i)
      if (i != r && T(i, c) != 0.0) T.row(i) -= T(i, c) * T.row(r);
    basis[r] = c;
  }
};

// Maximizes cost.x over the tableau restricted to the columns flagged in `allowed`.
// Returns false when unbounded.
bool run_simplex(Tableau& tab, const Eigen::VectorXd& cost, const std::vector<bool>& allowed) {
  const int m = tab.rows(), n = tab.cols();
  for (int iter = 0; iter < 50000; ++iter) {
    int enter = -1;
    for (int j = 0; j < n && enter < 0; ++j) {
      if (!allowed[j]) continue;
      bool basic = false;
      for (int r = 0; r < m; ++r) basic = basic || tab.basis[r] == j;
      if (basic) continue;
      double reduced = -cost[j];
      for (int r = 0; r < m; ++r) reduced += cost[tab.basis[r]] * tab.T(r, j);
      if (reduced < -kEps) enter = j;
    }
    if (enter < 0) return true;
    int leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < m; ++r) {
      const double a = tab.T(r, enter);
      if (a <= kEps) continue;
      const double ratio = tab.T(r, n) / a;
      if (ratio < best - kEps || (std::abs(ratio - best) <= kEps && tab.basis[r] < tab.basis[leave])) {
        best = ratio;
        leave = r;
      }
    }
    if (leave < 0) return false;
    tab.pivot(leave, enter);
  }
  throw AccuracyError("simplex iteration limit reached");
}

}  // namespace

LpResult solve_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                  const std::vector<bool>& free_vars) {
  const int m = static_cast<int>(A.rows());
  const int n0 = static_cast<int>(A.cols());
  if (b.size() != m || c.size() != n0) throw DomainError("solve_lp: dimension mismatch");
  std::vector<int> neg_col(n0, -1);
  int n = n0;
  for (int j = 0; j < n0; ++j)
    if (j < static_cast<int>(free_vars.size()) && free_vars[j]) neg_col[j] = n++;

  int n_art = 0;
  for (int i = 0; i < m; ++i) n_art += b[i] < 0.0;
  const int n_slack_start = n;
  const int n_art_start = n + m;
  const int total = n + m + n_art;

  Tableau tab;
  tab.T = Eigen::MatrixXd::Zero(m, total + 1);
  tab.basis.assign(m, -1);
  int art = n_art_start;
  for (int i = 0; i < m; ++i) {
    const double sgn = b[i] < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < n0; ++j) {
      tab.T(i, j) = sgn * A(i, j);
      if (neg_col[j] >= 0) tab.T(i, neg_col[j]) = -sgn * A(i, j);
    }
    tab.T(i, n_slack_start + i) = sgn;
    tab.T(i, total) = sgn * b[i];
    if (b[i] < 0.0) {
      tab.T(i, art) = 1.0;
      tab.basis[i] = art++;
    } else {
      tab.basis[i] = n_slack_start + i;
    }
  }

  std::vector<bool> allowed(total, true);
  if (n_art > 0) {
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(total);
    for (int j = n_art_start; j < total; ++j) phase1[j] = -1.0;
    run_simplex(tab, phase1, allowed);
    double infeas = 0.0;
    for (int r = 0; r < m; ++r)
      if (tab.basis[r] >= n_art_start) infeas += tab.T(r, total);
    const double scale = 1.0 + b.cwiseAbs().maxCoeff();
    if (infeas > 1e-9 * scale) return {};
    for (int r = 0; r < m; ++r) {
      if (tab.basis[r] < n_art_start) continue;
      int col = -1;
      for (int j = 0; j < n_art_start && col < 0; ++j)
        if (std::abs(tab.T(r, j)) > 1e-9) col = j;
      if (col >= 0) tab.pivot(r, col);
    }
    for (int j = n_art_start; j < total; ++j) allowed[j] = false;
  }

  Eigen::VectorXd cost = Eigen::VectorXd::Zero(total);
  for (int j = 0; j < n0; ++j) {
    cost[j] = c[j];
    if (neg_col[j] >= 0) cost[neg_col[j]] = -c[j];
  }
  LpResult res;
  if (!run_simplex(tab, cost, allowed)) {
    res.status = LpResult::Status::unbounded;
    return res;
  }
  Eigen::VectorXd full = Eigen::VectorXd::Zero(total);
  for (int r = 0; r < m; ++r) full[tab.basis[r]] = tab.T(r, total);
  res.status = LpResult::Status::optimal;
  res.x.resize(n0);
  for (int j = 0; j < n0; ++j) res.x[j] = full[j] - (neg_col[j] >= 0 ? full[neg_col[j]] : 0.0);
  res.value = c.dot(res.x);
  return res;
}

}  // namespace stabletail

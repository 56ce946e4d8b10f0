#pragma once

// Independent oracle for LP tests: plain dense tableau simplex with Bland's
// rule on min c'x s.t. Ax <= b (b >= 0), x >= 0. Deliberately kept separate
// from the library's solve path.

#include <Eigen/Dense>
#include <cassert>
#include <limits>

namespace test_oracle {

enum class SimplexStatus { Optimal, Unbounded, Cycling };

struct SimplexResult {
  SimplexStatus status;
  double value = 0.0;
  Eigen::VectorXd x;
};

inline SimplexResult simplex_solve(const Eigen::MatrixXd& A,
                                   const Eigen::VectorXd& b,
                                   const Eigen::VectorXd& c) {
  const int m = int(A.rows()), n = int(A.cols());
  assert(b.minCoeff() >= 0.0);
  // tableau: rows = m constraints + objective row, cols = n + m slacks + rhs
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
  T.block(0, 0, m, n) = A;
  T.block(0, n, m, m) = Eigen::MatrixXd::Identity(m, m);
  T.block(0, n + m, m, 1) = b;
  T.block(m, 0, 1, n) = c.transpose();
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = n + i;

  for (long iter = 0; iter < 100000; ++iter) {
    // Bland: smallest index with negative reduced cost
    int enter = -1;
    for (int j = 0; j < n + m; ++j)
      if (T(m, j) < -1e-10) {
        enter = j;
        break;
      }
    if (enter < 0) {
      SimplexResult r;
      r.status = SimplexStatus::Optimal;
      r.value = -T(m, n + m);
      r.x = Eigen::VectorXd::Zero(n);
      for (int i = 0; i < m; ++i)
        if (basis[i] < n) r.x[basis[i]] = T(i, n + m);
      return r;
    }
    int leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i)
      if (T(i, enter) > 1e-10) {
        double ratio = T(i, n + m) / T(i, enter);
        if (ratio < best - 1e-12 ||
            (ratio < best + 1e-12 && (leave < 0 || basis[i] < basis[leave]))) {
          best = ratio;
          leave = i;
        }
      }
    if (leave < 0) {
      SimplexResult r;
      r.status = SimplexStatus::Unbounded;
      return r;
    }
    T.row(leave) /= T(leave, enter);
    for (int i = 0; i <= m; ++i)
      if (i != leave && std::abs(T(i, enter)) > 0)
        T.row(i) -= T(i, enter) * T.row(leave);
    basis[leave] = enter;
  }
  SimplexResult r;
  r.status = SimplexStatus::Cycling;
  return r;
}

}  // namespace test_oracle

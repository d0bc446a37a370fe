#include "sglv/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "sglv/error.hpp"

namespace sglv {
namespace {

constexpr double kPivotTol = 1e-11;

// Tableau rows: one per constraint, plus objective row at index m.
// Columns: structural variables then rhs at index ncols - 1.
struct Tableau {
  std::size_t m = 0;       // constraint rows
  std::size_t ncols = 0;   // including rhs
  std::vector<double> t;   // (m + 1) x ncols
  std::vector<std::size_t> basis;  // basic variable per constraint row

  double& at(std::size_t i, std::size_t j) { return t[i * ncols + j]; }
  double at(std::size_t i, std::size_t j) const { return t[i * ncols + j]; }

  void pivot(std::size_t row, std::size_t col) {
    const double inv = 1.0 / at(row, col);
    for (std::size_t j = 0; j < ncols; ++j) at(row, j) *= inv;
    at(row, col) = 1.0;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == row) continue;
      const double f = at(i, col);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < ncols; ++j) at(i, j) -= f * at(row, j);
      at(i, col) = 0.0;
    }
    basis[row] = col;
  }

  // Minimize the objective row using Bland's rule over columns [0, limit).
  void run(std::size_t limit) {
    const std::size_t max_iter = 20000;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
      std::size_t entering = limit;
      for (std::size_t j = 0; j < limit; ++j) {
        if (at(m, j) < -kPivotTol) {
          entering = j;
          break;
        }
      }
      if (entering == limit) return;  // optimal

      std::size_t leaving = m;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        const double a = at(i, entering);
        if (a > kPivotTol) {
          const double ratio = at(i, ncols - 1) / a;
          if (ratio < best_ratio - 1e-12 ||
              (ratio < best_ratio + 1e-12 && (leaving == m || basis[i] < basis[leaving]))) {
            best_ratio = ratio;
            leaving = i;
          }
        }
      }
      if (leaving == m)
        throw Error(ErrorCode::kSolver, "simplex objective unbounded");
      pivot(leaving, entering);
    }
    throw Error(ErrorCode::kSolver, "simplex iteration limit exceeded");
  }
};

}  // namespace

LpResult lp_feasible(const Matrix& constraint_matrix, double epsilon) {
  const std::size_t m = constraint_matrix.rows();
  const std::size_t n = constraint_matrix.cols();
  if (m == 0 || n == 0)
    throw Error(ErrorCode::kDim, "lp_feasible needs a nonempty constraint matrix");
  if (!(epsilon >= 0.0) || epsilon * static_cast<double>(n) >= 1.0)
    throw Error(ErrorCode::kRange, "lp_feasible epsilon out of range");

  // Shift c = d + epsilon, split t = tp - tm, slack per inequality row:
  //   row_k . d - tp + tm + s_k = -epsilon * sum(row_k)
  //   sum d                      = 1 - n * epsilon
  // All of d, tp, tm, s >= 0; artificials close any row with negative rhs.
  const std::size_t rows_total = m + 1;
  const std::size_t col_tp = n;
  const std::size_t col_tm = n + 1;
  const std::size_t col_slack0 = n + 2;
  const std::size_t col_art0 = col_slack0 + m;
  const std::size_t n_decision = col_art0;              // before artificials
  const std::size_t ncols = col_art0 + rows_total + 1;  // artificials + rhs

  Tableau tab;
  tab.m = rows_total;
  tab.ncols = ncols;
  tab.t.assign((rows_total + 1) * ncols, 0.0);
  tab.basis.assign(rows_total, 0);

  for (std::size_t k = 0; k < m; ++k) {
    double rhs = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      tab.at(k, j) = constraint_matrix(k, j);
      rhs -= epsilon * constraint_matrix(k, j);
    }
    tab.at(k, col_tp) = -1.0;
    tab.at(k, col_tm) = 1.0;
    tab.at(k, col_slack0 + k) = 1.0;
    tab.at(k, ncols - 1) = rhs;
  }
  for (std::size_t j = 0; j < n; ++j) tab.at(m, j) = 1.0;
  tab.at(m, ncols - 1) = 1.0 - epsilon * static_cast<double>(n);

  // Normalize rows to nonnegative rhs, then give every row an artificial
  // basis column (slacks flipped by the normalization are no longer basic).
  for (std::size_t i = 0; i < rows_total; ++i) {
    if (tab.at(i, ncols - 1) < 0.0)
      for (std::size_t j = 0; j < ncols; ++j) tab.at(i, j) = -tab.at(i, j);
    tab.at(i, col_art0 + i) = 1.0;
    tab.basis[i] = col_art0 + i;
  }

  // Phase 1: minimize the artificial sum.
  for (std::size_t i = 0; i < rows_total; ++i)
    for (std::size_t j = 0; j < ncols; ++j)
      tab.at(rows_total, j) -= tab.at(i, j);
  for (std::size_t i = 0; i < rows_total; ++i) tab.at(rows_total, col_art0 + i) = 0.0;

  tab.run(col_art0 + rows_total);
  if (tab.at(rows_total, ncols - 1) < -1e-8)
    throw Error(ErrorCode::kSolver, "simplex phase 1 failed to zero artificials");

  // Pivot lingering artificials out of the basis where possible.
  for (std::size_t i = 0; i < rows_total; ++i) {
    if (tab.basis[i] < col_art0) continue;
    for (std::size_t j = 0; j < n_decision; ++j) {
      if (std::abs(tab.at(i, j)) > kPivotTol) {
        tab.pivot(i, j);
        break;
      }
    }
  }

  // Phase 2: minimize tp - tm with artificial columns frozen.
  for (std::size_t j = 0; j < ncols; ++j) tab.at(rows_total, j) = 0.0;
  tab.at(rows_total, col_tp) = 1.0;
  tab.at(rows_total, col_tm) = -1.0;
  for (std::size_t i = 0; i < rows_total; ++i) {
    const std::size_t b = tab.basis[i];
    const double cost = (b == col_tp) ? 1.0 : (b == col_tm) ? -1.0 : 0.0;
    if (cost == 0.0) continue;
    for (std::size_t j = 0; j < ncols; ++j)
      tab.at(rows_total, j) -= cost * tab.at(i, j);
  }
  tab.run(n_decision);

  Vector c(n, epsilon);
  double tp = 0.0;
  double tm = 0.0;
  for (std::size_t i = 0; i < rows_total; ++i) {
    const std::size_t b = tab.basis[i];
    const double v = tab.at(i, ncols - 1);
    if (b < n)
      c[b] += v;
    else if (b == col_tp)
      tp = v;
    else if (b == col_tm)
      tm = v;
  }

  LpResult result;
  result.witness = c;
  result.margin = tp - tm;
  result.feasible = result.margin < 0.0;
  return result;
}

}  // namespace sglv

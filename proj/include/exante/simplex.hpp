#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "exante/common.hpp"

namespace exante {

/// Small dense linear program:
///   maximize objective . x   (feasibility check when objective is empty)
///   subject to  eq_lhs x = eq_rhs,  le_lhs x <= le_rhs,
///               lower <= x <= upper (defaults 0 / +infinity).
struct LinearProgram {
  std::size_t num_vars = 0;
  std::vector<double> objective;
  std::vector<std::vector<double>> eq_lhs;
  std::vector<double> eq_rhs;
  std::vector<std::vector<double>> le_lhs;
  std::vector<double> le_rhs;
  std::vector<double> lower;
  std::vector<double> upper;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
  double value = 0.0;
  /// Largest constraint violation of the returned point, re-evaluated
  /// against the original program.
  double residual = 0.0;
};

namespace detail {

// Dense two-phase tableau simplex on   A x = b, x >= 0, minimize c.x.
// Entering column by most negative reduced cost; after a run of degenerate
// pivots, switches to Bland's rule until the objective moves again.
class SimplexTableau {
 public:
  SimplexTableau(std::vector<std::vector<double>> rows, std::vector<double> rhs,
                 std::size_t num_cols, double tol)
      : rows_(std::move(rows)), rhs_(std::move(rhs)), tol_(tol) {
    m_ = rows_.size();
    n_ = num_cols;
    // Artificial basis: one artificial per row, rhs made nonnegative first.
    for (std::size_t i = 0; i < m_; ++i) {
      if (rhs_[i] < 0.0) {
        for (double& a : rows_[i]) a = -a;
        rhs_[i] = -rhs_[i];
      }
    }
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t r = 0; r < m_; ++r) {
        rows_[r].push_back(r == i ? 1.0 : 0.0);
      }
    }
    basis_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) basis_[i] = n_ + i;
    total_ = n_ + m_;
  }

  /// Minimizes sum of artificials. Returns the attained value.
  double phase_one() {
    std::vector<double> cost(total_, 0.0);
    for (std::size_t j = n_; j < total_; ++j) cost[j] = 1.0;
    run(cost);
    double value = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] >= n_) value += rhs_[i];
    }
    // Pivot residual artificials out of the basis where possible; rows with
    // no eligible column are redundant and get frozen at zero.
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      for (std::size_t j = 0; j < n_; ++j) {
        if (std::abs(rows_[i][j]) > tol_) {
          pivot(i, j);
          break;
        }
      }
    }
    return value;
  }

  /// Minimizes `cost` (length n_) over the current feasible basis.
  /// Returns false when unbounded.
  bool phase_two(std::vector<double> cost) {
    cost.resize(total_, 0.0);
    // Large cost on artificials keeps them out of the basis in phase two.
    double big = 1.0;
    for (double c : cost) big += std::abs(c);
    for (std::size_t j = n_; j < total_; ++j) cost[j] = big * 1e6;
    return run(cost);
  }

  std::vector<double> solution() const {
    std::vector<double> x(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) x[basis_[i]] = rhs_[i];
    }
    return x;
  }

 private:
  double objective_value(const std::vector<double>& cost) const {
    double v = 0.0;
    for (std::size_t i = 0; i < m_; ++i) v += cost[basis_[i]] * rhs_[i];
    return v;
  }

  bool run(const std::vector<double>& cost) {
    const std::size_t iter_cap = 2000 * (m_ + total_) + 1000;
    int degenerate_run = 0;
    double last_value = objective_value(cost);
    for (std::size_t iter = 0; iter < iter_cap; ++iter) {
      bool bland = degenerate_run > 48;
      std::size_t enter = total_;
      double best = -tol_;
      for (std::size_t j = 0; j < total_; ++j) {
        double rc = cost[j];
        for (std::size_t i = 0; i < m_; ++i) {
          rc -= cost[basis_[i]] * rows_[i][j];
        }
        if (rc < -tol_) {
          if (bland) {
            enter = j;
            break;
          }
          if (rc < best) {
            best = rc;
            enter = j;
          }
        }
      }
      if (enter == total_) return true;  // optimal

      std::size_t leave = m_;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        if (rows_[i][enter] > tol_) {
          double ratio = rhs_[i] / rows_[i][enter];
          if (ratio < best_ratio - tol_ ||
              (ratio < best_ratio + tol_ &&
               (leave == m_ || basis_[i] < basis_[leave]))) {
            best_ratio = ratio;
            leave = i;
          }
        }
      }
      if (leave == m_) return false;  // unbounded

      pivot(leave, enter);
      double value = objective_value(cost);
      degenerate_run = (value > last_value - tol_) ? degenerate_run + 1 : 0;
      last_value = value;
    }
    throw NonConvergenceError("simplex iteration cap exceeded");
  }

  void pivot(std::size_t row, std::size_t col) {
    double piv = rows_[row][col];
    for (double& a : rows_[row]) a /= piv;
    rhs_[row] /= piv;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == row) continue;
      double f = rows_[i][col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < total_; ++j) {
        rows_[i][j] -= f * rows_[row][j];
      }
      rhs_[i] -= f * rhs_[row];
    }
    basis_[row] = col;
  }

  std::vector<std::vector<double>> rows_;
  std::vector<double> rhs_;
  double tol_;
  std::size_t m_ = 0, n_ = 0, total_ = 0;
  std::vector<std::size_t> basis_;
};

inline double lp_residual(const LinearProgram& lp,
                          const std::vector<double>& x) {
  double worst = 0.0;
  for (std::size_t r = 0; r < lp.eq_lhs.size(); ++r) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < lp.num_vars; ++j)
      lhs += lp.eq_lhs[r][j] * x[j];
    worst = std::max(worst, std::abs(lhs - lp.eq_rhs[r]));
  }
  for (std::size_t r = 0; r < lp.le_lhs.size(); ++r) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < lp.num_vars; ++j)
      lhs += lp.le_lhs[r][j] * x[j];
    worst = std::max(worst, lhs - lp.le_rhs[r]);
  }
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    double lo = j < lp.lower.size() ? lp.lower[j] : 0.0;
    worst = std::max(worst, lo - x[j]);
    if (j < lp.upper.size() && std::isfinite(lp.upper[j])) {
      worst = std::max(worst, x[j] - lp.upper[j]);
    }
  }
  return worst;
}

inline LpSolution solve_lp(const LinearProgram& lp, bool optimize,
                           double tol) {
  const std::size_t n = lp.num_vars;
  for (const auto& row : lp.eq_lhs) {
    if (row.size() != n) throw std::invalid_argument("eq row size mismatch");
  }
  for (const auto& row : lp.le_lhs) {
    if (row.size() != n) throw std::invalid_argument("le row size mismatch");
  }
  if (lp.eq_lhs.size() != lp.eq_rhs.size() ||
      lp.le_lhs.size() != lp.le_rhs.size()) {
    throw std::invalid_argument("rhs size mismatch");
  }

  std::vector<double> lower(n, 0.0), upper(n,
                                           std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < lp.lower.size() && j < n; ++j)
    lower[j] = lp.lower[j];
  for (std::size_t j = 0; j < lp.upper.size() && j < n; ++j)
    upper[j] = lp.upper[j];
  for (std::size_t j = 0; j < n; ++j) {
    if (lower[j] > upper[j]) throw std::invalid_argument("lower > upper");
  }

  // Shift to y = x - lower >= 0; finite uppers become <= rows; <= rows gain
  // slack variables to reach equality standard form.
  std::vector<std::vector<double>> le = lp.le_lhs;
  std::vector<double> le_rhs = lp.le_rhs;
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isfinite(upper[j])) {
      std::vector<double> row(n, 0.0);
      row[j] = 1.0;
      le.push_back(std::move(row));
      le_rhs.push_back(upper[j]);
    }
  }

  const std::size_t num_le = le.size();
  const std::size_t cols = n + num_le;
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  rows.reserve(lp.eq_lhs.size() + num_le);

  for (std::size_t r = 0; r < lp.eq_lhs.size(); ++r) {
    std::vector<double> row(cols, 0.0);
    double shift = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row[j] = lp.eq_lhs[r][j];
      shift += lp.eq_lhs[r][j] * lower[j];
    }
    rows.push_back(std::move(row));
    rhs.push_back(lp.eq_rhs[r] - shift);
  }
  for (std::size_t r = 0; r < num_le; ++r) {
    std::vector<double> row(cols, 0.0);
    double shift = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row[j] = le[r][j];
      shift += le[r][j] * lower[j];
    }
    row[n + r] = 1.0;
    rows.push_back(std::move(row));
    rhs.push_back(le_rhs[r] - shift);
  }

  SimplexTableau tableau(std::move(rows), std::move(rhs), cols, tol);
  double infeasibility = tableau.phase_one();

  LpSolution result;
  if (infeasibility > tol) {
    result.status = LpStatus::Infeasible;
    result.residual = infeasibility;
    return result;
  }

  if (optimize && !lp.objective.empty()) {
    std::vector<double> cost(cols, 0.0);
    for (std::size_t j = 0; j < n && j < lp.objective.size(); ++j) {
      cost[j] = -lp.objective[j];  // maximize = minimize negation
    }
    if (!tableau.phase_two(std::move(cost))) {
      result.status = LpStatus::Unbounded;
      return result;
    }
  }

  std::vector<double> y = tableau.solution();
  result.x.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) result.x[j] = y[j] + lower[j];
  result.value = 0.0;
  for (std::size_t j = 0; j < n && j < lp.objective.size(); ++j) {
    result.value += lp.objective[j] * result.x[j];
  }
  result.residual = lp_residual(lp, result.x);
  result.status = LpStatus::Optimal;
  return result;
}

}  // namespace detail

/// Phase-one feasibility: a point with constraint residuals <= tol, or
/// Infeasible with the attained infeasibility measure.
inline LpSolution feasible(const LinearProgram& lp, double tol = 1e-9) {
  return detail::solve_lp(lp, /*optimize=*/false, tol);
}

/// Two-phase simplex maximization.
inline LpSolution maximize(const LinearProgram& lp, double tol = 1e-9) {
  return detail::solve_lp(lp, /*optimize=*/true, tol);
}

}  // namespace exante

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "exante/allocation.hpp"
#include "exante/clearing.hpp"
#include "exante/common.hpp"
#include "exante/decision.hpp"
#include "exante/information.hpp"
#include "exante/market.hpp"
#include "exante/simplex.hpp"

namespace exante {

/// Expected utility of one student at an ex-ante cutoff. Unmatched weight
/// contributes `unmatched_utility`.
inline double expected_utility(const MarketInstance& inst,
                               const SignalProfile& profile,
                               const DecisionRule& rule, const ExAnteCutoff& b,
                               std::size_t student,
                               Coupling coupling = Coupling::Independent,
                               double unmatched_utility = 0.0) {
  require_in_range(b, inst.num_students(), inst.num_programs());
  double total = 0.0;
  detail::for_each_student_outcome(
      inst, profile, b, coupling, student,
      [&](double weight, ChoiceSet cs, std::size_t i, std::size_t w,
          bool empty) {
        if (empty) {
          total += weight * unmatched_utility;
          return;
        }
        double assigned = 0.0;
        for (std::size_t p : choice_set_members(cs)) {
          double prob = rule.choice_probability(student, cs, i, w, p);
          total += weight * prob * inst.utilities.value(student, p, w);
          assigned += prob;
        }
        if (assigned < 1.0) {
          total += weight * (1.0 - assigned) * unmatched_utility;
        }
      });
  return total;
}

/// Probability that the student receives her i-th ranked program in the
/// realized state, for i = 1..n, with the unmatched bucket last.
inline std::vector<double> rank_distribution(
    const MarketInstance& inst, const SignalProfile& profile,
    const DecisionRule& rule, const ExAnteCutoff& b, std::size_t student,
    Coupling coupling = Coupling::Independent) {
  require_in_range(b, inst.num_students(), inst.num_programs());
  const std::size_t n = inst.num_programs();
  std::vector<double> dist(n + 1, 0.0);
  detail::for_each_student_outcome(
      inst, profile, b, coupling, student,
      [&](double weight, ChoiceSet cs, std::size_t i, std::size_t w,
          bool empty) {
        if (empty) {
          dist[n] += weight;
          return;
        }
        double assigned = 0.0;
        for (std::size_t p : choice_set_members(cs)) {
          double prob = rule.choice_probability(student, cs, i, w, p);
          if (prob > 0.0) {
            dist[inst.utilities.preference_rank(student, p, w) - 1] +=
                weight * prob;
            assigned += prob;
          }
        }
        if (assigned < 1.0) dist[n] += weight * (1.0 - assigned);
      });
  return dist;
}

/// Expected utility of a program: match probabilities weighted by its value
/// of each student. Requires program utilities on the instance.
inline double expected_program_utility(
    const MarketInstance& inst, const SignalProfile& profile,
    const DecisionRule& rule, const ExAnteCutoff& b, std::size_t program,
    Coupling coupling = Coupling::Independent) {
  if (!inst.program_utilities) {
    throw std::invalid_argument("instance has no program utilities");
  }
  require_in_range(b, inst.num_students(), inst.num_programs());
  double total = 0.0;
  for (std::size_t k = 0; k < inst.num_students(); ++k) {
    detail::for_each_student_outcome(
        inst, profile, b, coupling, k,
        [&](double weight, ChoiceSet cs, std::size_t i, std::size_t w,
            bool empty) {
          if (empty || !contains(cs, program)) return;
          total += weight * rule.choice_probability(k, cs, i, w, program) *
                   (*inst.program_utilities)[program][k];
        });
  }
  return total;
}

struct WelfareReport {
  std::vector<double> student_utility;
  /// rank_distribution[k] has n + 1 columns (ranks then unmatched).
  std::vector<std::vector<double>> rank_distributions;
  std::optional<std::vector<double>> program_utility;
};

inline WelfareReport welfare_report(const MarketInstance& inst,
                                    const SignalProfile& profile,
                                    const DecisionRule& rule,
                                    const ExAnteCutoff& b,
                                    Coupling coupling = Coupling::Independent,
                                    double unmatched_utility = 0.0) {
  WelfareReport report;
  for (std::size_t k = 0; k < inst.num_students(); ++k) {
    report.student_utility.push_back(expected_utility(
        inst, profile, rule, b, k, coupling, unmatched_utility));
    report.rank_distributions.push_back(
        rank_distribution(inst, profile, rule, b, k, coupling));
  }
  if (inst.program_utilities) {
    report.program_utility.emplace();
    for (std::size_t p = 0; p < inst.num_programs(); ++p) {
      report.program_utility->push_back(
          expected_program_utility(inst, profile, rule, b, p, coupling));
    }
  }
  return report;
}

struct WelfareMonotonicityReport {
  bool students_pass = true;
  /// U_k(high) - U_k(low) per student; all should be >= -tol.
  std::vector<double> student_delta;
  /// Program side is evaluated only when both cutoffs clear the market and
  /// program utilities exist; U_p(high) - U_p(low) should be <= tol.
  bool programs_checked = false;
  bool programs_pass = true;
  std::vector<double> program_delta;
};

/// Every student weakly prefers the coordinate-wise higher cutoff; programs
/// weakly prefer the lower one (checked on market-clearing pairs only).
inline WelfareMonotonicityReport welfare_monotonicity_check(
    const MarketInstance& inst, const SignalProfile& profile,
    const DecisionRule& rule, const ExAnteCutoff& b_high,
    const ExAnteCutoff& b_low, Coupling coupling = Coupling::Independent,
    double tol = 1e-9) {
  for (std::size_t p = 0; p < inst.num_programs(); ++p) {
    if (b_high.values[p] < b_low.values[p]) {
      throw std::invalid_argument("cutoffs are not comparable: need b >= b'");
    }
  }
  WelfareMonotonicityReport report;
  for (std::size_t k = 0; k < inst.num_students(); ++k) {
    double hi = expected_utility(inst, profile, rule, b_high, k, coupling);
    double lo = expected_utility(inst, profile, rule, b_low, k, coupling);
    report.student_delta.push_back(hi - lo);
    if (hi < lo - tol) report.students_pass = false;
  }
  if (inst.program_utilities) {
    bool both_clear =
        verify_market_clearing(inst, profile, rule, b_high, 1e-6, coupling)
            .pass &&
        verify_market_clearing(inst, profile, rule, b_low, 1e-6, coupling)
            .pass;
    if (both_clear) {
      report.programs_checked = true;
      for (std::size_t p = 0; p < inst.num_programs(); ++p) {
        double hi =
            expected_program_utility(inst, profile, rule, b_high, p, coupling);
        double lo =
            expected_program_utility(inst, profile, rule, b_low, p, coupling);
        report.program_delta.push_back(hi - lo);
        if (hi > lo + tol) report.programs_pass = false;
      }
    }
  }
  return report;
}

enum class ParetoOrder {
  LeftDominates,
  RightDominates,
  Equivalent,
  Incomparable,
};

struct ParetoComparison {
  ParetoOrder verdict = ParetoOrder::Incomparable;
  std::vector<double> left_utility;
  std::vector<double> right_utility;
  ExAnteCutoff left_cutoff;
  ExAnteCutoff right_cutoff;
};

/// Compares two signal profiles by student welfare at their respective
/// greatest market-clearing cutoffs, the naive rule re-derived under each.
inline ParetoComparison pareto_compare(const MarketInstance& inst,
                                       const SignalProfile& left,
                                       const SignalProfile& right,
                                       const ClearingConfig& cfg = {},
                                       double tol = 1e-9,
                                       TieBreak tie_break = TieBreak::Error,
                                       double unmatched_utility = 0.0) {
  NaiveRule left_rule(inst, left, tie_break);
  NaiveRule right_rule(inst, right, tie_break);
  ClearingResult left_fp = greatest_market_clearing(inst, left, left_rule, cfg);
  ClearingResult right_fp =
      greatest_market_clearing(inst, right, right_rule, cfg);
  if (!left_fp.converged || !right_fp.converged) {
    throw NonConvergenceError(
        "market-clearing iteration did not converge for a signal profile");
  }

  ParetoComparison cmp;
  cmp.left_cutoff = left_fp.cutoff;
  cmp.right_cutoff = right_fp.cutoff;
  bool left_ge = true, right_ge = true, strict_left = false,
       strict_right = false;
  for (std::size_t k = 0; k < inst.num_students(); ++k) {
    double ul = expected_utility(inst, left, left_rule, left_fp.cutoff, k,
                                 cfg.coupling, unmatched_utility);
    double ur = expected_utility(inst, right, right_rule, right_fp.cutoff, k,
                                 cfg.coupling, unmatched_utility);
    cmp.left_utility.push_back(ul);
    cmp.right_utility.push_back(ur);
    if (ul > ur + tol) {
      strict_left = true;
      right_ge = false;
    } else if (ur > ul + tol) {
      strict_right = true;
      left_ge = false;
    }
  }
  if (left_ge && right_ge) {
    cmp.verdict = ParetoOrder::Equivalent;
  } else if (left_ge && strict_left) {
    cmp.verdict = ParetoOrder::LeftDominates;
  } else if (right_ge && strict_right) {
    cmp.verdict = ParetoOrder::RightDominates;
  } else {
    cmp.verdict = ParetoOrder::Incomparable;
  }
  return cmp;
}

struct Corollary1Report {
  bool blackwell_premise = false;
  bool cutoff_premise = false;
  bool applicable = false;      // both premises hold
  bool conclusion_holds = true; // fine profile not dominated by coarse
  ParetoComparison comparison;
};

/// Checks: when `fine` is (per-student) Blackwell more informative than
/// `coarse` and max MC(fine) >= max MC(coarse), then `fine` is not Pareto
/// dominated by `coarse`.
inline Corollary1Report corollary1_check(const MarketInstance& inst,
                                         const SignalProfile& fine,
                                         const SignalProfile& coarse,
                                         const ClearingConfig& cfg = {},
                                         double tol = 1e-9) {
  Corollary1Report report;
  report.blackwell_premise = profile_more_informative(fine, coarse);
  report.comparison = pareto_compare(inst, fine, coarse, cfg, tol);
  report.cutoff_premise = true;
  for (std::size_t p = 0; p < inst.num_programs(); ++p) {
    if (report.comparison.left_cutoff.values[p] <
        report.comparison.right_cutoff.values[p] - tol) {
      report.cutoff_premise = false;
    }
  }
  report.applicable = report.blackwell_premise && report.cutoff_premise;
  report.conclusion_holds =
      report.comparison.verdict != ParetoOrder::RightDominates;
  return report;
}

struct SerialDictatorshipResult {
  /// allocation[k][w][p]: mass on program p in state w (constant in e).
  std::vector<std::vector<std::vector<double>>> allocation;
  /// match_probability[k][p], unmatched in column n.
  std::vector<std::vector<double>> match_probability;
  std::vector<double> student_utility;
};

/// Sequential welfare maximization under a common priority order and full
/// disclosure: each student solves a small allocation program over
/// (program, state) mass against the capacities her predecessors left over.
inline SerialDictatorshipResult serial_dictatorship(
    const MarketInstance& inst, double unmatched_utility = 0.0) {
  const std::size_t t = inst.num_students();
  const std::size_t n = inst.num_programs();
  const std::size_t states = inst.num_states();
  for (std::size_t p = 1; p < n; ++p) {
    if (inst.priorities[p] != inst.priorities[0]) {
      throw std::invalid_argument(
          "serial dictatorship requires a common priority order");
    }
  }

  SerialDictatorshipResult result;
  result.allocation.assign(
      t, std::vector<std::vector<double>>(states, std::vector<double>(n, 0.0)));
  result.match_probability.assign(t, std::vector<double>(n + 1, 0.0));
  result.student_utility.assign(t, 0.0);

  if (t == 0 || n == 0) return result;

  std::vector<double> remaining = inst.capacities;
  for (std::size_t k : inst.priorities[0]) {
    // Variables A[p][w] at index p * states + w.
    LinearProgram lp;
    lp.num_vars = n * states;
    lp.objective.assign(lp.num_vars, 0.0);
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t w = 0; w < states; ++w) {
        lp.objective[p * states + w] =
            inst.prior[w] *
            (inst.utilities.value(k, p, w) - unmatched_utility);
      }
    }
    for (std::size_t w = 0; w < states; ++w) {
      std::vector<double> row(lp.num_vars, 0.0);
      for (std::size_t p = 0; p < n; ++p) row[p * states + w] = 1.0;
      lp.le_lhs.push_back(std::move(row));
      lp.le_rhs.push_back(1.0);
    }
    for (std::size_t p = 0; p < n; ++p) {
      std::vector<double> row(lp.num_vars, 0.0);
      for (std::size_t w = 0; w < states; ++w) {
        row[p * states + w] = inst.prior[w];
      }
      lp.le_lhs.push_back(std::move(row));
      lp.le_rhs.push_back(std::max(0.0, remaining[p]));
    }

    LpSolution sol = maximize(lp);
    if (sol.status != LpStatus::Optimal) {
      throw std::logic_error("serial dictatorship allocation LP failed");
    }
    double matched = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      double mass = 0.0;
      for (std::size_t w = 0; w < states; ++w) {
        double a = std::clamp(sol.x[p * states + w], 0.0, 1.0);
        result.allocation[k][w][p] = a;
        mass += inst.prior[w] * a;
      }
      result.match_probability[k][p] = mass;
      remaining[p] -= mass;
      matched += mass;
    }
    result.match_probability[k][n] = std::max(0.0, 1.0 - matched);
    result.student_utility[k] =
        sol.value + unmatched_utility;
  }
  return result;
}

}  // namespace exante

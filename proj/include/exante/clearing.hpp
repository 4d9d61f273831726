#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "exante/allocation.hpp"
#include "exante/common.hpp"
#include "exante/decision.hpp"
#include "exante/information.hpp"
#include "exante/market.hpp"

namespace exante {

enum class UpdateScheme { Simultaneous, Sequential };

struct ClearingConfig {
  double clearing_tol = 1e-6;
  double fixed_point_tol = 1e-10;
  int max_sweeps = 10000;
  UpdateScheme scheme = UpdateScheme::Simultaneous;
  Coupling coupling = Coupling::Independent;
  bool record_trajectory = false;
};

struct ClearingResult {
  ExAnteCutoff cutoff;
  DemandVector demand;
  bool converged = false;
  int sweeps = 0;
  std::vector<double> residuals;
  std::vector<ExAnteCutoff> trajectory;
};

/// One coordinate of the operator T: the largest cutoff in [0, t] at which
/// program p's demand stays within capacity, with equality required below t.
/// Demand is piecewise linear in the program's own cutoff, so each linear
/// piece is solved exactly; on a piece flat at capacity the rightmost point
/// wins.
inline double coordinate_update(const MarketInstance& inst,
                                const SignalProfile& profile,
                                const DecisionRule& rule, std::size_t program,
                                const ExAnteCutoff& b,
                                Coupling coupling = Coupling::Independent) {
  const std::size_t t = inst.num_students();
  const double cap = inst.capacities[program];
  ExAnteCutoff probe = b;
  auto eval = [&](double x) {
    probe.values[program] = x;
    return demand_for_program(inst, profile, rule, probe, program, coupling);
  };

  double hi_x = static_cast<double>(t);
  double hi_val = eval(hi_x);
  if (hi_val <= cap) return hi_x;

  for (int m = static_cast<int>(t) - 1; m >= 0; --m) {
    // Knots of D_p inside [m, m+1]. Under the independent coupling demand is
    // linear on the whole unit segment; under the continuum coupling it can
    // kink where the marginal students' own threshold crosses another
    // program's threshold.
    std::vector<double> knots = {static_cast<double>(m)};
    if (coupling == Coupling::Continuum) {
      for (std::size_t k = 0; k < t; ++k) {
        if (inst.rank(program, k) != static_cast<std::size_t>(m) + 1) continue;
        for (std::size_t q = 0; q < inst.num_programs(); ++q) {
          if (q == program) continue;
          double theta = admission_probability(inst, k, q, b);
          if (theta > 0.0 && theta < 1.0) {
            knots.push_back(static_cast<double>(m) + theta);
          }
        }
      }
      std::sort(knots.begin(), knots.end(), std::greater<double>());
      knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    }
    for (double lo_x : knots) {
      double lo_val = eval(lo_x);
      if (lo_val <= cap) {
        // hi_val > cap >= lo_val on this linear piece.
        return lo_x + (cap - lo_val) / (hi_val - lo_val) * (hi_x - lo_x);
      }
      hi_x = lo_x;
      hi_val = lo_val;
    }
  }
  return 0.0;  // demand vanishes at 0 and capacities are positive
}

struct ClearingViolation {
  std::size_t program = 0;
  double demand = 0.0;
  double capacity = 0.0;
  double cutoff = 0.0;
  std::string kind;  // "over-capacity" or "under-demanded"
};

struct ClearingCheck {
  bool pass = true;
  std::vector<ClearingViolation> violations;
  DemandVector demand;
};

/// Definition of ex-ante market clearing: demand never exceeds capacity, and
/// equals it for every program whose cutoff sits strictly below t.
inline ClearingCheck verify_market_clearing(
    const MarketInstance& inst, const SignalProfile& profile,
    const DecisionRule& rule, const ExAnteCutoff& b, double tol = 1e-6,
    Coupling coupling = Coupling::Independent) {
  ClearingCheck check;
  check.demand = demand(inst, profile, rule, b, coupling);
  const double t = static_cast<double>(inst.num_students());
  for (std::size_t p = 0; p < inst.num_programs(); ++p) {
    double d = check.demand.by_program[p];
    double cap = inst.capacities[p];
    if (d > cap + tol) {
      check.pass = false;
      check.violations.push_back({p, d, cap, b.values[p], "over-capacity"});
    } else if (b.values[p] < t - tol && std::abs(d - cap) > tol) {
      check.pass = false;
      check.violations.push_back({p, d, cap, b.values[p], "under-demanded"});
    }
  }
  return check;
}

namespace detail {

inline ClearingResult iterate_clearing(const MarketInstance& inst,
                                       const SignalProfile& profile,
                                       const DecisionRule& rule,
                                       const ClearingConfig& cfg,
                                       bool from_top) {
  const std::size_t t = inst.num_students();
  const std::size_t n = inst.num_programs();

  ClearingResult result;
  result.cutoff.values.assign(n, from_top ? static_cast<double>(t) : 0.0);
  if (cfg.record_trajectory) result.trajectory.push_back(result.cutoff);

  double delta = std::numeric_limits<double>::infinity();
  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    ExAnteCutoff next = result.cutoff;
    if (cfg.scheme == UpdateScheme::Simultaneous) {
      for (std::size_t p = 0; p < n; ++p) {
        next.values[p] = coordinate_update(inst, profile, rule, p,
                                           result.cutoff, cfg.coupling);
      }
    } else {
      for (std::size_t p = 0; p < n; ++p) {
        next.values[p] =
            coordinate_update(inst, profile, rule, p, next, cfg.coupling);
      }
    }
    delta = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      delta = std::max(delta, std::abs(next.values[p] -
                                       result.cutoff.values[p]));
    }
    result.cutoff = std::move(next);
    result.sweeps = sweep;
    if (cfg.record_trajectory) result.trajectory.push_back(result.cutoff);
    if (delta <= cfg.fixed_point_tol) break;
  }

  result.demand = demand(inst, profile, rule, result.cutoff, cfg.coupling);
  result.residuals.assign(n, 0.0);
  bool clears = true;
  const double td = static_cast<double>(t);
  for (std::size_t p = 0; p < n; ++p) {
    double d = result.demand.by_program[p];
    double cap = inst.capacities[p];
    double r = std::max(0.0, d - cap);
    if (result.cutoff.values[p] < td - cfg.clearing_tol) {
      r = std::max(r, std::abs(d - cap));
    }
    result.residuals[p] = r;
    if (r > cfg.clearing_tol) clears = false;
  }
  result.converged = delta <= cfg.fixed_point_tol && clears;
  return result;
}

}  // namespace detail

/// Monotone iteration of T from (t, ..., t); the iterate sequence is
/// coordinate-wise nonincreasing and settles on the greatest market-clearing
/// cutoff, max MC(pi). Non-convergence is reported, not thrown.
inline ClearingResult greatest_market_clearing(const MarketInstance& inst,
                                               const SignalProfile& profile,
                                               const DecisionRule& rule,
                                               const ClearingConfig& cfg = {}) {
  return detail::iterate_clearing(inst, profile, rule, cfg, /*from_top=*/true);
}

/// Monotone iteration of T from (0, ..., 0) up to the least market-clearing
/// cutoff.
inline ClearingResult least_market_clearing(const MarketInstance& inst,
                                            const SignalProfile& profile,
                                            const DecisionRule& rule,
                                            const ClearingConfig& cfg = {}) {
  return detail::iterate_clearing(inst, profile, rule, cfg, /*from_top=*/false);
}

struct RuralHospitalReport {
  bool demands_equal = true;
  bool lotteries_equal = true;
  std::vector<double> demand_delta;
  /// Programs below capacity whose per-student match columns were compared.
  std::vector<std::size_t> undersubscribed;
};

/// Rural-hospital property between two market-clearing cutoffs: equal
/// demand everywhere, and identical student lotteries at every program that
/// does not fill its capacity.
inline RuralHospitalReport rural_hospital_check(
    const MarketInstance& inst, const SignalProfile& profile,
    const DecisionRule& rule, const ExAnteCutoff& b, const ExAnteCutoff& b2,
    double tol = 1e-9, Coupling coupling = Coupling::Independent) {
  double verify_tol = std::max(tol, 1e-6);
  if (!verify_market_clearing(inst, profile, rule, b, verify_tol, coupling)
           .pass ||
      !verify_market_clearing(inst, profile, rule, b2, verify_tol, coupling)
           .pass) {
    throw std::invalid_argument(
        "rural_hospital_check requires market-clearing cutoffs");
  }
  RuralHospitalReport report;
  DemandVector d1 = demand(inst, profile, rule, b, coupling);
  DemandVector d2 = demand(inst, profile, rule, b2, coupling);
  report.demand_delta.resize(inst.num_programs());
  for (std::size_t p = 0; p < inst.num_programs(); ++p) {
    report.demand_delta[p] = d1.by_program[p] - d2.by_program[p];
    if (std::abs(report.demand_delta[p]) > tol) report.demands_equal = false;
  }

  MatchingDistribution m1 =
      matching_distribution(inst, profile, rule, b, coupling, 0);
  MatchingDistribution m2 =
      matching_distribution(inst, profile, rule, b2, coupling, 0);
  for (std::size_t p = 0; p < inst.num_programs(); ++p) {
    if (d1.by_program[p] < inst.capacities[p] - std::max(tol, 1e-9)) {
      report.undersubscribed.push_back(p);
      for (std::size_t k = 0; k < inst.num_students(); ++k) {
        if (std::abs(m1.match_probability[k][p] -
                     m2.match_probability[k][p]) > tol) {
          report.lotteries_equal = false;
        }
      }
    }
  }
  return report;
}

struct DeterministicScan {
  /// A clearing integer cutoff when one exists; empty is the witness that
  /// market clearing needs randomization.
  std::optional<DeterministicCutoff> clearing;
  std::size_t examined = 0;
};

/// Exhaustively tests every integer cutoff in {0..t}^n against the
/// market-clearing definition.
inline DeterministicScan no_deterministic_clearing_witness(
    const MarketInstance& inst, const SignalProfile& profile,
    const DecisionRule& rule, Coupling coupling = Coupling::Independent,
    double tol = 1e-9, std::size_t max_enumeration = 2'000'000) {
  const std::size_t t = inst.num_students();
  const std::size_t n = inst.num_programs();
  double count = std::pow(static_cast<double>(t) + 1.0,
                          static_cast<double>(n));
  if (count > static_cast<double>(max_enumeration)) {
    throw JointTooLargeError("integer cutoff grid too large to enumerate");
  }

  DeterministicScan scan;
  std::vector<int> bar(n, 0);
  while (true) {
    ++scan.examined;
    ExAnteCutoff b;
    b.values.assign(bar.begin(), bar.end());
    if (verify_market_clearing(inst, profile, rule, b, tol, coupling).pass) {
      scan.clearing = DeterministicCutoff{bar};
      return scan;
    }
    std::size_t p = 0;
    while (p < n) {
      if (++bar[p] <= static_cast<int>(t)) break;
      bar[p] = 0;
      ++p;
    }
    if (p == n) break;
  }
  return scan;
}

}  // namespace exante

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "exante/common.hpp"
#include "exante/decision.hpp"
#include "exante/information.hpp"
#include "exante/market.hpp"

namespace exante {

/// Integer cutoff vector: program p admits exactly its top values[p]
/// priority students.
struct DeterministicCutoff {
  std::vector<int> values;
};

/// Real cutoff vector in [0, t]^n; fractional parts are resolved by the
/// two-point randomization below.
struct ExAnteCutoff {
  std::vector<double> values;

  bool operator==(const ExAnteCutoff&) const = default;
};

inline void require_in_range(const ExAnteCutoff& b, std::size_t t,
                             std::size_t n) {
  if (b.values.size() != n) {
    throw std::invalid_argument("cutoff length != number of programs");
  }
  for (double v : b.values) {
    if (!(v >= 0.0) || v > static_cast<double>(t)) {
      throw std::out_of_range("cutoff entry outside [0, t]");
    }
  }
}

/// Two-point distribution over adjacent integer cutoffs with mean b_p:
/// floor(b_p) with weight 1 - frac, ceil(b_p) with weight frac. Degenerate
/// at integers.
struct TwoPointCutoff {
  int low = 0;
  int high = 0;        // == low when degenerate
  double low_weight = 1.0;
  double high_weight = 0.0;

  bool degenerate() const { return high == low; }
};

struct CutoffDistribution {
  std::vector<TwoPointCutoff> per_program;

  std::size_t joint_support_size() const {
    std::size_t size = 1;
    for (const auto& d : per_program) {
      if (!d.degenerate()) size *= 2;
    }
    return size;
  }

  /// Visits every joint deterministic cutoff with its product weight, in a
  /// fixed order (program 0 varies slowest).
  template <typename Visitor>
  void for_each_joint(Visitor&& visit) const {
    const std::size_t n = per_program.size();
    DeterministicCutoff bar;
    bar.values.assign(n, 0);
    enumerate(0, 1.0, bar, visit);
  }

 private:
  template <typename Visitor>
  void enumerate(std::size_t p, double weight, DeterministicCutoff& bar,
                 Visitor&& visit) const {
    if (p == per_program.size()) {
      visit(const_cast<const DeterministicCutoff&>(bar), weight);
      return;
    }
    const TwoPointCutoff& d = per_program[p];
    bar.values[p] = d.low;
    enumerate(p + 1, weight * d.low_weight, bar, visit);
    if (!d.degenerate() && d.high_weight > 0.0) {
      bar.values[p] = d.high;
      enumerate(p + 1, weight * d.high_weight, bar, visit);
    }
  }
};

/// Per-program two-point randomization induced by an ex-ante cutoff; the
/// joint distribution is the independent product.
inline CutoffDistribution cutoff_distribution(const ExAnteCutoff& b,
                                              std::size_t num_students) {
  CutoffDistribution dist;
  dist.per_program.reserve(b.values.size());
  for (double v : b.values) {
    if (!(v >= 0.0) || v > static_cast<double>(num_students)) {
      throw std::out_of_range("cutoff entry outside [0, t]");
    }
    TwoPointCutoff d;
    double floor_v = std::floor(v);
    double frac = v - floor_v;
    d.low = static_cast<int>(floor_v);
    if (frac == 0.0) {
      d.high = d.low;
      d.low_weight = 1.0;
      d.high_weight = 0.0;
    } else {
      d.high = d.low + 1;
      d.high_weight = frac;
      d.low_weight = 1.0 - frac;
    }
    dist.per_program.push_back(d);
  }
  return dist;
}

/// Programs whose realized cutoff admits the student: rank <= cutoff.
inline ChoiceSet choice_set(const MarketInstance& inst, std::size_t student,
                            const DeterministicCutoff& cutoff) {
  ChoiceSet cs = 0;
  for (std::size_t p = 0; p < inst.num_programs(); ++p) {
    if (static_cast<int>(inst.rank(p, student)) <= cutoff.values[p]) {
      cs = with_program(cs, p);
    }
  }
  return cs;
}

/// Marginal probability that `program` admits `student` under the ex-ante
/// cutoff: clamp(b_p - rank + 1, 0, 1). Identical in both coupling modes.
inline double admission_probability(const MarketInstance& inst,
                                    std::size_t student, std::size_t program,
                                    const ExAnteCutoff& b) {
  double x = b.values[program] -
             static_cast<double>(inst.rank(program, student)) + 1.0;
  return std::clamp(x, 0.0, 1.0);
}

/// How the per-program admission events of one student are coupled:
///  - Independent: programs randomize their cutoffs independently;
///  - Continuum: a single uniform student point drives all programs
///    (comonotone thresholds).
/// The two agree on all per-student marginals and can differ only when a
/// student is marginal at two or more programs.
enum class Coupling { Independent, Continuum };

/// Distribution of the student's realized choice set: (set, weight) pairs
/// with positive weights summing to 1, in a fixed deterministic order.
inline std::vector<std::pair<ChoiceSet, double>> choice_set_distribution(
    const MarketInstance& inst, std::size_t student, const ExAnteCutoff& b,
    Coupling coupling) {
  const std::size_t n = inst.num_programs();
  ChoiceSet sure = 0;
  std::vector<std::size_t> marginal;
  std::vector<double> frac;
  for (std::size_t p = 0; p < n; ++p) {
    double theta = admission_probability(inst, student, p, b);
    if (theta >= 1.0) {
      sure = with_program(sure, p);
    } else if (theta > 0.0) {
      marginal.push_back(p);
      frac.push_back(theta);
    }
  }

  std::vector<std::pair<ChoiceSet, double>> out;
  if (coupling == Coupling::Independent) {
    const std::size_t m = marginal.size();
    out.reserve(std::size_t{1} << m);
    for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
      double weight = 1.0;
      ChoiceSet cs = sure;
      for (std::size_t j = 0; j < m; ++j) {
        if ((mask >> j) & 1u) {
          weight *= frac[j];
          cs = with_program(cs, marginal[j]);
        } else {
          weight *= 1.0 - frac[j];
        }
      }
      if (weight > 0.0) out.emplace_back(cs, weight);
    }
  } else {
    // Segments of e in [0,1] with constant choice set; the set shrinks as e
    // grows past each threshold.
    std::vector<double> cuts = frac;
    cuts.push_back(0.0);
    cuts.push_back(1.0);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
      double lo = cuts[j], hi = cuts[j + 1];
      if (!(hi > lo)) continue;
      ChoiceSet cs = sure;
      for (std::size_t idx = 0; idx < marginal.size(); ++idx) {
        if (frac[idx] >= hi) cs = with_program(cs, marginal[idx]);
      }
      out.emplace_back(cs, hi - lo);
    }
  }
  return out;
}

/// Expected demand per program plus the expected unmatched mass; matched and
/// unmatched always sum to the number of students.
struct DemandVector {
  std::vector<double> by_program;
  double unmatched = 0.0;

  double total_matched() const {
    double total = 0.0;
    for (double d : by_program) total += d;
    return total;
  }
};

namespace detail {

/// Shared per-student enumeration: visit(weight, k, cs, i, w) over every
/// positive-weight (choice set, realization, state) combination, where
/// weight = P(cs) * psi(w) * pi_k(i|w). Empty choice sets are forwarded
/// with cs == 0 and i undefined (the student is unmatched).
/// Fixed iteration order: students, choice sets, states, realizations.
template <typename Visitor>
void for_each_student_outcome(const MarketInstance& inst,
                              const SignalProfile& profile,
                              const ExAnteCutoff& b, Coupling coupling,
                              std::size_t student, Visitor&& visit) {
  const Signal& signal = profile[student];
  for (const auto& [cs, cs_weight] : choice_set_distribution(
           inst, student, b, coupling)) {
    if (cs == 0) {
      visit(cs_weight, cs, std::size_t{0}, std::size_t{0}, true);
      continue;
    }
    for (std::size_t w = 0; w < inst.num_states(); ++w) {
      if (inst.prior[w] == 0.0) continue;
      for (std::size_t i = 0; i < signal.num_realizations(); ++i) {
        double weight = cs_weight * inst.prior[w] * signal.likelihood[w][i];
        if (weight > 0.0) visit(weight, cs, i, w, false);
      }
    }
  }
}

}  // namespace detail

/// Expected demand under a signal profile, decision rule and ex-ante cutoff.
inline DemandVector demand(const MarketInstance& inst,
                           const SignalProfile& profile,
                           const DecisionRule& rule, const ExAnteCutoff& b,
                           Coupling coupling = Coupling::Independent) {
  require_in_range(b, inst.num_students(), inst.num_programs());
  DemandVector out;
  out.by_program.assign(inst.num_programs(), 0.0);
  for (std::size_t k = 0; k < inst.num_students(); ++k) {
    detail::for_each_student_outcome(
        inst, profile, b, coupling, k,
        [&](double weight, ChoiceSet cs, std::size_t i, std::size_t w,
            bool empty) {
          if (empty) {
            out.unmatched += weight;
            return;
          }
          double assigned = 0.0;
          for (std::size_t p : choice_set_members(cs)) {
            double prob = rule.choice_probability(k, cs, i, w, p);
            out.by_program[p] += weight * prob;
            assigned += prob;
          }
          if (assigned < 1.0) out.unmatched += weight * (1.0 - assigned);
        });
  }
  return out;
}

/// Demand of a single program (same enumeration as `demand`).
inline double demand_for_program(const MarketInstance& inst,
                                 const SignalProfile& profile,
                                 const DecisionRule& rule,
                                 const ExAnteCutoff& b, std::size_t program,
                                 Coupling coupling = Coupling::Independent) {
  require_in_range(b, inst.num_students(), inst.num_programs());
  double total = 0.0;
  for (std::size_t k = 0; k < inst.num_students(); ++k) {
    detail::for_each_student_outcome(
        inst, profile, b, coupling, k,
        [&](double weight, ChoiceSet cs, std::size_t i, std::size_t w,
            bool empty) {
          if (empty || !contains(cs, program)) return;
          total += weight * rule.choice_probability(k, cs, i, w, program);
        });
  }
  return total;
}

inline constexpr int kUnmatched = -1;

/// One deterministic matching: per student, a program index or kUnmatched.
struct DeterministicMatching {
  std::vector<int> assignment;

  bool operator<(const DeterministicMatching& other) const {
    return assignment < other.assignment;
  }
};

inline constexpr std::size_t kDefaultJointCap = 1'000'000;

/// Per-student match probabilities (columns: programs, then unmatched) and,
/// when small enough, the exact support over deterministic matchings.
struct MatchingDistribution {
  /// match_probability[k][p] for p < n; column n is the unmatched bucket.
  std::vector<std::vector<double>> match_probability;
  std::optional<std::vector<std::pair<DeterministicMatching, double>>> joint;
};

namespace detail {

// Expands the product of per-student choice distributions into deterministic
// matchings, accumulating weights into `sink`.
inline void expand_matchings(
    const std::vector<std::vector<std::pair<int, double>>>& options,
    std::size_t k, double weight, std::vector<int>& current,
    std::map<DeterministicMatching, double>& sink) {
  if (weight == 0.0) return;
  if (k == options.size()) {
    sink[DeterministicMatching{current}] += weight;
    return;
  }
  for (const auto& [assignment, prob] : options[k]) {
    current[k] = assignment;
    expand_matchings(options, k + 1, weight * prob, current, sink);
  }
}

}  // namespace detail

/// Matching distribution at an ex-ante cutoff. Marginals are always
/// computed. The joint support is enumerated for the independent coupling
/// when its tuple count stays within `joint_cap`; `require_joint` turns an
/// oversized (or continuum-coupled) request into an error.
inline MatchingDistribution matching_distribution(
    const MarketInstance& inst, const SignalProfile& profile,
    const DecisionRule& rule, const ExAnteCutoff& b,
    Coupling coupling = Coupling::Independent,
    std::size_t joint_cap = kDefaultJointCap, bool require_joint = false) {
  require_in_range(b, inst.num_students(), inst.num_programs());
  const std::size_t t = inst.num_students();
  const std::size_t n = inst.num_programs();

  MatchingDistribution out;
  out.match_probability.assign(t, std::vector<double>(n + 1, 0.0));
  for (std::size_t k = 0; k < t; ++k) {
    detail::for_each_student_outcome(
        inst, profile, b, coupling, k,
        [&](double weight, ChoiceSet cs, std::size_t i, std::size_t w,
            bool empty) {
          if (empty) {
            out.match_probability[k][n] += weight;
            return;
          }
          double assigned = 0.0;
          for (std::size_t p : choice_set_members(cs)) {
            double prob = rule.choice_probability(k, cs, i, w, p);
            out.match_probability[k][p] += weight * prob;
            assigned += prob;
          }
          if (assigned < 1.0) {
            out.match_probability[k][n] += weight * (1.0 - assigned);
          }
        });
  }

  if (coupling != Coupling::Independent) {
    if (require_joint) {
      throw JointTooLargeError(
          "joint support is only enumerable under the independent coupling");
    }
    return out;
  }

  CutoffDistribution phi = cutoff_distribution(b, t);
  std::size_t tuples = phi.joint_support_size() * inst.num_states();
  for (std::size_t k = 0; k < t && tuples <= joint_cap; ++k) {
    tuples *= std::max<std::size_t>(profile[k].num_realizations(), 1);
  }
  if (tuples > joint_cap) {
    if (require_joint) {
      throw JointTooLargeError("joint support exceeds the configured cap");
    }
    return out;
  }

  std::map<DeterministicMatching, double> support;
  phi.for_each_joint([&](const DeterministicCutoff& bar, double phi_weight) {
    std::vector<ChoiceSet> sets(t);
    for (std::size_t k = 0; k < t; ++k) sets[k] = choice_set(inst, k, bar);
    for (std::size_t w = 0; w < inst.num_states(); ++w) {
      if (inst.prior[w] == 0.0) continue;
      // Realization tuples, enumerated student by student.
      std::vector<std::size_t> idx(t, 0);
      while (true) {
        double weight = phi_weight * inst.prior[w];
        for (std::size_t k = 0; k < t; ++k) {
          weight *= profile[k].likelihood[w][idx[k]];
        }
        if (weight > 0.0) {
          std::vector<std::vector<std::pair<int, double>>> options(t);
          for (std::size_t k = 0; k < t; ++k) {
            if (sets[k] == 0) {
              options[k].emplace_back(kUnmatched, 1.0);
              continue;
            }
            double assigned = 0.0;
            for (std::size_t p : choice_set_members(sets[k])) {
              double prob = rule.choice_probability(k, sets[k], idx[k], w, p);
              if (prob > 0.0) {
                options[k].emplace_back(static_cast<int>(p), prob);
                assigned += prob;
              }
            }
            if (assigned < 1.0) {
              options[k].emplace_back(kUnmatched, 1.0 - assigned);
            }
          }
          std::vector<int> current(t, kUnmatched);
          detail::expand_matchings(options, 0, weight, current, support);
        }
        // Advance the realization tuple.
        std::size_t k = 0;
        while (k < t) {
          if (++idx[k] < profile[k].num_realizations()) break;
          idx[k] = 0;
          ++k;
        }
        if (k == t) break;
      }
    }
  });

  out.joint.emplace(support.begin(), support.end());
  return out;
}

}  // namespace exante

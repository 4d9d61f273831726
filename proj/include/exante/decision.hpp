#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <vector>

#include "exante/common.hpp"
#include "exante/information.hpp"
#include "exante/market.hpp"

namespace exante {

inline constexpr double kTieTol = 1e-9;

enum class TieBreak {
  Error,  // expected-utility ties are an instance error
  Index,  // resolve by lowest program index (exploratory runs only)
};

/// A stochastic decision rule: the probability that a student picks program
/// p out of choice set C, given her signal realization and the state.
class DecisionRule {
 public:
  virtual ~DecisionRule() = default;

  virtual double choice_probability(std::size_t student, ChoiceSet choice_set,
                                    std::size_t realization, std::size_t state,
                                    std::size_t program) const = 0;
};

/// Expected-utility-maximizing rule: picks the unique argmax of posterior
/// expected utility inside the choice set. Depends on the realization only,
/// never directly on the state. Ties are validated eagerly at construction
/// for every realization with positive marginal probability.
class NaiveRule : public DecisionRule {
 public:
  NaiveRule(const MarketInstance& inst, const SignalProfile& profile,
            TieBreak tie_break = TieBreak::Error) {
    const std::size_t t = inst.num_students();
    const std::size_t n = inst.num_programs();
    if (profile.size() != t) {
      throw std::invalid_argument("signal profile length != student count");
    }
    preference_.resize(t);
    reachable_.resize(t);
    for (std::size_t k = 0; k < t; ++k) {
      const Signal& signal = profile[k];
      const std::size_t m = signal.num_realizations();
      preference_[k].resize(m);
      reachable_[k].assign(m, false);
      for (std::size_t i = 0; i < m; ++i) {
        if (!(realization_marginal(inst.prior, signal, i) > 0.0)) continue;
        reachable_[k][i] = true;
        Belief mu = posterior(inst.prior, signal, i);
        std::vector<double> eu(n, 0.0);
        for (std::size_t p = 0; p < n; ++p) {
          for (std::size_t w = 0; w < inst.num_states(); ++w) {
            eu[p] += mu.probs[w] * inst.utilities.value(k, p, w);
          }
        }
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(
            order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return eu[a] > eu[b]; });
        if (tie_break == TieBreak::Error) {
          for (std::size_t j = 0; j + 1 < n; ++j) {
            if (std::abs(eu[order[j]] - eu[order[j + 1]]) <= kTieTol) {
              std::ostringstream msg;
              msg << "expected-utility tie for " << inst.students[k]
                  << " at realization " << signal.labels[i] << " between "
                  << inst.programs[order[j]] << " and "
                  << inst.programs[order[j + 1]];
              throw TieError(msg.str());
            }
          }
        }
        preference_[k][i] = std::move(order);
      }
    }
  }

  /// The unique expected-utility maximizer in `choice_set`.
  std::size_t decide(std::size_t student, ChoiceSet choice_set,
                     std::size_t realization) const {
    if (choice_set == 0) {
      throw EmptyChoiceSetError("decision requested on an empty choice set");
    }
    if (!reachable_[student][realization]) {
      throw std::domain_error("realization has zero marginal probability");
    }
    for (std::size_t p : preference_[student][realization]) {
      if (contains(choice_set, p)) return p;
    }
    throw std::logic_error("choice set contains no known program");
  }

  double choice_probability(std::size_t student, ChoiceSet choice_set,
                            std::size_t realization, std::size_t /*state*/,
                            std::size_t program) const override {
    return decide(student, choice_set, realization) == program ? 1.0 : 0.0;
  }

  std::size_t num_students() const { return preference_.size(); }

  bool realization_reachable(std::size_t student,
                             std::size_t realization) const {
    return reachable_[student][realization];
  }

 private:
  // preference_[k][i] = programs ordered by posterior expected utility.
  std::vector<std::vector<std::vector<std::size_t>>> preference_;
  std::vector<std::vector<bool>> reachable_;
};

/// Fully materialized stochastic decision profile over every nonempty
/// choice set, realization and state.
class GeneralDecisionProfile : public DecisionRule {
 public:
  GeneralDecisionProfile(std::size_t num_students, std::size_t num_programs,
                         std::size_t num_states,
                         std::vector<std::size_t> realization_counts)
      : n_(num_programs),
        num_states_(num_states),
        realizations_(std::move(realization_counts)) {
    if (realizations_.size() != num_students) {
      throw std::invalid_argument("realization counts != student count");
    }
    const std::size_t masks = static_cast<std::size_t>(all_programs(n_)) + 1;
    table_.resize(num_students);
    for (std::size_t k = 0; k < num_students; ++k) {
      table_[k].assign(masks * realizations_[k] * num_states_ * n_, 0.0);
    }
  }

  void set(std::size_t student, ChoiceSet choice_set, std::size_t realization,
           std::size_t state, std::size_t program, double probability) {
    table_[student][index(student, choice_set, realization, state, program)] =
        probability;
  }

  double choice_probability(std::size_t student, ChoiceSet choice_set,
                            std::size_t realization, std::size_t state,
                            std::size_t program) const override {
    return table_[student]
                 [index(student, choice_set, realization, state, program)];
  }

  std::size_t num_students() const { return table_.size(); }
  std::size_t num_programs() const { return n_; }
  std::size_t num_states() const { return num_states_; }
  std::size_t num_realizations(std::size_t student) const {
    return realizations_[student];
  }

 private:
  std::size_t index(std::size_t k, ChoiceSet cs, std::size_t i, std::size_t w,
                    std::size_t p) const {
    return ((static_cast<std::size_t>(cs) * realizations_[k] + i) *
                num_states_ +
            w) *
               n_ +
           p;
  }

  std::size_t n_;
  std::size_t num_states_;
  std::vector<std::size_t> realizations_;
  std::vector<std::vector<double>> table_;
};

/// Materializes the naive rule as a degenerate decision profile: point mass
/// on the argmax, constant in the state.
inline GeneralDecisionProfile lift_naive(const NaiveRule& rule,
                                         const MarketInstance& inst,
                                         const SignalProfile& profile) {
  std::vector<std::size_t> counts;
  counts.reserve(profile.size());
  for (std::size_t k = 0; k < profile.size(); ++k) {
    counts.push_back(profile[k].num_realizations());
  }
  GeneralDecisionProfile out(inst.num_students(), inst.num_programs(),
                             inst.num_states(), std::move(counts));
  const ChoiceSet top = all_programs(inst.num_programs());
  for (std::size_t k = 0; k < inst.num_students(); ++k) {
    for (ChoiceSet cs = 1; cs <= top; ++cs) {
      for (std::size_t i = 0; i < profile[k].num_realizations(); ++i) {
        if (!rule.realization_reachable(k, i)) continue;
        std::size_t chosen = rule.decide(k, cs, i);
        for (std::size_t w = 0; w < inst.num_states(); ++w) {
          out.set(k, cs, i, w, chosen, 1.0);
        }
      }
    }
  }
  return out;
}

struct ObedienceViolation {
  std::size_t student = 0;
  ChoiceSet choice_set = 0;
  std::size_t realization = 0;
  std::size_t recommended = 0;
  std::size_t alternative = 0;
  double slack = 0.0;
};

struct ObedienceReport {
  bool pass = true;
  std::vector<ObedienceViolation> violations;
};

/// Checks that no recommendation is ex-interim dominated: for every student,
/// choice set, positive-marginal realization and pair p, p' in the set,
///   sum_w psi(w) pi_k(i|w) sigma(p|i,w) [u_k(p,w) - u_k(p',w)] >= -tol.
/// With `literal_pairing` the right-hand side instead weighs u(p') by
/// sigma(p'|i,w), matching the alternative printed form of the condition.
inline ObedienceReport check_obedience(const MarketInstance& inst,
                                       const SignalProfile& profile,
                                       const DecisionRule& rule,
                                       double tol = 1e-9,
                                       bool literal_pairing = false) {
  ObedienceReport report;
  const std::size_t n = inst.num_programs();
  const ChoiceSet top = all_programs(n);
  for (std::size_t k = 0; k < inst.num_students(); ++k) {
    const Signal& signal = profile[k];
    for (ChoiceSet cs = 1; cs <= top; ++cs) {
      const auto members = choice_set_members(cs);
      for (std::size_t i = 0; i < signal.num_realizations(); ++i) {
        if (!(realization_marginal(inst.prior, signal, i) > 0.0)) continue;
        for (std::size_t p : members) {
          for (std::size_t q : members) {
            if (p == q) continue;
            double slack = 0.0;
            for (std::size_t w = 0; w < inst.num_states(); ++w) {
              double base = inst.prior[w] * signal.likelihood[w][i];
              if (base == 0.0) continue;
              double sp = rule.choice_probability(k, cs, i, w, p);
              double up = inst.utilities.value(k, p, w);
              double uq = inst.utilities.value(k, q, w);
              if (literal_pairing) {
                double sq = rule.choice_probability(k, cs, i, w, q);
                slack += base * (sp * up - sq * uq);
              } else {
                slack += base * sp * (up - uq);
              }
            }
            if (slack < -tol) {
              report.pass = false;
              report.violations.push_back({k, cs, i, p, q, slack});
            }
          }
        }
      }
    }
  }
  return report;
}

struct GrossSubstitutesViolation {
  std::size_t student = 0;
  ChoiceSet subset = 0;
  ChoiceSet superset = 0;
  std::size_t realization = 0;
  std::size_t state = 0;
  std::size_t program = 0;
  double gap = 0.0;
};

struct GrossSubstitutesReport {
  bool pass = true;
  std::vector<GrossSubstitutesViolation> violations;
};

/// Verifies that enlarging a choice set never raises the probability put on
/// an incumbent program: sigma_C(p|i,w) >= sigma_C'(p|i,w) for all C in C'.
inline GrossSubstitutesReport check_gross_substitutes(
    const MarketInstance& inst, const SignalProfile& profile,
    const DecisionRule& rule, double tol = 1e-9) {
  GrossSubstitutesReport report;
  const std::size_t n = inst.num_programs();
  const ChoiceSet top = all_programs(n);
  for (std::size_t k = 0; k < inst.num_students(); ++k) {
    const Signal& signal = profile[k];
    for (ChoiceSet sup = 1; sup <= top; ++sup) {
      // Proper nonempty subsets of sup.
      for (ChoiceSet sub = (sup - 1) & sup; sub != 0;
           sub = (sub - 1) & sup) {
        const auto members = choice_set_members(sub);
        for (std::size_t i = 0; i < signal.num_realizations(); ++i) {
          if (!(realization_marginal(inst.prior, signal, i) > 0.0)) continue;
          for (std::size_t w = 0; w < inst.num_states(); ++w) {
            for (std::size_t p : members) {
              double small = rule.choice_probability(k, sub, i, w, p);
              double large = rule.choice_probability(k, sup, i, w, p);
              if (small < large - tol) {
                report.pass = false;
                report.violations.push_back(
                    {k, sub, sup, i, w, p, large - small});
              }
            }
          }
        }
      }
    }
  }
  return report;
}

}  // namespace exante

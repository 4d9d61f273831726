#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "exante/allocation.hpp"
#include "exante/common.hpp"
#include "exante/decision.hpp"
#include "exante/information.hpp"
#include "exante/market.hpp"

namespace exante {

/// Exact joint outcome distribution recomputed by direct enumeration of all
/// randomness. Deliberately shares no demand or welfare routine with the
/// main evaluation path: aggregates here are derived from whole outcome
/// tuples, so the two paths check each other.
struct OutcomeDistribution {
  std::vector<double> demand;
  double unmatched = 0.0;
  /// match_probability[k][p], unmatched in column n.
  std::vector<std::vector<double>> match_probability;
  std::vector<double> student_utility;
  std::optional<std::vector<std::pair<DeterministicMatching, double>>>
      outcomes;
};

namespace oracle_detail {

struct TwoPoint {
  int value[2];
  double weight[2];
  int count;
};

inline std::vector<TwoPoint> per_program_cutoffs(const ExAnteCutoff& b) {
  std::vector<TwoPoint> out;
  out.reserve(b.values.size());
  for (double v : b.values) {
    TwoPoint tp{};
    int lo = static_cast<int>(std::floor(v));
    double frac = v - std::floor(v);
    if (frac == 0.0) {
      tp.value[0] = lo;
      tp.weight[0] = 1.0;
      tp.count = 1;
    } else {
      tp.value[0] = lo;
      tp.weight[0] = 1.0 - frac;
      tp.value[1] = lo + 1;
      tp.weight[1] = frac;
      tp.count = 2;
    }
    out.push_back(tp);
  }
  return out;
}

/// Per-student choice options (program or unmatched) with probabilities,
/// given a realized choice set, realization and state.
inline std::vector<std::pair<int, double>> student_options(
    const MarketInstance& inst, const DecisionRule& rule, std::size_t k,
    ChoiceSet cs, std::size_t i, std::size_t w) {
  std::vector<std::pair<int, double>> options;
  if (cs == 0) {
    options.emplace_back(kUnmatched, 1.0);
    return options;
  }
  double assigned = 0.0;
  for (std::size_t p = 0; p < inst.num_programs(); ++p) {
    if (!contains(cs, p)) continue;
    double prob = rule.choice_probability(k, cs, i, w, p);
    if (prob > 0.0) {
      options.emplace_back(static_cast<int>(p), prob);
      assigned += prob;
    }
  }
  if (assigned < 1.0) options.emplace_back(kUnmatched, 1.0 - assigned);
  return options;
}

struct Accumulator {
  explicit Accumulator(const MarketInstance& inst, bool want_outcomes,
                       double unmatched_utility)
      : inst_(inst), unmatched_utility_(unmatched_utility) {
    result.demand.assign(inst.num_programs(), 0.0);
    result.match_probability.assign(
        inst.num_students(),
        std::vector<double>(inst.num_programs() + 1, 0.0));
    result.student_utility.assign(inst.num_students(), 0.0);
    if (want_outcomes) support_.emplace();
  }

  /// Folds one fully realized tuple: per-student option lists under weight.
  void add(const std::vector<std::vector<std::pair<int, double>>>& options,
           std::size_t state, double weight) {
    const std::size_t n = inst_.num_programs();
    for (std::size_t k = 0; k < options.size(); ++k) {
      for (const auto& [assignment, prob] : options[k]) {
        double mass = weight * prob;
        if (assignment == kUnmatched) {
          result.match_probability[k][n] += mass;
          result.unmatched += mass;
          result.student_utility[k] += mass * unmatched_utility_;
        } else {
          std::size_t p = static_cast<std::size_t>(assignment);
          result.demand[p] += mass;
          result.match_probability[k][p] += mass;
          result.student_utility[k] +=
              mass * inst_.utilities.value(k, p, state);
        }
      }
    }
    if (support_) {
      std::vector<int> current(options.size(), kUnmatched);
      expand(options, 0, weight, current);
    }
  }

  OutcomeDistribution finish() {
    if (support_) {
      result.outcomes.emplace(support_->begin(), support_->end());
    }
    return std::move(result);
  }

  OutcomeDistribution result;

 private:
  void expand(const std::vector<std::vector<std::pair<int, double>>>& options,
              std::size_t k, double weight, std::vector<int>& current) {
    if (weight == 0.0) return;
    if (k == options.size()) {
      (*support_)[DeterministicMatching{current}] += weight;
      return;
    }
    for (const auto& [assignment, prob] : options[k]) {
      current[k] = assignment;
      expand(options, k + 1, weight * prob, current);
    }
  }

  const MarketInstance& inst_;
  double unmatched_utility_;
  std::optional<std::map<DeterministicMatching, double>> support_;
};

}  // namespace oracle_detail

/// Exhaustive enumeration of (deterministic cutoff, state, realization
/// tuple) with product weights. Under the continuum coupling the cutoff
/// layer is replaced by each student's own admission-threshold segments.
inline OutcomeDistribution enumerate_outcomes(
    const MarketInstance& inst, const SignalProfile& profile,
    const DecisionRule& rule, const ExAnteCutoff& b,
    Coupling coupling = Coupling::Independent,
    std::size_t support_cap = 10'000'000, bool want_outcomes = false,
    double unmatched_utility = 0.0) {
  const std::size_t t = inst.num_students();
  const std::size_t n = inst.num_programs();
  if (b.values.size() != n) {
    throw std::invalid_argument("cutoff length != number of programs");
  }

  oracle_detail::Accumulator acc(inst, want_outcomes, unmatched_utility);

  if (coupling == Coupling::Independent) {
    auto two_point = oracle_detail::per_program_cutoffs(b);
    double tuples = 1.0;
    for (const auto& tp : two_point) tuples *= tp.count;
    tuples *= static_cast<double>(inst.num_states());
    for (std::size_t k = 0; k < t; ++k) {
      tuples *= std::max<std::size_t>(profile[k].num_realizations(), 1);
    }
    if (tuples > static_cast<double>(support_cap)) {
      throw JointTooLargeError("outcome support exceeds the cap");
    }

    std::vector<int> pick(n, 0);
    while (true) {
      double phi = 1.0;
      std::vector<int> bar(n);
      for (std::size_t p = 0; p < n; ++p) {
        bar[p] = two_point[p].value[pick[p]];
        phi *= two_point[p].weight[pick[p]];
      }
      if (phi > 0.0) {
        // Choice sets recomputed from ranks, independent of the main path.
        std::vector<ChoiceSet> sets(t, 0);
        for (std::size_t k = 0; k < t; ++k) {
          for (std::size_t p = 0; p < n; ++p) {
            if (static_cast<int>(inst.rank(p, k)) <= bar[p]) {
              sets[k] = with_program(sets[k], p);
            }
          }
        }
        for (std::size_t w = 0; w < inst.num_states(); ++w) {
          if (inst.prior[w] == 0.0) continue;
          std::vector<std::size_t> idx(t, 0);
          while (true) {
            double weight = phi * inst.prior[w];
            for (std::size_t k = 0; k < t; ++k) {
              weight *= profile[k].likelihood[w][idx[k]];
            }
            if (weight > 0.0) {
              std::vector<std::vector<std::pair<int, double>>> options(t);
              for (std::size_t k = 0; k < t; ++k) {
                options[k] = oracle_detail::student_options(
                    inst, rule, k, sets[k], idx[k], w);
              }
              acc.add(options, w, weight);
            }
            std::size_t k = 0;
            while (k < t) {
              if (++idx[k] < profile[k].num_realizations()) break;
              idx[k] = 0;
              ++k;
            }
            if (k == t) break;
          }
        }
      }
      std::size_t p = 0;
      while (p < n) {
        if (++pick[p] < two_point[p].count) break;
        pick[p] = 0;
        ++p;
      }
      if (p == n) break;
    }
    return acc.finish();
  }

  // Continuum coupling: each student owns an independent uniform point, so
  // outcomes factor across students once the state is fixed. Segments of
  // constant choice set are rebuilt from the continuum ranks.
  std::vector<std::vector<std::pair<ChoiceSet, double>>> segments(t);
  double tuples = static_cast<double>(inst.num_states());
  for (std::size_t k = 0; k < t; ++k) {
    std::vector<double> cuts{0.0, 1.0};
    for (std::size_t p = 0; p < n; ++p) {
      double theta =
          std::clamp(b.values[p] - (inst.rank_continuum(p, k, 0.0)), 0.0, 1.0);
      if (theta > 0.0 && theta < 1.0) cuts.push_back(theta);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
      double hi = cuts[j + 1];
      ChoiceSet cs = 0;
      for (std::size_t p = 0; p < n; ++p) {
        double theta = std::clamp(
            b.values[p] - inst.rank_continuum(p, k, 0.0), 0.0, 1.0);
        if (theta >= hi) cs = with_program(cs, p);
      }
      segments[k].emplace_back(cs, cuts[j + 1] - cuts[j]);
    }
    tuples *= segments[k].size() *
              std::max<std::size_t>(profile[k].num_realizations(), 1);
  }
  if (tuples > static_cast<double>(support_cap)) {
    throw JointTooLargeError("outcome support exceeds the cap");
  }

  for (std::size_t w = 0; w < inst.num_states(); ++w) {
    if (inst.prior[w] == 0.0) continue;
    // Odometer over (segment, realization) pairs per student.
    std::vector<std::size_t> seg(t, 0), idx(t, 0);
    while (true) {
      double weight = inst.prior[w];
      for (std::size_t k = 0; k < t; ++k) {
        weight *= segments[k][seg[k]].second *
                  profile[k].likelihood[w][idx[k]];
      }
      if (weight > 0.0) {
        std::vector<std::vector<std::pair<int, double>>> options(t);
        for (std::size_t k = 0; k < t; ++k) {
          options[k] = oracle_detail::student_options(
              inst, rule, k, segments[k][seg[k]].first, idx[k], w);
        }
        acc.add(options, w, weight);
      }
      std::size_t k = 0;
      while (k < t) {
        if (++idx[k] < profile[k].num_realizations()) break;
        idx[k] = 0;
        if (++seg[k] < segments[k].size()) break;
        seg[k] = 0;
        ++k;
      }
      if (k == t) break;
    }
  }
  return acc.finish();
}

struct SimulationConfig {
  std::uint64_t draws = 100000;
  std::uint64_t seed = 0;
  Coupling coupling = Coupling::Independent;
};

struct SimulationReport {
  std::uint64_t draws = 0;
  std::vector<double> demand_mean;
  std::vector<double> demand_se;
  double unmatched_mean = 0.0;
  std::vector<double> utility_mean;
  std::vector<double> utility_se;

  bool operator==(const SimulationReport&) const = default;
};

namespace oracle_detail {

// Uniform double in [0,1) from the top 53 bits, so reports are bit-stable
// across standard library implementations.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::size_t sample_index(std::mt19937_64& rng,
                                const std::vector<double>& weights) {
  double u = uniform01(rng);
  double acc = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    acc += weights[j];
    if (u < acc) return j;
  }
  return weights.size() - 1;
}

}  // namespace oracle_detail

/// Seeded Monte-Carlo walk through the matching process: realize the cutoff
/// distribution, the state and each student's signal, apply the decision
/// rule, and aggregate. Identical seed and config give a bit-identical
/// report.
inline SimulationReport simulate(const MarketInstance& inst,
                                 const SignalProfile& profile,
                                 const DecisionRule& rule,
                                 const ExAnteCutoff& b,
                                 const SimulationConfig& cfg,
                                 double unmatched_utility = 0.0) {
  const std::size_t t = inst.num_students();
  const std::size_t n = inst.num_programs();
  if (cfg.draws < 1) throw std::invalid_argument("draw count must be >= 1");

  std::mt19937_64 rng(cfg.seed);
  std::vector<double> demand_sum(n, 0.0), demand_sq(n, 0.0);
  std::vector<double> util_sum(t, 0.0), util_sq(t, 0.0);
  double unmatched_sum = 0.0;

  auto two_point = oracle_detail::per_program_cutoffs(b);
  std::vector<int> bar(n, 0);
  std::vector<double> e(t, 0.0);
  std::vector<double> likelihood;
  std::vector<double> demand_draw(n, 0.0);

  for (std::uint64_t draw = 0; draw < cfg.draws; ++draw) {
    if (cfg.coupling == Coupling::Independent) {
      for (std::size_t p = 0; p < n; ++p) {
        if (two_point[p].count == 1) {
          bar[p] = two_point[p].value[0];
        } else {
          bar[p] = oracle_detail::uniform01(rng) < two_point[p].weight[1]
                       ? two_point[p].value[1]
                       : two_point[p].value[0];
        }
      }
    } else {
      for (std::size_t k = 0; k < t; ++k) e[k] = oracle_detail::uniform01(rng);
    }

    std::size_t w = oracle_detail::sample_index(rng, inst.prior);

    std::fill(demand_draw.begin(), demand_draw.end(), 0.0);
    double unmatched_draw = 0.0;
    for (std::size_t k = 0; k < t; ++k) {
      likelihood = profile[k].likelihood[w];
      std::size_t i = oracle_detail::sample_index(rng, likelihood);

      ChoiceSet cs = 0;
      for (std::size_t p = 0; p < n; ++p) {
        bool admitted =
            cfg.coupling == Coupling::Independent
                ? static_cast<int>(inst.rank(p, k)) <= bar[p]
                : inst.rank_continuum(p, k, e[k]) <= b.values[p];
        if (admitted) cs = with_program(cs, p);
      }

      double utility = unmatched_utility;
      if (cs != 0) {
        auto options = oracle_detail::student_options(inst, rule, k, cs, i, w);
        std::size_t pick = 0;
        if (options.size() > 1) {
          std::vector<double> weights;
          weights.reserve(options.size());
          for (const auto& o : options) weights.push_back(o.second);
          pick = oracle_detail::sample_index(rng, weights);
        }
        int assignment = options[pick].first;
        if (assignment != kUnmatched) {
          std::size_t p = static_cast<std::size_t>(assignment);
          demand_draw[p] += 1.0;
          utility = inst.utilities.value(k, p, w);
        } else {
          unmatched_draw += 1.0;
        }
      } else {
        unmatched_draw += 1.0;
      }
      util_sum[k] += utility;
      util_sq[k] += utility * utility;
    }
    for (std::size_t p = 0; p < n; ++p) {
      demand_sum[p] += demand_draw[p];
      demand_sq[p] += demand_draw[p] * demand_draw[p];
    }
    unmatched_sum += unmatched_draw;
  }

  SimulationReport report;
  report.draws = cfg.draws;
  const double num = static_cast<double>(cfg.draws);
  auto standard_error = [&](double sum, double sq) {
    if (cfg.draws < 2) return 0.0;
    double mean = sum / num;
    double var = std::max(0.0, (sq - num * mean * mean) / (num - 1.0));
    return std::sqrt(var / num);
  };
  for (std::size_t p = 0; p < n; ++p) {
    report.demand_mean.push_back(demand_sum[p] / num);
    report.demand_se.push_back(standard_error(demand_sum[p], demand_sq[p]));
  }
  report.unmatched_mean = unmatched_sum / num;
  for (std::size_t k = 0; k < t; ++k) {
    report.utility_mean.push_back(util_sum[k] / num);
    report.utility_se.push_back(standard_error(util_sum[k], util_sq[k]));
  }
  return report;
}

}  // namespace exante

#pragma once

// Seeded generators for randomized property tests: market instances, signal
// profiles, and simple stochastic decision rules.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "exante/exante.hpp"

namespace exante::testing {

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t lo,
                                 std::size_t hi) {
  return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
}

inline std::vector<std::size_t> random_permutation(std::mt19937_64& rng,
                                                   std::size_t n) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    std::swap(perm[i - 1], perm[rng() % i]);
  }
  return perm;
}

/// Strictly positive probability vector.
inline std::vector<double> random_simplex(std::mt19937_64& rng,
                                          std::size_t n) {
  std::vector<double> v(n);
  double sum = 0.0;
  for (double& x : v) {
    x = uniform(rng, 0.1, 1.0);
    sum += x;
  }
  for (double& x : v) x /= sum;
  return v;
}

struct InstanceOptions {
  std::size_t min_students = 2, max_students = 4;
  std::size_t min_programs = 2, max_programs = 3;
  std::size_t min_states = 1, max_states = 3;
  bool common_priority = false;
  bool with_program_utilities = false;
};

inline MarketInstance random_instance(std::mt19937_64& rng,
                                      const InstanceOptions& opt = {}) {
  MarketInstance inst;
  const std::size_t t =
      uniform_index(rng, opt.min_students, opt.max_students);
  const std::size_t n =
      uniform_index(rng, opt.min_programs, opt.max_programs);
  const std::size_t states =
      uniform_index(rng, opt.min_states, opt.max_states);

  for (std::size_t k = 0; k < t; ++k) inst.students.push_back("s" + std::to_string(k + 1));
  for (std::size_t p = 0; p < n; ++p) inst.programs.push_back("p" + std::to_string(p + 1));
  for (std::size_t w = 0; w < states; ++w) inst.states.push_back("w" + std::to_string(w + 1));

  for (std::size_t p = 0; p < n; ++p) {
    inst.capacities.push_back(uniform(rng, 0.3, static_cast<double>(t)));
  }
  if (opt.common_priority) {
    auto order = random_permutation(rng, t);
    inst.priorities.assign(n, order);
  } else {
    for (std::size_t p = 0; p < n; ++p) {
      inst.priorities.push_back(random_permutation(rng, t));
    }
  }
  inst.prior = random_simplex(rng, states);

  inst.utilities.mode = UtilityMode::RankBased;
  inst.utilities.rank_values.resize(n);
  for (double& v : inst.utilities.rank_values) v = uniform(rng, 0.5, 10.0);
  std::sort(inst.utilities.rank_values.begin(),
            inst.utilities.rank_values.end(), std::greater<double>());
  // Keep gaps away from the tie tolerance.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (inst.utilities.rank_values[i] - inst.utilities.rank_values[i + 1] <
        1e-3) {
      inst.utilities.rank_values[i] += 0.01 * (n - i);
    }
  }
  inst.utilities.rankings.resize(t);
  for (std::size_t k = 0; k < t; ++k) {
    for (std::size_t w = 0; w < states; ++w) {
      inst.utilities.rankings[k].push_back(random_permutation(rng, n));
    }
  }

  if (opt.with_program_utilities) {
    std::vector<std::vector<double>> pu(n, std::vector<double>(t, 0.0));
    for (std::size_t p = 0; p < n; ++p) {
      double v = uniform(rng, 5.0, 10.0);
      for (std::size_t k : inst.priorities[p]) {
        pu[p][k] = v;
        v -= uniform(rng, 0.1, 1.0);
      }
    }
    inst.program_utilities = std::move(pu);
  }
  inst.finalize();
  return inst;
}

/// Random likelihood-table signal with strictly positive rows.
inline Signal random_signal(std::mt19937_64& rng, std::size_t states,
                            std::size_t max_realizations = 3) {
  const std::size_t m = uniform_index(rng, 1, max_realizations);
  Signal s;
  s.labels = default_labels(m);
  for (std::size_t w = 0; w < states; ++w) {
    s.likelihood.push_back(random_simplex(rng, m));
  }
  return s;
}

/// Mixed-style profile: explicit random tables, constructors, or a blend.
inline SignalProfile random_profile(std::mt19937_64& rng,
                                    const MarketInstance& inst,
                                    std::size_t max_realizations = 3) {
  const std::size_t states = inst.num_states();
  SignalProfile profile;
  for (std::size_t k = 0; k < inst.num_students(); ++k) {
    switch (rng() % 4) {
      case 0:
        profile.signals.push_back(full_disclosure(states));
        break;
      case 1:
        profile.signals.push_back(null_signal(states));
        break;
      default:
        profile.signals.push_back(random_signal(rng, states, max_realizations));
        break;
    }
  }
  return profile;
}

/// Instance + naive rule, retrying the rare draws with expected-utility ties.
struct RandomMarket {
  MarketInstance instance;
  SignalProfile profile;
};

inline RandomMarket random_market(std::mt19937_64& rng,
                                  const InstanceOptions& opt = {},
                                  std::size_t max_realizations = 3) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    RandomMarket market;
    market.instance = random_instance(rng, opt);
    market.profile = random_profile(rng, market.instance, max_realizations);
    try {
      NaiveRule probe(market.instance, market.profile);
      return market;
    } catch (const TieError&) {
      continue;
    }
  }
  throw std::logic_error("could not draw a tie-free market");
}

inline ExAnteCutoff random_cutoff(std::mt19937_64& rng,
                                  const MarketInstance& inst) {
  ExAnteCutoff b;
  for (std::size_t p = 0; p < inst.num_programs(); ++p) {
    b.values.push_back(
        uniform(rng, 0.0, static_cast<double>(inst.num_students())));
  }
  return b;
}

/// Luce rule with random positive weights: probability proportional to the
/// weight inside the choice set. Satisfies gross substitutes but is not
/// generally obedient.
class LuceRule : public DecisionRule {
 public:
  LuceRule(std::mt19937_64& rng, const MarketInstance& inst,
           const SignalProfile& profile) {
    weights_.resize(inst.num_students());
    for (std::size_t k = 0; k < inst.num_students(); ++k) {
      weights_[k].resize(profile[k].num_realizations());
      for (auto& per_state : weights_[k]) {
        per_state.resize(inst.num_states());
        for (auto& row : per_state) {
          row.resize(inst.num_programs());
          for (double& w : row) w = uniform(rng, 0.2, 2.0);
        }
      }
    }
  }

  double choice_probability(std::size_t k, ChoiceSet cs, std::size_t i,
                            std::size_t w, std::size_t p) const override {
    if (!contains(cs, p)) return 0.0;
    double num = weights_[k][i][w][p];
    double den = 0.0;
    for (std::size_t q : choice_set_members(cs)) {
      den += weights_[k][i][w][q];
    }
    return num / den;
  }

 private:
  std::vector<std::vector<std::vector<std::vector<double>>>> weights_;
};

/// Uniform-over-choice-set rule.
class UniformRule : public DecisionRule {
 public:
  double choice_probability(std::size_t, ChoiceSet cs, std::size_t,
                            std::size_t, std::size_t p) const override {
    if (!contains(cs, p)) return 0.0;
    return 1.0 / static_cast<double>(choice_set_size(cs));
  }
};

/// A coarsening of full disclosure through a random row-stochastic garbling.
inline SignalProfile random_coarse_profile(std::mt19937_64& rng,
                                           const MarketInstance& inst,
                                           std::size_t max_realizations = 3) {
  const std::size_t states = inst.num_states();
  SignalProfile profile;
  for (std::size_t k = 0; k < inst.num_students(); ++k) {
    const std::size_t m = uniform_index(rng, 1, max_realizations);
    Garbling g;
    for (std::size_t w = 0; w < states; ++w) {
      g.rows.push_back(random_simplex(rng, m));
    }
    profile.signals.push_back(apply_garbling(full_disclosure(states), g));
  }
  return profile;
}

}  // namespace exante::testing

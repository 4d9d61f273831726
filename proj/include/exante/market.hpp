#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "exante/common.hpp"

namespace exante {

enum class UtilityMode { RankBased, Explicit };

/// Cardinal utilities u_k(p, w). Two representations:
///  - RankBased: a strictly decreasing value vector over preference ranks,
///    combined with per-student per-state strict rankings.
///  - Explicit: a full value tensor; rankings are derived by sorting.
struct UtilityModel {
  UtilityMode mode = UtilityMode::RankBased;

  /// Value of receiving one's i-th ranked program (RankBased mode), best first.
  std::vector<double> rank_values;

  /// rankings[student][state] = program indices, most preferred first.
  std::vector<std::vector<std::vector<std::size_t>>> rankings;

  /// values[student][state][program] (Explicit mode).
  std::vector<std::vector<std::vector<double>>> values;

  /// 1-based preference rank of `program` for `student` in `state`.
  std::size_t preference_rank(std::size_t student, std::size_t program,
                              std::size_t state) const {
    const auto& order = rankings[student][state];
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (order[i] == program) return i + 1;
    }
    throw std::out_of_range("program missing from ranking");
  }

  double value(std::size_t student, std::size_t program,
               std::size_t state) const {
    if (mode == UtilityMode::Explicit) return values[student][state][program];
    return rank_values[preference_rank(student, program, state) - 1];
  }
};

/// Record of a partial per-state ranking the loader completed in
/// program-index order.
struct RankingCompletion {
  std::size_t student = 0;
  std::size_t state = 0;
  std::vector<std::size_t> appended;
};

/// Appends the programs missing from `prefix` in ascending index order.
inline std::vector<std::size_t> complete_ranking(
    const std::vector<std::size_t>& prefix, std::size_t num_programs,
    std::vector<std::size_t>* appended = nullptr) {
  std::vector<bool> seen(num_programs, false);
  std::vector<std::size_t> full = prefix;
  for (std::size_t p : prefix) {
    if (p < num_programs) seen[p] = true;
  }
  for (std::size_t p = 0; p < num_programs; ++p) {
    if (!seen[p]) {
      full.push_back(p);
      if (appended) appended->push_back(p);
    }
  }
  return full;
}

/// The full problem statement: students, programs, capacities, priorities,
/// states, prior, and cardinal utilities. Immutable after finalize(); all
/// operations on it are pure.
struct MarketInstance {
  std::vector<std::string> students;
  std::vector<std::string> programs;
  std::vector<double> capacities;

  /// priorities[program] = student indices, highest priority first.
  std::vector<std::vector<std::size_t>> priorities;

  std::vector<std::string> states;
  std::vector<double> prior;

  UtilityModel utilities;

  /// Optional per-program value of enrolling each student, decreasing in
  /// priority: program_utilities[program][student].
  std::optional<std::vector<std::vector<double>>> program_utilities;

  /// Rankings the loader completed (so tests can assert non-pivotality).
  std::vector<RankingCompletion> completions;

  std::size_t num_students() const { return students.size(); }
  std::size_t num_programs() const { return programs.size(); }
  std::size_t num_states() const { return states.size(); }

  /// Derives the rank table and, in Explicit mode, the per-state rankings.
  /// Call once after the fields above are filled.
  void finalize() {
    const std::size_t t = num_students();
    rank_table_.assign(num_programs(), std::vector<std::size_t>(t, 0));
    for (std::size_t p = 0; p < num_programs(); ++p) {
      for (std::size_t pos = 0; pos < priorities[p].size(); ++pos) {
        std::size_t k = priorities[p][pos];
        if (k < t) rank_table_[p][k] = pos + 1;
      }
    }
    if (utilities.mode == UtilityMode::Explicit && utilities.rankings.empty()) {
      utilities.rankings.resize(t);
      for (std::size_t k = 0; k < t; ++k) {
        utilities.rankings[k].resize(num_states());
        for (std::size_t w = 0; w < num_states(); ++w) {
          std::vector<std::size_t> order(num_programs());
          std::iota(order.begin(), order.end(), std::size_t{0});
          const auto& row = utilities.values[k][w];
          std::stable_sort(order.begin(), order.end(),
                           [&](std::size_t a, std::size_t b) {
                             return row[a] > row[b];
                           });
          utilities.rankings[k][w] = std::move(order);
        }
      }
    }
  }

  /// 1-based rank of `student` at `program`: one plus the number of
  /// strictly-higher-priority students. A cutoff of m admits exactly the top
  /// m students.
  std::size_t rank(std::size_t program, std::size_t student) const {
    if (program >= num_programs()) throw std::out_of_range("unknown program");
    if (student >= num_students()) throw std::out_of_range("unknown student");
    return rank_table_[program][student];
  }

  /// Continuum rank of student point (student, e): rank - 1 + e.
  double rank_continuum(std::size_t program, std::size_t student,
                        double e) const {
    if (e < 0.0 || e > 1.0) throw std::out_of_range("e outside [0,1]");
    return static_cast<double>(rank(program, student)) - 1.0 + e;
  }

  std::optional<std::size_t> find_student(const std::string& name) const {
    return find_name(students, name);
  }
  std::optional<std::size_t> find_program(const std::string& name) const {
    return find_name(programs, name);
  }
  std::optional<std::size_t> find_state(const std::string& name) const {
    return find_name(states, name);
  }

 private:
  static std::optional<std::size_t> find_name(
      const std::vector<std::string>& pool, const std::string& name) {
    auto it = std::find(pool.begin(), pool.end(), name);
    if (it == pool.end()) return std::nullopt;
    return static_cast<std::size_t>(it - pool.begin());
  }

  std::vector<std::vector<std::size_t>> rank_table_;
};

struct ValidationIssue {
  std::string code;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool pass() const { return issues.empty(); }
};

struct ExpectedUtilityTie {
  std::size_t student = 0;
  std::size_t program_a = 0;
  std::size_t program_b = 0;
  double gap = 0.0;
};

/// Expected-utility ties for each student under an arbitrary belief over
/// states. This is the hook decision rules use to reject instances whose
/// reachable posteriors produce ties; validation itself stays signal-free,
/// since a tie only bites at beliefs some signal actually induces.
inline std::vector<ExpectedUtilityTie> expected_utility_ties(
    const MarketInstance& inst, const std::vector<double>& belief,
    double tol = 1e-9) {
  std::vector<ExpectedUtilityTie> ties;
  const std::size_t n = inst.num_programs();
  for (std::size_t k = 0; k < inst.num_students(); ++k) {
    std::vector<double> eu(n, 0.0);
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t w = 0; w < inst.num_states(); ++w) {
        eu[p] += belief[w] * inst.utilities.value(k, p, w);
      }
    }
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(eu[p] - eu[q]) <= tol) {
          ties.push_back({k, p, q, std::abs(eu[p] - eu[q])});
        }
      }
    }
  }
  return ties;
}

inline ValidationReport validate_instance(const MarketInstance& inst,
                                          double tol = 1e-9) {
  ValidationReport report;
  auto fail = [&](const std::string& code, const std::string& message) {
    report.issues.push_back({code, message});
  };

  const std::size_t t = inst.num_students();
  const std::size_t n = inst.num_programs();

  if (n > kMaxPrograms) fail("size", "more than 32 programs");
  if (inst.capacities.size() != n) fail("size", "capacities size mismatch");
  if (inst.priorities.size() != n) fail("size", "priorities size mismatch");
  if (inst.prior.size() != inst.num_states())
    fail("size", "prior size mismatch");

  double prior_sum = 0.0;
  for (std::size_t w = 0; w < inst.prior.size(); ++w) {
    if (inst.prior[w] < 0.0) fail("prior", "negative prior entry");
    prior_sum += inst.prior[w];
  }
  if (std::abs(prior_sum - 1.0) > tol)
    fail("prior", "prior does not sum to 1");

  for (std::size_t p = 0; p < n && p < inst.capacities.size(); ++p) {
    if (!(inst.capacities[p] > 0.0)) {
      fail("capacity", "capacity of " + inst.programs[p] + " not positive");
    }
  }

  for (std::size_t p = 0; p < n && p < inst.priorities.size(); ++p) {
    std::vector<bool> seen(t, false);
    bool ok = inst.priorities[p].size() == t;
    for (std::size_t k : inst.priorities[p]) {
      if (k >= t || seen[k]) {
        ok = false;
        break;
      }
      seen[k] = true;
    }
    if (!ok) {
      fail("priority",
           "priority of " + inst.programs[p] + " is not a permutation");
    }
  }

  const UtilityModel& u = inst.utilities;
  if (u.mode == UtilityMode::RankBased) {
    if (u.rank_values.size() != n) {
      fail("utility", "rank value vector length != number of programs");
    }
    for (std::size_t i = 0; i + 1 < u.rank_values.size(); ++i) {
      if (!(u.rank_values[i] > u.rank_values[i + 1])) {
        fail("utility", "rank values not strictly decreasing");
        break;
      }
    }
  }
  if (u.rankings.size() != t) {
    fail("utility", "rankings missing for some students");
  } else {
    for (std::size_t k = 0; k < t; ++k) {
      if (u.rankings[k].size() != inst.num_states()) {
        fail("utility", "rankings of " + inst.students[k] +
                            " missing for some states");
        continue;
      }
      for (std::size_t w = 0; w < inst.num_states(); ++w) {
        std::vector<bool> seen(n, false);
        bool ok = u.rankings[k][w].size() == n;
        for (std::size_t p : u.rankings[k][w]) {
          if (p >= n || seen[p]) {
            ok = false;
            break;
          }
          seen[p] = true;
        }
        if (!ok) {
          fail("utility", "ranking of " + inst.students[k] + " in " +
                              inst.states[w] + " is not a permutation");
        }
      }
    }
  }
  if (u.mode == UtilityMode::Explicit) {
    for (std::size_t k = 0; k < t && k < u.values.size(); ++k) {
      for (std::size_t w = 0; w < inst.num_states(); ++w) {
        const auto& row = u.values[k][w];
        for (std::size_t p = 0; p < row.size(); ++p) {
          for (std::size_t q = p + 1; q < row.size(); ++q) {
            if (row[p] == row[q]) {
              fail("utility", "equal utilities for two programs (" +
                                  inst.students[k] + ", " + inst.states[w] +
                                  ")");
            }
          }
        }
      }
    }
  }

  if (inst.program_utilities) {
    const auto& pu = *inst.program_utilities;
    if (pu.size() != n) {
      fail("program_utility", "program utility table size mismatch");
    } else {
      for (std::size_t p = 0; p < n; ++p) {
        if (pu[p].size() != t) {
          fail("program_utility",
               "program utility row size mismatch for " + inst.programs[p]);
          continue;
        }
        // u_p must strictly decrease along the priority order.
        for (std::size_t pos = 0; pos + 1 < inst.priorities[p].size(); ++pos) {
          double hi = pu[p][inst.priorities[p][pos]];
          double lo = pu[p][inst.priorities[p][pos + 1]];
          if (!(hi > lo)) {
            fail("program_utility",
                 "program utility of " + inst.programs[p] +
                     " not strictly decreasing in priority");
            break;
          }
        }
      }
    }
  }

  return report;
}

}  // namespace exante

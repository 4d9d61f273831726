#pragma once

#include <vector>

#include "exante/allocation.hpp"
#include "exante/information.hpp"
#include "exante/market.hpp"

namespace exante::examples {

/// Four students and four unit-capacity programs with heterogeneous
/// priorities and three states; the second student's per-state rankings are
/// given only down to her top choice and completed in program-index order.
inline MarketInstance market_a(std::vector<double> rank_values = {4, 3, 2, 1}) {
  MarketInstance inst;
  inst.students = {"s1", "s2", "s3", "s4"};
  inst.programs = {"p1", "p2", "p3", "p4"};
  inst.capacities = {1, 1, 1, 1};
  inst.priorities = {
      {2, 1, 0, 3},  // p1: s3 > s2 > s1 > s4
      {1, 0, 2, 3},  // p2: s2 > s1 > s3 > s4
      {0, 2, 1, 3},  // p3: s1 > s3 > s2 > s4
      {3, 0, 1, 2},  // p4: s4 > s1 > s2 > s3
  };
  inst.states = {"w1", "w2", "w3"};
  inst.prior = {0.3, 0.4, 0.3};
  inst.utilities.mode = UtilityMode::RankBased;
  inst.utilities.rank_values = std::move(rank_values);

  auto complete = [&](std::size_t student, std::size_t state,
                      std::vector<std::size_t> prefix) {
    RankingCompletion record;
    record.student = student;
    record.state = state;
    auto full = complete_ranking(prefix, 4, &record.appended);
    if (!record.appended.empty()) inst.completions.push_back(record);
    return full;
  };

  inst.utilities.rankings = {
      // s1
      {{0, 3, 1, 2}, {1, 2, 0, 3}, {2, 1, 0, 3}},
      // s2: only the top choice is pinned down
      {complete(1, 0, {1}), complete(1, 1, {0}), complete(1, 2, {0})},
      // s3
      {{2, 0, 1, 3}, {2, 0, 1, 3}, {2, 0, 1, 3}},
      // s4
      {{3, 2, 0, 1}, {3, 2, 0, 1}, {3, 2, 0, 1}},
  };
  inst.finalize();
  return inst;
}

/// Common partition ({w1}, {w2, w3}) for every student of market_a.
inline SignalProfile partition_profile_a() {
  return common_profile(4, partition_signal(3, {{0}, {1, 2}}));
}

/// Two students, two unit-capacity programs with a common priority and a
/// two-state prior; the first student's top choice flips with the state.
inline MarketInstance market_b(double psi1 = 0.5,
                               std::vector<double> rank_values = {2, 1}) {
  MarketInstance inst;
  inst.students = {"s1", "s2"};
  inst.programs = {"p1", "p2"};
  inst.capacities = {1, 1};
  inst.priorities = {{0, 1}, {0, 1}};
  inst.states = {"w1", "w2"};
  inst.prior = {psi1, 1.0 - psi1};
  inst.utilities.mode = UtilityMode::RankBased;
  inst.utilities.rank_values = std::move(rank_values);
  inst.utilities.rankings = {
      {{0, 1}, {1, 0}},  // s1: p1 first in w1, p2 first in w2
      {{0, 1}, {0, 1}},  // s2: always p1 first
  };
  inst.program_utilities = {{2.0, 1.0}, {2.0, 1.0}};
  inst.finalize();
  return inst;
}

/// Ex-ante cutoff mixing the deterministic cutoffs (1,2) and (2,2) of
/// market_b, with weight `phi1` on the former.
inline ExAnteCutoff market_b_mixed_cutoff(double phi1) {
  return ExAnteCutoff{{2.0 - phi1, 2.0}};
}

inline SignalProfile full_profile(const MarketInstance& inst) {
  return common_profile(inst.num_students(),
                        full_disclosure(inst.num_states()));
}

inline SignalProfile null_profile(const MarketInstance& inst) {
  return common_profile(inst.num_students(), null_signal(inst.num_states()));
}

}  // namespace exante::examples

#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace exante {

/// Subset of programs encoded as a bitmask; bit p is set iff program p is in
/// the set. Markets are capped at 32 programs.
using ChoiceSet = std::uint32_t;

inline constexpr std::size_t kMaxPrograms = 32;

inline bool contains(ChoiceSet set, std::size_t program) {
  return (set >> program) & 1u;
}

inline ChoiceSet with_program(ChoiceSet set, std::size_t program) {
  return set | (ChoiceSet{1} << program);
}

inline ChoiceSet all_programs(std::size_t count) {
  return count >= kMaxPrograms ? ~ChoiceSet{0}
                               : ((ChoiceSet{1} << count) - 1u);
}

inline int choice_set_size(ChoiceSet set) { return std::popcount(set); }

/// Members of a choice set in ascending program order.
inline std::vector<std::size_t> choice_set_members(ChoiceSet set) {
  std::vector<std::size_t> out;
  for (std::size_t p = 0; set != 0; ++p, set >>= 1) {
    if (set & 1u) out.push_back(p);
  }
  return out;
}

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Two programs yield the same expected payoff under a reachable posterior.
struct TieError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyChoiceSetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Joint support enumeration was requested above the configured cap.
struct JointTooLargeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace exante

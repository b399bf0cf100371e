#pragma once

#include <string>
#include <vector>

#include "lexirl/ltl.hpp"

namespace lexirl {

/// Deterministic safety automaton: total transition function, acceptance by
/// never visiting a non-accepting state. Non-accepting states are absorbing.
struct SafetyAutomaton {
  std::vector<std::string> ap;
  int initial = 0;
  std::vector<std::vector<int>> delta;  // [state][letter]
  std::vector<bool> accepting;
  std::vector<std::string> state_desc;  // obligation formula per state, informational

  int num_states() const { return static_cast<int>(delta.size()); }
  int num_letters() const { return 1 << ap.size(); }
};

/// Structural check: delta total and in range, every non-accepting state
/// absorbing. Empty result means well formed.
std::vector<std::string> validate_safety_automaton(const SafetyAutomaton& a);

/// Translate a syntactic-safety formula by formula progression: states are
/// canonicalized obligation formulas, the contradiction is the unique
/// rejecting sink. Throws std::invalid_argument when the formula is not
/// syntactic safety, std::runtime_error when more than `max_states` states
/// would be created (import an automaton in HOA form instead).
SafetyAutomaton safety_to_automaton(const LtlFormula& f, int max_states = 10000);

/// One-state automaton accepting every word over `ap`.
SafetyAutomaton safety_automaton_true(const std::vector<std::string>& ap);

}  // namespace lexirl

#pragma once

#include <string>
#include <vector>

#include "lexirl/mdp.hpp"
#include "lexirl/safety_automaton.hpp"

namespace lexirl {

/// Limit-deterministic Büchi automaton. Letter transitions are deterministic
/// and may be partial: a missing entry (-1) means the word is rejected, which
/// the product materializes as an absorbing non-accepting trap. The only
/// nondeterminism is the ε-jumps out of the initial component; in a suitable
/// LDBA every ε-jump enters the accepting component.
struct Ldba {
  std::vector<std::string> ap;
  std::string name;
  int initial = 0;
  std::vector<std::vector<int>> delta;      // [state][letter], -1 = undefined
  std::vector<std::vector<int>> eps;        // ε-targets per state, sorted
  std::vector<bool> accepting;              // B
  std::vector<bool> in_accepting_component; // Q_A

  int num_states() const { return static_cast<int>(delta.size()); }
  int num_letters() const { return 1 << ap.size(); }
};

/// Fill in the canonical partition: Q_A is the closure of B and all ε-targets
/// under letter successors (the smallest valid accepting component when one
/// exists).
void derive_partition(Ldba& l);

/// Diagnostic suitability check against the stored partition. Empty result
/// means the automaton is a suitable LDBA.
std::vector<std::string> validate_suitable(const Ldba& l);

/// View a deterministic safety automaton as a (fully deterministic) LDBA:
/// since non-accepting states are absorbing, visiting accepting states
/// infinitely often is the same acceptance condition.
Ldba ldba_from_safety(const SafetyAutomaton& a);

/// One-state LDBA accepting every word over `ap`.
Ldba ldba_true(const std::vector<std::string>& ap);

}  // namespace lexirl

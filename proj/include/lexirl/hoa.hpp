#pragma once

#include <string>

#include "lexirl/ldba.hpp"

namespace lexirl {

/// HOA v1 subset reader: state-based Büchi acceptance (`Acceptance: 1
/// Inf(0)`), a single start state, explicit edge labels as boolean formulas
/// over AP indices. ε-edges use the reserved label token `[@eps]` (a format
/// extension; see docs/formats.md). Unsupported features (alternation,
/// transition-based acceptance, aliases, state labels, implicit edges) raise
/// explicit errors; the returned automaton always passes validate_suitable.
Ldba parse_hoa(const std::string& text);

/// Canonical printer: one minterm-labeled edge per defined letter, ε-edges
/// last. parse -> print -> parse is the identity on the printed form.
std::string print_hoa(const Ldba& l);

/// A safety automaton printed as a state-based Büchi HOA (equivalent since
/// its non-accepting states are absorbing).
std::string print_hoa(const SafetyAutomaton& a, const std::string& name = "");

}  // namespace lexirl

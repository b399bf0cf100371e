#pragma once

#include <memory>
#include <string>
#include <vector>

#include "lexirl/mdp.hpp"

namespace lexirl {

enum class LtlKind {
  True,
  False,    // appears only in positive normal form
  Atom,
  Not,
  And,
  Or,       // PNF only; the parser expands | and -> into the core grammar
  Next,
  Until,
  Release,  // PNF only, dual of Until; [] x is False Release x
};

struct LtlNode;
using LtlRef = std::shared_ptr<const LtlNode>;

struct LtlNode {
  LtlKind kind;
  int atom = -1;  // Atom
  LtlRef lhs, rhs;
};

/// A formula over a declared proposition alphabet. After parsing, the tree
/// uses the core grammar only: true, atoms, &, !, X, U (derived operators are
/// expanded away).
struct LtlFormula {
  std::vector<std::string> alphabet;
  LtlRef root;
};

/// Concrete syntax: X, U, <>, [], &, |, !, ->, parentheses, `true`, `false`.
/// Precedence: unary > U > & > | > ->. Throws ParseError with a position for
/// syntax errors and unknown propositions.
LtlFormula parse_ltl(const std::string& text, const std::vector<std::string>& alphabet);

std::string print_ltl(const LtlFormula& f);
std::string print_ltl(const LtlRef& node, const std::vector<std::string>& alphabet);

/// Positive normal form: negations pushed onto atoms via the usual dualities.
/// The result uses True/False/Atom/Not(Atom)/And/Or/Next/Until/Release.
LtlRef to_pnf(const LtlRef& node);

/// True iff the PNF of `f` contains no temporal operator besides X and []
/// (a Release whose left operand is false). Such formulas denote safety
/// languages that a deterministic safety automaton can monitor.
bool is_syntactic_safety(const LtlFormula& f);

bool ltl_equal(const LtlRef& a, const LtlRef& b);

// node constructors
LtlRef ltl_true();
LtlRef ltl_false();
LtlRef ltl_atom(int index);
LtlRef ltl_not(LtlRef x);
LtlRef ltl_and(LtlRef a, LtlRef b);
LtlRef ltl_or(LtlRef a, LtlRef b);
LtlRef ltl_next(LtlRef x);
LtlRef ltl_until(LtlRef a, LtlRef b);
LtlRef ltl_release(LtlRef a, LtlRef b);
LtlRef ltl_eventually(LtlRef x);  // true U x
LtlRef ltl_always(LtlRef x);      // !(true U !x)

}  // namespace lexirl

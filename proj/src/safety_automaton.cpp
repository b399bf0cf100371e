#include "lexirl/safety_automaton.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace lexirl {

namespace {

// Interned PNF terms with canonicalizing constructors, the state space of the
// progression. And/Or lists are flattened, sorted and deduplicated;
// complementary literals collapse to False/True. Term 0 is False, term 1 is
// True.
class Arena {
 public:
  enum class K { False, True, Lit, And, Or, Next, Release };

  struct Term {
    K k;
    int atom = -1;     // Lit
    bool neg = false;  // Lit
    std::vector<int> kids;
  };

  Arena() {
    intern({K::False, -1, false, {}});
    intern({K::True, -1, false, {}});
  }

  int mk_false() { return 0; }
  int mk_true() { return 1; }

  int mk_lit(int atom, bool neg) { return intern({K::Lit, atom, neg, {}}); }

  int mk_next(int x) {
    if (x <= 1) return x;  // X true = true, X false = false
    return intern({K::Next, -1, false, {x}});
  }

  int mk_release(int l, int r) {
    if (r <= 1) return r;       // phi R true = true, phi R false = false
    if (l == 1) return r;       // true R phi = phi
    return intern({K::Release, -1, false, {l, r}});
  }

  int mk_and(std::vector<int> xs) { return mk_nary(K::And, std::move(xs), 1, 0); }
  int mk_or(std::vector<int> xs) { return mk_nary(K::Or, std::move(xs), 0, 1); }

  const Term& term(int id) const { return terms_[id]; }

  std::string describe(int id, const std::vector<std::string>& ap) const {
    const Term& t = terms_[id];
    switch (t.k) {
      case K::False:
        return "false";
      case K::True:
        return "true";
      case K::Lit:
        return (t.neg ? "!" : "") + ap[t.atom];
      case K::Next:
        return "X " + paren(t.kids[0], ap);
      case K::Release:
        return t.kids[0] == 0 ? "[]" + paren(t.kids[1], ap)
                              : paren(t.kids[0], ap) + " R " + paren(t.kids[1], ap);
      case K::And:
      case K::Or: {
        std::string sep = t.k == K::And ? " & " : " | ";
        std::string s;
        for (std::size_t i = 0; i < t.kids.size(); ++i)
          s += (i ? sep : "") + paren(t.kids[i], ap);
        return s;
      }
    }
    return "?";
  }

 private:
  std::string paren(int id, const std::vector<std::string>& ap) const {
    const Term& t = terms_[id];
    bool atomic = t.k != K::And && t.k != K::Or && t.k != K::Release;
    std::string s = describe(id, ap);
    return atomic ? s : "(" + s + ")";
  }

  int mk_nary(K k, std::vector<int> xs, int unit, int absorb) {
    std::vector<int> flat;
    for (int x : xs) {
      if (x == absorb) return absorb;
      if (x == unit) continue;
      if (terms_[x].k == k)
        flat.insert(flat.end(), terms_[x].kids.begin(), terms_[x].kids.end());
      else
        flat.push_back(x);
    }
    std::sort(flat.begin(), flat.end());
    flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
    // complementary literals annihilate
    for (int x : flat) {
      const Term& t = terms_[x];
      if (t.k == K::Lit) {
        for (int y : flat) {
          const Term& u = terms_[y];
          if (u.k == K::Lit && u.atom == t.atom && u.neg != t.neg) return absorb;
        }
      }
    }
    if (flat.empty()) return unit;
    if (flat.size() == 1) return flat[0];
    return intern({k, -1, false, std::move(flat)});
  }

  int intern(Term t) {
    auto key = std::make_tuple(static_cast<int>(t.k), t.atom, t.neg, t.kids);
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    terms_.push_back(t);
    int id = static_cast<int>(terms_.size()) - 1;
    index_.emplace(std::move(key), id);
    return id;
  }

  std::vector<Term> terms_;
  std::map<std::tuple<int, int, bool, std::vector<int>>, int> index_;
};

// PNF tree -> interned term
int to_term(Arena& ar, const LtlRef& n) {
  switch (n->kind) {
    case LtlKind::True:
      return ar.mk_true();
    case LtlKind::False:
      return ar.mk_false();
    case LtlKind::Atom:
      return ar.mk_lit(n->atom, false);
    case LtlKind::Not:
      return ar.mk_lit(n->lhs->atom, true);
    case LtlKind::And:
      return ar.mk_and({to_term(ar, n->lhs), to_term(ar, n->rhs)});
    case LtlKind::Or:
      return ar.mk_or({to_term(ar, n->lhs), to_term(ar, n->rhs)});
    case LtlKind::Next:
      return ar.mk_next(to_term(ar, n->lhs));
    case LtlKind::Release:
      return ar.mk_release(to_term(ar, n->lhs), to_term(ar, n->rhs));
    case LtlKind::Until:
      throw std::invalid_argument("until escaped the safety check");
  }
  return ar.mk_false();
}

// Obligation left after reading `letter`: expansion laws
//   x R y = y & (x | X(x R y)),  X phi consumes one step.
int step(Arena& ar, int id, Letter letter) {
  const Arena::Term t = ar.term(id);
  switch (t.k) {
    case Arena::K::False:
    case Arena::K::True:
      return id;
    case Arena::K::Lit: {
      bool holds = (letter >> t.atom) & 1u;
      return holds != t.neg ? ar.mk_true() : ar.mk_false();
    }
    case Arena::K::Next:
      return t.kids[0];
    case Arena::K::And: {
      std::vector<int> kids;
      for (int k : t.kids) kids.push_back(step(ar, k, letter));
      return ar.mk_and(std::move(kids));
    }
    case Arena::K::Or: {
      std::vector<int> kids;
      for (int k : t.kids) kids.push_back(step(ar, k, letter));
      return ar.mk_or(std::move(kids));
    }
    case Arena::K::Release:
      return ar.mk_and({step(ar, t.kids[1], letter),
                        ar.mk_or({step(ar, t.kids[0], letter), id})});
  }
  return ar.mk_false();
}

}  // namespace

SafetyAutomaton safety_to_automaton(const LtlFormula& f, int max_states) {
  if (!is_syntactic_safety(f))
    throw std::invalid_argument("formula is not in the syntactic safety fragment: " +
                                print_ltl(f));
  if (f.alphabet.size() > 12)
    throw std::invalid_argument("alphabet too large for an explicit safety automaton");

  Arena ar;
  int root = to_term(ar, to_pnf(f.root));

  SafetyAutomaton a;
  a.ap = f.alphabet;
  const int letters = a.num_letters();

  std::map<int, int> state_of;  // term id -> automaton state
  std::vector<int> term_of;
  auto state_for = [&](int term) {
    auto it = state_of.find(term);
    if (it != state_of.end()) return it->second;
    int s = static_cast<int>(term_of.size());
    if (s >= max_states)
      throw std::runtime_error(
          "safety automaton exceeds the state cap (" + std::to_string(max_states) +
          "); translate the formula externally and import it in HOA form");
    state_of.emplace(term, s);
    term_of.push_back(term);
    a.delta.emplace_back(letters, -1);
    return s;
  };

  a.initial = state_for(root);
  for (int s = 0; s < static_cast<int>(term_of.size()); ++s)
    for (Letter l = 0; l < static_cast<Letter>(letters); ++l)
      a.delta[s][l] = state_for(step(ar, term_of[s], l));

  a.accepting.resize(term_of.size());
  a.state_desc.resize(term_of.size());
  for (int s = 0; s < static_cast<int>(term_of.size()); ++s) {
    a.accepting[s] = term_of[s] != ar.mk_false();
    a.state_desc[s] = ar.describe(term_of[s], a.ap);
  }
  return a;
}

SafetyAutomaton safety_automaton_true(const std::vector<std::string>& ap) {
  SafetyAutomaton a;
  a.ap = ap;
  a.initial = 0;
  a.delta = {std::vector<int>(a.num_letters(), 0)};
  a.accepting = {true};
  a.state_desc = {"true"};
  return a;
}

std::vector<std::string> validate_safety_automaton(const SafetyAutomaton& a) {
  std::vector<std::string> bad;
  const int n = a.num_states();
  if (n == 0) bad.push_back("automaton has no states");
  if (a.initial < 0 || a.initial >= n) bad.push_back("initial state out of range");
  for (int s = 0; s < n; ++s) {
    if (static_cast<int>(a.delta[s].size()) != a.num_letters())
      bad.push_back("state " + std::to_string(s) + " transition row has the wrong arity");
    for (int t : a.delta[s]) {
      if (t < 0 || t >= n) {
        bad.push_back("state " + std::to_string(s) + " has a missing or out-of-range successor");
        continue;
      }
      if (!a.accepting[s] && a.accepting[t])
        bad.push_back("non-accepting state " + std::to_string(s) + " is not absorbing");
    }
  }
  return bad;
}

}  // namespace lexirl

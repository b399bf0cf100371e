#include "lexirl/ldba.hpp"

#include <deque>

namespace lexirl {

void derive_partition(Ldba& l) {
  const int n = l.num_states();
  l.in_accepting_component.assign(n, false);
  std::deque<int> work;
  auto push = [&](int q) {
    if (q >= 0 && q < n && !l.in_accepting_component[q]) {
      l.in_accepting_component[q] = true;
      work.push_back(q);
    }
  };
  for (int q = 0; q < n; ++q) {
    if (l.accepting[q]) push(q);
    for (int t : l.eps[q]) push(t);
  }
  while (!work.empty()) {
    int q = work.front();
    work.pop_front();
    for (int t : l.delta[q]) push(t);
  }
}

std::vector<std::string> validate_suitable(const Ldba& l) {
  std::vector<std::string> bad;
  const int n = l.num_states();
  if (n == 0) {
    bad.push_back("automaton has no states");
    return bad;
  }
  if (l.initial < 0 || l.initial >= n) bad.push_back("initial state out of range");
  if (static_cast<int>(l.accepting.size()) != n ||
      static_cast<int>(l.in_accepting_component.size()) != n ||
      static_cast<int>(l.eps.size()) != n)
    bad.push_back("state attribute arrays have inconsistent sizes");

  for (int q = 0; q < n && bad.empty(); ++q) {
    if (static_cast<int>(l.delta[q].size()) != l.num_letters())
      bad.push_back("state " + std::to_string(q) + " transition row has the wrong arity");
  }
  if (!bad.empty()) return bad;

  for (int q = 0; q < n; ++q) {
    if (l.accepting[q] && !l.in_accepting_component[q])
      bad.push_back("accepting state " + std::to_string(q) +
                    " lies outside the accepting component");
    for (int t : l.delta[q]) {
      if (t < -1 || t >= n)
        bad.push_back("state " + std::to_string(q) + " has an out-of-range successor");
      else if (l.in_accepting_component[q] && t >= 0 && !l.in_accepting_component[t])
        bad.push_back("accepting component is not closed: state " + std::to_string(q) +
                      " reaches state " + std::to_string(t));
    }
    for (int t : l.eps[q]) {
      if (t < 0 || t >= n)
        bad.push_back("state " + std::to_string(q) + " has an out-of-range ε-target");
      else if (!l.in_accepting_component[t])
        bad.push_back("ε-transition from state " + std::to_string(q) + " to state " +
                      std::to_string(t) + " does not enter the accepting component");
    }
    if (l.in_accepting_component[q] && !l.eps[q].empty())
      bad.push_back("state " + std::to_string(q) +
                    " in the accepting component has an ε-transition");
  }
  return bad;
}

Ldba ldba_from_safety(const SafetyAutomaton& a) {
  Ldba l;
  l.ap = a.ap;
  l.initial = a.initial;
  l.delta = a.delta;
  l.eps.assign(a.num_states(), {});
  l.accepting.assign(a.accepting.begin(), a.accepting.end());
  // every state sits in the deterministic component; no ε anywhere
  l.in_accepting_component.assign(a.num_states(), true);
  return l;
}

Ldba ldba_true(const std::vector<std::string>& ap) {
  Ldba l;
  l.ap = ap;
  l.initial = 0;
  l.delta = {std::vector<int>(l.num_letters(), 0)};
  l.eps = {{}};
  l.accepting = {true};
  l.in_accepting_component = {true};
  return l;
}

}  // namespace lexirl

#include "lexirl/mdp.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace lexirl {

const std::vector<Outcome>& LabeledMdp::outcomes(StateId s, ActionId a) const {
  int slot = action_slot(s, a);
  if (slot < 0)
    throw std::invalid_argument("action " + action_names[a] + " not allowed in state " +
                                state_name(s));
  return trans[s][slot];
}

std::vector<std::string> validate_mdp(const LabeledMdp& mdp) {
  std::vector<std::string> bad;
  const int n = mdp.num_states();
  auto state_str = [&](StateId s) { return mdp.state_name(s); };

  if (n == 0) bad.push_back("model has no states");
  if (mdp.initial < 0 || mdp.initial >= n) bad.push_back("initial state out of range");
  if (mdp.gamma < 0.0 || mdp.gamma >= 1.0) bad.push_back("gamma must lie in [0, 1)");
  if (static_cast<int>(mdp.atomic_props.size()) > kMaxProps)
    bad.push_back("too many atomic propositions");

  for (StateId s = 0; s < n; ++s) {
    if (mdp.actions[s].empty())
      bad.push_back("state " + state_str(s) + " has no allowed actions");
    if (std::abs(mdp.reward[s]) > mdp.r_max)
      bad.push_back("state " + state_str(s) + " reward exceeds declared r_max");
    for (std::size_t slot = 0; slot < mdp.actions[s].size(); ++slot) {
      ActionId a = mdp.actions[s][slot];
      const auto& outs = mdp.trans[s][slot];
      double sum = 0.0;
      bool neg = false;
      for (const auto& o : outs) {
        sum += o.prob;
        if (o.prob < 0.0) neg = true;
        if (o.next < 0 || o.next >= n)
          bad.push_back("state " + state_str(s) + " action " + mdp.action_names[a] +
                        " has an out-of-range successor");
      }
      if (neg)
        bad.push_back("state " + state_str(s) + " action " + mdp.action_names[a] +
                      " has a negative probability");
      if (std::abs(sum - 1.0) > 1e-9)
        bad.push_back("state " + state_str(s) + " action " + mdp.action_names[a] +
                      " probabilities sum to " + std::to_string(sum));
    }
  }
  return bad;
}

StateId sample_transition(const LabeledMdp& mdp, StateId s, ActionId a, Rng& rng) {
  const auto& outs = mdp.outcomes(s, a);
  double u = rng.uniform();
  double acc = 0.0;
  for (const auto& o : outs) {
    acc += o.prob;
    if (u < acc) return o.next;
  }
  return outs.back().next;  // guard against rounding at u ~ 1
}

LabeledMdp fixture_example1() {
  LabeledMdp m;
  m.atomic_props = {"b"};
  m.action_names = {"beta1", "beta2", "back"};
  m.state_names = {"s0", "s1"};
  m.initial = 0;
  m.gamma = 0.99;
  m.r_max = 1.0;
  m.reward = {1.0, 0.0};
  m.label = {0u, 1u};
  m.actions = {{0, 1}, {2}};
  m.trans = {{{{1, 1.0}}, {{0, 1.0}}}, {{{0, 1.0}}}};
  return m;
}

bool path_connected(const LabeledMdp& mdp, const Path& path) {
  for (std::size_t i = 0; i + 1 < path.states.size(); ++i) {
    StateId s = path.states[i], t = path.states[i + 1];
    bool found = false;
    for (std::size_t slot = 0; slot < mdp.actions[s].size() && !found; ++slot)
      for (const auto& o : mdp.trans[s][slot])
        if (o.next == t && o.prob > 0.0) {
          found = true;
          break;
        }
    if (!found) return false;
  }
  return true;
}

}  // namespace lexirl

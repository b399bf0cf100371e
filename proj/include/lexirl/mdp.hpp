#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lexirl/rng.hpp"

namespace lexirl {

using StateId = int;
using ActionId = int;

/// A letter is a set of atomic propositions, one bit per proposition index.
using Letter = std::uint32_t;

constexpr int kMaxProps = 20;

struct Outcome {
  StateId next = 0;
  double prob = 0.0;
};

/// Finite labeled MDP: states carry a scalar quality-of-control reward and a
/// subset of atomic propositions; actions are allowed per state. Immutable
/// once built; safe to share across threads.
struct LabeledMdp {
  std::vector<std::string> atomic_props;
  std::vector<std::string> action_names;
  std::vector<std::string> state_names;  // optional pretty names

  StateId initial = 0;
  double gamma = 0.99;
  double r_max = 1e9;

  std::vector<double> reward;                    // by state
  std::vector<Letter> label;                     // by state
  std::vector<std::vector<ActionId>> actions;    // allowed actions, by state
  std::vector<std::vector<std::vector<Outcome>>> trans;  // [state][action slot]

  int num_states() const { return static_cast<int>(reward.size()); }
  int num_actions() const { return static_cast<int>(action_names.size()); }

  /// Slot of action `a` in actions[s], or -1 when not allowed there.
  int action_slot(StateId s, ActionId a) const {
    const auto& as = actions[s];
    for (int i = 0; i < static_cast<int>(as.size()); ++i)
      if (as[i] == a) return i;
    return -1;
  }

  const std::vector<Outcome>& outcomes(StateId s, ActionId a) const;

  std::string state_name(StateId s) const {
    if (s >= 0 && s < static_cast<int>(state_names.size()) && !state_names[s].empty())
      return state_names[s];
    return "s" + std::to_string(s);
  }

  int prop_index(const std::string& name) const {
    for (int i = 0; i < static_cast<int>(atomic_props.size()); ++i)
      if (atomic_props[i] == name) return i;
    return -1;
  }
};

/// Diagnostic check of every LabeledMdp invariant. Returns one message per
/// violation; empty means the model is well formed.
std::vector<std::string> validate_mdp(const LabeledMdp& mdp);

/// Sample the successor of (s, a). Throws std::invalid_argument when `a` is
/// not allowed in `s`.
StateId sample_transition(const LabeledMdp& mdp, StateId s, ActionId a, Rng& rng);

/// Two-state model where maximizing the plain return conflicts with visiting
/// the b-labeled state infinitely often: s0 (no label, reward 1) has a
/// self-loop beta2 and a switch beta1 to s1 ({b}, reward 0), which returns to
/// s0. Used as a fixture for the mixing analysis.
LabeledMdp fixture_example1();

struct Path {
  std::vector<StateId> states;
};

/// True when consecutive states are connected by a positive-probability
/// transition under some allowed action.
bool path_connected(const LabeledMdp& mdp, const Path& path);

}  // namespace lexirl

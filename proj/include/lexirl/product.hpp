#pragma once

#include <string>
#include <vector>

#include "lexirl/ldba.hpp"
#include "lexirl/mdp.hpp"
#include "lexirl/rng.hpp"
#include "lexirl/safety_automaton.hpp"

namespace lexirl {

/// Product state: environment state plus the two automaton components.
/// q_ltl == ldba.num_states() is the implicit rejecting trap entered when the
/// LDBA has no transition for the consumed letter.
struct ProductStateKey {
  StateId env = 0;
  int q_safety = 0;
  int q_ltl = 0;

  friend bool operator==(const ProductStateKey&, const ProductStateKey&) = default;
};

/// Synchronous composition of an MDP, a safety automaton and an LDBA,
/// restricted to the states reachable from the initial triple. Product
/// actions are the MDP actions plus one ε-action per LDBA state; taking
/// eps_q switches only the LDBA component to q. Automata consume the label
/// of the state being left. Immutable once built.
struct ProductMdp {
  LabeledMdp mdp;
  SafetyAutomaton safety;
  Ldba ldba;

  std::vector<ProductStateKey> states;  // breadth-first discovery order
  int initial = 0;
  long long full_state_count = 0;  // |S| x |Q_safety| x |Q_ldba| before pruning
  double gamma = 0.99;

  std::vector<std::vector<int>> actions;  // allowed product actions per state
  std::vector<std::vector<std::vector<Outcome>>> trans;
  std::vector<bool> b_safety;  // membership in B×_psi (depends on q_safety only)
  std::vector<bool> b_ltl;     // membership in B×_phi (depends on q_ltl only)
  std::vector<double> reward;  // R(env state)

  int num_states() const { return static_cast<int>(states.size()); }
  int num_product_actions() const { return mdp.num_actions() + ldba.num_states(); }
  bool is_eps_action(int a) const { return a >= mdp.num_actions(); }
  int eps_target(int a) const { return a - mdp.num_actions(); }
  int ldba_trap() const { return ldba.num_states(); }

  std::string action_name(int a) const {
    return is_eps_action(a) ? "eps_" + std::to_string(eps_target(a)) : mdp.action_names[a];
  }
  std::string state_name(int x) const {
    const auto& k = states[x];
    return mdp.state_name(k.env) + "/" + std::to_string(k.q_safety) + "/" +
           (k.q_ltl == ldba_trap() ? std::string("dead") : std::to_string(k.q_ltl));
  }

  int action_slot(int x, int a) const {
    const auto& as = actions[x];
    for (int i = 0; i < static_cast<int>(as.size()); ++i)
      if (as[i] == a) return i;
    return -1;
  }
  const std::vector<Outcome>& outcomes(int x, int a) const;
};

/// Throws std::invalid_argument when an automaton proposition is missing from
/// the MDP's alphabet or an input fails its validator.
ProductMdp build_product(const LabeledMdp& mdp, const SafetyAutomaton& a_safety,
                         const Ldba& a_ltl);

struct StepResult {
  int next = 0;
  double qoc_reward = 0.0;
  bool in_b_safety = false;
  bool in_b_ltl = false;
};

StepResult step_product(const ProductMdp& p, int state, int action, Rng& rng);

/// Memoryless (possibly mixed) policy over allowed product actions.
struct ProductPolicy {
  struct Entry {
    int action = 0;
    double prob = 0.0;
  };
  std::vector<std::vector<Entry>> at;  // by product state
};

std::vector<std::string> validate_policy(const ProductMdp& p, const ProductPolicy& pi);

/// Deterministic text dump of states, actions, transitions and accepting
/// flags, for external inspection.
std::string dump_product(const ProductMdp& p);

/// Finite-memory policy for the bare MDP induced by a product policy: the
/// automaton pair acts as the memory. The mode update fires on every arrival
/// (including the initial state) and resolves ε-jumps; the action map is the
/// ε-folded distribution over environment actions. Modes are reduced by
/// behavioral bisimulation, so trivial automata collapse to one mode.
struct FiniteMemoryPolicy {
  struct ModeTransition {
    int mode = 0;
    double prob = 0.0;
  };
  struct ActionProb {
    ActionId action = 0;
    double prob = 0.0;
  };
  int num_modes = 0;
  int initial_mode = 0;
  // true when the initial ε-resolution is mixed: the initial mode is then a
  // pre-start mode whose update fires on arrival at the initial state
  bool update_on_start = false;
  // keyed by [mode][env state]; empty entries are unreachable
  std::vector<std::vector<std::vector<ModeTransition>>> mode_update;
  std::vector<std::vector<std::vector<ActionProb>>> action;
};

FiniteMemoryPolicy induce_policy(const ProductMdp& p, const ProductPolicy& pi);

/// Run the induced policy on the bare MDP; returns the visited state path.
Path simulate_induced(const LabeledMdp& mdp, const FiniteMemoryPolicy& fm, int steps, Rng& rng);

std::string policy_to_json(const ProductMdp& p, const ProductPolicy& pi);
ProductPolicy policy_from_json(const ProductMdp& p, const std::string& text);

}  // namespace lexirl

#include "lexirl/product.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <nlohmann/json.hpp>

#include "lexirl/util.hpp"

namespace lexirl {

using nlohmann::json;

namespace {

// map an MDP letter to an automaton letter via proposition names
std::vector<Letter> projection_table(const LabeledMdp& mdp, const std::vector<std::string>& ap,
                                     const std::string& who) {
  std::vector<int> prop_of;
  for (const auto& name : ap) {
    int idx = mdp.prop_index(name);
    if (idx < 0)
      throw std::invalid_argument("alphabet mismatch: " + who + " proposition '" + name +
                                  "' is not among the MDP's atomic propositions");
    prop_of.push_back(idx);
  }
  std::vector<Letter> table(1u << mdp.atomic_props.size(), 0);
  for (Letter l = 0; l < static_cast<Letter>(table.size()); ++l)
    for (std::size_t i = 0; i < prop_of.size(); ++i)
      if ((l >> prop_of[i]) & 1u) table[l] |= 1u << i;
  return table;
}

struct KeyLess {
  bool operator()(const ProductStateKey& a, const ProductStateKey& b) const {
    return std::tie(a.env, a.q_safety, a.q_ltl) < std::tie(b.env, b.q_safety, b.q_ltl);
  }
};

}  // namespace

const std::vector<Outcome>& ProductMdp::outcomes(int x, int a) const {
  int slot = action_slot(x, a);
  if (slot < 0)
    throw std::invalid_argument("product action " + action_name(a) + " not allowed in " +
                                state_name(x));
  return trans[x][slot];
}

ProductMdp build_product(const LabeledMdp& mdp, const SafetyAutomaton& a_safety,
                         const Ldba& a_ltl) {
  if (auto bad = validate_mdp(mdp); !bad.empty())
    throw std::invalid_argument("invalid MDP: " + bad.front());
  if (auto bad = validate_safety_automaton(a_safety); !bad.empty())
    throw std::invalid_argument("invalid safety automaton: " + bad.front());
  if (auto bad = validate_suitable(a_ltl); !bad.empty())
    throw std::invalid_argument("LDBA is not suitable: " + bad.front());

  ProductMdp p;
  p.mdp = mdp;
  p.safety = a_safety;
  p.ldba = a_ltl;
  p.gamma = mdp.gamma;
  p.full_state_count = static_cast<long long>(mdp.num_states()) * a_safety.num_states() *
                       a_ltl.num_states();

  auto proj_safety = projection_table(mdp, a_safety.ap, "safety automaton");
  auto proj_ltl = projection_table(mdp, a_ltl.ap, "LDBA");
  const int trap = p.ldba_trap();

  std::map<ProductStateKey, int, KeyLess> index;
  std::deque<int> work;
  auto state_for = [&](ProductStateKey k) {
    auto it = index.find(k);
    if (it != index.end()) return it->second;
    int x = static_cast<int>(p.states.size());
    index.emplace(k, x);
    p.states.push_back(k);
    work.push_back(x);
    return x;
  };

  p.initial = state_for({mdp.initial, a_safety.initial, a_ltl.initial});

  while (!work.empty()) {
    int x = work.front();
    work.pop_front();
    ProductStateKey k = p.states[x];  // copy: p.states may reallocate below
    Letter letter = mdp.label[k.env];
    int qs_next = a_safety.delta[k.q_safety][proj_safety[letter]];
    int ql_next = trap;
    if (k.q_ltl != trap) {
      int t = a_ltl.delta[k.q_ltl][proj_ltl[letter]];
      ql_next = t < 0 ? trap : t;
    }

    if (static_cast<int>(p.actions.size()) <= x) {
      p.actions.resize(x + 1);
      p.trans.resize(x + 1);
    }
    for (ActionId a : mdp.actions[k.env]) {
      std::vector<Outcome> outs;
      for (const auto& o : mdp.outcomes(k.env, a))
        outs.push_back({state_for({o.next, qs_next, ql_next}), o.prob});
      p.actions[x].push_back(a);
      p.trans[x].push_back(std::move(outs));
    }
    if (k.q_ltl != trap) {
      for (int q : a_ltl.eps[k.q_ltl]) {
        p.actions[x].push_back(mdp.num_actions() + q);
        p.trans[x].push_back({{state_for({k.env, k.q_safety, q}), 1.0}});
      }
    }
  }

  const int n = p.num_states();
  p.actions.resize(n);
  p.trans.resize(n);
  p.b_safety.resize(n);
  p.b_ltl.resize(n);
  p.reward.resize(n);
  for (int x = 0; x < n; ++x) {
    const auto& k = p.states[x];
    p.b_safety[x] = a_safety.accepting[k.q_safety];
    p.b_ltl[x] = k.q_ltl != trap && a_ltl.accepting[k.q_ltl];
    p.reward[x] = mdp.reward[k.env];
  }
  return p;
}

StepResult step_product(const ProductMdp& p, int state, int action, Rng& rng) {
  const auto& outs = p.outcomes(state, action);
  double u = rng.uniform();
  double acc = 0.0;
  int next = outs.back().next;
  for (const auto& o : outs) {
    acc += o.prob;
    if (u < acc) {
      next = o.next;
      break;
    }
  }
  return {next, p.reward[next], p.b_safety[next] != 0, p.b_ltl[next] != 0};
}

std::vector<std::string> validate_policy(const ProductMdp& p, const ProductPolicy& pi) {
  std::vector<std::string> bad;
  if (static_cast<int>(pi.at.size()) != p.num_states()) {
    bad.push_back("policy size does not match the product");
    return bad;
  }
  for (int x = 0; x < p.num_states(); ++x) {
    double sum = 0.0;
    for (const auto& e : pi.at[x]) {
      sum += e.prob;
      if (e.prob < 0) bad.push_back("negative probability at " + p.state_name(x));
      if (p.action_slot(x, e.action) < 0)
        bad.push_back("policy uses a disallowed action at " + p.state_name(x));
    }
    if (std::abs(sum - 1.0) > 1e-9)
      bad.push_back("policy distribution at " + p.state_name(x) + " sums to " +
                    format_double(sum));
  }
  return bad;
}

std::string dump_product(const ProductMdp& p) {
  std::ostringstream out;
  out << "product states " << p.num_states() << " full " << p.full_state_count << " initial "
      << p.initial << " gamma " << format_double(p.gamma) << "\n";
  for (int x = 0; x < p.num_states(); ++x) {
    const auto& k = p.states[x];
    out << "state " << x << " env " << p.mdp.state_name(k.env) << " safety " << k.q_safety
        << " ldba " << (k.q_ltl == p.ldba_trap() ? std::string("dead") : std::to_string(k.q_ltl))
        << " reward " << format_double(p.reward[x]) << (p.b_safety[x] ? " b_safety" : "")
        << (p.b_ltl[x] ? " b_ltl" : "") << "\n";
  }
  for (int x = 0; x < p.num_states(); ++x)
    for (std::size_t slot = 0; slot < p.actions[x].size(); ++slot)
      for (const auto& o : p.trans[x][slot])
        out << "trans " << x << " " << p.action_name(p.actions[x][slot]) << " " << o.next << " "
            << format_double(o.prob) << "\n";
  return out.str();
}

namespace {

// Induced-policy mode: the automaton pair under which the action is chosen
// (ε already resolved) plus the pair the automata advance to when the state
// is left. Folding the consumed letter into the advance keeps the mode space
// at automaton pairs plus ε-bookkeeping.
struct RawMode {
  int acting_safety = 0;
  int acting_ltl = 0;
  int next_safety = 0;
  int next_ltl = 0;

  auto key() const { return std::tie(acting_safety, acting_ltl, next_safety, next_ltl); }
  friend bool operator<(const RawMode& a, const RawMode& b) { return a.key() < b.key(); }
};

struct Resolved {
  int q_ltl = 0;  // acting LDBA state after the ε-decision
  double prob = 0.0;
  std::vector<FiniteMemoryPolicy::ActionProb> act;  // conditional env-action law
};

}  // namespace

FiniteMemoryPolicy induce_policy(const ProductMdp& p, const ProductPolicy& pi) {
  if (auto bad = validate_policy(p, pi); !bad.empty())
    throw std::invalid_argument("invalid product policy: " + bad.front());

  auto proj_safety = projection_table(p.mdp, p.safety.ap, "safety automaton");
  auto proj_ltl = projection_table(p.mdp, p.ldba.ap, "LDBA");
  const int trap = p.ldba_trap();
  const int S = p.mdp.num_states();

  std::map<std::tuple<StateId, int, int>, int> pindex;
  for (int x = 0; x < p.num_states(); ++x) {
    const auto& k = p.states[x];
    pindex.emplace(std::make_tuple(k.env, k.q_safety, k.q_ltl), x);
  }
  auto product_index = [&](StateId env, int qs, int ql) {
    auto it = pindex.find(std::make_tuple(env, qs, ql));
    return it == pindex.end() ? -1 : it->second;
  };

  // ε-resolution of the policy at product state <env, qs, ql>
  auto resolve = [&](StateId env, int qs, int ql) {
    std::vector<Resolved> out;
    int x = product_index(env, qs, ql);
    if (x < 0) throw std::logic_error("induced policy left the reachable product");
    double env_mass = 0.0;
    std::vector<FiniteMemoryPolicy::ActionProb> direct;
    for (const auto& e : pi.at[x]) {
      if (e.prob <= 0) continue;
      if (p.is_eps_action(e.action)) {
        int q2 = p.eps_target(e.action);
        int y = product_index(env, qs, q2);
        std::vector<FiniteMemoryPolicy::ActionProb> act;
        for (const auto& e2 : pi.at[y])  // Q_A states have no further ε
          if (e2.prob > 0) act.push_back({e2.action, e2.prob});
        out.push_back({q2, e.prob, std::move(act)});
      } else {
        env_mass += e.prob;
        direct.push_back({e.action, e.prob});
      }
    }
    if (env_mass > 0) {
      for (auto& a : direct) a.prob /= env_mass;  // conditional on not jumping
      out.push_back({ql, env_mass, std::move(direct)});
    }
    return out;
  };

  std::map<RawMode, int> mode_index;
  std::vector<RawMode> modes;
  auto mode_for = [&](RawMode m) {
    auto it = mode_index.find(m);
    if (it != mode_index.end()) return it->second;
    int id = static_cast<int>(modes.size());
    mode_index.emplace(m, id);
    modes.push_back(m);
    return id;
  };

  // per (mode, state): arrival mode update and acting env-action law
  std::map<std::pair<int, StateId>, std::vector<FiniteMemoryPolicy::ModeTransition>> raw_update;
  std::map<std::pair<int, StateId>, std::vector<FiniteMemoryPolicy::ActionProb>> raw_action;

  std::deque<std::pair<int, StateId>> work;  // acting (mode, state) pairs to expand
  auto enter = [&](StateId env, int qs, int ql_pre) {
    // resolve ε at arrival; returns the mode distribution
    Letter l = p.mdp.label[env];
    std::vector<FiniteMemoryPolicy::ModeTransition> dist;
    for (const auto& r : resolve(env, qs, ql_pre)) {
      int next_safety = p.safety.delta[qs][proj_safety[l]];
      int next_ltl = trap;
      if (r.q_ltl != trap) {
        int t = p.ldba.delta[r.q_ltl][proj_ltl[l]];
        next_ltl = t < 0 ? trap : t;
      }
      int id = mode_for({qs, r.q_ltl, next_safety, next_ltl});
      dist.push_back({id, r.prob});
      auto key = std::make_pair(id, env);
      if (!raw_action.count(key)) {
        raw_action[key] = r.act;
        work.push_back(key);
      }
    }
    return dist;
  };

  auto initial_dist = enter(p.mdp.initial, p.safety.initial, p.ldba.initial);
  bool prestart_mixed = initial_dist.size() > 1;

  while (!work.empty()) {
    auto [mode, env] = work.front();
    work.pop_front();
    int qs_next = modes[mode].next_safety, ql_next = modes[mode].next_ltl;
    for (const auto& a : raw_action[{mode, env}]) {
      for (const auto& o : p.mdp.outcomes(env, a.action)) {
        if (a.prob * o.prob <= 0) continue;
        auto key = std::make_pair(mode, o.next);
        if (!raw_update.count(key)) {
          raw_update.emplace(key, std::vector<FiniteMemoryPolicy::ModeTransition>{});
          raw_update[key] = enter(o.next, qs_next, ql_next);
        }
      }
    }
  }

  const int raw_n = static_cast<int>(modes.size());
  FiniteMemoryPolicy fm;
  fm.num_modes = raw_n + (prestart_mixed ? 1 : 0);
  fm.update_on_start = prestart_mixed;
  fm.mode_update.assign(fm.num_modes,
                        std::vector<std::vector<FiniteMemoryPolicy::ModeTransition>>(S));
  fm.action.assign(fm.num_modes, std::vector<std::vector<FiniteMemoryPolicy::ActionProb>>(S));

  for (const auto& [key, acts] : raw_action) fm.action[key.first][key.second] = acts;
  for (const auto& [key, upd] : raw_update) fm.mode_update[key.first][key.second] = upd;

  if (prestart_mixed) {
    fm.initial_mode = raw_n;  // dedicated pre-start mode
    fm.mode_update[fm.initial_mode][p.mdp.initial] = initial_dist;
  } else {
    fm.initial_mode = initial_dist.front().mode;
  }
  return fm;
}

Path simulate_induced(const LabeledMdp& mdp, const FiniteMemoryPolicy& fm, int steps, Rng& rng) {
  Path path;
  path.states.push_back(mdp.initial);
  int mode = fm.initial_mode;
  StateId s = mdp.initial;
  auto pick_mode = [&](int m, StateId st) {
    const auto& upd = fm.mode_update[m][st];
    if (upd.empty()) throw std::logic_error("induced policy reached an unmapped (mode, state)");
    double u = rng.uniform(), acc = 0.0;
    for (const auto& e : upd) {
      acc += e.prob;
      if (u < acc) return e.mode;
    }
    return upd.back().mode;
  };
  if (fm.update_on_start) mode = pick_mode(mode, s);
  for (int t = 0; t < steps; ++t) {
    const auto& acts = fm.action[mode][s];
    if (acts.empty()) throw std::logic_error("induced policy has no action at (mode, state)");
    double u = rng.uniform(), acc = 0.0;
    ActionId a = acts.back().action;
    for (const auto& e : acts) {
      acc += e.prob;
      if (u < acc) {
        a = e.action;
        break;
      }
    }
    s = sample_transition(mdp, s, a, rng);
    path.states.push_back(s);
    mode = pick_mode(mode, s);
  }
  return path;
}

std::string policy_to_json(const ProductMdp& p, const ProductPolicy& pi) {
  json j;
  j["format"] = "lexirl-policy";
  j["version"] = 1;
  j["states"] = p.num_states();
  json entries = json::array();
  for (int x = 0; x < p.num_states(); ++x) {
    json row = json::array();
    for (const auto& e : pi.at[x])
      row.push_back({{"action", p.action_name(e.action)}, {"prob", e.prob}});
    entries.push_back(row);
  }
  j["policy"] = std::move(entries);
  return j.dump(2) + "\n";
}

ProductPolicy policy_from_json(const ProductMdp& p, const std::string& text) {
  json j = json::parse(text);
  if (j.value("format", "") != "lexirl-policy")
    throw std::runtime_error("not a policy file");
  if (j.at("states").get<int>() != p.num_states())
    throw std::runtime_error("policy does not match the product (state count differs)");
  ProductPolicy pi;
  pi.at.resize(p.num_states());
  auto action_id = [&](const std::string& name) {
    for (int a = 0; a < p.num_product_actions(); ++a)
      if (p.action_name(a) == name) return a;
    throw std::runtime_error("unknown action '" + name + "' in policy file");
  };
  int x = 0;
  for (const auto& row : j.at("policy")) {
    for (const auto& e : row)
      pi.at[x].push_back({action_id(e.at("action").get<std::string>()), e.at("prob").get<double>()});
    ++x;
  }
  return pi;
}

}  // namespace lexirl

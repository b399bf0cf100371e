#pragma once

// Shared test fixtures: the bundled case-study pipeline and a seeded
// generator of small synthetic products for the numeric criteria.

#include <string>

#include "lexirl/env_io.hpp"
#include "lexirl/hoa.hpp"
#include "lexirl/ltl.hpp"
#include "lexirl/product.hpp"
#include "lexirl/rng.hpp"
#include "lexirl/safety_automaton.hpp"

#ifndef LEXIRL_FIXTURES_DIR
#define LEXIRL_FIXTURES_DIR "fixtures"
#endif

namespace lexirl::testing {

inline std::string fixture_path(const std::string& name) {
  return std::string(LEXIRL_FIXTURES_DIR) + "/" + name;
}

struct CaseStudy {
  Environment env;
  SafetyAutomaton safety;
  Ldba ldba;
  ProductMdp product;
};

inline CaseStudy case_study() {
  CaseStudy cs;
  cs.env = load_environment(fixture_path("case_study.grid"));
  LtlFormula psi = parse_ltl("[](!(d & X d))", cs.env.mdp.atomic_props);
  cs.safety = safety_to_automaton(psi);
  cs.ldba = parse_hoa(read_file(fixture_path("gf_b_fg_c.hoa")));
  cs.product = build_product(cs.env.mdp, cs.safety, cs.ldba);
  return cs;
}

inline int case_study_cell(const CaseStudy& cs, int r, int c) { return cs.env.grid->cell(r, c); }

/// Product state index for (cell, safety state, ldba state); -1 if unreachable.
inline int product_state(const ProductMdp& p, StateId env, int qs, int ql) {
  for (int x = 0; x < p.num_states(); ++x) {
    const auto& k = p.states[x];
    if (k.env == env && k.q_safety == qs && k.q_ltl == ql) return x;
  }
  return -1;
}

/// Small synthetic product with direct control over the accepting flags:
/// random transition structure (probability weights bounded away from zero),
/// random safety/Büchi flags. The embedded MDP mirrors the product one to
/// one; the automata are trivial placeholders.
inline ProductMdp random_product(std::uint64_t seed, int max_states = 8, int max_actions = 3) {
  Rng rng(seed);
  const int n = 3 + static_cast<int>(rng.pick(static_cast<std::size_t>(max_states - 2)));

  ProductMdp p;
  p.gamma = 0.95;
  p.full_state_count = n;
  p.initial = 0;
  p.mdp.atomic_props = {};
  p.mdp.gamma = p.gamma;
  p.mdp.initial = 0;
  p.mdp.reward.assign(n, 0.0);
  p.mdp.label.assign(n, 0u);
  p.safety = safety_automaton_true({});
  p.ldba = ldba_true({});

  int total_actions = max_actions;
  for (int a = 0; a < total_actions; ++a) p.mdp.action_names.push_back("a" + std::to_string(a));

  p.states.resize(n);
  p.actions.resize(n);
  p.trans.resize(n);
  p.b_safety.resize(n);
  p.b_ltl.resize(n);
  p.reward.resize(n);
  p.mdp.actions.resize(n);
  p.mdp.trans.resize(n);
  for (int x = 0; x < n; ++x) {
    p.states[x] = {x, 0, 0};
    p.b_safety[x] = rng.uniform() < 0.75;
    p.b_ltl[x] = rng.uniform() < 0.3;
    p.reward[x] = static_cast<double>(rng.pick(4));
    p.mdp.reward[x] = p.reward[x];
    int acts = 1 + static_cast<int>(rng.pick(static_cast<std::size_t>(max_actions)));
    for (int a = 0; a < acts; ++a) {
      int support = 1 + static_cast<int>(rng.pick(3));
      std::vector<int> targets;
      std::vector<double> weights;
      double total = 0.0;
      for (int k = 0; k < support; ++k) {
        int t = static_cast<int>(rng.pick(static_cast<std::size_t>(n)));
        bool dup = false;
        for (int prev : targets)
          if (prev == t) dup = true;
        if (dup) continue;
        targets.push_back(t);
        double w = 2.0 + static_cast<double>(rng.pick(8));  // weights in [2, 9]
        weights.push_back(w);
        total += w;
      }
      std::vector<Outcome> outs;
      double sum = 0.0;
      for (std::size_t k = 0; k < targets.size(); ++k) {
        outs.push_back({targets[k], weights[k] / total});
        sum += outs.back().prob;
      }
      outs.back().prob += 1.0 - sum;
      p.actions[x].push_back(a);
      p.trans[x].push_back(outs);
      p.mdp.actions[x].push_back(a);
      p.mdp.trans[x].push_back(std::move(outs));
    }
  }
  return p;
}

}  // namespace lexirl::testing

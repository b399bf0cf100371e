#include <doctest.h>

#include <cmath>
#include <set>

#include "lexirl/hoa.hpp"
#include "lexirl/learn.hpp"
#include "lexirl/oracle.hpp"
#include "support/fixtures.hpp"

using namespace lexirl;
using namespace lexirl::testing;

namespace {

HyperValues end_values() {
  HyperValues h;
  h.gamma = 0.99;
  h.r_safety = 1e-3;
  h.r_ltl = 1e-3;
  h.alpha = 0.05;
  h.epsilon = 0.0;
  h.upsilon = 0.05;
  h.tau_safety = 1e-2;
  h.tau_ltl = 1e-2;
  return h;
}

// QTriple loaded with the oracle-exact crafted values
QTriple oracle_tables(const ProductMdp& p, double r_safety, double r_ltl) {
  QTriple q = QTriple::zeros(p);
  auto all = full_action_sets(p);
  q.q_safety = exact_crafted_q(p, Crafted::Safety, r_safety, all);
  auto pr = max_safety_prob(p);
  auto a_safety = safe_action_sets(p, pr);
  auto restricted = exact_crafted_q(p, Crafted::Buchi, r_ltl, a_safety);
  q.q_ltl = expand_crafted_q(p, Crafted::Buchi, r_ltl, restricted);
  return q;
}

}  // namespace

TEST_CASE("schedules: geometric holds at end, harmonic keeps decaying") {
  Schedule g{0.5, 0.05, 100, Schedule::Shape::Geometric};
  CHECK(g.at(0) == doctest::Approx(0.5));
  CHECK(g.at(100) == doctest::Approx(0.05));
  CHECK(g.at(1000) == doctest::Approx(0.05));
  CHECK(g.at(50) == doctest::Approx(std::sqrt(0.5 * 0.05)));

  Schedule h{1.0, 0.1, 9, Schedule::Shape::Harmonic};
  CHECK(h.at(0) == doctest::Approx(1.0));
  CHECK(h.at(9) == doctest::Approx(0.1));
  CHECK(h.at(99) < 0.011);  // 1/(1+n)
}

TEST_CASE("update examples from the algorithm") {
  auto cs = case_study();
  const auto& p = cs.product;
  QTriple q = QTriple::zeros(p);
  HyperValues h = end_values();
  h.r_safety = 1e-4;

  // find a transition into a safety-accepting state distinct from the source
  int x = p.initial;
  int a = p.actions[x][0];
  int y = -1;
  for (const auto& o : p.trans[x][0])
    if (o.next != x) y = o.next;
  REQUIRE(y >= 0);
  REQUIRE(p.b_safety[y]);

  SUBCASE("accepting successor with alpha 1 and zero next maximum") {
    h.alpha = 1.0;
    Transition t{x, a, 0.0, y, p.actions[y][0], true, false};
    update_qs(q, p, t, h);
    CHECK(q.q_safety[x][0] == doctest::Approx(1e-4).epsilon(1e-12));
  }

  SUBCASE("non-accepting successor decays with no bootstrap") {
    h.alpha = 0.5;
    q.q_safety[x][0] = 0.4;
    // make the next state's row nonzero to prove it is not bootstrapped
    for (auto& v : q.q_safety[y]) v = 0.9;
    Transition t{x, a, 0.0, y, p.actions[y][0], false, false};
    update_qs(q, p, t, h);
    CHECK(q.q_safety[x][0] == doctest::Approx(0.2).epsilon(1e-12));
  }
}

TEST_CASE("update locality: exactly one entry per table changes") {
  auto p = random_product(5);
  QTriple q = QTriple::zeros(p);
  Rng rng(1);
  HyperValues h = end_values();
  for (int x = 0; x < p.num_states(); ++x)
    for (std::size_t i = 0; i < p.actions[x].size(); ++i) {
      q.q_safety[x][i] = rng.uniform();
      q.q_ltl[x][i] = rng.uniform();
      q.q_return[x][i] = rng.uniform();
    }
  QTriple before = q;
  Transition t{0, p.actions[0][0], 1.0, 1, p.actions[1][0], true, true};
  update_qs(q, p, t, h);
  int changed = 0;
  for (int x = 0; x < p.num_states(); ++x)
    for (std::size_t i = 0; i < p.actions[x].size(); ++i) {
      if (q.q_safety[x][i] != before.q_safety[x][i]) ++changed;
      if (q.q_ltl[x][i] != before.q_ltl[x][i]) ++changed;
      if (q.q_return[x][i] != before.q_return[x][i]) ++changed;
    }
  CHECK(changed == 3);
}

TEST_CASE("boundedness: crafted tables stay in [0,1] under any update sequence") {
  auto p = random_product(17);
  QTriple q = QTriple::zeros(p);
  Rng rng(3);
  for (int step = 0; step < 20000; ++step) {
    HyperValues h = end_values();
    h.alpha = 0.05 + 0.9 * rng.uniform();
    h.r_safety = 0.2 * rng.uniform() + 1e-4;
    h.r_ltl = 0.2 * rng.uniform() + 1e-4;
    int x = static_cast<int>(rng.pick(p.num_states()));
    int slot = static_cast<int>(rng.pick(p.actions[x].size()));
    int a = p.actions[x][slot];
    const auto& outs = p.trans[x][slot];
    int y = outs[rng.pick(outs.size())].next;
    Transition t{x,
                 a,
                 p.reward[y],
                 y,
                 p.actions[y][rng.pick(p.actions[y].size())],
                 p.b_safety[y] != 0,
                 p.b_ltl[y] != 0};
    update_qs(q, p, t, h);
  }
  for (int x = 0; x < p.num_states(); ++x)
    for (std::size_t i = 0; i < p.actions[x].size(); ++i) {
      CHECK(q.q_safety[x][i] >= 0.0);
      CHECK(q.q_safety[x][i] <= 1.0);
      CHECK(q.q_ltl[x][i] >= 0.0);
      CHECK(q.q_ltl[x][i] <= 1.0);
    }
}

TEST_CASE("choose_action: all-zero tables tie-break to the lowest action index") {
  auto cs = case_study();
  const auto& p = cs.product;
  QTriple q = QTriple::zeros(p);
  HyperValues h = end_values();
  h.epsilon = 0.0;
  h.upsilon = 0.0;
  Rng rng(123);
  CHECK(choose_action(q, p, p.initial, h, rng) == p.actions[p.initial][0]);
}

TEST_CASE("choose_action: the safety threshold excludes low actions regardless of return") {
  auto cs = case_study();
  const auto& p = cs.product;
  QTriple q = QTriple::zeros(p);
  HyperValues h = end_values();
  h.epsilon = 0.0;
  h.upsilon = 0.0;
  h.tau_safety = 0.05;
  int x = p.initial;
  q.q_safety[x][0] = 0.9;
  q.q_safety[x][1] = 0.5;   // excluded: gap 0.4 > tau
  q.q_return[x][1] = 99.0;  // its return must not matter
  Rng rng(7);
  CHECK(choose_action(q, p, x, h, rng) == p.actions[x][0]);
}

TEST_CASE("nesting: lex set inside safe set inside allowed, all non-empty") {
  auto p = random_product(29);
  QTriple q = QTriple::zeros(p);
  Rng rng(4);
  HyperValues h = end_values();
  for (int step = 0; step < 5000; ++step) {
    int x = static_cast<int>(rng.pick(p.num_states()));
    for (std::size_t i = 0; i < p.actions[x].size(); ++i) {
      q.q_safety[x][i] = rng.uniform();
      q.q_ltl[x][i] = rng.uniform();
    }
    h.tau_safety = rng.uniform();
    h.tau_ltl = rng.uniform();
    LearnedSets sets = learned_action_sets(q, p, x, h);
    REQUIRE_FALSE(sets.safe.empty());
    REQUIRE_FALSE(sets.lex.empty());
    CHECK(sets.safe.size() <= p.actions[x].size());
    std::set<int> safe_set(sets.safe.begin(), sets.safe.end());
    for (int slot : sets.lex) CHECK(safe_set.count(slot));
  }
}

TEST_CASE("with oracle-exact tables, the learned sets equal the oracle sets everywhere") {
  auto cs = case_study();
  const auto& p = cs.product;
  auto r = run_oracle(p);
  QTriple q = oracle_tables(p, 1e-3, 1e-3);
  HyperValues h = end_values();

  for (int x = 0; x < p.num_states(); ++x) {
    LearnedSets sets = learned_action_sets(q, p, x, h);
    std::vector<int> safe, lex;
    for (int slot : sets.safe) safe.push_back(p.actions[x][slot]);
    for (int slot : sets.lex) lex.push_back(p.actions[x][slot]);
    CHECK(safe == r.a_safety[x]);
    CHECK(lex == r.a_lex[x]);
  }
}

TEST_CASE("Q-learning reproduces the exact crafted fixed point on a two-state chain") {
  // a two-state chain plus the absorbing rejecting sink (state 2): state 1
  // accepts both objectives and loops, state 0 risks falling into the sink.
  // Non-accepting safety states must be absorbing for the decay-only branch
  // of the update to be exact, as they are in any real product.
  ProductMdp p;
  p.gamma = 0.9;
  p.initial = 0;
  p.full_state_count = 3;
  p.states = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  p.actions = {{0, 1}, {0}, {0}};
  p.trans = {{{{0, 0.3}, {1, 0.5}, {2, 0.2}}, {{0, 0.9}, {2, 0.1}}},
             {{{1, 1.0}}},
             {{{2, 1.0}}}};
  p.b_safety = {true, true, false};
  p.b_ltl = {false, true, false};
  p.reward = {0.0, 1.0, 0.0};
  p.mdp.action_names = {"go", "stay"};
  p.mdp.reward = p.reward;
  p.mdp.actions = p.actions;
  p.mdp.trans = p.trans;
  p.safety = safety_automaton_true({});
  p.ldba = ldba_true({});

  auto all = full_action_sets(p);
  auto exact_s = exact_crafted_q(p, Crafted::Safety, 0.05, all);
  auto exact_b = exact_crafted_q(p, Crafted::Buchi, 0.05, all);

  QTriple q = QTriple::zeros(p);
  Rng rng(2024);
  for (long step = 0; step < 400000; ++step) {
    HyperValues h;
    h.gamma = p.gamma;
    h.r_safety = 0.05;
    h.r_ltl = 0.05;
    h.alpha = 2000.0 / (2000.0 + static_cast<double>(step));
    h.tau_safety = 1.0;  // keep every action in the bootstrap set
    int x = static_cast<int>(rng.pick(3));
    int slot = static_cast<int>(rng.pick(p.actions[x].size()));
    const auto& outs = p.trans[x][slot];
    double u = rng.uniform(), acc = 0;
    int y = outs.back().next;
    for (const auto& o : outs) {
      acc += o.prob;
      if (u < acc) {
        y = o.next;
        break;
      }
    }
    Transition t{x, p.actions[x][slot], p.reward[y], y, p.actions[y][0],
                 p.b_safety[y] != 0, p.b_ltl[y] != 0};
    update_qs(q, p, t, h);
  }
  for (int x = 0; x < 3; ++x)
    for (std::size_t i = 0; i < p.actions[x].size(); ++i) {
      CHECK(q.q_safety[x][i] == doctest::Approx(exact_s[x][i]).epsilon(2e-3));
      CHECK(q.q_ltl[x][i] == doctest::Approx(exact_b[x][i]).epsilon(2e-3));
    }
}

TEST_CASE("train: zero episodes leaves the tables untouched") {
  auto cs = case_study();
  TrainOptions opt;
  opt.episodes = 0;
  opt.horizon = 10;
  Rng rng(1);
  auto result = train(cs.product, Hyper{}, opt, rng);
  for (const auto& row : result.q.q_safety)
    for (double v : row) CHECK(v == 0.0);
}

TEST_CASE("train is deterministic: same seed, bit-identical tables") {
  auto cs = case_study();
  Hyper h;
  h.set_horizon(50);
  TrainOptions opt;
  opt.episodes = 50;
  opt.horizon = 64;
  Rng rng1(99), rng2(99);
  auto r1 = train(cs.product, h, opt, rng1);
  auto r2 = train(cs.product, h, opt, rng2);
  CHECK(r1.q.q_safety == r2.q.q_safety);
  CHECK(r1.q.q_ltl == r2.q.q_ltl);
  CHECK(r1.q.q_return == r2.q.q_return);
  CHECK(rng1.state() == rng2.state());
}

TEST_CASE("greedy_policy: zero mixing gives point distributions; singletons ignore upsilon") {
  auto cs = case_study();
  const auto& p = cs.product;
  QTriple q = oracle_tables(p, 1e-3, 1e-3);
  HyperValues h = end_values();

  h.upsilon = 0.0;
  auto pure = greedy_policy(q, p, h);
  for (int x = 0; x < p.num_states(); ++x) {
    int with_mass = 0;
    for (const auto& e : pure.at[x])
      if (e.prob > 0) ++with_mass;
    CHECK(with_mass == 1);
  }

  h.upsilon = 0.05;
  auto mixed = greedy_policy(q, p, h);
  auto r = run_oracle(p);
  for (int x = 0; x < p.num_states(); ++x) {
    if (r.a_lex[x].size() != 1) continue;
    REQUIRE(mixed.at[x].size() == 1);
    CHECK(mixed.at[x][0].prob == 1.0);
  }
}

TEST_CASE("greedy policy jumps at (0,5) and mixes exactly in the six recurrent cells") {
  auto cs = case_study();
  const auto& p = cs.product;
  const auto& g = *cs.env.grid;
  QTriple q = oracle_tables(p, 1e-4, 1e-2);
  // the return table: exact values of the best υ-greedy policy
  auto r = run_oracle(p);
  auto best = best_upsilon_greedy(p, r.a_lex, 0.05);
  for (int x = 0; x < p.num_states(); ++x)
    for (std::size_t i = 0; i < p.actions[x].size(); ++i) {
      double v = 0;
      for (const auto& o : p.outcomes(x, p.actions[x][i]))
        v += o.prob * (p.reward[o.next] + p.gamma * best.value[o.next]);
      q.q_return[x][i] = v;
    }

  HyperValues h = end_values();
  h.r_safety = 1e-4;
  auto pi = greedy_policy(q, p, h);

  // on first reaching (0,5) before the jump, the policy takes eps_2
  int x05 = product_state(p, g.cell(0, 5), 0, 0);
  REQUIRE(x05 >= 0);
  int eps2 = p.mdp.num_actions() + 2;
  double eps_mass = 0;
  for (const auto& e : pi.at[x05])
    if (e.action == eps2) eps_mass += e.prob;
  CHECK(eps_mass >= 1.0 - h.upsilon);

  // recurrent cells with a mixed choice: exactly the six from the tour
  // (simulate long runs and record late visits)
  std::set<int> recurrent_cells;
  std::set<int> mixed_cells;
  Rng rng(31);
  for (int episode = 0; episode < 40; ++episode) {
    int x = p.initial;
    for (int t = 0; t < 4000; ++t) {
      const auto& row = pi.at[x];
      double u = rng.uniform(), acc = 0;
      int action = row.back().action;
      for (const auto& e : row) {
        acc += e.prob;
        if (u < acc) {
          action = e.action;
          break;
        }
      }
      x = step_product(p, x, action, rng).next;
      if (t >= 2000) {
        recurrent_cells.insert(p.states[x].env);
        int support = 0;
        for (const auto& e : pi.at[x])
          if (e.prob > 0) ++support;
        if (support > 1) mixed_cells.insert(p.states[x].env);
      }
    }
  }
  std::set<int> expected{g.cell(0, 5), g.cell(1, 5), g.cell(2, 5),
                         g.cell(3, 5), g.cell(4, 5), g.cell(1, 4)};
  CHECK(mixed_cells == expected);
  for (int cell : recurrent_cells) {
    int col = cell % g.cols;
    CHECK(col >= 4);  // the tour never leaves the right region
  }
}

TEST_CASE("evaluate: all-accepting product reports safety frequency 1") {
  auto mdp = fixture_example1();
  auto p = build_product(mdp, safety_automaton_true(mdp.atomic_props), ldba_true({"b"}));
  ProductPolicy pi = uniform_policy(p, full_action_sets(p));
  Rng rng(5);
  auto stats = evaluate(p, pi, 200, 50, rng);
  CHECK(stats.safety_frequency == 1.0);
  CHECK(stats.episodes == 200);
}

TEST_CASE("evaluate matches the exact values on example 1 within two standard errors") {
  auto mdp = fixture_example1();
  auto safety = safety_automaton_true(mdp.atomic_props);
  auto gfb = parse_hoa(read_file(fixture_path("gf_g.hoa")));
  gfb.ap = {"b"};
  auto p = build_product(mdp, safety, gfb);
  auto r = run_oracle(p);

  Rng rng(17);
  for (double upsilon : {0.5, 0.1}) {
    auto mixed = best_upsilon_greedy(p, r.a_lex, upsilon);
    auto stats = evaluate(p, mixed.policy, 3000, 1500, rng);
    CHECK(std::abs(stats.mean_return - mixed.value[p.initial]) <=
          2.0 * stats.stderr_return + 0.05);
    CHECK(stats.buchi_frequency > 0.95);
  }
}

TEST_CASE("greedy policy from oracle tables never violates safety in simulation") {
  auto cs = case_study();
  const auto& p = cs.product;
  QTriple q = oracle_tables(p, 1e-4, 1e-2);
  HyperValues h = end_values();
  h.r_safety = 1e-4;
  auto pi = greedy_policy(q, p, h);
  Rng rng(21);
  auto stats = evaluate(p, pi, 10000, 200, rng);
  CHECK(stats.safety_frequency == 1.0);
}

TEST_CASE("checkpoints round-trip") {
  auto cs = case_study();
  const auto& p = cs.product;
  Hyper h;
  h.set_horizon(20);
  TrainOptions opt;
  opt.episodes = 20;
  opt.horizon = 32;
  Rng rng(3);
  auto result = train(p, h, opt, rng);
  std::string text = checkpoint_to_json(p, result.q, 20, rng.state(), "cafe");
  auto ck = checkpoint_from_json(p, text);
  CHECK(ck.q.q_safety == result.q.q_safety);
  CHECK(ck.q.q_ltl == result.q.q_ltl);
  CHECK(ck.q.q_return == result.q.q_return);
  CHECK(ck.episode == 20);
  CHECK(ck.config_hash == "cafe");
  CHECK(checkpoint_to_json(p, ck.q, ck.episode, ck.rng_state, ck.config_hash) == text);
}

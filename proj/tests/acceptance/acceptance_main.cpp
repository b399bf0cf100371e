// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one PASS/FAIL line each. The paper-scale reproduction (criterion 7)
// only runs when LEXIRL_PAPER_SCALE=1 or --paper-scale is given; it trains
// for ~1.3e8 steps.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <set>
#include <vector>

#include "lexirl/hoa.hpp"
#include "lexirl/learn.hpp"
#include "lexirl/oracle.hpp"
#include "lexirl/util.hpp"
#include "support/brute_force.hpp"
#include "support/fixtures.hpp"
#include "support/ltl_semantics.hpp"

using namespace lexirl;
using namespace lexirl::testing;

namespace {

int failures = 0;

class Criterion {
 public:
  Criterion(int number, const std::string& name, double budget_seconds)
      : number_(number), name_(name), budget_(budget_seconds),
        start_(std::chrono::steady_clock::now()) {}

  void check(bool ok, const std::string& what) {
    if (!ok) problems_.push_back(what);
  }

  void finish() {
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
                         .count();
    if (budget_ > 0 && elapsed > budget_)
      problems_.push_back("runtime " + std::to_string(elapsed) + "s exceeds " +
                          std::to_string(budget_) + "s");
    std::printf("[%d] %-58s %s (%.2fs)\n", number_, name_.c_str(),
                problems_.empty() ? "PASS" : "FAIL", elapsed);
    for (const auto& p : problems_) std::printf("      - %s\n", p.c_str());
    if (!problems_.empty()) ++failures;
  }

 private:
  int number_;
  std::string name_;
  double budget_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::string> problems_;
};

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

void criterion_1_product_size() {
  Criterion c(1, "product size: 30x3x3 = 270 states before pruning", 1.0);
  auto cs = case_study();
  c.check(cs.env.mdp.num_states() == 30, "grid must have 30 states");
  c.check(cs.safety.num_states() == 3, "safety automaton must have 3 states");
  c.check(cs.ldba.num_states() == 3, "LDBA must have 3 states");
  c.check(cs.product.full_state_count == 270,
          "full product count is " + std::to_string(cs.product.full_state_count));
  c.finish();
}

void criterion_2_oracle_probabilities() {
  Criterion c(2, "oracle probabilities 1.0 / 0.64 / 0.8 / 0.36 (tol 1e-6)", 10.0);
  auto cs = case_study();
  const auto& p = cs.product;
  auto r = run_oracle(p);
  c.check(close(r.pr_safety[p.initial], 1.0, 1e-6),
          "max safety at the initial state: " + format_double(r.pr_safety[p.initial]));
  c.check(close(r.pr_buchi_restricted[p.initial], 0.64, 1e-6),
          "restricted Büchi at the initial state: " +
              format_double(r.pr_buchi_restricted[p.initial]));

  std::vector<bool> combined(p.num_states());
  for (int x = 0; x < p.num_states(); ++x) combined[x] = p.b_safety[x] && p.b_ltl[x];
  auto pr_combined = max_buchi_prob(p, full_action_sets(p), combined);
  c.check(close(pr_combined[p.initial], 0.8, 1e-6),
          "combined objective at the initial state: " + format_double(pr_combined[p.initial]));

  std::vector<bool> trap(p.num_states(), false);
  const auto& g = *cs.env.grid;
  for (int x = 0; x < p.num_states(); ++x)
    for (int cell : {g.cell(2, 2), g.cell(2, 3), g.cell(4, 2), g.cell(4, 3)})
      if (p.states[x].env == cell) trap[x] = true;
  auto reach_trap = chain_reach_prob(p, uniform_policy(p, r.a_lex), trap);
  c.check(close(reach_trap[p.initial], 0.36, 1e-6),
          "absorbing-trap probability: " + format_double(reach_trap[p.initial]));
  c.finish();
}

void criterion_3_crafted_convergence() {
  Criterion c(3, "crafted-value gaps shrink with r; sets match at (1e-3, 1e-2)", 30.0);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto p = random_product(seed);
    auto all = full_action_sets(p);
    auto pr_safety = max_safety_prob(p);
    auto a_safety = safe_action_sets(p, pr_safety);
    auto pr_buchi = max_buchi_prob(p, a_safety,
                                   std::vector<bool>(p.b_ltl.begin(), p.b_ltl.end()));
    auto a_lex = ltl_action_sets(p, a_safety, pr_buchi);

    double prev_s = 1e18, prev_b = 1e18;
    for (double r : {1e-1, 1e-2, 1e-3}) {
      auto qs = exact_crafted_q(p, Crafted::Safety, r, all);
      auto qb = exact_crafted_q(p, Crafted::Buchi, r, a_safety);
      // state-action gaps in the successor-based convention of the action
      // sets: Pr((s,a) |= phi) backs up through the successors
      double gap_s = 0, gap_b = 0;
      for (int x = 0; x < p.num_states(); ++x) {
        for (std::size_t i = 0; i < all[x].size(); ++i) {
          double backup = 0;
          for (const auto& o : p.outcomes(x, all[x][i])) backup += o.prob * pr_safety[o.next];
          gap_s = std::max(gap_s, std::abs(qs[x][i] - backup));
        }
        for (std::size_t i = 0; i < a_safety[x].size(); ++i) {
          double backup = 0;
          for (const auto& o : p.outcomes(x, a_safety[x][i])) backup += o.prob * pr_buchi[o.next];
          gap_b = std::max(gap_b, std::abs(qb[x][i] - backup));
        }
      }
      c.check(gap_s <= prev_s + 1e-12,
              "seed " + std::to_string(seed) + ": safety gap not monotone at r=" +
                  format_double(r));
      c.check(gap_b <= prev_b + 1e-12,
              "seed " + std::to_string(seed) + ": Büchi gap not monotone at r=" +
                  format_double(r));
      prev_s = gap_s;
      prev_b = gap_b;
      if (r == 1e-3) {
        c.check(gap_s <= 0.02, "seed " + std::to_string(seed) + ": safety gap " +
                                    format_double(gap_s) + " exceeds 0.02");
        c.check(gap_b <= 0.02, "seed " + std::to_string(seed) + ": Büchi gap " +
                                    format_double(gap_b) + " exceeds 0.02");
        auto sets_s = thresholded_action_sets(p, all, qs, 1e-2);
        auto sets_b = thresholded_action_sets(p, a_safety, qb, 1e-2);
        bool same_s = true, same_b = true;
        for (int x = 0; x < p.num_states(); ++x) {
          same_s = same_s && sets_s[x] == a_safety[x];
          same_b = same_b && sets_b[x] == a_lex[x];
        }
        c.check(same_s, "seed " + std::to_string(seed) + ": thresholded safety sets differ");
        c.check(same_b, "seed " + std::to_string(seed) + ": thresholded Büchi sets differ");
      }
    }
  }
  c.finish();
}

void criterion_4_brute_force() {
  Criterion c(4, "oracle equals exhaustive pure-policy enumeration (1e-9)", 60.0);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto p = random_product(seed);
    auto safety = max_safety_prob(p);
    auto brute_s = brute_max_safety(p);
    auto buchi = max_buchi_prob(p, full_action_sets(p),
                                std::vector<bool>(p.b_ltl.begin(), p.b_ltl.end()));
    auto brute_b = brute_max_buchi(p, std::vector<bool>(p.b_ltl.begin(), p.b_ltl.end()));
    for (int x = 0; x < p.num_states(); ++x) {
      c.check(close(safety[x], brute_s[x], 1e-9),
              "seed " + std::to_string(seed) + " state " + std::to_string(x) + ": safety " +
                  format_double(safety[x]) + " vs brute " + format_double(brute_s[x]));
      c.check(close(buchi[x], brute_b[x], 1e-9),
              "seed " + std::to_string(seed) + " state " + std::to_string(x) + ": Büchi " +
                  format_double(buchi[x]) + " vs brute " + format_double(brute_b[x]));
    }
  }
  c.finish();
}

void criterion_5_learner_convergence() {
  Criterion c(5, "desk-scale learning matches the oracle on hot states", 300.0);
  auto env = load_environment(fixture_path("toy3x3.grid"));
  auto safety = safety_to_automaton(parse_ltl("[](!u)", env.mdp.atomic_props));
  auto ldba = parse_hoa(read_file(fixture_path("gf_g.hoa")));
  auto p = build_product(env.mdp, safety, ldba);

  Hyper h;
  h.gamma = 0.99;
  h.r_safety = 1e-3;
  h.r_ltl = 1e-2;
  h.alpha = {0.5, 0.05, 1, Schedule::Shape::Geometric};
  h.epsilon = {0.5, 0.1, 1, Schedule::Shape::Geometric};
  h.upsilon = {0.5, 0.05, 1, Schedule::Shape::Geometric};
  h.tau_safety = {0.5, 0.05, 1, Schedule::Shape::Geometric};
  h.tau_ltl = {0.5, 0.05, 1, Schedule::Shape::Geometric};
  h.set_horizon(2000);

  TrainOptions opt;
  opt.episodes = 2000;
  opt.horizon = 200;
  Rng rng(7);
  auto result = train(p, h, opt, rng);

  auto oracle = run_oracle(p);
  auto exact_qs = exact_crafted_q(p, Crafted::Safety, h.r_safety, full_action_sets(p));
  HyperValues hv = hyper_at(h, opt.episodes);

  long hot = 0, agree_safe = 0, agree_lex = 0;
  double q_gap = 0;
  for (int x = 0; x < p.num_states(); ++x) {
    if (result.visits[x] < 100) continue;
    ++hot;
    LearnedSets sets = learned_action_sets(result.q, p, x, hv);
    std::vector<int> safe, lex;
    for (int slot : sets.safe) safe.push_back(p.actions[x][slot]);
    for (int slot : sets.lex) lex.push_back(p.actions[x][slot]);
    agree_safe += safe == oracle.a_safety[x];
    agree_lex += lex == oracle.a_lex[x];
    for (std::size_t i = 0; i < p.actions[x].size(); ++i)
      q_gap = std::max(q_gap, std::abs(result.q.q_safety[x][i] - exact_qs[x][i]));
  }
  c.check(hot >= 10, "only " + std::to_string(hot) + " states were visited 100+ times");
  c.check(agree_safe * 100 >= hot * 95,
          "safe-set agreement " + std::to_string(agree_safe) + "/" + std::to_string(hot));
  c.check(agree_lex * 100 >= hot * 95,
          "lex-set agreement " + std::to_string(agree_lex) + "/" + std::to_string(hot));
  c.check(q_gap <= 5e-2, "Q_safety sup gap on hot states: " + format_double(q_gap));
  c.finish();
}

void criterion_6_example1_mixing() {
  Criterion c(6, "mixing on the two-state counterexample: Büchi 1, return rising", 1.0);
  auto mdp = fixture_example1();
  auto safety = safety_automaton_true(mdp.atomic_props);
  auto gfb = parse_hoa(read_file(fixture_path("gf_g.hoa")));
  gfb.ap = {"b"};
  auto p = build_product(mdp, safety, gfb);
  auto r = run_oracle(p);

  double prev = -1;
  for (double upsilon : {0.5, 0.2, 0.1, 0.05}) {
    auto mixed = best_upsilon_greedy(p, r.a_lex, upsilon);
    auto buchi = exact_policy_value(p, mixed.policy, Objective::BuchiProb);
    c.check(buchi[p.initial] == 1.0,
            "Büchi probability at upsilon=" + format_double(upsilon) + ": " +
                format_double(buchi[p.initial]));
    c.check(mixed.value[p.initial] > prev,
            "return not increasing at upsilon=" + format_double(upsilon));
    prev = mixed.value[p.initial];
  }
  c.check(prev < 100.0 && prev > 95.0,
          "return at upsilon=0.05 should approach 100, got " + format_double(prev));
  c.finish();
}

void criterion_7_paper_scale(bool enabled) {
  if (!enabled) {
    std::printf("[7] %-58s SKIPPED (set LEXIRL_PAPER_SCALE=1; ~1.3e8 training steps)\n",
                "paper-scale reproduction: return in [80,88], no violations");
    return;
  }
  Criterion c(7, "paper-scale reproduction: return in [80,88], no violations", 0.0);
  auto cs = case_study();
  const auto& p = cs.product;

  Hyper h;
  h.gamma = 0.99;
  h.r_safety = 1e-4;
  h.r_ltl = 1e-2;
  h.alpha = {0.5, 0.05, 1, Schedule::Shape::Geometric};
  h.epsilon = {0.5, 0.005, 1, Schedule::Shape::Geometric};
  h.upsilon = {0.5, 0.05, 1, Schedule::Shape::Geometric};
  h.tau_safety = {0.5, 0.05, 1, Schedule::Shape::Geometric};
  h.tau_ltl = {0.5, 0.05, 1, Schedule::Shape::Geometric};
  const long episodes = 131072;  // 128K episodes of 1K steps
  h.set_horizon(episodes);

  TrainOptions opt;
  opt.episodes = episodes;
  opt.horizon = 1024;
  Rng rng(1);
  auto result = train(p, h, opt, rng);

  HyperValues hv = hyper_at(h, episodes);
  auto pi = greedy_policy(result.q, p, hv);

  // oracle optimum of the upsilon-greedy family, from the region after (0,5)
  auto oracle = run_oracle(p);
  auto best = best_upsilon_greedy(p, oracle.a_lex, hv.upsilon);
  const auto& g = *cs.env.grid;
  int x05 = product_state(p, g.cell(0, 5), 0, 0);
  double optimum = best.value[x05];
  c.check(optimum >= 85.0 && optimum <= 91.0,
          "oracle optimum after reaching (0,5) should be about 88, got " +
              format_double(optimum));

  // empirical return of the learned greedy policy measured from (0,5)
  ProductMdp from05 = p;
  from05.initial = x05;
  Rng eval_rng(2);
  auto stats = evaluate(from05, pi, 10000, 1024, eval_rng);
  c.check(stats.mean_return >= 80.0 && stats.mean_return <= 88.0,
          "learned greedy return from (0,5): " + format_double(stats.mean_return));

  Rng eval_rng2(3);
  auto from_start = evaluate(p, pi, 10000, 1024, eval_rng2);
  c.check(from_start.safety_frequency == 1.0,
          "observed safety violations: " +
              format_double(1.0 - from_start.safety_frequency));
  c.check(from_start.buchi_frequency == 1.0 ? true : from_start.buchi_frequency > 0.6,
          "Büchi tail-visit frequency: " + format_double(from_start.buchi_frequency));
  c.finish();
}

void criterion_8_automata() {
  Criterion c(8, "safety translation vs bounded semantics; HOA fixpoint", 30.0);
  const std::vector<std::string> ab{"a", "b"};
  const char* corpus[25] = {
      "true",
      "false",
      "a",
      "!a",
      "a & b",
      "a | b",
      "a -> b",
      "X a",
      "X X b",
      "X (a & b)",
      "[]a",
      "[]!a",
      "[](a | b)",
      "[](a -> X b)",
      "[](!(a & X a))",
      "[](a -> X !a)",
      "a & X []b",
      "[]a | []b",
      "[](a & X a -> X X b)",
      "[](!a | X b)",
      "[]X a",
      "X []a",
      "[]([]a | b)",
      "a & [](a -> X a)",
      "[](X a | X b)",
  };
  long words = 0;
  for (const char* text : corpus) {
    auto f = parse_ltl(text, ab);
    if (!is_syntactic_safety(f)) {
      c.check(false, std::string("corpus formula outside the fragment: ") + text);
      continue;
    }
    auto a = safety_to_automaton(f);
    // all lassos with prefix+loop length up to 8 over two propositions
    bool bad = false;
    for (int n = 1; n <= 8 && !bad; ++n) {
      std::vector<Letter> word(n, 0);
      for (;;) {
        for (int split = 0; split < n && !bad; ++split) {
          std::vector<Letter> prefix(word.begin(), word.begin() + split);
          std::vector<Letter> loop(word.begin() + split, word.end());
          ++words;
          if (lasso_models(f.root, prefix, loop) != safety_accepts_lasso(a, prefix, loop)) {
            c.check(false, std::string(text) + " disagrees on a lasso of length " +
                               std::to_string(n));
            bad = true;
          }
        }
        if (bad) break;
        int pos = 0;
        while (pos < n) {
          if (static_cast<int>(++word[pos]) < 4) break;
          word[pos++] = 0;
        }
        if (pos == n) break;
      }
    }
  }
  c.check(words > 1000000, "lasso coverage too small: " + std::to_string(words));

  for (const char* name : {"gf_b_fg_c.hoa", "gf_g.hoa", "all_accept.hoa"}) {
    auto once = print_hoa(parse_hoa(read_file(fixture_path(name))));
    auto twice = print_hoa(parse_hoa(once));
    c.check(once == twice, std::string("HOA fixpoint fails for ") + name);
  }
  c.finish();
}

}  // namespace

int main(int argc, char** argv) {
  bool paper_scale = false;
  const char* env = std::getenv("LEXIRL_PAPER_SCALE");
  if (env && std::strcmp(env, "1") == 0) paper_scale = true;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--paper-scale") == 0) paper_scale = true;

  criterion_1_product_size();
  criterion_2_oracle_probabilities();
  criterion_3_crafted_convergence();
  criterion_4_brute_force();
  criterion_5_learner_convergence();
  criterion_6_example1_mixing();
  criterion_7_paper_scale(paper_scale);
  criterion_8_automata();

  if (failures) {
    std::printf("%d criterion(s) FAILED\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}

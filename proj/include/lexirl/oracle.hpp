#pragma once

#include <string>
#include <vector>

#include "lexirl/product.hpp"

namespace lexirl {

/// Per product state: a subset of its allowed product actions.
using ActionSets = std::vector<std::vector<int>>;

ActionSets full_action_sets(const ProductMdp& p);

/// Maximal end components of the product restricted to `allowed`.
struct MecComponent {
  std::vector<int> states;                  // sorted product state indices
  std::vector<std::vector<int>> retained;   // actions kept, parallel to states
};

struct MecDecomposition {
  std::vector<MecComponent> components;
  std::vector<int> component_of;  // -1 when the state is in no component
};

MecDecomposition mec_decomposition(const ProductMdp& p, const ActionSets& allowed);

/// Pr_max of staying in B×_psi forever, per product state. Qualitative
/// pre-step (controlled-invariant kernel and graph reachability) pins exact
/// 0/1 values; the rest is iterated to a sup-norm residual of 1e-13.
std::vector<double> max_safety_prob(const ProductMdp& p);

/// Actions achieving the one-step backup maximum of pr within 1e-9.
ActionSets safe_action_sets(const ProductMdp& p, const std::vector<double>& pr_safety);

/// Pr_max of visiting `accepting` infinitely often, restricted to `allowed`:
/// maximal reachability of the union of accepting MECs.
std::vector<double> max_buchi_prob(const ProductMdp& p, const ActionSets& allowed,
                                   const std::vector<bool>& accepting);

ActionSets ltl_action_sets(const ProductMdp& p, const ActionSets& allowed,
                           const std::vector<double>& pr_buchi);

/// Crafted-reward optimal state-action values (Howard policy iteration with
/// exact linear solves; Bellman residual of the result is below 1e-12).
/// Safety crafting: reward r on entering B×_psi, constant discount 1-r.
/// Büchi crafting: reward r on entering B×_phi, discount 1-r inside, 1-r^2
/// outside. Values are maxima over continuations within `allowed`.
enum class Crafted { Safety, Buchi };
std::vector<std::vector<double>> exact_crafted_q(const ProductMdp& p, Crafted which, double r,
                                                 const ActionSets& allowed);

/// Near-optimal action sets from a crafted q table: value gap at most tau.
ActionSets thresholded_action_sets(const ProductMdp& p, const ActionSets& allowed,
                                   const std::vector<std::vector<double>>& q, double tau);

/// Expand a crafted q table computed over a restricted action set to full
/// allowed-action rows: every action backs up once through the restricted
/// continuation values (what the learner's tables converge to on experienced
/// actions).
std::vector<std::vector<double>> expand_crafted_q(
    const ProductMdp& p, Crafted which, double r,
    const std::vector<std::vector<double>>& q_restricted);

enum class Objective { QocReturn, SafetyProb, BuchiProb };

/// Exact evaluation of a fixed memoryless product policy: linear solve for
/// the discounted return, bottom-SCC analysis for the probability objectives.
std::vector<double> exact_policy_value(const ProductMdp& p, const ProductPolicy& pi,
                                       Objective obj);

/// Probability of visiting a custom accepting set infinitely often under a
/// fixed policy (chain analysis).
std::vector<double> chain_buchi_prob(const ProductMdp& p, const ProductPolicy& pi,
                                     const std::vector<bool>& accepting);

/// Probability of ever reaching `target` under a fixed policy.
std::vector<double> chain_reach_prob(const ProductMdp& p, const ProductPolicy& pi,
                                     const std::vector<bool>& target);

/// Uniform distribution over the given action subsets.
ProductPolicy uniform_policy(const ProductMdp& p, const ActionSets& sets);

/// Best policy of the υ-greedy family over `allowed`: with probability υ a
/// uniform action from allowed(s), otherwise the policy's own choice.
/// Optimizes the deterministic part for expected discounted return by policy
/// iteration over the blended kernel.
struct UpsilonGreedy {
  ProductPolicy policy;
  std::vector<double> value;
};
UpsilonGreedy best_upsilon_greedy(const ProductMdp& p, const ActionSets& allowed,
                                  double upsilon);

struct OracleResult {
  std::vector<double> pr_safety;
  std::vector<double> pr_buchi_restricted;  // under A_psi
  ActionSets a_safety;  // A×_psi
  ActionSets a_lex;     // A×_{psi,phi}
  double safety_residual = 0.0;
  double buchi_residual = 0.0;
};

OracleResult run_oracle(const ProductMdp& p);
std::string oracle_report_json(const ProductMdp& p, const OracleResult& r);

}  // namespace lexirl

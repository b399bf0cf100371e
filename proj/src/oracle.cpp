#include "lexirl/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <stdexcept>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "lexirl/util.hpp"

namespace lexirl {

using nlohmann::json;

namespace {

constexpr double kIterTol = 1e-13;
constexpr double kSetTol = 1e-9;
constexpr int kMaxIter = 1000000;

// Tarjan strongly connected components over an explicit adjacency list.
// Returns component ids in reverse topological order of discovery.
std::vector<int> scc_ids(int n, const std::vector<std::vector<int>>& adj, int& count) {
  std::vector<int> low(n, -1), num(n, -1), comp(n, -1), stk;
  std::vector<bool> on(n, false);
  int index = 0;
  count = 0;
  // iterative Tarjan
  struct Frame {
    int v;
    std::size_t edge;
  };
  for (int root = 0; root < n; ++root) {
    if (num[root] != -1) continue;
    std::vector<Frame> call{{root, 0}};
    while (!call.empty()) {
      auto& f = call.back();
      int v = f.v;
      if (f.edge == 0) {
        num[v] = low[v] = index++;
        stk.push_back(v);
        on[v] = true;
      }
      bool descended = false;
      while (f.edge < adj[v].size()) {
        int w = adj[v][f.edge++];
        if (num[w] == -1) {
          call.push_back({w, 0});
          descended = true;
          break;
        }
        if (on[w]) low[v] = std::min(low[v], num[w]);
      }
      if (descended) continue;
      if (low[v] == num[v]) {
        for (;;) {
          int w = stk.back();
          stk.pop_back();
          on[w] = false;
          comp[w] = count;
          if (w == v) break;
        }
        ++count;
      }
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
    }
  }
  return comp;
}

// value iteration with frozen 0/1 states; returns the final residual
double iterate_values(const ProductMdp& p, const ActionSets& allowed, std::vector<double>& v,
                      const std::vector<bool>& frozen) {
  double residual = 0.0;
  for (int it = 0; it < kMaxIter; ++it) {
    residual = 0.0;
    for (int x = 0; x < p.num_states(); ++x) {
      if (frozen[x]) continue;
      double best = 0.0;
      for (int a : allowed[x]) {
        double q = 0.0;
        for (const auto& o : p.outcomes(x, a)) q += o.prob * v[o.next];
        best = std::max(best, q);
      }
      residual = std::max(residual, std::abs(best - v[x]));
      v[x] = best;  // Gauss-Seidel sweep
    }
    if (residual <= kIterTol) break;
  }
  return residual;
}

std::vector<std::vector<int>> support_graph(const ProductMdp& p, const ActionSets& allowed) {
  std::vector<std::vector<int>> adj(p.num_states());
  for (int x = 0; x < p.num_states(); ++x)
    for (int a : allowed[x])
      for (const auto& o : p.outcomes(x, a))
        if (o.prob > 0) adj[x].push_back(o.next);
  return adj;
}

// states that can reach `target` through positive-probability edges
std::vector<bool> can_reach(const ProductMdp& p, const ActionSets& allowed,
                            const std::vector<bool>& target) {
  std::vector<std::vector<int>> radj(p.num_states());
  for (int x = 0; x < p.num_states(); ++x)
    for (int a : allowed[x])
      for (const auto& o : p.outcomes(x, a))
        if (o.prob > 0) radj[o.next].push_back(x);
  std::vector<bool> seen(p.num_states(), false);
  std::deque<int> work;
  for (int x = 0; x < p.num_states(); ++x)
    if (target[x]) {
      seen[x] = true;
      work.push_back(x);
    }
  while (!work.empty()) {
    int x = work.front();
    work.pop_front();
    for (int y : radj[x])
      if (!seen[y]) {
        seen[y] = true;
        work.push_back(y);
      }
  }
  return seen;
}

// Pr_max = 1 set for reaching `target` within `allowed` (classic nu-mu fixpoint)
std::vector<bool> prob1e_reach(const ProductMdp& p, const ActionSets& allowed,
                               const std::vector<bool>& target) {
  const int n = p.num_states();
  std::vector<bool> y(n, true);
  for (;;) {
    // attractor of target inside y
    std::vector<bool> z(n, false);
    for (int x = 0; x < n; ++x) z[x] = target[x] && y[x];
    bool grew = true;
    while (grew) {
      grew = false;
      for (int x = 0; x < n; ++x) {
        if (z[x]) continue;
        for (int a : allowed[x]) {
          bool stays = true, hits = false;
          for (const auto& o : p.outcomes(x, a)) {
            if (o.prob <= 0) continue;
            if (!y[o.next]) stays = false;
            if (z[o.next]) hits = true;
          }
          if (stays && hits) {
            z[x] = true;
            grew = true;
            break;
          }
        }
      }
    }
    if (z == y) return y;
    y = z;
  }
}

Eigen::VectorXd solve_linear(const Eigen::MatrixXd& m, const Eigen::VectorXd& b) {
  return m.partialPivLu().solve(b);
}

// chain analysis helpers for a fixed policy
struct Chain {
  std::vector<std::vector<Outcome>> rows;  // per state
};

Chain make_chain(const ProductMdp& p, const ProductPolicy& pi) {
  Chain c;
  c.rows.resize(p.num_states());
  for (int x = 0; x < p.num_states(); ++x) {
    std::map<int, double> mass;
    for (const auto& e : pi.at[x]) {
      if (e.prob <= 0) continue;
      for (const auto& o : p.outcomes(x, e.action)) mass[o.next] += e.prob * o.prob;
    }
    for (const auto& [y, pr] : mass) c.rows[x].push_back({y, pr});
  }
  return c;
}

// probability of reaching a state set with value 1, where `zero` states have
// value 0; everything else is transient and solved exactly
std::vector<double> chain_absorption(const Chain& c, const std::vector<bool>& one,
                                     const std::vector<bool>& zero) {
  const int n = static_cast<int>(c.rows.size());
  std::vector<int> sys_index(n, -1);
  std::vector<int> sys_states;
  for (int x = 0; x < n; ++x)
    if (!one[x] && !zero[x]) {
      sys_index[x] = static_cast<int>(sys_states.size());
      sys_states.push_back(x);
    }
  std::vector<double> v(n, 0.0);
  for (int x = 0; x < n; ++x)
    if (one[x]) v[x] = 1.0;
  if (!sys_states.empty()) {
    const int m = static_cast<int>(sys_states.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < m; ++i) {
      for (const auto& o : c.rows[sys_states[i]]) {
        if (one[o.next])
          b(i) += o.prob;
        else if (sys_index[o.next] >= 0)
          a(i, sys_index[o.next]) -= o.prob;
      }
    }
    Eigen::VectorXd sol = solve_linear(a, b);
    for (int i = 0; i < m; ++i) v[sys_states[i]] = sol(i);
  }
  return v;
}

// bottom SCCs of the chain's support graph
std::vector<int> bottom_scc_ids(const Chain& c, int& count, std::vector<bool>& is_bottom) {
  const int n = static_cast<int>(c.rows.size());
  std::vector<std::vector<int>> adj(n);
  for (int x = 0; x < n; ++x)
    for (const auto& o : c.rows[x])
      if (o.prob > 0) adj[x].push_back(o.next);
  auto comp = scc_ids(n, adj, count);
  is_bottom.assign(count, true);
  for (int x = 0; x < n; ++x)
    for (int y : adj[x])
      if (comp[y] != comp[x]) is_bottom[comp[x]] = false;
  // states with no outgoing mass at all (cannot happen for valid policies)
  for (int x = 0; x < n; ++x)
    if (adj[x].empty()) is_bottom[comp[x]] = false;
  return comp;
}

}  // namespace

ActionSets full_action_sets(const ProductMdp& p) {
  ActionSets sets(p.num_states());
  for (int x = 0; x < p.num_states(); ++x) sets[x] = p.actions[x];
  return sets;
}

MecDecomposition mec_decomposition(const ProductMdp& p, const ActionSets& allowed) {
  const int n = p.num_states();
  std::vector<std::vector<int>> act(allowed.begin(), allowed.end());
  std::vector<bool> alive(n, true);

  bool changed = true;
  std::vector<int> comp;
  int comp_count = 0;
  while (changed) {
    changed = false;
    // drop actions that can leave the alive set
    for (int x = 0; x < n; ++x) {
      if (!alive[x]) continue;
      auto& as = act[x];
      for (std::size_t i = 0; i < as.size();) {
        bool ok = true;
        for (const auto& o : p.outcomes(x, as[i]))
          if (o.prob > 0 && !alive[o.next]) ok = false;
        if (!ok) {
          as.erase(as.begin() + i);
          changed = true;
        } else {
          ++i;
        }
      }
    }
    // SCCs of the remaining support graph
    std::vector<std::vector<int>> adj(n);
    for (int x = 0; x < n; ++x)
      if (alive[x])
        for (int a : act[x])
          for (const auto& o : p.outcomes(x, a))
            if (o.prob > 0) adj[x].push_back(o.next);
    comp = scc_ids(n, adj, comp_count);
    // drop actions that leave their component
    for (int x = 0; x < n; ++x) {
      if (!alive[x]) continue;
      auto& as = act[x];
      for (std::size_t i = 0; i < as.size();) {
        bool ok = true;
        for (const auto& o : p.outcomes(x, as[i]))
          if (o.prob > 0 && comp[o.next] != comp[x]) ok = false;
        if (!ok) {
          as.erase(as.begin() + i);
          changed = true;
        } else {
          ++i;
        }
      }
      if (as.empty() && alive[x]) {
        alive[x] = false;
        changed = true;
      }
    }
  }

  MecDecomposition mec;
  mec.component_of.assign(n, -1);
  std::vector<int> comp_to_mec(comp_count, -1);
  for (int x = 0; x < n; ++x) {
    if (!alive[x]) continue;
    int c = comp[x];
    if (comp_to_mec[c] < 0) {
      comp_to_mec[c] = static_cast<int>(mec.components.size());
      mec.components.emplace_back();
    }
    auto& m = mec.components[comp_to_mec[c]];
    mec.component_of[x] = comp_to_mec[c];
    m.states.push_back(x);
    m.retained.push_back(act[x]);
  }
  return mec;
}

std::vector<double> max_safety_prob(const ProductMdp& p) {
  const int n = p.num_states();
  auto allowed = full_action_sets(p);

  // controlled-invariant kernel of B: the exact Pr=1 region
  std::vector<bool> kernel(p.b_safety.begin(), p.b_safety.end());
  bool changed = true;
  while (changed) {
    changed = false;
    for (int x = 0; x < n; ++x) {
      if (!kernel[x]) continue;
      bool ok = false;
      for (int a : allowed[x]) {
        bool stays = true;
        for (const auto& o : p.outcomes(x, a))
          if (o.prob > 0 && !kernel[o.next]) stays = false;
        if (stays) {
          ok = true;
          break;
        }
      }
      if (!ok) {
        kernel[x] = false;
        changed = true;
      }
    }
  }

  // states that can reach the kernel while staying inside B
  std::vector<std::vector<int>> radj(n);
  for (int x = 0; x < n; ++x) {
    if (!p.b_safety[x]) continue;
    for (int a : allowed[x])
      for (const auto& o : p.outcomes(x, a))
        if (o.prob > 0 && p.b_safety[o.next]) radj[o.next].push_back(x);
  }
  std::vector<bool> positive(n, false);
  std::deque<int> work;
  for (int x = 0; x < n; ++x)
    if (kernel[x]) {
      positive[x] = true;
      work.push_back(x);
    }
  while (!work.empty()) {
    int x = work.front();
    work.pop_front();
    for (int y : radj[x])
      if (!positive[y]) {
        positive[y] = true;
        work.push_back(y);
      }
  }

  std::vector<double> v(n, 0.0);
  std::vector<bool> frozen(n, false);
  for (int x = 0; x < n; ++x) {
    if (kernel[x]) {
      v[x] = 1.0;
      frozen[x] = true;
    } else if (!p.b_safety[x] || !positive[x]) {
      v[x] = 0.0;
      frozen[x] = true;
    }
  }
  iterate_values(p, allowed, v, frozen);
  return v;
}

ActionSets safe_action_sets(const ProductMdp& p, const std::vector<double>& pr_safety) {
  ActionSets sets(p.num_states());
  for (int x = 0; x < p.num_states(); ++x) {
    double best = -1.0;
    std::vector<double> backup;
    for (int a : p.actions[x]) {
      double q = 0.0;
      for (const auto& o : p.outcomes(x, a)) q += o.prob * pr_safety[o.next];
      backup.push_back(q);
      best = std::max(best, q);
    }
    for (std::size_t i = 0; i < p.actions[x].size(); ++i)
      if (backup[i] >= best - kSetTol) sets[x].push_back(p.actions[x][i]);
  }
  return sets;
}

std::vector<double> max_buchi_prob(const ProductMdp& p, const ActionSets& allowed,
                                   const std::vector<bool>& accepting) {
  const int n = p.num_states();
  auto mec = mec_decomposition(p, allowed);

  std::vector<bool> target(n, false);
  for (const auto& comp : mec.components) {
    bool acc = false;
    for (int x : comp.states)
      if (accepting[x]) acc = true;
    if (acc)
      for (int x : comp.states) target[x] = true;
  }

  auto positive = can_reach(p, allowed, target);
  auto certain = prob1e_reach(p, allowed, target);

  std::vector<double> v(n, 0.0);
  std::vector<bool> frozen(n, false);
  for (int x = 0; x < n; ++x) {
    if (certain[x]) {
      v[x] = 1.0;
      frozen[x] = true;
    } else if (!positive[x]) {
      frozen[x] = true;
    }
  }
  iterate_values(p, allowed, v, frozen);
  return v;
}

ActionSets ltl_action_sets(const ProductMdp& p, const ActionSets& allowed,
                           const std::vector<double>& pr_buchi) {
  ActionSets sets(p.num_states());
  for (int x = 0; x < p.num_states(); ++x) {
    double best = -1.0;
    std::vector<double> backup;
    for (int a : allowed[x]) {
      double q = 0.0;
      for (const auto& o : p.outcomes(x, a)) q += o.prob * pr_buchi[o.next];
      backup.push_back(q);
      best = std::max(best, q);
    }
    for (std::size_t i = 0; i < allowed[x].size(); ++i)
      if (backup[i] >= best - kSetTol) sets[x].push_back(allowed[x][i]);
  }
  return sets;
}

std::vector<std::vector<double>> exact_crafted_q(const ProductMdp& p, Crafted which, double r,
                                                 const ActionSets& allowed) {
  if (r <= 0.0 || r >= 1.0) throw std::invalid_argument("crafted reward must lie in (0,1)");
  const int n = p.num_states();
  const auto& b = which == Crafted::Safety ? p.b_safety : p.b_ltl;
  auto gamma_of = [&](int x) {
    if (which == Crafted::Safety) return 1.0 - r;
    return b[x] ? 1.0 - r : 1.0 - r * r;
  };
  auto reward_of = [&](int x) { return b[x] ? r : 0.0; };

  // Howard policy iteration with exact evaluation
  std::vector<int> choice(n, 0);  // slot into allowed[x]
  std::vector<double> v(n, 0.0);
  for (int round = 0; round < 1000; ++round) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (int x = 0; x < n; ++x) {
      int act = allowed[x][choice[x]];
      for (const auto& o : p.outcomes(x, act)) {
        rhs(x) += o.prob * reward_of(o.next);
        a(x, o.next) -= o.prob * gamma_of(o.next);
      }
    }
    Eigen::VectorXd sol = solve_linear(a, rhs);
    for (int x = 0; x < n; ++x) v[x] = sol(x);

    bool stable = true;
    for (int x = 0; x < n; ++x) {
      std::vector<double> qs;
      for (int a : allowed[x]) {
        double q = 0.0;
        for (const auto& o : p.outcomes(x, a))
          q += o.prob * (reward_of(o.next) + gamma_of(o.next) * v[o.next]);
        qs.push_back(q);
      }
      int best_slot = 0;
      for (int i = 1; i < static_cast<int>(qs.size()); ++i)
        if (qs[i] > qs[best_slot] + 1e-14) best_slot = i;
      // switch only on strict improvement over the current choice
      if (qs[best_slot] > qs[choice[x]] + 1e-12) {
        choice[x] = best_slot;
        stable = false;
      }
    }
    if (stable) break;
  }

  std::vector<std::vector<double>> q(n);
  for (int x = 0; x < n; ++x)
    for (int a : allowed[x]) {
      double val = 0.0;
      for (const auto& o : p.outcomes(x, a))
        val += o.prob * (reward_of(o.next) + gamma_of(o.next) * v[o.next]);
      q[x].push_back(val);
    }
  return q;
}

std::vector<std::vector<double>> expand_crafted_q(
    const ProductMdp& p, Crafted which, double r,
    const std::vector<std::vector<double>>& q_restricted) {
  const int n = p.num_states();
  const auto& b = which == Crafted::Safety ? p.b_safety : p.b_ltl;
  auto gamma_of = [&](int x) {
    if (which == Crafted::Safety) return 1.0 - r;
    return b[x] ? 1.0 - r : 1.0 - r * r;
  };
  std::vector<double> v(n, 0.0);
  for (int x = 0; x < n; ++x)
    for (double val : q_restricted[x]) v[x] = std::max(v[x], val);
  std::vector<std::vector<double>> q(n);
  for (int x = 0; x < n; ++x)
    for (int a : p.actions[x]) {
      double val = 0.0;
      for (const auto& o : p.outcomes(x, a))
        val += o.prob * ((b[o.next] ? r : 0.0) + gamma_of(o.next) * v[o.next]);
      q[x].push_back(val);
    }
  return q;
}

ActionSets thresholded_action_sets(const ProductMdp& p, const ActionSets& allowed,
                                   const std::vector<std::vector<double>>& q, double tau) {
  ActionSets sets(p.num_states());
  for (int x = 0; x < p.num_states(); ++x) {
    double best = -1.0;
    for (double val : q[x]) best = std::max(best, val);
    for (std::size_t i = 0; i < allowed[x].size(); ++i)
      if (q[x][i] >= best - tau) sets[x].push_back(allowed[x][i]);
  }
  return sets;
}

std::vector<double> exact_policy_value(const ProductMdp& p, const ProductPolicy& pi,
                                       Objective obj) {
  if (auto bad = validate_policy(p, pi); !bad.empty())
    throw std::invalid_argument("invalid policy: " + bad.front());
  const int n = p.num_states();
  Chain c = make_chain(p, pi);

  if (obj == Objective::QocReturn) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    for (int x = 0; x < n; ++x) {
      b(x) = p.reward[x];
      for (const auto& o : c.rows[x]) a(x, o.next) -= p.gamma * o.prob;
    }
    Eigen::VectorXd sol = solve_linear(a, b);
    return std::vector<double>(sol.data(), sol.data() + n);
  }

  if (obj == Objective::SafetyProb) {
    // stay in B forever: bottom SCCs fully inside B have value 1, any state
    // outside B has value 0, transient B-states solve the linear system
    int count = 0;
    std::vector<bool> is_bottom;
    auto comp = bottom_scc_ids(c, count, is_bottom);
    std::vector<bool> comp_safe(count, true);
    for (int x = 0; x < n; ++x)
      if (!p.b_safety[x]) comp_safe[comp[x]] = false;
    std::vector<bool> one(n, false), zero(n, false);
    for (int x = 0; x < n; ++x) {
      if (is_bottom[comp[x]] && comp_safe[comp[x]])
        one[x] = true;
      else if (!p.b_safety[x])
        zero[x] = true;
    }
    // a transient B-state's mass through non-B successors is lost
    return chain_absorption(c, one, zero);
  }

  return chain_buchi_prob(p, pi, p.b_ltl);
}

std::vector<double> chain_buchi_prob(const ProductMdp& p, const ProductPolicy& pi,
                                     const std::vector<bool>& accepting) {
  const int n = p.num_states();
  Chain c = make_chain(p, pi);
  int count = 0;
  std::vector<bool> is_bottom;
  auto comp = bottom_scc_ids(c, count, is_bottom);
  std::vector<bool> comp_acc(count, false);
  for (int x = 0; x < n; ++x)
    if (accepting[x]) comp_acc[comp[x]] = true;
  std::vector<bool> one(n, false), zero(n, false);
  for (int x = 0; x < n; ++x) {
    if (is_bottom[comp[x]]) {
      if (comp_acc[comp[x]])
        one[x] = true;
      else
        zero[x] = true;
    }
  }
  return chain_absorption(c, one, zero);
}

std::vector<double> chain_reach_prob(const ProductMdp& p, const ProductPolicy& pi,
                                     const std::vector<bool>& target) {
  const int n = p.num_states();
  Chain c = make_chain(p, pi);
  // zero states: cannot reach target in the chain graph
  std::vector<std::vector<int>> radj(n);
  for (int x = 0; x < n; ++x)
    for (const auto& o : c.rows[x])
      if (o.prob > 0) radj[o.next].push_back(x);
  std::vector<bool> pos(n, false);
  std::deque<int> work;
  for (int x = 0; x < n; ++x)
    if (target[x]) {
      pos[x] = true;
      work.push_back(x);
    }
  while (!work.empty()) {
    int x = work.front();
    work.pop_front();
    for (int y : radj[x])
      if (!pos[y]) {
        pos[y] = true;
        work.push_back(y);
      }
  }
  std::vector<bool> one(n, false), zero(n, false);
  for (int x = 0; x < n; ++x) {
    if (target[x])
      one[x] = true;
    else if (!pos[x])
      zero[x] = true;
  }
  return chain_absorption(c, one, zero);
}

ProductPolicy uniform_policy(const ProductMdp& p, const ActionSets& sets) {
  ProductPolicy pi;
  pi.at.resize(p.num_states());
  for (int x = 0; x < p.num_states(); ++x) {
    const auto& as = sets[x];
    double w = 1.0 / static_cast<double>(as.size());
    for (std::size_t i = 0; i < as.size(); ++i) pi.at[x].push_back({as[i], w});
    // pin the distribution sum to exactly 1
    double sum = 0.0;
    for (const auto& e : pi.at[x]) sum += e.prob;
    pi.at[x].back().prob += 1.0 - sum;
  }
  return pi;
}

UpsilonGreedy best_upsilon_greedy(const ProductMdp& p, const ActionSets& allowed,
                                  double upsilon) {
  const int n = p.num_states();
  std::vector<int> choice(n, 0);
  std::vector<double> v(n, 0.0);

  auto blended_rows = [&](const std::vector<int>& ch) {
    std::vector<std::vector<Outcome>> rows(n);
    for (int x = 0; x < n; ++x) {
      std::map<int, double> mass;
      double u = upsilon / static_cast<double>(allowed[x].size());
      for (int a : allowed[x])
        for (const auto& o : p.outcomes(x, a)) mass[o.next] += u * o.prob;
      for (const auto& o : p.outcomes(x, allowed[x][ch[x]]))
        mass[o.next] += (1.0 - upsilon) * o.prob;
      for (const auto& [y, pr] : mass) rows[x].push_back({y, pr});
    }
    return rows;
  };

  for (int round = 0; round < 1000; ++round) {
    auto rows = blended_rows(choice);
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    for (int x = 0; x < n; ++x) {
      b(x) = p.reward[x];
      for (const auto& o : rows[x]) a(x, o.next) -= p.gamma * o.prob;
    }
    Eigen::VectorXd sol = solve_linear(a, b);
    for (int x = 0; x < n; ++x) v[x] = sol(x);

    bool stable = true;
    for (int x = 0; x < n; ++x) {
      // the blended value is an affine function of the own-choice backup, so
      // improving the plain backup improves the blend
      std::vector<double> qs;
      for (int a : allowed[x]) {
        double q = 0.0;
        for (const auto& o : p.outcomes(x, a))
          q += o.prob * (p.reward[o.next] + p.gamma * v[o.next]);
        qs.push_back(q);
      }
      int best_slot = 0;
      for (int i = 1; i < static_cast<int>(qs.size()); ++i)
        if (qs[i] > qs[best_slot] + 1e-12) best_slot = i;
      if (qs[best_slot] > qs[choice[x]] + 1e-10) {
        choice[x] = best_slot;
        stable = false;
      }
    }
    if (stable) break;
  }

  UpsilonGreedy result;
  result.value = v;
  result.policy.at.resize(n);
  for (int x = 0; x < n; ++x) {
    double u = upsilon / static_cast<double>(allowed[x].size());
    for (std::size_t i = 0; i < allowed[x].size(); ++i) {
      double mass = u + (static_cast<int>(i) == choice[x] ? 1.0 - upsilon : 0.0);
      result.policy.at[x].push_back({allowed[x][i], mass});
    }
    double sum = 0.0;
    for (const auto& e : result.policy.at[x]) sum += e.prob;
    result.policy.at[x].back().prob += 1.0 - sum;
  }
  return result;
}

OracleResult run_oracle(const ProductMdp& p) {
  OracleResult r;
  r.pr_safety = max_safety_prob(p);
  r.a_safety = safe_action_sets(p, r.pr_safety);
  r.pr_buchi_restricted = max_buchi_prob(p, r.a_safety, p.b_ltl);
  r.a_lex = ltl_action_sets(p, r.a_safety, r.pr_buchi_restricted);

  // report Bellman residuals of the returned fixpoints
  auto residual = [&](const std::vector<double>& v, const ActionSets& allowed,
                      auto keep_value) {
    double res = 0.0;
    for (int x = 0; x < p.num_states(); ++x) {
      if (!keep_value(x)) continue;
      double best = 0.0;
      for (int a : allowed[x]) {
        double q = 0.0;
        for (const auto& o : p.outcomes(x, a)) q += o.prob * v[o.next];
        best = std::max(best, q);
      }
      res = std::max(res, std::abs(best - v[x]));
    }
    return res;
  };
  auto all = full_action_sets(p);
  r.safety_residual =
      residual(r.pr_safety, all, [&](int x) { return p.b_safety[x] && r.pr_safety[x] > 0; });
  r.buchi_residual = residual(r.pr_buchi_restricted, r.a_safety,
                              [&](int x) { return r.pr_buchi_restricted[x] > 0 &&
                                                  r.pr_buchi_restricted[x] < 1; });
  return r;
}

std::string oracle_report_json(const ProductMdp& p, const OracleResult& r) {
  json j;
  j["format"] = "lexirl-oracle-report";
  j["version"] = 1;
  j["states"] = p.num_states();
  j["full_state_count"] = p.full_state_count;
  j["initial"] = p.initial;
  j["residuals"] = {{"safety", r.safety_residual}, {"buchi", r.buchi_residual}};
  json rows = json::array();
  for (int x = 0; x < p.num_states(); ++x) {
    json row;
    row["state"] = p.state_name(x);
    row["pr_safety"] = r.pr_safety[x];
    row["pr_buchi"] = r.pr_buchi_restricted[x];
    json sa = json::array(), sl = json::array();
    for (int a : r.a_safety[x]) sa.push_back(p.action_name(a));
    for (int a : r.a_lex[x]) sl.push_back(p.action_name(a));
    row["a_safety"] = std::move(sa);
    row["a_lex"] = std::move(sl);
    rows.push_back(std::move(row));
  }
  j["per_state"] = std::move(rows);
  return j.dump(2) + "\n";
}

}  // namespace lexirl

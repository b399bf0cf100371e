#include "lexirl/learn.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "lexirl/util.hpp"

namespace lexirl {

using nlohmann::json;

double Schedule::at(long episode) const {
  if (shape == Shape::Constant || start == end) return start;
  long h = std::max<long>(horizon, 1);
  double frac = static_cast<double>(episode) / static_cast<double>(h);
  switch (shape) {
    case Shape::Geometric:
      return start * std::pow(end / start, std::min(frac, 1.0));
    case Shape::Harmonic:
      return start / (1.0 + (start / end - 1.0) * frac);
    case Shape::Constant:
      break;
  }
  return start;
}

void Hyper::set_horizon(long episodes) {
  alpha.horizon = episodes;
  epsilon.horizon = episodes;
  upsilon.horizon = episodes;
  tau_safety.horizon = episodes;
  tau_ltl.horizon = episodes;
}

HyperValues hyper_at(const Hyper& h, long episode) {
  HyperValues v;
  v.gamma = h.gamma;
  v.r_safety = h.r_safety;
  v.r_ltl = h.r_ltl;
  v.alpha = h.alpha.at(episode);
  v.epsilon = h.epsilon.at(episode);
  v.upsilon = h.upsilon.at(episode);
  v.tau_safety = h.tau_safety.at(episode);
  v.tau_ltl = h.tau_ltl.at(episode);
  return v;
}

QTriple QTriple::zeros(const ProductMdp& p) {
  QTriple q;
  q.q_safety.resize(p.num_states());
  q.q_ltl.resize(p.num_states());
  q.q_return.resize(p.num_states());
  for (int x = 0; x < p.num_states(); ++x) {
    q.q_safety[x].assign(p.actions[x].size(), 0.0);
    q.q_ltl[x].assign(p.actions[x].size(), 0.0);
    q.q_return[x].assign(p.actions[x].size(), 0.0);
  }
  return q;
}

namespace {

double row_max(const std::vector<double>& row) {
  double m = row[0];
  for (double v : row) m = std::max(m, v);
  return m;
}

}  // namespace

void update_qs(QTriple& q, const ProductMdp& p, const Transition& t, const HyperValues& h) {
  int slot = p.action_slot(t.state, t.action);
  int next_slot = p.action_slot(t.next_state, t.next_action);
  if (slot < 0 || next_slot < 0) throw std::invalid_argument("transition uses a disallowed action");
  const double a = h.alpha;

  double& qs = q.q_safety[t.state][slot];
  if (t.next_in_b_safety) {
    double target = h.r_safety + (1.0 - h.r_safety) * row_max(q.q_safety[t.next_state]);
    qs = (1.0 - a) * qs + a * target;
  } else {
    qs = (1.0 - a) * qs;  // no bootstrap: a dead safety component stays dead
  }

  // The Büchi bootstrap maxes over the currently-safe actions of the next
  // state, matching the pruned-MDP semantics: values must not chase
  // continuations that the safety objective forbids.
  double& ql = q.q_ltl[t.state][slot];
  const auto& next_qs = q.q_safety[t.next_state];
  double next_safety_max = row_max(next_qs);
  double next_max = 0.0;
  bool first = true;
  for (std::size_t i = 0; i < next_qs.size(); ++i) {
    if (next_safety_max - next_qs[i] > h.tau_safety) continue;
    double v = q.q_ltl[t.next_state][i];
    next_max = first ? v : std::max(next_max, v);
    first = false;
  }
  if (t.next_in_b_ltl) {
    ql = (1.0 - a) * ql + a * (h.r_ltl + (1.0 - h.r_ltl) * next_max);
  } else {
    ql = (1.0 - a) * ql + a * ((1.0 - h.r_ltl * h.r_ltl) * next_max);
  }

  double& qr = q.q_return[t.state][slot];
  qr = (1.0 - a) * qr + a * (t.reward + h.gamma * q.q_return[t.next_state][next_slot]);
}

LearnedSets learned_action_sets(const QTriple& q, const ProductMdp& p, int state,
                                const HyperValues& h) {
  LearnedSets sets;
  const auto& acts = p.actions[state];
  const auto& qs = q.q_safety[state];
  const auto& ql = q.q_ltl[state];

  double v_safety = row_max(qs);
  for (std::size_t i = 0; i < acts.size(); ++i)
    if (v_safety - qs[i] <= h.tau_safety) sets.safe.push_back(static_cast<int>(i));

  double v_lex = ql[sets.safe.front()];
  for (int i : sets.safe) v_lex = std::max(v_lex, ql[i]);
  for (int i : sets.safe)
    if (v_lex - ql[i] <= h.tau_ltl) sets.lex.push_back(i);
  return sets;  // slot indices into p.actions[state]
}

int choose_action(const QTriple& q, const ProductMdp& p, int state, const HyperValues& h,
                  Rng& rng) {
  const auto& acts = p.actions[state];
  double u = rng.uniform();
  if (u <= h.epsilon) return acts[rng.pick(acts.size())];

  LearnedSets sets = learned_action_sets(q, p, state, h);
  if (u <= h.epsilon + h.upsilon) return acts[sets.lex[rng.pick(sets.lex.size())]];

  const auto& qr = q.q_return[state];
  int best = sets.lex.front();
  for (int i : sets.lex)
    if (qr[i] > qr[best]) best = i;  // ties keep the lowest slot
  return acts[best];
}

std::string stats_csv_header() {
  return "episode,mean_return,safety_frequency,buchi_frequency,alpha,epsilon,upsilon,"
         "tau_safety,tau_ltl\n";
}

std::string stats_csv_row(const StatsRow& r) {
  std::ostringstream out;
  out << r.episode << "," << format_double(r.mean_return) << ","
      << format_double(r.safety_frequency) << "," << format_double(r.buchi_frequency) << ","
      << format_double(r.alpha) << "," << format_double(r.epsilon) << ","
      << format_double(r.upsilon) << "," << format_double(r.tau_safety) << ","
      << format_double(r.tau_ltl) << "\n";
  return out.str();
}

TrainResult train(const ProductMdp& p, const Hyper& h, const TrainOptions& opt, Rng& rng,
                  const StatsSink& sink) {
  if (opt.horizon < 2) throw std::invalid_argument("training horizon must be at least 2");
  TrainResult result;
  result.q = QTriple::zeros(p);
  result.visits.assign(p.num_states(), 0);
  QTriple& q = result.q;

  double window_return = 0.0;
  long window_safe = 0, window_buchi = 0, window_n = 0;

  for (long ep = 0; ep < opt.episodes; ++ep) {
    HyperValues hv = hyper_at(h, ep);
    int state = p.initial;
    bool have_pending = false;
    Transition pending;  // waiting for the SARSA action of its endpoint

    double ep_return = p.reward[state];
    double discount = 1.0;
    bool safe = p.b_safety[state];
    bool buchi_tail = false;

    for (int t = 0; t < opt.horizon; ++t) {
      ++result.visits[state];
      int action = choose_action(q, p, state, hv, rng);
      if (have_pending) {
        pending.next_action = action;
        update_qs(q, p, pending, hv);
      }
      StepResult step = step_product(p, state, action, rng);
      pending = {state,          action,           step.qoc_reward, step.next,
                 /*next_action*/ 0,                step.in_b_safety, step.in_b_ltl};
      have_pending = true;

      discount *= hv.gamma;
      ep_return += discount * step.qoc_reward;
      safe = safe && step.in_b_safety;
      if (2 * (t + 1) > opt.horizon && step.in_b_ltl) buchi_tail = true;
      state = step.next;
    }
    // closing update for the final transition
    pending.next_action = choose_action(q, p, state, hv, rng);
    update_qs(q, p, pending, hv);

    window_return += ep_return;
    window_safe += safe ? 1 : 0;
    window_buchi += buchi_tail ? 1 : 0;
    ++window_n;
    if (sink && opt.stats_every > 0 && (ep + 1) % opt.stats_every == 0) {
      StatsRow row;
      row.episode = ep + 1;
      row.mean_return = window_return / static_cast<double>(window_n);
      row.safety_frequency = static_cast<double>(window_safe) / static_cast<double>(window_n);
      row.buchi_frequency = static_cast<double>(window_buchi) / static_cast<double>(window_n);
      row.alpha = hv.alpha;
      row.epsilon = hv.epsilon;
      row.upsilon = hv.upsilon;
      row.tau_safety = hv.tau_safety;
      row.tau_ltl = hv.tau_ltl;
      sink(row);
      window_return = 0.0;
      window_safe = window_buchi = window_n = 0;
    }
  }
  result.episodes = opt.episodes;
  return result;
}

ProductPolicy greedy_policy(const QTriple& q, const ProductMdp& p, const HyperValues& h) {
  ProductPolicy pi;
  pi.at.resize(p.num_states());
  for (int x = 0; x < p.num_states(); ++x) {
    LearnedSets sets = learned_action_sets(q, p, x, h);
    const auto& qr = q.q_return[x];
    int best = sets.lex.front();
    for (int i : sets.lex)
      if (qr[i] > qr[best]) best = i;

    double u = h.upsilon / static_cast<double>(sets.lex.size());
    for (int i : sets.lex) {
      double mass = u + (i == best ? 1.0 - h.upsilon : 0.0);
      pi.at[x].push_back({p.actions[x][i], mass});
    }
    double sum = 0.0;
    for (const auto& e : pi.at[x]) sum += e.prob;
    pi.at[x].back().prob += 1.0 - sum;
  }
  return pi;
}

EvalStats evaluate(const ProductMdp& p, const ProductPolicy& pi, long episodes, int horizon,
                   Rng& rng) {
  EvalStats stats;
  stats.episodes = episodes;
  double sum = 0.0, sum_sq = 0.0;
  long safe_count = 0, buchi_count = 0;

  for (long ep = 0; ep < episodes; ++ep) {
    int state = p.initial;
    double ep_return = p.reward[state];
    double discount = 1.0;
    bool safe = p.b_safety[state];
    bool buchi_tail = false;
    for (int t = 0; t < horizon; ++t) {
      const auto& row = pi.at[state];
      double u = rng.uniform(), acc = 0.0;
      int action = row.back().action;
      for (const auto& e : row) {
        acc += e.prob;
        if (u < acc) {
          action = e.action;
          break;
        }
      }
      StepResult step = step_product(p, state, action, rng);
      discount *= p.gamma;
      ep_return += discount * step.qoc_reward;
      safe = safe && step.in_b_safety;
      if (2 * (t + 1) > horizon && step.in_b_ltl) buchi_tail = true;
      state = step.next;
    }
    sum += ep_return;
    sum_sq += ep_return * ep_return;
    safe_count += safe ? 1 : 0;
    buchi_count += buchi_tail ? 1 : 0;
  }

  double n = static_cast<double>(episodes);
  stats.mean_return = sum / n;
  double var = std::max(0.0, sum_sq / n - stats.mean_return * stats.mean_return);
  stats.stderr_return = std::sqrt(var / n);
  stats.safety_frequency = static_cast<double>(safe_count) / n;
  stats.buchi_frequency = static_cast<double>(buchi_count) / n;
  return stats;
}

namespace {

json table_to_json(const std::vector<std::vector<double>>& t) {
  json rows = json::array();
  for (const auto& row : t) rows.push_back(row);
  return rows;
}

std::vector<std::vector<double>> table_from_json(const json& j) {
  std::vector<std::vector<double>> t;
  for (const auto& row : j) t.push_back(row.get<std::vector<double>>());
  return t;
}

}  // namespace

std::string checkpoint_to_json(const ProductMdp& p, const QTriple& q, long episode,
                               const std::string& rng_state, const std::string& config_hash) {
  json j;
  j["format"] = "lexirl-checkpoint";
  j["version"] = 1;
  j["config_hash"] = config_hash;
  j["episode"] = episode;
  j["rng"] = rng_state;
  j["states"] = p.num_states();
  j["full_state_count"] = p.full_state_count;
  j["tables"] = {{"safety", table_to_json(q.q_safety)},
                 {"ltl", table_to_json(q.q_ltl)},
                 {"return", table_to_json(q.q_return)}};
  return j.dump(2) + "\n";
}

Checkpoint checkpoint_from_json(const ProductMdp& p, const std::string& text) {
  json j = json::parse(text);
  if (j.value("format", "") != "lexirl-checkpoint")
    throw std::runtime_error("not a checkpoint file");
  if (j.at("states").get<int>() != p.num_states())
    throw std::runtime_error("checkpoint does not match the product (state count differs)");
  Checkpoint c;
  c.episode = j.at("episode").get<long>();
  c.rng_state = j.at("rng").get<std::string>();
  c.config_hash = j.value("config_hash", "");
  c.q.q_safety = table_from_json(j.at("tables").at("safety"));
  c.q.q_ltl = table_from_json(j.at("tables").at("ltl"));
  c.q.q_return = table_from_json(j.at("tables").at("return"));
  for (int x = 0; x < p.num_states(); ++x)
    if (c.q.q_safety[x].size() != p.actions[x].size() ||
        c.q.q_ltl[x].size() != p.actions[x].size() ||
        c.q.q_return[x].size() != p.actions[x].size())
      throw std::runtime_error("checkpoint does not match the product (action arity differs)");
  return c;
}

}  // namespace lexirl

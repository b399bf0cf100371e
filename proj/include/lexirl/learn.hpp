#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lexirl/product.hpp"
#include "lexirl/rng.hpp"

namespace lexirl {

/// Per-episode parameter schedule. Geometric interpolates start -> end over
/// `horizon` episodes and holds at end afterwards. Harmonic reaches end at
/// `horizon` and keeps decaying (for step-size conditions in convergence
/// tests). Constant ignores end and horizon.
struct Schedule {
  enum class Shape { Geometric, Harmonic, Constant };
  double start = 0.5;
  double end = 0.05;
  long horizon = 1;
  Shape shape = Shape::Geometric;

  double at(long episode) const;
};

struct Hyper {
  double gamma = 0.99;
  double r_safety = 1e-4;
  double r_ltl = 1e-2;
  Schedule alpha{0.5, 0.05};
  Schedule epsilon{0.5, 0.005};
  Schedule upsilon{0.5, 0.05};
  Schedule tau_safety{0.5, 0.05};
  Schedule tau_ltl{0.5, 0.05};

  /// Set every schedule's horizon (usually the training episode count).
  void set_horizon(long episodes);
};

/// Snapshot of all parameters for one episode.
struct HyperValues {
  double gamma = 0.99;
  double r_safety = 1e-4;
  double r_ltl = 1e-2;
  double alpha = 0.05;
  double epsilon = 0.0;
  double upsilon = 0.05;
  double tau_safety = 0.05;
  double tau_ltl = 0.05;
};

HyperValues hyper_at(const Hyper& h, long episode);

/// The three learned tables, stored per product state parallel to the
/// allowed-action lists. Q_safety and Q_ltl stay in [0, 1] under every
/// update; entries for disallowed actions do not exist.
struct QTriple {
  std::vector<std::vector<double>> q_safety;
  std::vector<std::vector<double>> q_ltl;
  std::vector<std::vector<double>> q_return;

  static QTriple zeros(const ProductMdp& p);
};

struct Transition {
  int state = 0;
  int action = 0;
  double reward = 0.0;
  int next_state = 0;
  int next_action = 0;
  bool next_in_b_safety = false;
  bool next_in_b_ltl = false;
};

/// The coupled update: Q-learning on the two crafted objectives (decay-only
/// when the safety flag is down; two-level discount for the Büchi flag) and
/// SARSA on the native return. The Büchi bootstrap maxes over the next
/// state's currently-safe actions (pruned-MDP semantics). Touches exactly
/// the (state, action) entry of each table.
void update_qs(QTriple& q, const ProductMdp& p, const Transition& t, const HyperValues& h);

/// Near-optimal action sets read from the current tables: lex is computed
/// within safe, both always contain the respective argmax.
struct LearnedSets {
  std::vector<int> safe;
  std::vector<int> lex;
};
LearnedSets learned_action_sets(const QTriple& q, const ProductMdp& p, int state,
                                const HyperValues& h);

/// ε-greedy exploration over the lexicographic sets: with probability ε a
/// uniform allowed action, then with probability υ a uniform action from the
/// lex set, otherwise the return-greedy action in it (lowest index on ties).
int choose_action(const QTriple& q, const ProductMdp& p, int state, const HyperValues& h,
                  Rng& rng);

struct StatsRow {
  long episode = 0;
  double mean_return = 0.0;
  double safety_frequency = 0.0;
  double buchi_frequency = 0.0;
  double alpha = 0, epsilon = 0, upsilon = 0, tau_safety = 0, tau_ltl = 0;
};

std::string stats_csv_header();
std::string stats_csv_row(const StatsRow& row);

struct TrainOptions {
  long episodes = 1000;
  int horizon = 200;
  long stats_every = 0;  // emit a stats row every N episodes; 0 disables
};

struct TrainResult {
  QTriple q;
  std::vector<long> visits;  // decision-time visit counts per product state
  long episodes = 0;
};

using StatsSink = std::function<void(const StatsRow&)>;

/// Episodic training from the initial product state. Updates lag one step
/// behind the action choice (the SARSA target needs the next action); the
/// last transition of an episode gets one closing update. Identical seeds
/// and options produce bit-identical tables.
TrainResult train(const ProductMdp& p, const Hyper& h, const TrainOptions& opt, Rng& rng,
                  const StatsSink& sink = StatsSink());

/// The evaluation policy: per state, mass 1-υ on the return-greedy action of
/// the lex set and υ spread uniformly over the set.
ProductPolicy greedy_policy(const QTriple& q, const ProductMdp& p, const HyperValues& h);

struct EvalStats {
  double mean_return = 0.0;
  double stderr_return = 0.0;
  double safety_frequency = 0.0;  // episodes that never left B×_psi
  double buchi_frequency = 0.0;   // episodes visiting B×_phi in the tail half
  long episodes = 0;
};

EvalStats evaluate(const ProductMdp& p, const ProductPolicy& pi, long episodes, int horizon,
                   Rng& rng);

std::string checkpoint_to_json(const ProductMdp& p, const QTriple& q, long episode,
                               const std::string& rng_state, const std::string& config_hash);

struct Checkpoint {
  QTriple q;
  long episode = 0;
  std::string rng_state;
  std::string config_hash;
};

Checkpoint checkpoint_from_json(const ProductMdp& p, const std::string& text);

}  // namespace lexirl

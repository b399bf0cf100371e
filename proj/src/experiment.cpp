#include "lexirl/experiment.hpp"

#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lexirl/hoa.hpp"
#include "lexirl/ltl.hpp"
#include "lexirl/render.hpp"
#include "lexirl/util.hpp"

namespace lexirl {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void stage_error(const std::string& stage, const std::exception& e) {
  throw std::runtime_error("[" + stage + "] " + e.what());
}

std::string schedule_str(const Schedule& s) {
  const char* shape = s.shape == Schedule::Shape::Geometric ? "geometric"
                      : s.shape == Schedule::Shape::Harmonic ? "harmonic"
                                                             : "constant";
  return format_double(s.start) + "->" + format_double(s.end) + "/" + std::to_string(s.horizon) +
         "/" + shape;
}

}  // namespace

ExperimentSetup build_setup(const ExperimentConfig& cfg) {
  if (cfg.env_path.empty()) throw std::runtime_error("[config] no environment file given");
  if (cfg.ltl_formula.empty() == cfg.hoa_path.empty())
    throw std::runtime_error(
        "[config] exactly one LTL objective source is required (a formula or an HOA file)");

  ExperimentSetup s;
  try {
    s.env = load_environment(cfg.env_path);
    s.env.mdp.gamma = cfg.hyper.gamma;
  } catch (const ParseError& e) {
    stage_error("environment", e);
  } catch (const std::runtime_error& e) {
    stage_error("environment", e);
  }

  try {
    LtlFormula psi = parse_ltl(cfg.safety_formula, s.env.mdp.atomic_props);
    s.safety = safety_to_automaton(psi);
  } catch (const std::exception& e) {
    stage_error("safety translation", e);
  }

  try {
    if (!cfg.hoa_path.empty()) {
      s.ldba = parse_hoa(read_file(cfg.hoa_path));
    } else {
      LtlFormula phi = parse_ltl(cfg.ltl_formula, s.env.mdp.atomic_props);
      if (!is_syntactic_safety(phi))
        throw std::runtime_error(
            "the LTL objective is outside the safety fragment; translate it externally and "
            "import the LDBA in HOA form");
      s.ldba = ldba_from_safety(safety_to_automaton(phi));
    }
  } catch (const std::exception& e) {
    stage_error("LTL objective", e);
  }

  try {
    s.product = build_product(s.env.mdp, s.safety, s.ldba);
  } catch (const std::exception& e) {
    stage_error("product construction", e);
  }
  return s;
}

std::string config_canonical(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "env=" << cfg.env_path << "\n";
  out << "safety=" << cfg.safety_formula << "\n";
  out << "ltl=" << cfg.ltl_formula << "\n";
  out << "hoa=" << cfg.hoa_path << "\n";
  out << "gamma=" << format_double(cfg.hyper.gamma) << "\n";
  out << "r_safety=" << format_double(cfg.hyper.r_safety) << "\n";
  out << "r_ltl=" << format_double(cfg.hyper.r_ltl) << "\n";
  out << "alpha=" << schedule_str(cfg.hyper.alpha) << "\n";
  out << "epsilon=" << schedule_str(cfg.hyper.epsilon) << "\n";
  out << "upsilon=" << schedule_str(cfg.hyper.upsilon) << "\n";
  out << "tau_safety=" << schedule_str(cfg.hyper.tau_safety) << "\n";
  out << "tau_ltl=" << schedule_str(cfg.hyper.tau_ltl) << "\n";
  out << "episodes=" << cfg.episodes << "\n";
  out << "horizon=" << cfg.horizon << "\n";
  out << "seed=" << cfg.seed << "\n";
  return out.str();
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::string canon = config_canonical(cfg);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

std::string run_experiment(const ExperimentConfig& cfg) {
  ExperimentSetup setup = build_setup(cfg);
  const ProductMdp& p = setup.product;

  fs::create_directories(cfg.out_dir);
  auto path = [&](const std::string& name) { return (fs::path(cfg.out_dir) / name).string(); };

  Hyper hyper = cfg.hyper;
  Rng rng(cfg.seed);

  std::ostringstream stats;
  stats << stats_csv_header();
  TrainOptions opt;
  opt.episodes = cfg.episodes;
  opt.horizon = cfg.horizon;
  opt.stats_every = cfg.stats_every;
  TrainResult trained =
      train(p, hyper, opt, rng, [&](const StatsRow& row) { stats << stats_csv_row(row); });

  std::string hash = config_hash(cfg);
  write_file_atomic(path("stats.csv"), stats.str());
  write_file_atomic(path("checkpoint.json"),
                    checkpoint_to_json(p, trained.q, trained.episodes, rng.state(), hash));

  HyperValues hv = hyper_at(hyper, cfg.episodes);
  ProductPolicy greedy = greedy_policy(trained.q, p, hv);
  write_file_atomic(path("policy.json"), policy_to_json(p, greedy));

  FiniteMemoryPolicy induced = induce_policy(p, greedy);
  json fmj;
  fmj["format"] = "lexirl-induced-policy";
  fmj["modes"] = induced.num_modes;
  fmj["initial_mode"] = induced.initial_mode;
  fmj["update_on_start"] = induced.update_on_start;
  json rows = json::array();
  for (int m = 0; m < induced.num_modes; ++m) {
    for (StateId s = 0; s < p.mdp.num_states(); ++s) {
      if (induced.mode_update[m][s].empty() && induced.action[m][s].empty()) continue;
      json row;
      row["mode"] = m;
      row["state"] = p.mdp.state_name(s);
      json upd = json::array(), act = json::array();
      for (const auto& e : induced.mode_update[m][s])
        upd.push_back({{"mode", e.mode}, {"prob", e.prob}});
      for (const auto& e : induced.action[m][s])
        act.push_back({{"action", p.mdp.action_names[e.action]}, {"prob", e.prob}});
      row["mode_update"] = std::move(upd);
      row["action"] = std::move(act);
      rows.push_back(std::move(row));
    }
  }
  fmj["rows"] = std::move(rows);
  write_file_atomic(path("policy_induced.json"), fmj.dump(2) + "\n");

  // shade by the learned return values
  std::vector<double> shade(p.num_states(), 0.0);
  for (int x = 0; x < p.num_states(); ++x)
    for (double v : trained.q.q_return[x]) shade[x] = std::max(shade[x], v);
  PolicyRender render = render_policy(p, greedy, setup.env.grid, shade);
  if (!render.ascii.empty()) write_file_atomic(path("policy.txt"), render.ascii);
  if (!render.svg.empty()) write_file_atomic(path("policy.svg"), render.svg);
  write_file_atomic(path("policy.csv"), render.csv);

  json manifest;
  manifest["format"] = "lexirl-manifest";
  manifest["version"] = 1;
  manifest["config"] = config_canonical(cfg);
  manifest["config_hash"] = hash;
  manifest["seed"] = cfg.seed;
  manifest["episodes"] = cfg.episodes;
  manifest["horizon"] = cfg.horizon;
  manifest["env_states"] = setup.env.mdp.num_states();
  manifest["safety_states"] = setup.safety.num_states();
  manifest["ldba_states"] = setup.ldba.num_states();
  manifest["product_states"] = p.num_states();
  manifest["product_full_state_count"] = p.full_state_count;
  manifest["artifacts"] = {"checkpoint.json", "stats.csv",       "policy.json",
                           "policy_induced.json", "policy.csv"};
  if (!render.ascii.empty()) {
    manifest["artifacts"].push_back("policy.txt");
    manifest["artifacts"].push_back("policy.svg");
  }
  std::string m = manifest.dump(2) + "\n";
  write_file_atomic(path("manifest.json"), m);
  return m;
}

std::string verify_experiment(const ExperimentConfig& cfg, const std::string& checkpoint_path) {
  ExperimentSetup setup = build_setup(cfg);
  const ProductMdp& p = setup.product;
  Checkpoint ck = checkpoint_from_json(p, read_file(checkpoint_path));

  OracleResult oracle = run_oracle(p);
  HyperValues hv = hyper_at(cfg.hyper, cfg.episodes);

  long agree_safe = 0, agree_lex = 0;
  json mismatches = json::array();
  for (int x = 0; x < p.num_states(); ++x) {
    LearnedSets sets = learned_action_sets(ck.q, p, x, hv);
    std::vector<int> learned_safe, learned_lex;
    for (int slot : sets.safe) learned_safe.push_back(p.actions[x][slot]);
    for (int slot : sets.lex) learned_lex.push_back(p.actions[x][slot]);
    bool ok_safe = learned_safe == oracle.a_safety[x];
    bool ok_lex = learned_lex == oracle.a_lex[x];
    agree_safe += ok_safe;
    agree_lex += ok_lex;
    if (!ok_safe || !ok_lex) {
      json m;
      m["state"] = p.state_name(x);
      auto names = [&](const std::vector<int>& as) {
        json arr = json::array();
        for (int a : as) arr.push_back(p.action_name(a));
        return arr;
      };
      m["learned_safe"] = names(learned_safe);
      m["oracle_safe"] = names(oracle.a_safety[x]);
      m["learned_lex"] = names(learned_lex);
      m["oracle_lex"] = names(oracle.a_lex[x]);
      mismatches.push_back(std::move(m));
    }
  }

  ProductPolicy greedy = greedy_policy(ck.q, p, hv);
  auto greedy_value = exact_policy_value(p, greedy, Objective::QocReturn);
  auto greedy_safety = exact_policy_value(p, greedy, Objective::SafetyProb);
  auto greedy_buchi = exact_policy_value(p, greedy, Objective::BuchiProb);
  UpsilonGreedy best = best_upsilon_greedy(p, oracle.a_lex, hv.upsilon);

  json report;
  report["format"] = "lexirl-verify-report";
  report["version"] = 1;
  report["config_hash"] = config_hash(cfg);
  report["checkpoint_config_hash"] = ck.config_hash;
  report["checkpoint_episode"] = ck.episode;
  report["states"] = p.num_states();
  double n = p.num_states();
  report["agreement"] = {{"safe", agree_safe / n}, {"lex", agree_lex / n}};
  report["greedy"] = {{"value_at_initial", greedy_value[p.initial]},
                      {"safety_prob_at_initial", greedy_safety[p.initial]},
                      {"buchi_prob_at_initial", greedy_buchi[p.initial]}};
  report["upsilon_optimum_at_initial"] = best.value[p.initial];
  report["return_gap"] = best.value[p.initial] - greedy_value[p.initial];
  report["oracle"] = {{"pr_safety_at_initial", oracle.pr_safety[p.initial]},
                      {"pr_buchi_at_initial", oracle.pr_buchi_restricted[p.initial]},
                      {"residuals",
                       {{"safety", oracle.safety_residual}, {"buchi", oracle.buchi_residual}}}};
  report["mismatches"] = std::move(mismatches);
  return report.dump(2) + "\n";
}

}  // namespace lexirl

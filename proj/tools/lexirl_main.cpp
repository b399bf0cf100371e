// lexirl command line: train, verify, render and model-check lexicographic
// safety/LTL/return policies on labeled MDPs.

#include <filesystem>
#include <iostream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "lexirl/experiment.hpp"
#include "lexirl/hoa.hpp"
#include "lexirl/ltl.hpp"
#include "lexirl/render.hpp"
#include "lexirl/util.hpp"

namespace fs = std::filesystem;
using namespace lexirl;

namespace {

// training beyond this many steps needs the explicit --paper-scale flag
constexpr long long kDeskScaleSteps = 20000000;

void add_experiment_options(CLI::App* cmd, ExperimentConfig& cfg, std::string& shape) {
  cmd->set_config("--config", "", "experiment config file (key=value lines)");
  cmd->add_option("--grid,--mdp,--env", cfg.env_path, "environment file (grid or explicit MDP)");
  cmd->add_option("--safety", cfg.safety_formula, "safety formula");
  cmd->add_option("--ltl", cfg.ltl_formula, "LTL objective formula (safety fragment)");
  cmd->add_option("--hoa", cfg.hoa_path, "LTL objective as an LDBA in HOA form");
  cmd->add_option("--gamma", cfg.hyper.gamma, "discount factor");
  cmd->add_option("--r-safety", cfg.hyper.r_safety, "crafted safety reward");
  cmd->add_option("--r-ltl", cfg.hyper.r_ltl, "crafted LTL reward");
  cmd->add_option("--alpha", cfg.hyper.alpha.start, "learning rate (start)");
  cmd->add_option("--alpha-end", cfg.hyper.alpha.end, "learning rate (end)");
  cmd->add_option("--epsilon", cfg.hyper.epsilon.start, "exploration probability (start)");
  cmd->add_option("--epsilon-end", cfg.hyper.epsilon.end, "exploration probability (end)");
  cmd->add_option("--upsilon", cfg.hyper.upsilon.start, "mixing probability (start)");
  cmd->add_option("--upsilon-end", cfg.hyper.upsilon.end, "mixing probability (end)");
  cmd->add_option("--tau-safety", cfg.hyper.tau_safety.start, "safety threshold (start)");
  cmd->add_option("--tau-safety-end", cfg.hyper.tau_safety.end, "safety threshold (end)");
  cmd->add_option("--tau-ltl", cfg.hyper.tau_ltl.start, "LTL threshold (start)");
  cmd->add_option("--tau-ltl-end", cfg.hyper.tau_ltl.end, "LTL threshold (end)");
  cmd->add_option("--schedule-shape", shape, "geometric|harmonic|constant")
      ->check(CLI::IsMember({"geometric", "harmonic", "constant"}));
  cmd->add_option("--episodes", cfg.episodes, "training episodes");
  cmd->add_option("--horizon", cfg.horizon, "steps per episode");
  cmd->add_option("--stats-every", cfg.stats_every, "stats row every N episodes");
  cmd->add_option("--seed", cfg.seed, "random seed");
  cmd->add_option("--out", cfg.out_dir, "output directory");
  cmd->add_flag("--paper-scale", cfg.paper_scale, "allow very long training runs");
}

void finalize_config(ExperimentConfig& cfg, const std::string& shape) {
  Schedule::Shape s = Schedule::Shape::Geometric;
  if (shape == "harmonic") s = Schedule::Shape::Harmonic;
  if (shape == "constant") s = Schedule::Shape::Constant;
  for (Schedule* sched : {&cfg.hyper.alpha, &cfg.hyper.epsilon, &cfg.hyper.upsilon,
                          &cfg.hyper.tau_safety, &cfg.hyper.tau_ltl})
    sched->shape = s;
  cfg.hyper.set_horizon(cfg.episodes);
}

int run_command(ExperimentConfig cfg, int runs) {
  long long steps = static_cast<long long>(cfg.episodes) * cfg.horizon;
  if (steps > kDeskScaleSteps && !cfg.paper_scale) {
    std::cerr << "this configuration trains for " << steps
              << " steps; pass --paper-scale to confirm\n";
    return 2;
  }
  if (runs <= 1) {
    std::string manifest = run_experiment(cfg);
    std::cout << manifest;
    return 0;
  }
  // independent seeds, one thread each, private output directories
  std::vector<std::thread> workers;
  std::vector<std::string> errors(runs);
  for (int k = 0; k < runs; ++k) {
    ExperimentConfig sub = cfg;
    sub.seed = cfg.seed + static_cast<std::uint64_t>(k);
    sub.out_dir = (fs::path(cfg.out_dir) / ("seed-" + std::to_string(sub.seed))).string();
    workers.emplace_back([sub, k, &errors] {
      try {
        run_experiment(sub);
      } catch (const std::exception& e) {
        errors[k] = e.what();
      }
    });
  }
  for (auto& w : workers) w.join();
  bool ok = true;
  for (int k = 0; k < runs; ++k) {
    if (errors[k].empty()) {
      std::cout << "seed " << cfg.seed + k << ": done\n";
    } else {
      std::cerr << "seed " << cfg.seed + k << ": " << errors[k] << "\n";
      ok = false;
    }
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lexicographic safety/LTL/return reinforcement learning"};
  app.require_subcommand(1);

  ExperimentConfig cfg;
  std::string shape = "geometric";
  int runs = 1;

  auto* run = app.add_subcommand("run", "train a policy and write the artifact set");
  add_experiment_options(run, cfg, shape);
  run->add_option("--runs", runs, "train this many independent seeds concurrently");

  auto* verify = app.add_subcommand("verify", "check a checkpoint against the exact oracle");
  add_experiment_options(verify, cfg, shape);
  std::string checkpoint_path, report_path;
  verify->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();
  verify->add_option("--report", report_path, "write the JSON report here");

  auto* render = app.add_subcommand("render", "render a stored policy");
  add_experiment_options(render, cfg, shape);
  std::string policy_path, render_prefix = "policy";
  render->add_option("--policy", policy_path, "policy file (policy.json)")->required();
  render->add_option("--values", checkpoint_path, "checkpoint used for value shading");
  render->add_option("--out-prefix", render_prefix, "output file prefix");

  auto* oracle_cmd = app.add_subcommand("oracle", "exact model check of the configured system");
  add_experiment_options(oracle_cmd, cfg, shape);
  oracle_cmd->add_option("--report", report_path, "write the JSON report here");

  auto* translate = app.add_subcommand("translate", "formula/automaton to canonical HOA");
  std::string formula, props_csv, hoa_in, out_path;
  translate->add_option("--formula", formula, "safety formula to translate");
  translate->add_option("--props", props_csv, "comma-separated alphabet for --formula");
  translate->add_option("--hoa", hoa_in, "LDBA to validate and reprint canonically");
  translate->add_option("--out", out_path, "output file (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      finalize_config(cfg, shape);
      return run_command(cfg, runs);
    }
    if (verify->parsed()) {
      finalize_config(cfg, shape);
      std::string report = verify_experiment(cfg, checkpoint_path);
      if (!report_path.empty())
        write_file_atomic(report_path, report);
      else
        std::cout << report;
      return 0;
    }
    if (render->parsed()) {
      finalize_config(cfg, shape);
      ExperimentSetup setup = build_setup(cfg);
      ProductPolicy pi = policy_from_json(setup.product, read_file(policy_path));
      std::vector<double> shade(setup.product.num_states(), 0.0);
      if (!checkpoint_path.empty()) {
        Checkpoint ck = checkpoint_from_json(setup.product, read_file(checkpoint_path));
        for (int x = 0; x < setup.product.num_states(); ++x)
          for (double v : ck.q.q_return[x]) shade[x] = std::max(shade[x], v);
      }
      PolicyRender out = render_policy(setup.product, pi, setup.env.grid, shade);
      write_file_atomic(render_prefix + ".csv", out.csv);
      if (!out.ascii.empty()) {
        write_file_atomic(render_prefix + ".txt", out.ascii);
        write_file_atomic(render_prefix + ".svg", out.svg);
        std::cout << out.ascii;
      } else {
        std::cout << "non-grid environment: wrote the CSV table only\n";
      }
      return 0;
    }
    if (oracle_cmd->parsed()) {
      finalize_config(cfg, shape);
      ExperimentSetup setup = build_setup(cfg);
      const ProductMdp& p = setup.product;
      OracleResult r = run_oracle(p);
      std::string report = oracle_report_json(p, r);
      if (!report_path.empty()) write_file_atomic(report_path, report);
      std::vector<bool> combined(p.num_states());
      for (int x = 0; x < p.num_states(); ++x) combined[x] = p.b_safety[x] && p.b_ltl[x];
      auto pr_combined = max_buchi_prob(p, full_action_sets(p), combined);
      std::cout << "product states: " << p.num_states()
                << " (full " << p.full_state_count << ")\n";
      std::cout << "Pr_max(safety) at initial: " << format_double(r.pr_safety[p.initial]) << "\n";
      std::cout << "Pr_max(Buchi | safe actions) at initial: "
                << format_double(r.pr_buchi_restricted[p.initial]) << "\n";
      std::cout << "Pr_max(combined safety&LTL) at initial: "
                << format_double(pr_combined[p.initial]) << "\n";
      return 0;
    }
    if (translate->parsed()) {
      std::string output;
      if (!hoa_in.empty()) {
        output = print_hoa(parse_hoa(read_file(hoa_in)));
      } else if (!formula.empty()) {
        std::string csv = props_csv;
        for (auto& c : csv)
          if (c == ',') c = ' ';
        std::vector<std::string> props = split_ws(csv);
        LtlFormula f = parse_ltl(formula, props);
        output = print_hoa(safety_to_automaton(f), print_ltl(f));
      } else {
        std::cerr << "translate needs --formula or --hoa\n";
        return 2;
      }
      if (!out_path.empty())
        write_file_atomic(out_path, output);
      else
        std::cout << output;
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

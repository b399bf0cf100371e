#pragma once

#include <cstdint>
#include <string>

#include "lexirl/env_io.hpp"
#include "lexirl/learn.hpp"
#include "lexirl/oracle.hpp"
#include "lexirl/product.hpp"

namespace lexirl {

/// One experiment: an environment, a safety formula, an LTL objective (a
/// safety-fragment formula or an LDBA in HOA form; exactly one source), the
/// learner parameters and the run bookkeeping.
struct ExperimentConfig {
  std::string env_path;
  std::string safety_formula = "true";
  std::string ltl_formula;  // translated directly when in the safety fragment
  std::string hoa_path;     // LDBA import
  Hyper hyper;
  long episodes = 1000;
  int horizon = 200;
  long stats_every = 100;
  std::uint64_t seed = 1;
  std::string out_dir = "run";
  bool paper_scale = false;
};

struct ExperimentSetup {
  Environment env;
  SafetyAutomaton safety;
  Ldba ldba;
  ProductMdp product;
};

/// Load the environment, translate/import the automata and build the product.
/// Throws with the failing stage named.
ExperimentSetup build_setup(const ExperimentConfig& cfg);

std::string config_canonical(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);  // FNV-1a of the canonical form

/// Train, evaluate, and write the artifact set into out_dir: manifest.json,
/// checkpoint.json, stats.csv, policy.json, policy_induced.json, and for grid
/// environments policy.txt / policy.svg / policy.csv. Returns the manifest.
std::string run_experiment(const ExperimentConfig& cfg);

/// Compare a checkpoint against the exact oracle: per-state agreement of the
/// learned near-optimal action sets, the exact value of the greedy policy and
/// the gap to the υ-constrained optimum. Returns the JSON report.
std::string verify_experiment(const ExperimentConfig& cfg, const std::string& checkpoint_path);

}  // namespace lexirl

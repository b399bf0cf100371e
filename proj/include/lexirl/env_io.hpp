#pragma once

#include <optional>
#include <string>

#include "lexirl/gridworld.hpp"
#include "lexirl/mdp.hpp"

namespace lexirl {

/// Explicit MDP text format: states, per-state action sets and probability
/// triples. Canonical writer output round-trips byte for byte.
LabeledMdp parse_mdp(const std::string& text);
std::string format_mdp(const LabeledMdp& mdp);

/// An environment file is either a grid spec ("grid" directive) or an
/// explicit MDP ("mdp" directive). Returns the model plus the grid spec when
/// the source was a grid.
struct Environment {
  LabeledMdp mdp;
  std::optional<GridSpec> grid;
};

Environment parse_environment(const std::string& text);
Environment load_environment(const std::string& path);

std::string read_file(const std::string& path);
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace lexirl

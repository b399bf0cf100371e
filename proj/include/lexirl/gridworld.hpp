#pragma once

#include <string>
#include <vector>

#include "lexirl/mdp.hpp"

namespace lexirl {

enum class CellKind { Normal, Obstacle, Absorbing };

/// Slippery grid world description. Moves succeed with probability
/// `slip_intended` and deviate to the two orthogonal directions otherwise;
/// moves blocked by the boundary or an obstacle leave the agent in place.
struct GridSpec {
  int rows = 1;
  int cols = 1;
  double slip_intended = 1.0;
  double slip_orth_a = 0.0;  // counterclockwise of the intended direction
  double slip_orth_b = 0.0;  // clockwise
  double gamma = 0.99;
  double r_max = 1e9;
  int start_row = 0;
  int start_col = 0;
  std::vector<CellKind> kind;                    // row-major
  std::vector<std::vector<std::string>> labels;  // per cell, sorted prop names
  std::vector<double> reward;

  int cell(int r, int c) const { return r * cols + c; }
  bool in_bounds(int r, int c) const { return r >= 0 && r < rows && c >= 0 && c < cols; }
};

/// Grid move actions, in this fixed order.
enum GridAction : ActionId { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };

/// One MDP state per cell. Absorbing and obstacle cells self-loop under every
/// action (obstacle cells are unreachable since movement into them is
/// blocked). Throws std::invalid_argument on a bad spec.
LabeledMdp build_gridworld(const GridSpec& spec);

GridSpec parse_grid(const std::string& text);
std::string format_grid(const GridSpec& spec);

}  // namespace lexirl

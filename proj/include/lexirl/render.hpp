#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lexirl/gridworld.hpp"
#include "lexirl/product.hpp"

namespace lexirl {

struct PolicyRender {
  std::string ascii;  // empty for non-grid environments
  std::string svg;    // empty for non-grid environments
  std::string csv;
};

/// Per-cell view of a product policy on a grid environment: dominant move,
/// whether the policy mixes actions there, whether it takes an ε-jump, and a
/// state value used for shading. Aggregates over the product states at each
/// cell that the policy can actually reach. A pure function of its inputs.
PolicyRender render_policy(const ProductMdp& p, const ProductPolicy& pi,
                           const std::optional<GridSpec>& grid,
                           const std::vector<double>& state_value);

}  // namespace lexirl

#include "lexirl/gridworld.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "lexirl/util.hpp"

namespace lexirl {

namespace {

// row/col deltas per GridAction
constexpr int kDr[4] = {-1, 1, 0, 0};
constexpr int kDc[4] = {0, 0, -1, 1};

// orthogonal directions (counterclockwise, clockwise) of each action
constexpr int kOrthA[4] = {kLeft, kRight, kDown, kUp};
constexpr int kOrthB[4] = {kRight, kLeft, kUp, kDown};

}  // namespace

LabeledMdp build_gridworld(const GridSpec& spec) {
  if (spec.rows <= 0 || spec.cols <= 0)
    throw std::invalid_argument("grid dimensions must be positive");
  double slip_sum = spec.slip_intended + spec.slip_orth_a + spec.slip_orth_b;
  if (std::abs(slip_sum - 1.0) > 1e-9)
    throw std::invalid_argument("slip probabilities must sum to 1");
  if (spec.slip_intended < 0 || spec.slip_orth_a < 0 || spec.slip_orth_b < 0)
    throw std::invalid_argument("slip probabilities must be non-negative");
  if (!spec.in_bounds(spec.start_row, spec.start_col))
    throw std::invalid_argument("start cell out of bounds");
  if (spec.kind[spec.cell(spec.start_row, spec.start_col)] == CellKind::Obstacle)
    throw std::invalid_argument("start cell is an obstacle");

  const int n = spec.rows * spec.cols;

  // collect the proposition alphabet (sorted for a deterministic indexing)
  std::set<std::string> props;
  for (const auto& cell_labels : spec.labels)
    props.insert(cell_labels.begin(), cell_labels.end());

  LabeledMdp m;
  m.atomic_props.assign(props.begin(), props.end());
  m.action_names = {"up", "down", "left", "right"};
  m.gamma = spec.gamma;
  m.r_max = spec.r_max;
  m.initial = spec.cell(spec.start_row, spec.start_col);
  m.reward = spec.reward;
  m.label.assign(n, 0u);
  m.state_names.resize(n);
  m.actions.assign(n, {kUp, kDown, kLeft, kRight});
  m.trans.resize(n);

  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.cols; ++c) {
      int s = spec.cell(r, c);
      m.state_names[s] = "(" + std::to_string(r) + "," + std::to_string(c) + ")";
      for (const auto& p : spec.labels[s]) m.label[s] |= 1u << m.prop_index(p);

      m.trans[s].resize(4);
      bool stuck = spec.kind[s] != CellKind::Normal;
      for (int a = 0; a < 4; ++a) {
        if (stuck) {
          m.trans[s][a] = {{s, 1.0}};
          continue;
        }
        // accumulate the three movement outcomes; blocked moves stay in place
        std::map<int, double> mass;
        int dirs[3] = {a, kOrthA[a], kOrthB[a]};
        double probs[3] = {spec.slip_intended, spec.slip_orth_a, spec.slip_orth_b};
        for (int k = 0; k < 3; ++k) {
          if (probs[k] == 0.0) continue;
          int rr = r + kDr[dirs[k]], cc = c + kDc[dirs[k]];
          int target = s;
          if (spec.in_bounds(rr, cc) && spec.kind[spec.cell(rr, cc)] != CellKind::Obstacle)
            target = spec.cell(rr, cc);
          mass[target] += probs[k];
        }
        auto& outs = m.trans[s][a];
        for (const auto& [t, p] : mass) outs.push_back({t, p});
        // pin the row sum to exactly 1 by adjusting the largest entry
        double sum = 0.0;
        std::size_t largest = 0;
        for (std::size_t i = 0; i < outs.size(); ++i) {
          sum += outs[i].prob;
          if (outs[i].prob > outs[largest].prob) largest = i;
        }
        outs[largest].prob += 1.0 - sum;
      }
    }
  }
  return m;
}

namespace {

std::pair<int, int> parse_cell(const std::vector<std::string>& tok, std::size_t at, int line,
                               const GridSpec& spec) {
  if (at + 1 >= tok.size()) throw ParseError("expected a row and a column", line);
  int r = parse_int(tok[at], line), c = parse_int(tok[at + 1], line);
  if (!spec.in_bounds(r, c)) throw ParseError("cell out of bounds", line);
  return {r, c};
}

}  // namespace

GridSpec parse_grid(const std::string& text) {
  GridSpec spec;
  bool have_grid = false;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    auto tok = split_ws(raw);
    if (tok.empty()) continue;
    const std::string& key = tok[0];
    if (key == "grid") {
      if (tok.size() != 3) throw ParseError("grid expects rows and cols", line);
      spec.rows = parse_int(tok[1], line);
      spec.cols = parse_int(tok[2], line);
      if (spec.rows <= 0 || spec.cols <= 0) throw ParseError("grid dimensions must be positive", line);
      spec.kind.assign(spec.rows * spec.cols, CellKind::Normal);
      spec.labels.assign(spec.rows * spec.cols, {});
      spec.reward.assign(spec.rows * spec.cols, 0.0);
      have_grid = true;
      continue;
    }
    if (!have_grid) throw ParseError("the grid line must come first", line);
    if (key == "slip") {
      if (tok.size() != 4) throw ParseError("slip expects three probabilities", line);
      spec.slip_intended = parse_double(tok[1], line);
      spec.slip_orth_a = parse_double(tok[2], line);
      spec.slip_orth_b = parse_double(tok[3], line);
    } else if (key == "gamma") {
      spec.gamma = parse_double(tok.at(1), line);
    } else if (key == "rmax") {
      spec.r_max = parse_double(tok.at(1), line);
    } else if (key == "start") {
      auto [r, c] = parse_cell(tok, 1, line, spec);
      spec.start_row = r;
      spec.start_col = c;
    } else if (key == "obstacle" || key == "absorbing") {
      auto [r, c] = parse_cell(tok, 1, line, spec);
      spec.kind[spec.cell(r, c)] = key == "obstacle" ? CellKind::Obstacle : CellKind::Absorbing;
    } else if (key == "label") {
      auto [r, c] = parse_cell(tok, 1, line, spec);
      auto& dst = spec.labels[spec.cell(r, c)];
      for (std::size_t i = 3; i < tok.size(); ++i) dst.push_back(tok[i]);
      std::sort(dst.begin(), dst.end());
      dst.erase(std::unique(dst.begin(), dst.end()), dst.end());
    } else if (key == "reward") {
      auto [r, c] = parse_cell(tok, 1, line, spec);
      if (tok.size() != 4) throw ParseError("reward expects a cell and a value", line);
      spec.reward[spec.cell(r, c)] = parse_double(tok[3], line);
    } else {
      throw ParseError("unknown directive '" + key + "'", line);
    }
  }
  if (!have_grid) throw ParseError("missing grid line", line);
  return spec;
}

std::string format_grid(const GridSpec& spec) {
  std::ostringstream out;
  out << "grid " << spec.rows << " " << spec.cols << "\n";
  out << "slip " << format_double(spec.slip_intended) << " " << format_double(spec.slip_orth_a)
      << " " << format_double(spec.slip_orth_b) << "\n";
  out << "gamma " << format_double(spec.gamma) << "\n";
  out << "rmax " << format_double(spec.r_max) << "\n";
  out << "start " << spec.start_row << " " << spec.start_col << "\n";
  for (int r = 0; r < spec.rows; ++r)
    for (int c = 0; c < spec.cols; ++c)
      if (spec.kind[spec.cell(r, c)] == CellKind::Obstacle)
        out << "obstacle " << r << " " << c << "\n";
  for (int r = 0; r < spec.rows; ++r)
    for (int c = 0; c < spec.cols; ++c)
      if (spec.kind[spec.cell(r, c)] == CellKind::Absorbing)
        out << "absorbing " << r << " " << c << "\n";
  for (int r = 0; r < spec.rows; ++r)
    for (int c = 0; c < spec.cols; ++c) {
      const auto& ls = spec.labels[spec.cell(r, c)];
      if (ls.empty()) continue;
      out << "label " << r << " " << c;
      for (const auto& p : ls) out << " " << p;
      out << "\n";
    }
  for (int r = 0; r < spec.rows; ++r)
    for (int c = 0; c < spec.cols; ++c)
      if (spec.reward[spec.cell(r, c)] != 0.0)
        out << "reward " << r << " " << c << " " << format_double(spec.reward[spec.cell(r, c)])
            << "\n";
  return out.str();
}

}  // namespace lexirl

#include "lexirl/render.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

#include "lexirl/util.hpp"

namespace lexirl {

namespace {

struct CellView {
  bool reachable = false;
  int dominant = -1;  // env action id with the largest mass
  bool randomized = false;
  bool takes_eps = false;
  double value = 0.0;
};

std::vector<bool> policy_reachable(const ProductMdp& p, const ProductPolicy& pi) {
  std::vector<bool> seen(p.num_states(), false);
  std::deque<int> work;
  seen[p.initial] = true;
  work.push_back(p.initial);
  while (!work.empty()) {
    int x = work.front();
    work.pop_front();
    for (const auto& e : pi.at[x]) {
      if (e.prob <= 0) continue;
      for (const auto& o : p.outcomes(x, e.action))
        if (o.prob > 0 && !seen[o.next]) {
          seen[o.next] = true;
          work.push_back(o.next);
        }
    }
  }
  return seen;
}

const char* arrow_ascii(int action) {
  switch (action) {
    case kUp:
      return "^";
    case kDown:
      return "v";
    case kLeft:
      return "<";
    case kRight:
      return ">";
  }
  return "?";
}

}  // namespace

PolicyRender render_policy(const ProductMdp& p, const ProductPolicy& pi,
                           const std::optional<GridSpec>& grid,
                           const std::vector<double>& state_value) {
  PolicyRender out;
  auto reach = policy_reachable(p, pi);

  // aggregate per environment state
  const int S = p.mdp.num_states();
  std::vector<CellView> cells(S);
  for (int x = 0; x < p.num_states(); ++x) {
    if (!reach[x]) continue;
    CellView& c = cells[p.states[x].env];
    c.reachable = true;
    std::map<int, double> mass;
    int support = 0;
    for (const auto& e : pi.at[x]) {
      if (e.prob <= 0) continue;
      ++support;
      if (p.is_eps_action(e.action))
        c.takes_eps = true;
      else
        mass[e.action] += e.prob;
    }
    if (support > 1) c.randomized = true;
    double best = -1.0;
    for (const auto& [a, m] : mass)
      if (m > best) {
        best = m;
        c.dominant = a;
      }
    if (x < static_cast<int>(state_value.size()))
      c.value = std::max(c.value, state_value[x]);
  }

  // CSV is produced for every environment
  std::ostringstream csv;
  csv << "state,dominant_action,randomized,takes_eps,value\n";
  for (int s = 0; s < S; ++s) {
    const CellView& c = cells[s];
    if (!c.reachable) continue;
    csv << p.mdp.state_name(s) << ","
        << (c.dominant >= 0 ? p.mdp.action_names[c.dominant] : "-") << ","
        << (c.randomized ? 1 : 0) << "," << (c.takes_eps ? 1 : 0) << ","
        << format_double(c.value) << "\n";
  }
  out.csv = csv.str();
  if (!grid) return out;

  const GridSpec& g = *grid;
  double vmax = 0.0;
  for (const auto& c : cells) vmax = std::max(vmax, c.value);

  std::ostringstream ascii;
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      int s = g.cell(r, c);
      const CellView& view = cells[s];
      std::string cell;
      if (g.kind[s] == CellKind::Obstacle)
        cell = "##";
      else if (g.kind[s] == CellKind::Absorbing)
        cell = "()";
      else if (!view.reachable)
        cell = "..";
      else {
        cell = view.dominant >= 0 ? arrow_ascii(view.dominant) : "e";
        cell += view.takes_eps ? "e" : (view.randomized ? "*" : " ");
      }
      ascii << "[" << cell << "]";
    }
    ascii << "\n";
  }
  ascii << "legend: ^v<> dominant move, * randomized, e takes an eps-jump, () absorbing, "
           "## obstacle, .. unreachable\n";
  out.ascii = ascii.str();

  // minimal standalone SVG, shaded by value
  const int cell_px = 48;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << g.cols * cell_px
      << "\" height=\"" << g.rows * cell_px << "\">\n";
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      int s = g.cell(r, c);
      const CellView& view = cells[s];
      int x0 = c * cell_px, y0 = r * cell_px;
      std::string fill = "#ffffff";
      if (g.kind[s] == CellKind::Obstacle) {
        fill = "#333333";
      } else if (vmax > 0 && view.reachable) {
        // bucketed blue shading by relative value
        int bucket = std::min(4, static_cast<int>(view.value / vmax * 4.999));
        static const char* blues[5] = {"#f7fbff", "#c6dbef", "#6baed6", "#2171b5", "#08306b"};
        fill = blues[bucket];
      }
      svg << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << cell_px << "\" height=\""
          << cell_px << "\" fill=\"" << fill << "\" stroke=\"#888888\"/>\n";
      if (g.kind[s] == CellKind::Absorbing)
        svg << "<circle cx=\"" << x0 + cell_px / 2 << "\" cy=\"" << y0 + cell_px / 2
            << "\" r=\"" << cell_px / 3 << "\" fill=\"none\" stroke=\"#444444\"/>\n";
      if (view.reachable && view.dominant >= 0) {
        const char* glyph = arrow_ascii(view.dominant);
        svg << "<text x=\"" << x0 + cell_px / 2 << "\" y=\"" << y0 + cell_px / 2
            << "\" text-anchor=\"middle\" dominant-baseline=\"central\" font-size=\""
            << cell_px / 2 << "\" fill=\"#d03030\">" << glyph << "</text>\n";
      }
      std::string marks;
      if (view.takes_eps) marks += "e";
      if (view.randomized) marks += "*";
      if (!marks.empty())
        svg << "<text x=\"" << x0 + cell_px - 10 << "\" y=\"" << y0 + 14
            << "\" text-anchor=\"middle\" font-size=\"12\" fill=\"#d03030\">" << marks
            << "</text>\n";
    }
  }
  svg << "</svg>\n";
  out.svg = svg.str();
  return out;
}

}  // namespace lexirl

#include "lexirl/env_io.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "lexirl/util.hpp"

namespace lexirl {

LabeledMdp parse_mdp(const std::string& text) {
  LabeledMdp m;
  m.reward.clear();
  bool have_states = false;
  std::istringstream in(text);
  std::string raw;
  int line = 0;

  auto state_ok = [&](int s) { return s >= 0 && s < m.num_states(); };
  auto find_action = [&](const std::string& name, int ln) {
    for (int i = 0; i < m.num_actions(); ++i)
      if (m.action_names[i] == name) return i;
    throw ParseError("unknown action '" + name + "'", ln);
  };

  while (std::getline(in, raw)) {
    ++line;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    auto tok = split_ws(raw);
    if (tok.empty()) continue;
    const std::string& key = tok[0];
    if (key == "mdp") {
      continue;
    } else if (key == "gamma") {
      m.gamma = parse_double(tok.at(1), line);
    } else if (key == "rmax") {
      m.r_max = parse_double(tok.at(1), line);
    } else if (key == "props") {
      m.atomic_props.assign(tok.begin() + 1, tok.end());
      if (static_cast<int>(m.atomic_props.size()) > kMaxProps)
        throw ParseError("too many atomic propositions", line);
    } else if (key == "actions") {
      m.action_names.assign(tok.begin() + 1, tok.end());
    } else if (key == "states") {
      int n = parse_int(tok.at(1), line);
      if (n <= 0) throw ParseError("state count must be positive", line);
      m.reward.assign(n, 0.0);
      m.label.assign(n, 0u);
      m.state_names.assign(n, "");
      m.actions.assign(n, {});
      m.trans.assign(n, {});
      have_states = true;
    } else if (key == "initial") {
      m.initial = parse_int(tok.at(1), line);
      if (!state_ok(m.initial)) throw ParseError("initial state out of range", line);
    } else if (key == "state") {
      if (!have_states) throw ParseError("states must be declared first", line);
      int s = parse_int(tok.at(1), line);
      if (!state_ok(s)) throw ParseError("state id out of range", line);
      std::size_t i = 2;
      while (i < tok.size()) {
        if (tok[i] == "reward") {
          m.reward[s] = parse_double(tok.at(i + 1), line);
          i += 2;
        } else if (tok[i] == "label") {
          for (++i; i < tok.size(); ++i) {
            int p = m.prop_index(tok[i]);
            if (p < 0) throw ParseError("unknown proposition '" + tok[i] + "'", line);
            m.label[s] |= 1u << p;
          }
        } else {
          throw ParseError("unknown state attribute '" + tok[i] + "'", line);
        }
      }
    } else if (key == "enable") {
      if (!have_states) throw ParseError("states must be declared first", line);
      int s = parse_int(tok.at(1), line);
      if (!state_ok(s)) throw ParseError("state id out of range", line);
      for (std::size_t i = 2; i < tok.size(); ++i) {
        ActionId a = find_action(tok[i], line);
        if (m.action_slot(s, a) >= 0) throw ParseError("action enabled twice", line);
        m.actions[s].push_back(a);
        m.trans[s].emplace_back();
      }
    } else if (key == "trans") {
      if (tok.size() != 5) throw ParseError("trans expects: state action next prob", line);
      int s = parse_int(tok[1], line);
      if (!state_ok(s)) throw ParseError("state id out of range", line);
      ActionId a = find_action(tok[2], line);
      int slot = m.action_slot(s, a);
      if (slot < 0) throw ParseError("transition for an action not enabled in the state", line);
      int t = parse_int(tok[3], line);
      if (!state_ok(t)) throw ParseError("successor state out of range", line);
      m.trans[s][slot].push_back({t, parse_double(tok[4], line)});
    } else {
      throw ParseError("unknown directive '" + key + "'", line);
    }
  }
  if (!have_states) throw ParseError("missing states line", line);
  return m;
}

std::string format_mdp(const LabeledMdp& m) {
  std::ostringstream out;
  out << "mdp\n";
  out << "gamma " << format_double(m.gamma) << "\n";
  out << "rmax " << format_double(m.r_max) << "\n";
  if (!m.atomic_props.empty()) {
    out << "props";
    for (const auto& p : m.atomic_props) out << " " << p;
    out << "\n";
  }
  out << "actions";
  for (const auto& a : m.action_names) out << " " << a;
  out << "\n";
  out << "states " << m.num_states() << "\n";
  out << "initial " << m.initial << "\n";
  for (StateId s = 0; s < m.num_states(); ++s) {
    out << "state " << s << " reward " << format_double(m.reward[s]) << " label";
    for (int p = 0; p < static_cast<int>(m.atomic_props.size()); ++p)
      if (m.label[s] & (1u << p)) out << " " << m.atomic_props[p];
    out << "\n";
  }
  for (StateId s = 0; s < m.num_states(); ++s) {
    if (m.actions[s].empty()) continue;
    out << "enable " << s;
    for (ActionId a : m.actions[s]) out << " " << m.action_names[a];
    out << "\n";
  }
  for (StateId s = 0; s < m.num_states(); ++s)
    for (std::size_t slot = 0; slot < m.actions[s].size(); ++slot)
      for (const auto& o : m.trans[s][slot])
        out << "trans " << s << " " << m.action_names[m.actions[s][slot]] << " " << o.next << " "
            << format_double(o.prob) << "\n";
  return out.str();
}

Environment parse_environment(const std::string& text) {
  // dispatch on the first directive
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    auto tok = split_ws(raw);
    if (tok.empty()) continue;
    if (tok[0] == "grid") {
      Environment env;
      env.grid = parse_grid(text);
      env.mdp = build_gridworld(*env.grid);
      return env;
    }
    if (tok[0] == "mdp") return {parse_mdp(text), std::nullopt};
    throw ParseError("environment file must start with 'grid' or 'mdp'", 1);
  }
  throw ParseError("empty environment file", 1);
}

Environment load_environment(const std::string& path) {
  return parse_environment(read_file(path));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace lexirl

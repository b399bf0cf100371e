#include "lexirl/hoa.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "lexirl/util.hpp"

namespace lexirl {

namespace {

struct Token {
  std::string text;
  int line;
};

// HOA lexer: words, integers, punctuation, "quoted strings", [label blocks]
// kept as single tokens.
std::vector<Token> lex(const std::string& text) {
  std::vector<Token> toks;
  int line = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '/' && i + 1 < text.size() && text[i + 1] == '*') {
      std::size_t end = text.find("*/", i + 2);
      if (end == std::string::npos) throw ParseError("unterminated comment", line);
      for (std::size_t j = i; j < end; ++j)
        if (text[j] == '\n') ++line;
      i = end + 2;
    } else if (c == '"') {
      std::size_t end = text.find('"', i + 1);
      if (end == std::string::npos) throw ParseError("unterminated string", line);
      toks.push_back({text.substr(i, end - i + 1), line});
      i = end + 1;
    } else if (c == '[') {
      std::size_t end = text.find(']', i + 1);
      if (end == std::string::npos) throw ParseError("unterminated label", line);
      toks.push_back({text.substr(i, end - i + 1), line});
      i = end + 1;
    } else if (c == '{') {
      std::size_t end = text.find('}', i + 1);
      if (end == std::string::npos) throw ParseError("unterminated acceptance set", line);
      toks.push_back({text.substr(i, end - i + 1), line});
      i = end + 1;
    } else {
      std::size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) &&
             text[j] != '"' && text[j] != '[' && text[j] != '{')
        ++j;
      toks.push_back({text.substr(i, j - i), line});
      i = j;
    }
  }
  return toks;
}

// Boolean label expression over AP indices, evaluated per letter.
class LabelExpr {
 public:
  LabelExpr(const std::string& body, int ap_count, int line)
      : body_(body), ap_count_(ap_count), line_(line) {}

  bool eval(Letter letter) {
    letter_ = letter;
    pos_ = 0;
    bool v = disj();
    skip();
    if (pos_ != body_.size()) throw ParseError("bad label expression '" + body_ + "'", line_);
    return v;
  }

 private:
  void skip() {
    while (pos_ < body_.size() && std::isspace(static_cast<unsigned char>(body_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < body_.size() && body_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  bool disj() {
    bool v = conj();
    while (eat('|')) v = conj() || v;
    return v;
  }
  bool conj() {
    bool v = lit();
    while (eat('&')) v = lit() && v;
    return v;
  }
  bool lit() {
    skip();
    if (eat('!')) return !lit();
    if (eat('(')) {
      bool v = disj();
      if (!eat(')')) throw ParseError("expected ')' in label", line_);
      return v;
    }
    if (eat('t')) return true;
    if (eat('f')) return false;
    if (pos_ < body_.size() && body_[pos_] == '@')
      throw ParseError("alias labels are not supported (except the [@eps] token)", line_);
    std::size_t start = pos_;
    while (pos_ < body_.size() && std::isdigit(static_cast<unsigned char>(body_[pos_]))) ++pos_;
    if (pos_ == start) throw ParseError("bad label expression '" + body_ + "'", line_);
    int idx = std::stoi(body_.substr(start, pos_ - start));
    if (idx < 0 || idx >= ap_count_)
      throw ParseError("label references AP " + std::to_string(idx) + " which is not declared",
                       line_);
    return (letter_ >> idx) & 1u;
  }

  const std::string& body_;
  int ap_count_;
  int line_;
  Letter letter_ = 0;
  std::size_t pos_ = 0;
};

std::string unquote(const Token& t) {
  if (t.text.size() < 2 || t.text.front() != '"')
    throw ParseError("expected a quoted string", t.line);
  return t.text.substr(1, t.text.size() - 2);
}

}  // namespace

Ldba parse_hoa(const std::string& text) {
  auto toks = lex(text);
  std::size_t i = 0;
  auto more = [&] { return i < toks.size(); };
  auto peek = [&]() -> const Token& {
    if (!more()) throw ParseError("unexpected end of input", toks.empty() ? 1 : toks.back().line);
    return toks[i];
  };
  auto next = [&]() -> const Token& {
    const Token& t = peek();
    ++i;
    return t;
  };
  auto expect = [&](const std::string& s) {
    const Token& t = next();
    if (t.text != s) throw ParseError("expected '" + s + "', got '" + t.text + "'", t.line);
  };

  expect("HOA:");
  expect("v1");

  Ldba l;
  int declared_states = -1;
  bool have_start = false, have_acc = false;

  while (more() && peek().text != "--BODY--") {
    Token t = next();
    const std::string& k = t.text;
    if (k == "States:") {
      declared_states = parse_int(next().text, t.line);
    } else if (k == "Start:") {
      if (have_start) throw ParseError("multiple start states are not supported", t.line);
      l.initial = parse_int(next().text, t.line);
      have_start = true;
      if (more() && peek().text == "&")
        throw ParseError("alternating start states are not supported", t.line);
    } else if (k == "AP:") {
      int n = parse_int(next().text, t.line);
      if (n > kMaxProps) throw ParseError("too many atomic propositions", t.line);
      for (int j = 0; j < n; ++j) l.ap.push_back(unquote(next()));
    } else if (k == "Acceptance:") {
      int sets = parse_int(next().text, t.line);
      std::string cond;
      while (more() && !toks[i].text.ends_with(":") && toks[i].text != "--BODY--")
        cond += next().text;
      if (sets != 1 || (cond != "Inf(0)" && cond != "Inf(0)t" && cond != "Inf(0)&t"))
        throw ParseError("only Büchi acceptance '1 Inf(0)' is supported, got '" +
                             std::to_string(sets) + " " + cond + "'",
                         t.line);
      have_acc = true;
    } else if (k == "acc-name:") {
      Token v = next();
      if (v.text != "Buchi")
        throw ParseError("unsupported acceptance name '" + v.text + "'", v.line);
    } else if (k == "name:") {
      l.name = unquote(next());
    } else if (k == "Alias:") {
      throw ParseError("aliases are not supported", t.line);
    } else if (k == "tool:" || k == "owner:" || k == "properties:") {
      // skip values up to the next header or the body
      while (more() && !toks[i].text.ends_with(":") && toks[i].text != "--BODY--") ++i;
    } else if (k.ends_with(":")) {
      while (more() && !toks[i].text.ends_with(":") && toks[i].text != "--BODY--") ++i;
    } else {
      throw ParseError("unexpected token '" + k + "' in header", t.line);
    }
  }
  if (!more()) throw ParseError("missing --BODY--", 1);
  expect("--BODY--");
  if (declared_states < 0) throw ParseError("missing States: header", peek().line);
  if (!have_acc) throw ParseError("missing Acceptance: header", peek().line);
  if (!have_start) throw ParseError("missing Start: header", peek().line);
  if (l.initial < 0 || l.initial >= declared_states)
    throw ParseError("start state out of range", peek().line);

  const int letters = l.num_letters();
  l.delta.assign(declared_states, std::vector<int>(letters, -1));
  l.eps.assign(declared_states, {});
  l.accepting.assign(declared_states, false);

  int current = -1;
  while (more() && peek().text != "--END--") {
    Token t = next();
    if (t.text == "State:") {
      if (more() && peek().text.front() == '[')
        throw ParseError("state labels are not supported", t.line);
      current = parse_int(next().text, t.line);
      if (current < 0 || current >= declared_states)
        throw ParseError("state id out of range", t.line);
      if (more() && peek().text.front() == '"') next();  // optional state name
      if (more() && peek().text.front() == '{') {
        Token acc = next();
        std::string inner = acc.text.substr(1, acc.text.size() - 2);
        for (const auto& part : split_ws(inner))
          if (parse_int(part, acc.line) != 0)
            throw ParseError("acceptance set out of range", acc.line);
        l.accepting[current] = true;
      }
    } else if (t.text.front() == '[') {
      if (current < 0) throw ParseError("edge before any State:", t.line);
      std::string body = t.text.substr(1, t.text.size() - 2);
      Token dest_tok = next();
      int dest = parse_int(dest_tok.text, dest_tok.line);
      if (dest < 0 || dest >= declared_states)
        throw ParseError("edge destination out of range", dest_tok.line);
      if (more() && peek().text == "&")
        throw ParseError("alternating edge destinations are not supported", dest_tok.line);
      if (more() && peek().text.front() == '{')
        throw ParseError("transition-based acceptance is not supported", peek().line);
      // strip whitespace to recognize the reserved ε token
      std::string stripped;
      for (char c : body)
        if (!std::isspace(static_cast<unsigned char>(c))) stripped += c;
      if (stripped == "@eps") {
        l.eps[current].push_back(dest);
        continue;
      }
      LabelExpr expr(body, static_cast<int>(l.ap.size()), t.line);
      for (Letter letter = 0; letter < static_cast<Letter>(letters); ++letter) {
        if (!expr.eval(letter)) continue;
        if (l.delta[current][letter] != -1)
          throw ParseError("state " + std::to_string(current) +
                               " has overlapping edge labels (nondeterministic letter)",
                           t.line);
        l.delta[current][letter] = dest;
      }
    } else {
      throw ParseError("unexpected token '" + t.text + "' in body", t.line);
    }
  }
  if (!more()) throw ParseError("missing --END--", 1);

  for (auto& e : l.eps) {
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
  }
  derive_partition(l);
  auto bad = validate_suitable(l);
  if (!bad.empty()) throw ParseError("automaton is not a suitable LDBA: " + bad.front(), 1);
  return l;
}

namespace {

std::string minterm(Letter letter, int ap_count) {
  if (ap_count == 0) return "t";
  std::string s;
  for (int i = 0; i < ap_count; ++i) {
    if (i) s += " & ";
    if (!((letter >> i) & 1u)) s += "!";
    s += std::to_string(i);
  }
  return s;
}

void print_header(std::ostringstream& out, const std::string& name, int states, int start,
                  const std::vector<std::string>& ap) {
  out << "HOA: v1\n";
  if (!name.empty()) out << "name: \"" << name << "\"\n";
  out << "States: " << states << "\n";
  out << "Start: " << start << "\n";
  out << "AP: " << ap.size();
  for (const auto& p : ap) out << " \"" << p << "\"";
  out << "\n";
  out << "acc-name: Buchi\n";
  out << "Acceptance: 1 Inf(0)\n";
  out << "properties: trans-labels explicit-labels state-acc\n";
  out << "--BODY--\n";
}

}  // namespace

std::string print_hoa(const Ldba& l) {
  std::ostringstream out;
  print_header(out, l.name, l.num_states(), l.initial, l.ap);
  for (int q = 0; q < l.num_states(); ++q) {
    out << "State: " << q;
    if (l.accepting[q]) out << " {0}";
    out << "\n";
    for (Letter letter = 0; letter < static_cast<Letter>(l.num_letters()); ++letter)
      if (l.delta[q][letter] >= 0)
        out << "[" << minterm(letter, static_cast<int>(l.ap.size())) << "] "
            << l.delta[q][letter] << "\n";
    for (int t : l.eps[q]) out << "[@eps] " << t << "\n";
  }
  out << "--END--\n";
  return out.str();
}

std::string print_hoa(const SafetyAutomaton& a, const std::string& name) {
  std::ostringstream out;
  print_header(out, name, a.num_states(), a.initial, a.ap);
  for (int q = 0; q < a.num_states(); ++q) {
    out << "State: " << q;
    if (a.accepting[q]) out << " {0}";
    out << "\n";
    for (Letter letter = 0; letter < static_cast<Letter>(a.num_letters()); ++letter)
      out << "[" << minterm(letter, static_cast<int>(a.ap.size())) << "] " << a.delta[q][letter]
          << "\n";
  }
  out << "--END--\n";
  return out.str();
}

}  // namespace lexirl

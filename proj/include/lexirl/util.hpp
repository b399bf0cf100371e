#pragma once

#include <charconv>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lexirl {

/// Error raised by parsers and loaders; carries a human-readable location.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line, int column = -1)
      : std::runtime_error(locate(what, line, column)), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  static std::string locate(const std::string& what, int line, int column) {
    std::string s = what;
    if (line >= 0) {
      s += " (line " + std::to_string(line);
      if (column >= 0) s += ", column " + std::to_string(column);
      s += ")";
    }
    return s;
  }
  int line_;
  int column_;
};

/// Shortest round-trip decimal form of a double. Used everywhere a number is
/// written to a file so that emitted artifacts are byte-stable.
inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline double parse_double(const std::string& tok, int line) {
  double v = 0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw ParseError("expected a number, got '" + tok + "'", line);
  return v;
}

inline int parse_int(const std::string& tok, int line) {
  int v = 0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw ParseError("expected an integer, got '" + tok + "'", line);
  return v;
}

}  // namespace lexirl

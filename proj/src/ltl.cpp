#include "lexirl/ltl.hpp"

#include <cctype>

#include "lexirl/util.hpp"

namespace lexirl {

namespace {

LtlRef mk(LtlKind k, LtlRef l = nullptr, LtlRef r = nullptr, int atom = -1) {
  auto n = std::make_shared<LtlNode>();
  n->kind = k;
  n->atom = atom;
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  return n;
}

}  // namespace

LtlRef ltl_true() { return mk(LtlKind::True); }
LtlRef ltl_false() { return mk(LtlKind::False); }
LtlRef ltl_atom(int index) { return mk(LtlKind::Atom, nullptr, nullptr, index); }
LtlRef ltl_not(LtlRef x) { return mk(LtlKind::Not, std::move(x)); }
LtlRef ltl_and(LtlRef a, LtlRef b) { return mk(LtlKind::And, std::move(a), std::move(b)); }
LtlRef ltl_or(LtlRef a, LtlRef b) { return mk(LtlKind::Or, std::move(a), std::move(b)); }
LtlRef ltl_next(LtlRef x) { return mk(LtlKind::Next, std::move(x)); }
LtlRef ltl_until(LtlRef a, LtlRef b) { return mk(LtlKind::Until, std::move(a), std::move(b)); }
LtlRef ltl_release(LtlRef a, LtlRef b) { return mk(LtlKind::Release, std::move(a), std::move(b)); }
LtlRef ltl_eventually(LtlRef x) { return ltl_until(ltl_true(), std::move(x)); }
LtlRef ltl_always(LtlRef x) { return ltl_not(ltl_until(ltl_true(), ltl_not(std::move(x)))); }

namespace {

// Recursive-descent parser over the core-plus-sugar syntax. Derived
// operators are expanded immediately, so the resulting tree only contains
// True, Atom, Not, And, Next, Until.
class Parser {
 public:
  Parser(const std::string& text, const std::vector<std::string>& alphabet)
      : text_(text), alphabet_(alphabet) {}

  LtlRef parse() {
    LtlRef f = implies();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("LTL syntax error: " + msg, 1, static_cast<int>(pos_) + 1);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(const char* tok) {
    skip_ws();
    std::size_t len = std::char_traits<char>::length(tok);
    if (text_.compare(pos_, len, tok) != 0) return false;
    // a word token must not run into an identifier character
    if (std::isalpha(static_cast<unsigned char>(tok[0]))) {
      char after = pos_ + len < text_.size() ? text_[pos_ + len] : ' ';
      if (std::isalnum(static_cast<unsigned char>(after)) || after == '_') return false;
    }
    pos_ += len;
    return true;
  }

  LtlRef implies() {  // right associative
    LtlRef l = disj();
    if (eat("->")) return ltl_not(ltl_and(l, ltl_not(implies())));
    return l;
  }

  LtlRef disj() {
    LtlRef l = conj();
    while (eat("|")) l = ltl_not(ltl_and(ltl_not(l), ltl_not(conj())));
    return l;
  }

  LtlRef conj() {
    LtlRef l = until();
    while (eat("&")) l = ltl_and(l, until());
    return l;
  }

  LtlRef until() {  // right associative
    LtlRef l = unary();
    if (eat("U")) return ltl_until(l, until());
    return l;
  }

  LtlRef unary() {
    if (eat("!")) return ltl_not(unary());
    if (eat("X")) return ltl_next(unary());
    if (eat("<>")) return ltl_eventually(unary());
    if (eat("[]")) return ltl_always(unary());
    return atom();
  }

  LtlRef atom() {
    skip_ws();
    if (eat("(")) {
      LtlRef f = implies();
      if (!eat(")")) fail("expected ')'");
      return f;
    }
    if (eat("true")) return ltl_true();
    if (eat("false")) return ltl_not(ltl_true());
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    if (pos_ == start) fail("expected a proposition or '('");
    std::string name = text_.substr(start, pos_ - start);
    for (int i = 0; i < static_cast<int>(alphabet_.size()); ++i)
      if (alphabet_[i] == name) return ltl_atom(i);
    pos_ = start;
    fail("unknown proposition '" + name + "'");
  }

  const std::string& text_;
  const std::vector<std::string>& alphabet_;
  std::size_t pos_ = 0;
};

int precedence(LtlKind k) {
  switch (k) {
    case LtlKind::Until:
    case LtlKind::Release:
      return 3;
    case LtlKind::And:
      return 2;
    case LtlKind::Or:
      return 1;
    default:
      return 4;  // atoms and unary operators never need parentheses
  }
}

struct Printer {
  const std::vector<std::string>& ap;

  std::string wrap(const LtlRef& n, int parent_prec) const {
    // sugar views change the effective precedence, so recompute through them
    std::string s = print(n);
    if (effective_prec(n) < parent_prec) return "(" + s + ")";
    return s;
  }

  int effective_prec(const LtlRef& n) const {
    if (n->kind == LtlKind::Not) {
      const LtlRef& x = n->lhs;
      if (x->kind == LtlKind::True) return 4;  // false
      if (x->kind == LtlKind::Until && x->lhs->kind == LtlKind::True &&
          x->rhs->kind == LtlKind::Not)
        return 4;  // [] sugar
      if (x->kind == LtlKind::And) {
        if (x->lhs->kind == LtlKind::Not && x->rhs->kind == LtlKind::Not) return 1;  // |
        if (x->rhs->kind == LtlKind::Not) return 0;                                  // ->
      }
      return 4;
    }
    if (n->kind == LtlKind::Until && n->lhs->kind == LtlKind::True) return 4;  // <>
    return precedence(n->kind);
  }

  std::string print(const LtlRef& n) const {
    switch (n->kind) {
      case LtlKind::True:
        return "true";
      case LtlKind::False:
        return "false";
      case LtlKind::Atom:
        return ap[n->atom];
      case LtlKind::Next:
        return "X " + wrap(n->lhs, 4);
      case LtlKind::And:
        return wrap(n->lhs, 2) + " & " + wrap(n->rhs, 3);
      case LtlKind::Or:
        return wrap(n->lhs, 1) + " | " + wrap(n->rhs, 2);
      case LtlKind::Release:
        return wrap(n->lhs, 4) + " R " + wrap(n->rhs, 3);
      case LtlKind::Until:
        if (n->lhs->kind == LtlKind::True) return "<>" + wrap(n->rhs, 4);
        return wrap(n->lhs, 4) + " U " + wrap(n->rhs, 3);
      case LtlKind::Not: {
        const LtlRef& x = n->lhs;
        if (x->kind == LtlKind::True) return "false";
        if (x->kind == LtlKind::Until && x->lhs->kind == LtlKind::True &&
            x->rhs->kind == LtlKind::Not)
          return "[]" + wrap(x->rhs->lhs, 4);
        if (x->kind == LtlKind::And) {
          if (x->lhs->kind == LtlKind::Not && x->rhs->kind == LtlKind::Not)
            return wrap(x->lhs->lhs, 1) + " | " + wrap(x->rhs->lhs, 2);
          if (x->rhs->kind == LtlKind::Not)
            return wrap(x->lhs, 1) + " -> " + wrap(x->rhs->lhs, 0);
        }
        return "!" + wrap(x, 4);
      }
    }
    return "?";
  }
};

}  // namespace

LtlFormula parse_ltl(const std::string& text, const std::vector<std::string>& alphabet) {
  LtlFormula f;
  f.alphabet = alphabet;
  f.root = Parser(text, alphabet).parse();
  return f;
}

std::string print_ltl(const LtlRef& node, const std::vector<std::string>& alphabet) {
  return Printer{alphabet}.print(node);
}

std::string print_ltl(const LtlFormula& f) { return print_ltl(f.root, f.alphabet); }

namespace {

LtlRef pnf_pos(const LtlRef& n);
LtlRef pnf_neg(const LtlRef& n);

LtlRef pnf_pos(const LtlRef& n) {
  switch (n->kind) {
    case LtlKind::True:
    case LtlKind::False:
      return n;
    case LtlKind::Atom:
      return n;
    case LtlKind::Not:
      return pnf_neg(n->lhs);
    case LtlKind::And:
      return ltl_and(pnf_pos(n->lhs), pnf_pos(n->rhs));
    case LtlKind::Or:
      return ltl_or(pnf_pos(n->lhs), pnf_pos(n->rhs));
    case LtlKind::Next:
      return ltl_next(pnf_pos(n->lhs));
    case LtlKind::Until:
      return ltl_until(pnf_pos(n->lhs), pnf_pos(n->rhs));
    case LtlKind::Release:
      return ltl_release(pnf_pos(n->lhs), pnf_pos(n->rhs));
  }
  return n;
}

LtlRef pnf_neg(const LtlRef& n) {
  switch (n->kind) {
    case LtlKind::True:
      return ltl_false();
    case LtlKind::False:
      return ltl_true();
    case LtlKind::Atom:
      return ltl_not(n);
    case LtlKind::Not:
      return pnf_pos(n->lhs);
    case LtlKind::And:
      return ltl_or(pnf_neg(n->lhs), pnf_neg(n->rhs));
    case LtlKind::Or:
      return ltl_and(pnf_neg(n->lhs), pnf_neg(n->rhs));
    case LtlKind::Next:
      return ltl_next(pnf_neg(n->lhs));
    case LtlKind::Until:
      return ltl_release(pnf_neg(n->lhs), pnf_neg(n->rhs));
    case LtlKind::Release:
      return ltl_until(pnf_neg(n->lhs), pnf_neg(n->rhs));
  }
  return n;
}

bool pnf_safe(const LtlRef& n) {
  switch (n->kind) {
    case LtlKind::Until:
      return false;
    case LtlKind::Release:
      // only the [] shape (false R x) stays within the fragment
      return n->lhs->kind == LtlKind::False && pnf_safe(n->rhs);
    case LtlKind::Not:
      return true;  // negations sit on atoms in PNF
    case LtlKind::And:
    case LtlKind::Or:
      return pnf_safe(n->lhs) && pnf_safe(n->rhs);
    case LtlKind::Next:
      return pnf_safe(n->lhs);
    default:
      return true;
  }
}

}  // namespace

LtlRef to_pnf(const LtlRef& node) { return pnf_pos(node); }

bool is_syntactic_safety(const LtlFormula& f) { return pnf_safe(to_pnf(f.root)); }

bool ltl_equal(const LtlRef& a, const LtlRef& b) {
  if (a == b) return true;
  if (a->kind != b->kind || a->atom != b->atom) return false;
  if ((a->lhs == nullptr) != (b->lhs == nullptr)) return false;
  if ((a->rhs == nullptr) != (b->rhs == nullptr)) return false;
  if (a->lhs && !ltl_equal(a->lhs, b->lhs)) return false;
  if (a->rhs && !ltl_equal(a->rhs, b->rhs)) return false;
  return true;
}

}  // namespace lexirl

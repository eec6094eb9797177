#pragma once

// First-order formulas over a numeration system: AST and parser.
//
//   formula  := iff
//   iff      := implies ("<=>" implies)*
//   implies  := or ("=>" implies)?
//   or       := and ("|" and)*
//   and      := unary ("&" unary)*
//   unary    := "~" unary | ("A"|"E") var ("," var)* iff | primary
//   primary  := "(" formula ")" | "true" | "false"
//             | "$" name "(" term ("," term)* ")"
//             | NAME "[" term "]" ("="|"!=") ("@" int | NAME "[" term "]")
//             | term cmp term
//   term     := product (("+"|"-") product)*
//   product  := factor (("*"|"/") factor)*
//   factor   := int | var | "(" term ")"
//
// A quantifier's body extends as far right as possible. "A"/"E" directly
// followed by a lowercase letter is a quantifier ("Ax,y" quantifies x, y).

#include <cctype>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "autoseq/numeration.hpp"

namespace autoseq {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_, column_;
};

struct SourcePos {
  std::size_t line = 1, column = 1;
};

struct Term {
  enum class Kind { Var, Const, Add, Sub, Mul, Div };
  Kind kind = Kind::Const;
  std::string name;  // Var
  Natural value = 0;  // Const, and the constant factor of Mul / divisor of Div
  std::vector<std::shared_ptr<const Term>> args;
  SourcePos pos;
};
using TermPtr = std::shared_ptr<const Term>;

enum class Cmp { Eq, Ne, Lt, Le, Gt, Ge };

struct Formula {
  enum class Kind { True, False, Not, And, Or, Implies, Iff, Exists, Forall, Compare, Call, OutputConst, OutputEq };
  Kind kind = Kind::True;
  std::vector<std::shared_ptr<const Formula>> children;
  std::string name;   // bound variable, predicate or DFAO name
  std::string name2;  // second DFAO of OutputEq
  std::vector<TermPtr> terms;
  Cmp cmp = Cmp::Eq;  // Compare; Eq/Ne for output atoms
  int output = 0;     // OutputConst
  SourcePos pos;
};
using FormulaPtr = std::shared_ptr<const Formula>;

/// A parsed query: optional "?system" prefix plus the formula.
struct Query {
  std::string system;
  FormulaPtr formula;
};

namespace detail {

struct Token {
  enum class Kind { Ident, Quant, Number, Dollar, Sym, End };
  Kind kind = Kind::End;
  std::string text;
  SourcePos pos;
};

inline std::vector<Token> lex_formula(std::string_view s, SourcePos origin) {
  std::vector<Token> out;
  std::size_t i = 0;
  SourcePos pos = origin;
  auto advance = [&](std::size_t n) {
    for (std::size_t j = 0; j < n; ++j, ++i) {
      if (s[i] == '\n') {
        ++pos.line;
        pos.column = 1;
      } else {
        ++pos.column;
      }
    }
  };
  auto ident_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    Token t;
    t.pos = pos;
    if ((c == 'A' || c == 'E') && i + 1 < s.size()) {
      std::size_t j = i + 1;
      while (j < s.size() && (s[j] == ' ' || s[j] == '\t')) ++j;
      const bool after_dollar = !out.empty() && out.back().kind == Token::Kind::Dollar;
      if (!after_dollar && j < s.size() && std::islower(static_cast<unsigned char>(s[j]))) {
        t.kind = Token::Kind::Quant;
        t.text = std::string(1, c);
        out.push_back(t);
        advance(1);
        continue;
      }
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && ident_char(s[j])) ++j;
      t.kind = Token::Kind::Ident;
      t.text = std::string(s.substr(i, j - i));
      out.push_back(t);
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      t.kind = Token::Kind::Number;
      t.text = std::string(s.substr(i, j - i));
      out.push_back(t);
      advance(j - i);
      continue;
    }
    if (c == '$') {
      t.kind = Token::Kind::Dollar;
      t.text = "$";
      out.push_back(t);
      advance(1);
      continue;
    }
    static const char* const symbols[] = {"<=>", "=>", "<=", ">=", "!=", "=", "<", ">", "&", "|", "~",
                                          "(",   ")",  "[",  "]",  ",",  "+", "-", "*", "/", "@", "?"};
    bool matched = false;
    for (const char* sym : symbols) {
      std::string_view sv(sym);
      if (s.substr(i, sv.size()) == sv) {
        t.kind = Token::Kind::Sym;
        t.text = std::string(sv);
        out.push_back(t);
        advance(sv.size());
        matched = true;
        break;
      }
    }
    if (!matched) throw ParseError(std::string("unexpected character '") + c + "'", pos.line, pos.column);
  }
  Token end;
  end.pos = pos;
  out.push_back(end);
  return out;
}

class FormulaParser {
 public:
  FormulaParser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Query parse_query() {
    Query q;
    if (is_sym("?")) {
      ++i_;
      const Token& t = expect(Token::Kind::Ident, "numeration system name");
      q.system = t.text;
    }
    q.formula = parse_iff();
    if (peek().kind != Token::Kind::End) fail("unexpected '" + peek().text + "'");
    return q;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(i_ + ahead, toks_.size() - 1)]; }
  bool is_sym(std::string_view s, std::size_t ahead = 0) const {
    return peek(ahead).kind == Token::Kind::Sym && peek(ahead).text == s;
  }
  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    throw ParseError(t.kind == Token::Kind::End ? what + " (at end of formula)" : what, t.pos.line, t.pos.column);
  }
  const Token& expect(Token::Kind kind, const std::string& what) {
    if (peek().kind != kind) fail("expected " + what);
    return toks_[i_++];
  }
  void expect_sym(std::string_view s) {
    if (!is_sym(s)) fail("expected '" + std::string(s) + "'");
    ++i_;
  }

  static FormulaPtr binary(Formula::Kind kind, FormulaPtr a, FormulaPtr b, SourcePos pos) {
    auto f = std::make_shared<Formula>();
    f->kind = kind;
    f->children = {std::move(a), std::move(b)};
    f->pos = pos;
    return f;
  }

  FormulaPtr parse_iff() {
    FormulaPtr left = parse_implies();
    while (is_sym("<=>")) {
      SourcePos pos = peek().pos;
      ++i_;
      left = binary(Formula::Kind::Iff, left, parse_implies(), pos);
    }
    return left;
  }

  FormulaPtr parse_implies() {
    FormulaPtr left = parse_or();
    if (is_sym("=>")) {
      SourcePos pos = peek().pos;
      ++i_;
      return binary(Formula::Kind::Implies, left, parse_implies(), pos);
    }
    return left;
  }

  FormulaPtr parse_or() {
    FormulaPtr left = parse_and();
    while (is_sym("|")) {
      SourcePos pos = peek().pos;
      ++i_;
      left = binary(Formula::Kind::Or, left, parse_and(), pos);
    }
    return left;
  }

  FormulaPtr parse_and() {
    FormulaPtr left = parse_unary();
    while (is_sym("&")) {
      SourcePos pos = peek().pos;
      ++i_;
      left = binary(Formula::Kind::And, left, parse_unary(), pos);
    }
    return left;
  }

  FormulaPtr parse_unary() {
    const SourcePos pos = peek().pos;
    if (is_sym("~")) {
      ++i_;
      auto f = std::make_shared<Formula>();
      f->kind = Formula::Kind::Not;
      f->children = {parse_unary()};
      f->pos = pos;
      return f;
    }
    if (peek().kind == Token::Kind::Quant) {
      const bool forall = peek().text == "A";
      ++i_;
      std::vector<std::string> vars{expect(Token::Kind::Ident, "variable").text};
      while (is_sym(",")) {
        ++i_;
        vars.push_back(expect(Token::Kind::Ident, "variable").text);
      }
      for (const auto& v : vars) {
        if (!std::islower(static_cast<unsigned char>(v[0]))) fail("quantified variables must start lowercase");
      }
      FormulaPtr body = parse_iff();
      for (auto it = vars.rbegin(); it != vars.rend(); ++it) {
        auto f = std::make_shared<Formula>();
        f->kind = forall ? Formula::Kind::Forall : Formula::Kind::Exists;
        f->name = *it;
        f->children = {body};
        f->pos = pos;
        body = f;
      }
      return body;
    }
    return parse_primary();
  }

  FormulaPtr parse_primary() {
    const Token& t = peek();
    auto f = std::make_shared<Formula>();
    f->pos = t.pos;
    if (is_sym("(")) {
      // Either a parenthesized formula or a comparison whose left term
      // starts with a parenthesis; try the formula reading first.
      const std::size_t mark = i_;
      try {
        ++i_;
        FormulaPtr inner = parse_iff();
        expect_sym(")");
        if (!starts_term_continuation()) return inner;
      } catch (const ParseError&) {
      }
      i_ = mark;
    }
    if (t.kind == Token::Kind::Ident && (t.text == "true" || t.text == "false") && !is_sym("[", 1)) {
      ++i_;
      f->kind = t.text == "true" ? Formula::Kind::True : Formula::Kind::False;
      return f;
    }
    if (t.kind == Token::Kind::Dollar) {
      ++i_;
      f->kind = Formula::Kind::Call;
      f->name = expect(Token::Kind::Ident, "predicate name").text;
      expect_sym("(");
      f->terms.push_back(parse_term());
      while (is_sym(",")) {
        ++i_;
        f->terms.push_back(parse_term());
      }
      expect_sym(")");
      return f;
    }
    if (t.kind == Token::Kind::Ident && is_sym("[", 1)) {
      ++i_;
      f->name = t.text;
      ++i_;
      f->terms.push_back(parse_term());
      expect_sym("]");
      if (is_sym("=")) {
        f->cmp = Cmp::Eq;
      } else if (is_sym("!=")) {
        f->cmp = Cmp::Ne;
      } else {
        fail("expected '=' or '!=' after automaton lookup");
      }
      ++i_;
      if (is_sym("@")) {
        ++i_;
        f->kind = Formula::Kind::OutputConst;
        f->output = std::stoi(expect(Token::Kind::Number, "output value").text);
        return f;
      }
      f->kind = Formula::Kind::OutputEq;
      f->name2 = expect(Token::Kind::Ident, "automaton name").text;
      expect_sym("[");
      f->terms.push_back(parse_term());
      expect_sym("]");
      return f;
    }
    f->kind = Formula::Kind::Compare;
    f->terms.push_back(parse_term());
    static const std::pair<const char*, Cmp> ops[] = {{"=", Cmp::Eq}, {"!=", Cmp::Ne}, {"<", Cmp::Lt},
                                                      {"<=", Cmp::Le}, {">", Cmp::Gt}, {">=", Cmp::Ge}};
    bool found = false;
    for (auto [text, cmp] : ops) {
      if (is_sym(text)) {
        f->cmp = cmp;
        found = true;
        break;
      }
    }
    if (!found) fail("expected comparison operator");
    ++i_;
    f->terms.push_back(parse_term());
    return f;
  }

  bool starts_term_continuation() const {
    for (const char* s : {"+", "-", "*", "/", "=", "!=", "<", "<=", ">", ">="}) {
      if (is_sym(s)) return true;
    }
    return false;
  }

  static TermPtr make(Term::Kind kind, std::vector<TermPtr> args, SourcePos pos, Natural value = 0) {
    auto t = std::make_shared<Term>();
    t->kind = kind;
    t->args = std::move(args);
    t->pos = pos;
    t->value = value;
    return t;
  }

  TermPtr parse_term() {
    TermPtr left = parse_product();
    while (is_sym("+") || is_sym("-")) {
      const SourcePos pos = peek().pos;
      const bool add = is_sym("+");
      ++i_;
      left = make(add ? Term::Kind::Add : Term::Kind::Sub, {left, parse_product()}, pos);
    }
    return left;
  }

  TermPtr parse_product() {
    TermPtr left = parse_factor();
    while (is_sym("*") || is_sym("/")) {
      const SourcePos pos = peek().pos;
      const bool mul = is_sym("*");
      ++i_;
      TermPtr right = parse_factor();
      if (mul) {
        if (left->kind == Term::Kind::Const && right->kind == Term::Kind::Const) {
          left = make(Term::Kind::Const, {}, pos, checked_mul(left->value, right->value));
        } else if (left->kind == Term::Kind::Const) {
          left = make(Term::Kind::Mul, {right}, pos, left->value);
        } else if (right->kind == Term::Kind::Const) {
          left = make(Term::Kind::Mul, {left}, pos, right->value);
        } else {
          throw ParseError("multiplication needs a constant factor", pos.line, pos.column);
        }
      } else {
        if (right->kind != Term::Kind::Const) throw ParseError("division needs a constant divisor", pos.line, pos.column);
        if (right->value == 0) throw ParseError("division by zero", pos.line, pos.column);
        left = make(Term::Kind::Div, {left}, pos, right->value);
      }
    }
    return left;
  }

  TermPtr parse_factor() {
    const Token& t = peek();
    if (t.kind == Token::Kind::Number) {
      ++i_;
      Natural v = 0;
      for (char c : t.text) v = checked_add(checked_mul(v, 10), static_cast<Natural>(c - '0'));
      return make(Term::Kind::Const, {}, t.pos, v);
    }
    if (t.kind == Token::Kind::Ident) {
      if (!std::islower(static_cast<unsigned char>(t.text[0]))) fail("variables must start lowercase");
      ++i_;
      auto v = std::make_shared<Term>();
      v->kind = Term::Kind::Var;
      v->name = t.text;
      v->pos = t.pos;
      return v;
    }
    if (is_sym("(")) {
      ++i_;
      TermPtr inner = parse_term();
      expect_sym(")");
      return inner;
    }
    fail("expected a term");
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

}  // namespace detail

/// Parses "?system formula". `origin` positions diagnostics inside a script.
inline Query parse_query(std::string_view text, SourcePos origin = {}) {
  return detail::FormulaParser(detail::lex_formula(text, origin)).parse_query();
}

inline std::string to_string(Cmp c) {
  switch (c) {
    case Cmp::Eq: return "=";
    case Cmp::Ne: return "!=";
    case Cmp::Lt: return "<";
    case Cmp::Le: return "<=";
    case Cmp::Gt: return ">";
    case Cmp::Ge: return ">=";
  }
  return "?";
}

inline std::string to_string(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Var: return t.name;
    case Term::Kind::Const: return std::to_string(t.value);
    case Term::Kind::Add: return "(" + to_string(*t.args[0]) + "+" + to_string(*t.args[1]) + ")";
    case Term::Kind::Sub: return "(" + to_string(*t.args[0]) + "-" + to_string(*t.args[1]) + ")";
    case Term::Kind::Mul: return std::to_string(t.value) + "*" + to_string(*t.args[0]);
    case Term::Kind::Div: return to_string(*t.args[0]) + "/" + std::to_string(t.value);
  }
  return "?";
}

/// Fully parenthesized rendering, for diagnostics and parser tests.
inline std::string to_string(const Formula& f) {
  auto child = [&](std::size_t i) { return to_string(*f.children[i]); };
  switch (f.kind) {
    case Formula::Kind::True: return "true";
    case Formula::Kind::False: return "false";
    case Formula::Kind::Not: return "~" + child(0);
    case Formula::Kind::And: return "(" + child(0) + " & " + child(1) + ")";
    case Formula::Kind::Or: return "(" + child(0) + " | " + child(1) + ")";
    case Formula::Kind::Implies: return "(" + child(0) + " => " + child(1) + ")";
    case Formula::Kind::Iff: return "(" + child(0) + " <=> " + child(1) + ")";
    case Formula::Kind::Exists: return "(E" + f.name + " " + child(0) + ")";
    case Formula::Kind::Forall: return "(A" + f.name + " " + child(0) + ")";
    case Formula::Kind::Compare:
      return to_string(*f.terms[0]) + to_string(f.cmp) + to_string(*f.terms[1]);
    case Formula::Kind::Call: {
      std::string s = "$" + f.name + "(";
      for (std::size_t i = 0; i < f.terms.size(); ++i) s += (i ? "," : "") + to_string(*f.terms[i]);
      return s + ")";
    }
    case Formula::Kind::OutputConst:
      return f.name + "[" + to_string(*f.terms[0]) + "]" + to_string(f.cmp) + "@" + std::to_string(f.output);
    case Formula::Kind::OutputEq:
      return f.name + "[" + to_string(*f.terms[0]) + "]" + to_string(f.cmp) + f.name2 + "[" +
             to_string(*f.terms[1]) + "]";
  }
  return "?";
}

}  // namespace autoseq

#pragma once

// Multi-track regular expressions: literals are bracketed tuples "[1,0]"
// (or bare digits on a single track), with concatenation, '|', '*', '+',
// '?', grouping, and "()" for the empty word.

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "autoseq/automaton.hpp"

namespace autoseq {

class RegexError : public std::runtime_error {
 public:
  RegexError(const std::string& what, std::size_t position)
      : std::runtime_error("regex error at position " + std::to_string(position) + ": " + what),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

struct RegexNode {
  enum class Kind { Empty, Literal, Concat, Union, Star, Plus, Optional };
  Kind kind = Kind::Empty;
  Letter letter = 0;
  std::vector<std::unique_ptr<RegexNode>> children;
};

/// Parsed expression bound to one alphabet.
class MultiTrackRegex {
 public:
  static MultiTrackRegex parse(std::string_view text, const Alphabet& alphabet) {
    Parser p{text, alphabet, 0};
    auto root = p.parse_union();
    p.skip_space();
    if (p.pos != text.size()) throw RegexError("unexpected '" + std::string(1, text[p.pos]) + "'", p.pos);
    MultiTrackRegex r;
    r.alphabet_ = alphabet;
    r.root_ = std::shared_ptr<const RegexNode>(std::move(root));
    return r;
  }

  const Alphabet& alphabet() const { return alphabet_; }
  const RegexNode& root() const { return *root_; }

  /// Thompson construction.
  Nfa to_nfa() const {
    Nfa n(alphabet_, 0);
    auto [start, end] = build(n, *root_);
    n.initial = {start};
    n.accepting[static_cast<std::size_t>(end)] = 1;
    return n;
  }

  /// Direct backtracking-free matcher over the AST (set-of-positions
  /// simulation of the Thompson NFA). Used as an independent check.
  bool matches(std::span<const Letter> word) const {
    Nfa n = to_nfa();
    std::vector<StateId> current = n.initial;
    detail::epsilon_close(n, current);
    for (Letter l : word) {
      std::vector<StateId> next;
      for (StateId s : current) {
        for (StateId t : n.targets(s, l)) next.push_back(t);
      }
      detail::epsilon_close(n, next);
      current = std::move(next);
      if (current.empty()) return false;
    }
    for (StateId s : current) {
      if (n.accepting[static_cast<std::size_t>(s)]) return true;
    }
    return false;
  }

 private:
  struct Parser {
    std::string_view text;
    const Alphabet& alphabet;
    std::size_t pos;

    void skip_space() {
      while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\n' || text[pos] == '\r')) ++pos;
    }
    bool peek(char c) {
      skip_space();
      return pos < text.size() && text[pos] == c;
    }

    std::unique_ptr<RegexNode> parse_union() {
      auto first = parse_concat();
      if (!peek('|')) return first;
      auto node = std::make_unique<RegexNode>();
      node->kind = RegexNode::Kind::Union;
      node->children.push_back(std::move(first));
      while (peek('|')) {
        ++pos;
        node->children.push_back(parse_concat());
      }
      return node;
    }

    std::unique_ptr<RegexNode> parse_concat() {
      auto node = std::make_unique<RegexNode>();
      node->kind = RegexNode::Kind::Concat;
      while (true) {
        skip_space();
        if (pos >= text.size() || text[pos] == '|' || text[pos] == ')') break;
        node->children.push_back(parse_repeat());
      }
      if (node->children.empty()) node->kind = RegexNode::Kind::Empty;
      if (node->children.size() == 1) return std::move(node->children.front());
      return node;
    }

    std::unique_ptr<RegexNode> parse_repeat() {
      auto atom = parse_atom();
      while (true) {
        skip_space();
        if (pos >= text.size()) break;
        RegexNode::Kind kind;
        if (text[pos] == '*') kind = RegexNode::Kind::Star;
        else if (text[pos] == '+') kind = RegexNode::Kind::Plus;
        else if (text[pos] == '?') kind = RegexNode::Kind::Optional;
        else break;
        ++pos;
        auto node = std::make_unique<RegexNode>();
        node->kind = kind;
        node->children.push_back(std::move(atom));
        atom = std::move(node);
      }
      return atom;
    }

    Digit parse_digit() {
      skip_space();
      if (pos >= text.size() || text[pos] < '0' || text[pos] > '9') throw RegexError("expected digit", pos);
      Digit d = 0;
      while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') d = d * 10 + (text[pos++] - '0');
      return d;
    }

    std::unique_ptr<RegexNode> literal(const std::vector<Digit>& digits, std::size_t at) {
      auto node = std::make_unique<RegexNode>();
      node->kind = RegexNode::Kind::Literal;
      if (digits.size() != alphabet.tracks()) {
        throw RegexError("literal has " + std::to_string(digits.size()) + " components, expected " +
                             std::to_string(alphabet.tracks()),
                         at);
      }
      for (std::size_t t = 0; t < digits.size(); ++t) {
        if (digits[t] > alphabet.bound(t)) throw RegexError("digit out of range", at);
      }
      node->letter = alphabet.encode(digits);
      return node;
    }

    std::unique_ptr<RegexNode> parse_atom() {
      skip_space();
      if (pos >= text.size()) throw RegexError("unexpected end of expression", pos);
      const std::size_t at = pos;
      char c = text[pos];
      if (c == '(') {
        ++pos;
        auto inner = parse_union();
        if (!peek(')')) throw RegexError("missing ')'", pos);
        ++pos;
        return inner;
      }
      if (c == '[') {
        ++pos;
        std::vector<Digit> digits{parse_digit()};
        while (peek(',')) {
          ++pos;
          digits.push_back(parse_digit());
        }
        if (!peek(']')) throw RegexError("missing ']'", pos);
        ++pos;
        return literal(digits, at);
      }
      if (c >= '0' && c <= '9') {
        ++pos;  // bare digits are single characters: "10" is two literals
        return literal({c - '0'}, at);
      }
      throw RegexError("unexpected '" + std::string(1, c) + "'", pos);
    }
  };

  static std::pair<StateId, StateId> build(Nfa& n, const RegexNode& node) {
    StateId s = n.add_state();
    StateId e = n.add_state();
    switch (node.kind) {
      case RegexNode::Kind::Empty:
        n.epsilon[static_cast<std::size_t>(s)].push_back(e);
        break;
      case RegexNode::Kind::Literal:
        n.add_transition(s, node.letter, e);
        break;
      case RegexNode::Kind::Concat: {
        StateId prev = s;
        for (const auto& child : node.children) {
          auto [cs, ce] = build(n, *child);
          n.epsilon[static_cast<std::size_t>(prev)].push_back(cs);
          prev = ce;
        }
        n.epsilon[static_cast<std::size_t>(prev)].push_back(e);
        break;
      }
      case RegexNode::Kind::Union:
        for (const auto& child : node.children) {
          auto [cs, ce] = build(n, *child);
          n.epsilon[static_cast<std::size_t>(s)].push_back(cs);
          n.epsilon[static_cast<std::size_t>(ce)].push_back(e);
        }
        break;
      case RegexNode::Kind::Star:
      case RegexNode::Kind::Plus:
      case RegexNode::Kind::Optional: {
        auto [cs, ce] = build(n, *node.children.front());
        n.epsilon[static_cast<std::size_t>(s)].push_back(cs);
        n.epsilon[static_cast<std::size_t>(ce)].push_back(e);
        if (node.kind != RegexNode::Kind::Plus) n.epsilon[static_cast<std::size_t>(s)].push_back(e);
        if (node.kind != RegexNode::Kind::Optional) n.epsilon[static_cast<std::size_t>(ce)].push_back(cs);
        break;
      }
    }
    return {s, e};
  }

  Alphabet alphabet_;
  std::shared_ptr<const RegexNode> root_;
};

/// Minimal DFA of the expression's language.
inline Dfa from_regex(const MultiTrackRegex& r) { return minimize(determinize(r.to_nfa())); }

inline Dfa from_regex(std::string_view text, const Alphabet& alphabet) {
  return from_regex(MultiTrackRegex::parse(text, alphabet));
}

}  // namespace autoseq

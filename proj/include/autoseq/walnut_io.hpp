#pragma once

// Walnut-compatible automaton text format and DOT export.
//
//   msd_kim msd_kim          <- one numeration-system name per track
//                            <- blank line
//   0 1                      <- state id, output (accepting flag for DFAs)
//   0 0 -> 0                 <- digit tuple -> target
//   ...
//
// States are separated by blank lines; state 0 is initial. Closed (zero
// track) automata are written as the single word "true" or "false".

#include <functional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "autoseq/automaton.hpp"

namespace autoseq {

class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Maps a header token ("msd_kim", "{0,1,2}") to its maximal digit.
using SystemResolver = std::function<Digit(const std::string&)>;

inline Digit default_system_bound(const std::string& token) {
  if (token.size() >= 2 && token.front() == '{' && token.back() == '}') {
    Digit max = -1;
    int expected = 0;
    std::stringstream in(token.substr(1, token.size() - 2));
    std::string item;
    while (std::getline(in, item, ',')) {
      int d = std::stoi(item);
      if (d != expected++) throw std::invalid_argument("digit set must be {0,1,...,b}: " + token);
      max = d;
    }
    if (max < 1) throw std::invalid_argument("digit set needs at least two digits: " + token);
    return max;
  }
  if (token == "msd_kim") return 2;
  if (token == "msd_fib") return 1;
  if (token.rfind("msd_", 0) == 0) {
    int base = std::stoi(token.substr(4));
    if (base < 2) throw std::invalid_argument("bad base in " + token);
    return base - 1;
  }
  throw std::invalid_argument("unknown numeration system '" + token + "'");
}

/// Contents of a Walnut automaton file. DFAs use outputs 0/1.
struct WalnutAutomaton {
  std::vector<std::string> systems;
  Dfao automaton;
};

inline Dfa to_dfa(const Dfao& d) {
  Dfa out(d.alphabet(), d.num_states());
  for (StateId s = 0; s < static_cast<StateId>(d.num_states()); ++s) {
    out.set_accepting(s, d.output(s) != 0);
    for (Letter l = 0; l < d.alphabet().size(); ++l) out.set_next(s, l, d.next(s, l));
  }
  return out;
}

inline Dfao to_dfao(const Dfa& a) {
  Dfao out(a.alphabet(), a.num_states());
  for (StateId s = 0; s < static_cast<StateId>(a.num_states()); ++s) {
    out.set_output(s, a.accepting(s) ? 1 : 0);
    for (Letter l = 0; l < a.alphabet().size(); ++l) out.set_next(s, l, a.next(s, l));
  }
  return out;
}

inline WalnutAutomaton read_walnut(std::string_view text,
                                   const SystemResolver& resolve = default_system_bound) {
  std::vector<std::string> lines;
  {
    std::string cur;
    for (char c : text) {
      if (c == '\n') {
        lines.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur += c;
      }
    }
    if (!cur.empty()) lines.push_back(cur);
  }
  auto tokens = [](const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string t;
    while (in >> t) out.push_back(t);
    return out;
  };
  auto blank = [&](const std::string& line) { return tokens(line).empty(); };

  std::size_t i = 0;
  while (i < lines.size() && blank(lines[i])) ++i;
  if (i >= lines.size()) throw FormatError("missing header", 1);
  WalnutAutomaton out;
  std::vector<std::string> header = tokens(lines[i]);
  if (header.size() == 1 && (header[0] == "true" || header[0] == "false")) {
    out.automaton = Dfao(Alphabet{}, 1);
    out.automaton.set_output(0, header[0] == "true" ? 1 : 0);
    out.automaton.set_next(0, 0, 0);
    return out;
  }
  std::vector<Digit> bounds;
  for (const auto& h : header) {
    try {
      bounds.push_back(resolve(h));
    } catch (const std::exception& e) {
      throw FormatError(e.what(), i + 1);
    }
  }
  out.systems = header;
  Alphabet alphabet(bounds);
  ++i;

  struct Block {
    StateId id;
    int output;
    std::vector<std::pair<Letter, StateId>> edges;
    std::size_t line;
  };
  std::vector<Block> blocks;
  for (; i < lines.size(); ++i) {
    std::vector<std::string> tok = tokens(lines[i]);
    if (tok.empty()) continue;
    auto arrow = std::find(tok.begin(), tok.end(), "->");
    if (arrow == tok.end()) {
      if (tok.size() != 2) throw FormatError("expected \"state output\"", i + 1);
      try {
        blocks.push_back({static_cast<StateId>(std::stoi(tok[0])), std::stoi(tok[1]), {}, i + 1});
      } catch (const std::exception&) {
        throw FormatError("malformed state header", i + 1);
      }
      continue;
    }
    if (blocks.empty()) throw FormatError("transition before any state", i + 1);
    const auto digits_count = static_cast<std::size_t>(arrow - tok.begin());
    if (digits_count != alphabet.tracks()) throw FormatError("transition has wrong arity", i + 1);
    if (tok.end() - arrow != 2) throw FormatError("expected exactly one target (nondeterminism unsupported)", i + 1);
    std::vector<Digit> digits;
    try {
      for (std::size_t t = 0; t < digits_count; ++t) digits.push_back(std::stoi(tok[t]));
      Letter l = alphabet.encode(digits);
      blocks.back().edges.emplace_back(l, static_cast<StateId>(std::stoi(*(arrow + 1))));
    } catch (const AutomatonError& e) {
      throw FormatError(e.what(), i + 1);
    } catch (const std::exception&) {
      throw FormatError("malformed transition", i + 1);
    }
  }
  if (blocks.empty()) throw FormatError("no states", lines.size());
  std::vector<int> seen(blocks.size(), 0);
  for (const auto& b : blocks) {
    if (b.id < 0 || static_cast<std::size_t>(b.id) >= blocks.size() || seen[static_cast<std::size_t>(b.id)]++) {
      throw FormatError("state ids must be distinct and dense from 0", b.line);
    }
  }
  out.automaton = Dfao(alphabet, blocks.size());
  for (const auto& b : blocks) {
    out.automaton.set_output(b.id, b.output);
    for (auto [l, t] : b.edges) {
      if (t < 0 || static_cast<std::size_t>(t) >= blocks.size()) throw FormatError("undeclared target state", b.line);
      if (out.automaton.next(b.id, l) != kNoState) throw FormatError("duplicate transition", b.line);
      out.automaton.set_next(b.id, l, t);
    }
  }
  return out;
}

inline std::string write_walnut(const Dfao& d, const std::vector<std::string>& systems) {
  const Alphabet& alphabet = d.alphabet();
  if (alphabet.tracks() == 0) return d.output(0) ? "true\n" : "false\n";
  std::string out;
  for (std::size_t t = 0; t < alphabet.tracks(); ++t) {
    if (t) out += ' ';
    if (t < systems.size()) {
      out += systems[t];
    } else {
      out += '{';
      for (Digit x = 0; x <= alphabet.bound(t); ++x) out += (x ? "," : "") + std::to_string(x);
      out += '}';
    }
  }
  out += '\n';
  for (StateId s = 0; s < static_cast<StateId>(d.num_states()); ++s) {
    out += '\n' + std::to_string(s) + ' ' + std::to_string(d.output(s)) + '\n';
    for (Letter l = 0; l < alphabet.size(); ++l) {
      StateId t = d.next(s, l);
      if (t == kNoState) continue;
      for (std::size_t k = 0; k < alphabet.tracks(); ++k) out += std::to_string(alphabet.digit(l, k)) + ' ';
      out += "-> " + std::to_string(t) + '\n';
    }
  }
  return out;
}

inline std::string write_walnut(const Dfa& a, const std::vector<std::string>& systems) {
  return write_walnut(to_dfao(a), systems);
}

inline std::string write_dot(const Dfao& d, const std::string& name, bool acceptor) {
  const Alphabet& alphabet = d.alphabet();
  std::ostringstream out;
  out << "digraph " << (name.empty() ? "G" : name) << " {\n";
  out << "  rankdir = LR;\n";
  out << "  node [shape = circle, label=\"\", style=filled, fillcolor=white];\n";
  out << "  start [shape = point];\n";
  for (StateId s = 0; s < static_cast<StateId>(d.num_states()); ++s) {
    out << "  q" << s << " [label = \"" << s;
    if (!acceptor) out << "/" << d.output(s);
    out << "\"";
    if (acceptor && d.output(s)) out << ", shape = doublecircle";
    out << "];\n";
  }
  out << "  start -> q0;\n";
  for (StateId s = 0; s < static_cast<StateId>(d.num_states()); ++s) {
    // Group letters by target to keep the picture readable.
    std::map<StateId, std::vector<Letter>> by_target;
    for (Letter l = 0; l < alphabet.size(); ++l) {
      StateId t = d.next(s, l);
      if (t != kNoState) by_target[t].push_back(l);
    }
    for (const auto& [t, letters] : by_target) {
      out << "  q" << s << " -> q" << t << " [label = \"";
      for (std::size_t i = 0; i < letters.size(); ++i) out << (i ? ", " : "") << alphabet.letter_string(letters[i]);
      out << "\"];\n";
    }
  }
  out << "}\n";
  return out.str();
}

inline std::string write_dot(const Dfa& a, const std::string& name) { return write_dot(to_dfao(a), name, true); }
inline std::string write_dot(const Dfao& d, const std::string& name) { return write_dot(d, name, false); }

}  // namespace autoseq

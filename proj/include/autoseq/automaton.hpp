#pragma once

/**
 * @file automaton.hpp
 * @brief Multi-track finite automata: DFA, NFA and DFAO values plus the
 * closed set of operations the logic engine is built on.
 *
 * A k-track letter is a tuple (d_0, ..., d_{k-1}) with 0 <= d_t <= bound(t).
 * Letters are encoded as mixed-radix integers with track 0 most significant,
 * so ascending letter order is lexicographic tuple order.
 *
 * Transition maps may be partial; a missing transition goes to an implicit
 * rejecting sink. State 0 is always the initial state.
 */

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace autoseq {

using Digit = int;
using Letter = std::uint32_t;
using StateId = std::int32_t;
using Word = std::vector<Letter>;

inline constexpr StateId kNoState = -1;

class AutomatonError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void hash_combine(std::size_t& seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

template <typename T>
struct VectorHash {
  std::size_t operator()(const std::vector<T>& v) const noexcept {
    std::size_t seed = v.size();
    for (const auto& x : v) hash_combine(seed, static_cast<std::size_t>(x));
    return seed;
  }
};

}  // namespace detail

/// Tuple alphabet. Zero tracks is allowed and has exactly one letter (the
/// empty tuple); closed formulas compile to automata over it.
class Alphabet {
 public:
  Alphabet() = default;

  explicit Alphabet(std::vector<Digit> bounds) : bounds_(std::move(bounds)) {
    for (Digit b : bounds_) {
      if (b < 1) throw AutomatonError("alphabet: every track bound must be >= 1");
    }
    strides_.assign(bounds_.size(), 1);
    std::size_t size = 1;
    for (std::size_t t = bounds_.size(); t-- > 0;) {
      strides_[t] = static_cast<Letter>(size);
      size *= static_cast<std::size_t>(bounds_[t]) + 1;
      if (size > (1u << 24)) throw AutomatonError("alphabet: too many letters");
    }
    size_ = size;
  }

  static Alphabet uniform(std::size_t tracks, Digit bound) {
    return Alphabet(std::vector<Digit>(tracks, bound));
  }

  std::size_t tracks() const { return bounds_.size(); }
  Digit bound(std::size_t track) const { return bounds_.at(track); }
  const std::vector<Digit>& bounds() const { return bounds_; }
  std::size_t size() const { return size_; }

  Digit digit(Letter letter, std::size_t track) const {
    return static_cast<Digit>((letter / strides_[track]) %
                              (static_cast<Letter>(bounds_[track]) + 1));
  }

  Letter encode(std::span<const Digit> digits) const {
    if (digits.size() != bounds_.size()) {
      throw AutomatonError("alphabet: tuple has " + std::to_string(digits.size()) +
                           " components, expected " + std::to_string(bounds_.size()));
    }
    Letter letter = 0;
    for (std::size_t t = 0; t < digits.size(); ++t) {
      if (digits[t] < 0 || digits[t] > bounds_[t]) {
        throw AutomatonError("alphabet: digit " + std::to_string(digits[t]) +
                             " out of range on track " + std::to_string(t));
      }
      letter += static_cast<Letter>(digits[t]) * strides_[t];
    }
    return letter;
  }

  std::vector<Digit> decode(Letter letter) const {
    std::vector<Digit> out(bounds_.size());
    for (std::size_t t = 0; t < bounds_.size(); ++t) out[t] = digit(letter, t);
    return out;
  }

  /// "[1,0]" for multi-track letters, bare "1" for single-track ones.
  std::string letter_string(Letter letter) const {
    if (bounds_.size() == 1) return std::to_string(digit(letter, 0));
    std::string s = "[";
    for (std::size_t t = 0; t < bounds_.size(); ++t) {
      if (t) s += ',';
      s += std::to_string(digit(letter, t));
    }
    return s + "]";
  }

  bool operator==(const Alphabet& other) const { return bounds_ == other.bounds_; }

 private:
  std::vector<Digit> bounds_;
  std::vector<Letter> strides_;
  std::size_t size_ = 1;
};

/// Dense transition table shared by Dfa and Dfao.
class TransitionTable {
 public:
  TransitionTable() : TransitionTable(Alphabet{}, 1) {}
  TransitionTable(Alphabet alphabet, std::size_t states)
      : alphabet_(std::move(alphabet)), states_(states),
        delta_(states * alphabet_.size(), kNoState) {
    if (states == 0) throw AutomatonError("automaton must have an initial state");
  }

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t num_states() const { return states_; }

  StateId next(StateId s, Letter a) const {
    return delta_[static_cast<std::size_t>(s) * alphabet_.size() + a];
  }

  void set_next(StateId from, Letter a, StateId to) {
    if (from < 0 || static_cast<std::size_t>(from) >= states_ ||
        (to != kNoState && (to < 0 || static_cast<std::size_t>(to) >= states_)) ||
        a >= alphabet_.size()) {
      throw AutomatonError("transition out of range");
    }
    delta_[static_cast<std::size_t>(from) * alphabet_.size() + a] = to;
  }

  StateId add_state() {
    delta_.resize(delta_.size() + alphabet_.size(), kNoState);
    return static_cast<StateId>(states_++);
  }

  bool is_complete() const {
    return std::find(delta_.begin(), delta_.end(), kNoState) == delta_.end();
  }

  std::span<const StateId> row(StateId s) const {
    return {delta_.data() + static_cast<std::size_t>(s) * alphabet_.size(), alphabet_.size()};
  }

  bool operator==(const TransitionTable&) const = default;

 private:
  Alphabet alphabet_;
  std::size_t states_;
  std::vector<StateId> delta_;
};

class Dfa {
 public:
  Dfa() : table_(Alphabet{}, 1), accepting_(1, 0) {}
  Dfa(Alphabet alphabet, std::size_t states)
      : table_(std::move(alphabet), states), accepting_(states, 0) {}

  const Alphabet& alphabet() const { return table_.alphabet(); }
  std::size_t num_states() const { return table_.num_states(); }
  StateId next(StateId s, Letter a) const { return table_.next(s, a); }
  std::span<const StateId> row(StateId s) const { return table_.row(s); }
  bool accepting(StateId s) const { return accepting_[static_cast<std::size_t>(s)] != 0; }
  bool is_complete() const { return table_.is_complete(); }

  void set_next(StateId from, Letter a, StateId to) { table_.set_next(from, a, to); }
  void set_accepting(StateId s, bool value = true) {
    accepting_.at(static_cast<std::size_t>(s)) = value ? 1 : 0;
  }
  StateId add_state() {
    accepting_.push_back(0);
    return table_.add_state();
  }

  bool operator==(const Dfa&) const = default;

 private:
  TransitionTable table_;
  std::vector<std::uint8_t> accepting_;
};

/// Deterministic automaton with output. A missing transition means the
/// input is outside the automaton's domain.
class Dfao {
 public:
  Dfao() : table_(Alphabet{}, 1), output_(1, 0) {}
  Dfao(Alphabet alphabet, std::size_t states)
      : table_(std::move(alphabet), states), output_(states, 0) {}

  const Alphabet& alphabet() const { return table_.alphabet(); }
  std::size_t num_states() const { return table_.num_states(); }
  StateId next(StateId s, Letter a) const { return table_.next(s, a); }
  std::span<const StateId> row(StateId s) const { return table_.row(s); }
  int output(StateId s) const { return output_[static_cast<std::size_t>(s)]; }

  void set_next(StateId from, Letter a, StateId to) { table_.set_next(from, a, to); }
  void set_output(StateId s, int value) { output_.at(static_cast<std::size_t>(s)) = value; }
  StateId add_state() {
    output_.push_back(0);
    return table_.add_state();
  }

  bool operator==(const Dfao&) const = default;

 private:
  TransitionTable table_;
  std::vector<int> output_;
};

/// Nondeterministic automaton with a set of initial states and optional
/// spontaneous moves (used only while compiling regular expressions).
struct Nfa {
  Alphabet alphabet;
  std::size_t num_states = 0;
  std::vector<StateId> initial;
  std::vector<std::uint8_t> accepting;
  // transitions[s * |alphabet| + a]
  std::vector<std::vector<StateId>> transitions;
  std::vector<std::vector<StateId>> epsilon;

  Nfa() = default;
  Nfa(Alphabet a, std::size_t states)
      : alphabet(std::move(a)), num_states(states), accepting(states, 0),
        transitions(states * alphabet.size()), epsilon(states) {}

  StateId add_state() {
    accepting.push_back(0);
    transitions.resize(transitions.size() + alphabet.size());
    epsilon.emplace_back();
    return static_cast<StateId>(num_states++);
  }
  void add_transition(StateId from, Letter a, StateId to) {
    transitions[static_cast<std::size_t>(from) * alphabet.size() + a].push_back(to);
  }
  const std::vector<StateId>& targets(StateId from, Letter a) const {
    return transitions[static_cast<std::size_t>(from) * alphabet.size() + a];
  }
};

// ---------------------------------------------------------------------------
// Membership

inline StateId run(const Dfa& a, std::span<const Letter> word, StateId from = 0) {
  StateId s = from;
  for (Letter l : word) {
    if (l >= a.alphabet().size()) throw AutomatonError("letter out of range");
    s = a.next(s, l);
    if (s == kNoState) return kNoState;
  }
  return s;
}

inline bool accepts(const Dfa& a, std::span<const Letter> word) {
  StateId s = run(a, word);
  return s != kNoState && a.accepting(s);
}

/// Output of the state reached on `word`, or nullopt when the word leaves
/// the DFAO's domain.
inline std::optional<int> output_of(const Dfao& d, std::span<const Letter> word) {
  StateId s = 0;
  for (Letter l : word) {
    if (l >= d.alphabet().size()) throw AutomatonError("letter out of range");
    s = d.next(s, l);
    if (s == kNoState) return std::nullopt;
  }
  return d.output(s);
}

// ---------------------------------------------------------------------------
// Structural helpers

/// Adds an explicit rejecting sink if any transition is missing.
inline Dfa totalize(const Dfa& a) {
  if (a.is_complete()) return a;
  Dfa out(a.alphabet(), a.num_states() + 1);
  const auto sink = static_cast<StateId>(a.num_states());
  const std::size_t k = a.alphabet().size();
  for (StateId s = 0; s < static_cast<StateId>(a.num_states()); ++s) {
    out.set_accepting(s, a.accepting(s));
    for (Letter l = 0; l < k; ++l) {
      StateId t = a.next(s, l);
      out.set_next(s, l, t == kNoState ? sink : t);
    }
  }
  for (Letter l = 0; l < k; ++l) out.set_next(sink, l, sink);
  return out;
}

inline Dfa complement(const Dfa& a) {
  Dfa out = totalize(a);
  for (StateId s = 0; s < static_cast<StateId>(out.num_states()); ++s) {
    out.set_accepting(s, !out.accepting(s));
  }
  return out;
}

/// Renumbers reachable states in breadth-first order (letters ascending)
/// and drops unreachable ones. Two trimmed automata are isomorphic iff their
/// canonical forms are equal.
inline Dfa canonical_form(const Dfa& a) {
  const std::size_t k = a.alphabet().size();
  std::vector<StateId> order;
  std::vector<StateId> id(a.num_states(), kNoState);
  id[0] = 0;
  order.push_back(0);
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (Letter l = 0; l < k; ++l) {
      StateId t = a.next(order[i], l);
      if (t != kNoState && id[static_cast<std::size_t>(t)] == kNoState) {
        id[static_cast<std::size_t>(t)] = static_cast<StateId>(order.size());
        order.push_back(t);
      }
    }
  }
  Dfa out(a.alphabet(), order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto s = static_cast<StateId>(i);
    out.set_accepting(s, a.accepting(order[i]));
    for (Letter l = 0; l < k; ++l) {
      StateId t = a.next(order[i], l);
      if (t != kNoState) out.set_next(s, l, id[static_cast<std::size_t>(t)]);
    }
  }
  return out;
}

/// Removes states that are unreachable or cannot reach an accepting state.
/// The initial state is always kept.
inline Dfa trim(const Dfa& a) {
  const std::size_t n = a.num_states();
  const std::size_t k = a.alphabet().size();
  std::vector<std::vector<StateId>> reverse(n);
  for (StateId s = 0; s < static_cast<StateId>(n); ++s) {
    for (Letter l = 0; l < k; ++l) {
      StateId t = a.next(s, l);
      if (t != kNoState) reverse[static_cast<std::size_t>(t)].push_back(s);
    }
  }
  std::vector<std::uint8_t> live(n, 0);
  std::vector<StateId> stack;
  for (StateId s = 0; s < static_cast<StateId>(n); ++s) {
    if (a.accepting(s)) {
      live[static_cast<std::size_t>(s)] = 1;
      stack.push_back(s);
    }
  }
  while (!stack.empty()) {
    StateId s = stack.back();
    stack.pop_back();
    for (StateId p : reverse[static_cast<std::size_t>(s)]) {
      if (!live[static_cast<std::size_t>(p)]) {
        live[static_cast<std::size_t>(p)] = 1;
        stack.push_back(p);
      }
    }
  }
  Dfa pruned(a.alphabet(), n);
  for (StateId s = 0; s < static_cast<StateId>(n); ++s) {
    pruned.set_accepting(s, a.accepting(s));
    if (!live[static_cast<std::size_t>(s)]) continue;
    for (Letter l = 0; l < k; ++l) {
      StateId t = a.next(s, l);
      if (t != kNoState && live[static_cast<std::size_t>(t)]) pruned.set_next(s, l, t);
    }
  }
  return canonical_form(pruned);
}

namespace detail {

/// Moore partition refinement over reachable states plus a virtual sink
/// (index n). `initial_class` seeds the partition. Returns class per state
/// (sink included at index n).
inline std::vector<StateId> refine_partition(const TransitionTable& table,
                                             std::vector<StateId> cls) {
  const std::size_t n = table.num_states();
  const std::size_t k = table.alphabet().size();
  const auto sink = static_cast<StateId>(n);
  std::size_t num_classes = 0;
  {
    std::vector<StateId> seen;
    for (StateId c : cls) seen.push_back(c);
    std::sort(seen.begin(), seen.end());
    num_classes = static_cast<std::size_t>(std::unique(seen.begin(), seen.end()) - seen.begin());
  }
  std::vector<StateId> sig(k + 1);
  while (true) {
    std::unordered_map<std::vector<StateId>, StateId, VectorHash<StateId>> ids;
    ids.reserve(n * 2 + 2);
    std::vector<StateId> next_cls(n + 1);
    for (std::size_t s = 0; s <= n; ++s) {
      sig[0] = cls[s];
      for (Letter l = 0; l < k; ++l) {
        StateId t = s == n ? sink : table.next(static_cast<StateId>(s), l);
        sig[l + 1] = cls[static_cast<std::size_t>(t == kNoState ? sink : t)];
      }
      auto [it, inserted] = ids.try_emplace(sig, static_cast<StateId>(ids.size()));
      next_cls[s] = it->second;
    }
    const std::size_t count = ids.size();
    cls.swap(next_cls);
    if (count == num_classes) break;
    num_classes = count;
  }
  return cls;
}

}  // namespace detail

/// Minimal DFA for L(a), with the rejecting sink (and every state that
/// cannot reach acceptance) removed, states in canonical BFS order.
inline Dfa minimize(const Dfa& input) {
  Dfa a = trim(input);
  const std::size_t n = a.num_states();
  const std::size_t k = a.alphabet().size();
  std::vector<StateId> cls(n + 1, 0);
  for (StateId s = 0; s < static_cast<StateId>(n); ++s) cls[static_cast<std::size_t>(s)] = a.accepting(s) ? 1 : 0;
  cls[n] = 0;
  TransitionTable table(a.alphabet(), n);
  for (StateId s = 0; s < static_cast<StateId>(n); ++s) {
    for (Letter l = 0; l < k; ++l) table.set_next(s, l, a.next(s, l));
  }
  cls = detail::refine_partition(table, std::move(cls));
  const StateId sink_class = cls[n];
  // Quotient: representative per class.
  std::unordered_map<StateId, StateId> class_state;
  std::vector<StateId> rep;
  for (std::size_t s = 0; s < n; ++s) {
    if (cls[s] == sink_class) continue;
    if (class_state.try_emplace(cls[s], static_cast<StateId>(rep.size())).second) {
      rep.push_back(static_cast<StateId>(s));
    }
  }
  if (rep.empty() || cls[0] == sink_class) {
    return Dfa(a.alphabet(), 1);  // empty language
  }
  Dfa q(a.alphabet(), rep.size());
  for (std::size_t i = 0; i < rep.size(); ++i) {
    auto s = static_cast<StateId>(i);
    q.set_accepting(s, a.accepting(rep[i]));
    for (Letter l = 0; l < k; ++l) {
      StateId t = a.next(rep[i], l);
      if (t == kNoState || cls[static_cast<std::size_t>(t)] == sink_class) continue;
      q.set_next(s, l, class_state.at(cls[static_cast<std::size_t>(t)]));
    }
  }
  // State 0 is visited first, so its class is representative 0.
  return canonical_form(q);
}

inline bool isomorphic(const Dfa& a, const Dfa& b) {
  return canonical_form(a) == canonical_form(b);
}

inline bool is_empty(const Dfa& a) {
  const std::size_t k = a.alphabet().size();
  std::vector<std::uint8_t> seen(a.num_states(), 0);
  std::vector<StateId> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    StateId s = stack.back();
    stack.pop_back();
    if (a.accepting(s)) return false;
    for (Letter l = 0; l < k; ++l) {
      StateId t = a.next(s, l);
      if (t != kNoState && !seen[static_cast<std::size_t>(t)]) {
        seen[static_cast<std::size_t>(t)] = 1;
        stack.push_back(t);
      }
    }
  }
  return true;
}

inline bool equivalent(const Dfa& a, const Dfa& b) {
  if (!(a.alphabet() == b.alphabet())) throw AutomatonError("equivalent: alphabet mismatch");
  return minimize(a) == minimize(b);
}

// ---------------------------------------------------------------------------
// Products

enum class BoolOp { And, Or, Implies, Iff, AndNot };

inline bool apply(BoolOp op, bool x, bool y) {
  switch (op) {
    case BoolOp::And: return x && y;
    case BoolOp::Or: return x || y;
    case BoolOp::Implies: return !x || y;
    case BoolOp::Iff: return x == y;
    case BoolOp::AndNot: return x && !y;
  }
  return false;
}

/// Letter map from a target alphabet onto a source alphabet whose track t
/// is target track `source_tracks[t]`.
inline std::vector<Letter> track_map(const Alphabet& target, const Alphabet& source,
                                     std::span<const std::size_t> source_tracks) {
  if (source_tracks.size() != source.tracks()) throw AutomatonError("track_map: arity mismatch");
  std::vector<Letter> map(target.size());
  std::vector<Digit> digits(source.tracks());
  for (Letter l = 0; l < target.size(); ++l) {
    for (std::size_t t = 0; t < source.tracks(); ++t) {
      Digit d = target.digit(l, source_tracks[t]);
      if (d > source.bound(t)) throw AutomatonError("track_map: digit bound mismatch");
      digits[t] = d;
    }
    map[l] = source.encode(digits);
  }
  return map;
}

/// Product over `target`: a reads letter a_map[l], b reads b_map[l].
/// Missing transitions are treated as a rejecting sink on either side.
inline Dfa product(const Dfa& a, std::span<const Letter> a_map, const Dfa& b,
                   std::span<const Letter> b_map, const Alphabet& target, BoolOp op) {
  const std::size_t k = target.size();
  const auto a_sink = static_cast<StateId>(a.num_states());
  const auto b_sink = static_cast<StateId>(b.num_states());
  const bool sink_pair_accepts = apply(op, false, false);
  auto key = [&](StateId x, StateId y) {
    return static_cast<std::uint64_t>(x) * (static_cast<std::uint64_t>(b_sink) + 1) +
           static_cast<std::uint64_t>(y);
  };
  std::unordered_map<std::uint64_t, StateId> ids;
  std::vector<std::pair<StateId, StateId>> pairs{{0, 0}};
  ids.emplace(key(0, 0), 0);
  std::vector<StateId> delta;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto [x, y] = pairs[i];
    for (Letter l = 0; l < k; ++l) {
      StateId nx = x == a_sink ? a_sink : a.next(x, a_map[l]);
      StateId ny = y == b_sink ? b_sink : b.next(y, b_map[l]);
      if (nx == kNoState) nx = a_sink;
      if (ny == kNoState) ny = b_sink;
      if (nx == a_sink && ny == b_sink && !sink_pair_accepts) {
        delta.push_back(kNoState);
        continue;
      }
      auto [it, inserted] = ids.try_emplace(key(nx, ny), static_cast<StateId>(pairs.size()));
      if (inserted) pairs.emplace_back(nx, ny);
      delta.push_back(it->second);
    }
  }
  Dfa out(target, pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto s = static_cast<StateId>(i);
    auto [x, y] = pairs[i];
    bool ax = x != a_sink && a.accepting(x);
    bool by = y != b_sink && b.accepting(y);
    out.set_accepting(s, apply(op, ax, by));
    for (Letter l = 0; l < k; ++l) out.set_next(s, l, delta[i * k + l]);
  }
  return out;
}

inline Dfa product(const Dfa& a, const Dfa& b, BoolOp op) {
  if (!(a.alphabet() == b.alphabet())) throw AutomatonError("product: alphabet mismatch");
  std::vector<Letter> identity(a.alphabet().size());
  for (Letter l = 0; l < identity.size(); ++l) identity[l] = l;
  return product(a, identity, b, identity, a.alphabet(), op);
}

// ---------------------------------------------------------------------------
// Projection, determinization, saturation

/// Alphabet with one track removed.
inline Alphabet remove_track(const Alphabet& a, std::size_t track) {
  std::vector<Digit> bounds = a.bounds();
  bounds.erase(bounds.begin() + static_cast<std::ptrdiff_t>(track));
  return Alphabet(std::move(bounds));
}

/// Erases `track`, yielding an NFA over the remaining tracks.
inline Nfa project(const Dfa& a, std::size_t track) {
  if (track >= a.alphabet().tracks()) throw AutomatonError("project: invalid track index");
  Alphabet reduced = remove_track(a.alphabet(), track);
  Nfa out(reduced, a.num_states());
  out.initial = {0};
  std::vector<std::size_t> keep;
  for (std::size_t t = 0; t < a.alphabet().tracks(); ++t) {
    if (t != track) keep.push_back(t);
  }
  std::vector<Letter> to_reduced = track_map(a.alphabet(), reduced, keep);
  for (StateId s = 0; s < static_cast<StateId>(a.num_states()); ++s) {
    out.accepting[static_cast<std::size_t>(s)] = a.accepting(s) ? 1 : 0;
    for (Letter l = 0; l < a.alphabet().size(); ++l) {
      StateId t = a.next(s, l);
      if (t != kNoState) out.add_transition(s, to_reduced[l], t);
    }
  }
  for (auto& targets : out.transitions) {
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  }
  return out;
}

namespace detail {

inline void epsilon_close(const Nfa& n, std::vector<StateId>& set) {
  std::vector<StateId> stack(set.begin(), set.end());
  std::vector<std::uint8_t> in(n.num_states, 0);
  for (StateId s : set) in[static_cast<std::size_t>(s)] = 1;
  while (!stack.empty()) {
    StateId s = stack.back();
    stack.pop_back();
    for (StateId t : n.epsilon[static_cast<std::size_t>(s)]) {
      if (!in[static_cast<std::size_t>(t)]) {
        in[static_cast<std::size_t>(t)] = 1;
        set.push_back(t);
        stack.push_back(t);
      }
    }
  }
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
}

}  // namespace detail

/// Subset construction (spontaneous moves are closed over).
inline Dfa determinize(const Nfa& n) {
  const std::size_t k = n.alphabet.size();
  using Subset = std::vector<StateId>;
  std::unordered_map<Subset, StateId, detail::VectorHash<StateId>> ids;
  std::vector<Subset> subsets;
  Subset start = n.initial;
  detail::epsilon_close(n, start);
  ids.emplace(start, 0);
  subsets.push_back(start);
  std::vector<StateId> delta;
  std::vector<std::uint8_t> mark(n.num_states, 0);
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    for (Letter l = 0; l < k; ++l) {
      Subset next;
      for (StateId s : subsets[i]) {
        for (StateId t : n.targets(s, l)) {
          if (!mark[static_cast<std::size_t>(t)]) {
            mark[static_cast<std::size_t>(t)] = 1;
            next.push_back(t);
          }
        }
      }
      for (StateId t : next) mark[static_cast<std::size_t>(t)] = 0;
      if (next.empty()) {
        delta.push_back(kNoState);
        continue;
      }
      detail::epsilon_close(n, next);
      auto [it, inserted] = ids.try_emplace(next, static_cast<StateId>(subsets.size()));
      if (inserted) subsets.push_back(std::move(next));
      delta.push_back(it->second);
    }
  }
  Dfa out(n.alphabet, subsets.size());
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    auto s = static_cast<StateId>(i);
    bool acc = std::any_of(subsets[i].begin(), subsets[i].end(),
                           [&](StateId q) { return n.accepting[static_cast<std::size_t>(q)] != 0; });
    out.set_accepting(s, acc);
    for (Letter l = 0; l < k; ++l) out.set_next(s, l, delta[i * k + l]);
  }
  return out;
}

/// States reachable from the initial state by reading all-zero tuples.
inline std::vector<StateId> zero_closure(const Dfa& a) {
  std::vector<StateId> out{0};
  std::vector<std::uint8_t> seen(a.num_states(), 0);
  seen[0] = 1;
  for (std::size_t i = 0; i < out.size(); ++i) {
    StateId t = a.next(out[i], 0);
    if (t != kNoState && !seen[static_cast<std::size_t>(t)]) {
      seen[static_cast<std::size_t>(t)] = 1;
      out.push_back(t);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Closes L(a) under leading all-zero tuples: accepts w iff some 0^k w is
/// accepted by a.
inline Dfa saturate(const Dfa& a) {
  Nfa n(a.alphabet(), a.num_states());
  n.initial = zero_closure(a);
  for (StateId s = 0; s < static_cast<StateId>(a.num_states()); ++s) {
    n.accepting[static_cast<std::size_t>(s)] = a.accepting(s) ? 1 : 0;
    for (Letter l = 0; l < a.alphabet().size(); ++l) {
      StateId t = a.next(s, l);
      if (t != kNoState) n.add_transition(s, l, t);
    }
  }
  return minimize(determinize(n));
}

/// Existential quantification of `track` followed by zero-saturation,
/// done as one subset construction directly over the DFA. Equivalent to
/// minimize(saturate(determinize(project(a, track)))).
inline Dfa exists_track(const Dfa& a, std::size_t track) {
  const Alphabet& full = a.alphabet();
  if (track >= full.tracks()) throw AutomatonError("project: invalid track index");
  Alphabet reduced = remove_track(full, track);
  const std::size_t k = reduced.size();
  const Digit bound = full.bound(track);
  // expand[l * (bound+1) + d] = full letter with digit d inserted at `track`.
  std::vector<Letter> expand(k * (static_cast<std::size_t>(bound) + 1));
  {
    std::vector<Digit> digits(full.tracks());
    for (Letter l = 0; l < k; ++l) {
      std::vector<Digit> r = reduced.decode(l);
      for (Digit d = 0; d <= bound; ++d) {
        std::size_t j = 0;
        for (std::size_t t = 0; t < full.tracks(); ++t) digits[t] = t == track ? d : r[j++];
        expand[l * (static_cast<std::size_t>(bound) + 1) + static_cast<std::size_t>(d)] =
            full.encode(digits);
      }
    }
  }
  using Subset = std::vector<StateId>;
  // Initial subset: everything reachable from 0 by letters that are zero on
  // the surviving tracks.
  Subset start{0};
  {
    std::vector<std::uint8_t> seen(a.num_states(), 0);
    seen[0] = 1;
    for (std::size_t i = 0; i < start.size(); ++i) {
      for (Digit d = 0; d <= bound; ++d) {
        StateId t = a.next(start[i], expand[static_cast<std::size_t>(d)]);
        if (t != kNoState && !seen[static_cast<std::size_t>(t)]) {
          seen[static_cast<std::size_t>(t)] = 1;
          start.push_back(t);
        }
      }
    }
    std::sort(start.begin(), start.end());
  }
  std::unordered_map<Subset, StateId, detail::VectorHash<StateId>> ids;
  std::vector<Subset> subsets{start};
  ids.emplace(start, 0);
  std::vector<StateId> delta;
  std::vector<std::uint8_t> mark(a.num_states(), 0);
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    for (Letter l = 0; l < k; ++l) {
      Subset next;
      for (StateId s : subsets[i]) {
        for (Digit d = 0; d <= bound; ++d) {
          StateId t = a.next(s, expand[l * (static_cast<std::size_t>(bound) + 1) +
                                       static_cast<std::size_t>(d)]);
          if (t != kNoState && !mark[static_cast<std::size_t>(t)]) {
            mark[static_cast<std::size_t>(t)] = 1;
            next.push_back(t);
          }
        }
      }
      for (StateId t : next) mark[static_cast<std::size_t>(t)] = 0;
      if (next.empty()) {
        delta.push_back(kNoState);
        continue;
      }
      std::sort(next.begin(), next.end());
      auto [it, inserted] = ids.try_emplace(next, static_cast<StateId>(subsets.size()));
      if (inserted) subsets.push_back(std::move(next));
      delta.push_back(it->second);
    }
  }
  Dfa out(reduced, subsets.size());
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    auto s = static_cast<StateId>(i);
    out.set_accepting(s, std::any_of(subsets[i].begin(), subsets[i].end(),
                                     [&](StateId q) { return a.accepting(q); }));
    for (Letter l = 0; l < k; ++l) out.set_next(s, l, delta[i * k + l]);
  }
  return minimize(out);
}

// ---------------------------------------------------------------------------
// DFAO operations

/// Minimal DFAO: Moore refinement seeded by outputs; undefined transitions
/// form their own class.
inline Dfao minimize(const Dfao& d) {
  const std::size_t n = d.num_states();
  const std::size_t k = d.alphabet().size();
  // Reachable states only.
  std::vector<StateId> order{0};
  std::vector<StateId> id(n, kNoState);
  id[0] = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (Letter l = 0; l < k; ++l) {
      StateId t = d.next(order[i], l);
      if (t != kNoState && id[static_cast<std::size_t>(t)] == kNoState) {
        id[static_cast<std::size_t>(t)] = static_cast<StateId>(order.size());
        order.push_back(t);
      }
    }
  }
  const std::size_t m = order.size();
  TransitionTable table(d.alphabet(), m);
  std::map<int, StateId> output_class;
  std::vector<StateId> cls(m + 1);
  for (std::size_t i = 0; i < m; ++i) {
    for (Letter l = 0; l < k; ++l) {
      StateId t = d.next(order[i], l);
      table.set_next(static_cast<StateId>(i), l, t == kNoState ? kNoState : id[static_cast<std::size_t>(t)]);
    }
    cls[i] = output_class.try_emplace(d.output(order[i]), static_cast<StateId>(output_class.size() + 1)).first->second;
  }
  cls[m] = 0;  // undefined
  cls = detail::refine_partition(table, std::move(cls));
  const StateId sink_class = cls[m];
  std::unordered_map<StateId, StateId> class_state;
  std::vector<std::size_t> rep;
  for (std::size_t i = 0; i < m; ++i) {
    if (class_state.try_emplace(cls[i], static_cast<StateId>(rep.size())).second) rep.push_back(i);
  }
  Dfao out(d.alphabet(), rep.size());
  for (std::size_t r = 0; r < rep.size(); ++r) {
    auto s = static_cast<StateId>(r);
    out.set_output(s, d.output(order[rep[r]]));
    for (Letter l = 0; l < k; ++l) {
      StateId t = table.next(static_cast<StateId>(rep[r]), l);
      if (t == kNoState || cls[static_cast<std::size_t>(t)] == sink_class) continue;
      out.set_next(s, l, class_state.at(cls[static_cast<std::size_t>(t)]));
    }
  }
  return out;
}

/// DFA accepting the words on which `d` is defined and outputs `value`.
inline Dfa output_equals(const Dfao& d, int value) {
  Dfa out(d.alphabet(), d.num_states());
  for (StateId s = 0; s < static_cast<StateId>(d.num_states()); ++s) {
    out.set_accepting(s, d.output(s) == value);
    for (Letter l = 0; l < d.alphabet().size(); ++l) out.set_next(s, l, d.next(s, l));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Enumeration

/// All accepted words of length <= max_len, in radix order.
inline std::vector<Word> accepted_words(const Dfa& a, std::size_t max_len) {
  std::vector<Word> out;
  std::vector<std::pair<StateId, Word>> layer{{0, {}}};
  for (std::size_t len = 0; len <= max_len && !layer.empty(); ++len) {
    std::vector<std::pair<StateId, Word>> next_layer;
    for (auto& [s, w] : layer) {
      if (a.accepting(s)) out.push_back(w);
      if (len == max_len) continue;
      for (Letter l = 0; l < a.alphabet().size(); ++l) {
        StateId t = a.next(s, l);
        if (t == kNoState) continue;
        Word w2 = w;
        w2.push_back(l);
        next_layer.emplace_back(t, std::move(w2));
      }
    }
    layer = std::move(next_layer);
  }
  return out;
}

/// Shortest word reaching an accepting state in `product`-like searches;
/// nullopt if the language is empty.
inline std::optional<Word> shortest_accepted(const Dfa& a) {
  const std::size_t n = a.num_states();
  std::vector<StateId> parent(n, kNoState);
  std::vector<Letter> via(n, 0);
  std::vector<std::uint8_t> seen(n, 0);
  std::deque<StateId> queue{0};
  seen[0] = 1;
  while (!queue.empty()) {
    StateId s = queue.front();
    queue.pop_front();
    if (a.accepting(s)) {
      Word w;
      for (StateId c = s; c != 0; c = parent[static_cast<std::size_t>(c)]) w.push_back(via[static_cast<std::size_t>(c)]);
      std::reverse(w.begin(), w.end());
      return w;
    }
    for (Letter l = 0; l < a.alphabet().size(); ++l) {
      StateId t = a.next(s, l);
      if (t != kNoState && !seen[static_cast<std::size_t>(t)]) {
        seen[static_cast<std::size_t>(t)] = 1;
        parent[static_cast<std::size_t>(t)] = s;
        via[static_cast<std::size_t>(t)] = l;
        queue.push_back(t);
      }
    }
  }
  return std::nullopt;
}

}  // namespace autoseq

#pragma once

// Decision procedure: compiles formulas to synchronized automata.
//
// Every compiled automaton has one track per free variable, tracks sorted
// by variable name, and accepts exactly the padded encodings (any number
// of leading all-zero tuples, every track free of forbidden factors) of
// the satisfying assignments. Addition is available only through the
// registered adder predicate "add".

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "autoseq/automaton.hpp"
#include "autoseq/formula.hpp"
#include "autoseq/numeration.hpp"
#include "autoseq/regex.hpp"
#include "autoseq/walnut_io.hpp"

namespace autoseq {

class CompileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kMaxConstantFactor = 64;
inline constexpr const char* kAdderName = "add";

/// Automaton with named tracks (sorted, distinct).
struct Relation {
  Dfa dfa;
  std::vector<std::string> vars;

  bool closed() const { return vars.empty(); }
  /// Truth value of a closed relation.
  bool holds() const { return dfa.accepting(0); }
};

/// Closure under adding and removing leading all-zero tuples.
inline Dfa zero_invariant(const Dfa& a) {
  Dfa sat = saturate(a);
  Nfa n(sat.alphabet(), sat.num_states() + 1);
  const auto start = static_cast<StateId>(sat.num_states());
  n.initial = {start};
  n.epsilon[static_cast<std::size_t>(start)].push_back(0);
  n.add_transition(start, 0, start);
  for (StateId s = 0; s < static_cast<StateId>(sat.num_states()); ++s) {
    n.accepting[static_cast<std::size_t>(s)] = sat.accepting(s) ? 1 : 0;
    for (Letter l = 0; l < sat.alphabet().size(); ++l) {
      StateId t = sat.next(s, l);
      if (t != kNoState) n.add_transition(s, l, t);
    }
  }
  return minimize(determinize(n));
}

/// True when the DFAO's output on 0w equals its output on w for every w.
inline bool ignores_leading_zeros(const Dfao& d) {
  // In the minimal DFAO this means reading 0 from the start state loops.
  Dfao m = minimize(d);
  return m.next(0, 0) == 0;
}

class Environment {
 public:
  explicit Environment(const NumerationSystem& sys = NumerationSystem::kimberling()) : sys_(&sys) {
    if (const char* path = std::getenv("AUTOSEQ_PATH")) {
      std::stringstream in(path);
      std::string dir;
      while (std::getline(in, dir, ':')) {
        if (!dir.empty()) search_path_.emplace_back(dir);
      }
    }
  }

  const NumerationSystem& system() const { return *sys_; }
  Alphabet alphabet(std::size_t tracks) const { return Alphabet::uniform(tracks, sys_->max_digit()); }

  void add_search_dir(std::filesystem::path dir) { search_path_.push_back(std::move(dir)); }
  const std::vector<std::filesystem::path>& search_path() const { return search_path_; }

  /// Tuples whose tracks all avoid the forbidden factors.
  const Dfa& domain(std::size_t tracks) const {
    auto it = domains_.find(tracks);
    if (it != domains_.end()) return it->second;
    Dfa one = sys_->padded_recognizer();
    Alphabet target = alphabet(tracks);
    Dfa acc(target, 1);
    acc.set_accepting(0);
    for (Letter l = 0; l < target.size(); ++l) acc.set_next(0, l, 0);
    for (std::size_t t = 0; t < tracks; ++t) {
      std::size_t src[1] = {t};
      auto map = track_map(target, one.alphabet(), src);
      std::vector<Letter> id(target.size());
      for (Letter l = 0; l < id.size(); ++l) id[l] = l;
      acc = minimize(product(acc, id, one, map, target, BoolOp::And));
    }
    return domains_.emplace(tracks, std::move(acc)).first->second;
  }

  bool has_predicate(const std::string& name) const { return predicates_.count(name) != 0; }
  bool has_dfao(const std::string& name) const { return dfaos_.count(name) != 0; }

  /// Stores a predicate, closing it under zero padding and restricting
  /// it to the domain.
  void define_predicate(const std::string& name, const Dfa& a, bool replace = false) {
    if (!replace && (has_predicate(name) || has_dfao(name))) throw CompileError("name '" + name + "' already defined");
    if (a.alphabet().tracks() > 0 && !(a.alphabet() == alphabet(a.alphabet().tracks()))) {
      throw CompileError("predicate '" + name + "' has digits outside the system's alphabet");
    }
    Dfa closed = zero_invariant(a);
    closed = minimize(product(closed, domain(a.alphabet().tracks()), BoolOp::And));
    predicates_.insert_or_assign(name, std::move(closed));
    if (name == kAdderName) term_relations_.clear();
  }

  void define_dfao(const std::string& name, const Dfao& d, bool replace = false) {
    if (!replace && (has_predicate(name) || has_dfao(name))) throw CompileError("name '" + name + "' already defined");
    if (d.alphabet().tracks() != 1 || !(d.alphabet() == alphabet(1))) {
      throw CompileError("automaton '" + name + "' must read one track of system digits");
    }
    if (!ignores_leading_zeros(d)) throw CompileError("automaton '" + name + "' depends on leading zeros");
    dfaos_.insert_or_assign(name, minimize(d));
  }

  const Dfa& predicate(const std::string& name) {
    if (auto it = predicates_.find(name); it != predicates_.end()) return it->second;
    if (try_load(name) && has_predicate(name)) return predicates_.at(name);
    throw CompileError("unknown predicate '$" + name + "'");
  }

  const Dfao& dfao(const std::string& name) {
    if (auto it = dfaos_.find(name); it != dfaos_.end()) return it->second;
    if (try_load(name) && has_dfao(name)) return dfaos_.at(name);
    throw CompileError("unknown automaton '" + name + "'");
  }

  const Dfa& adder() {
    if (!has_predicate(kAdderName) && !try_load(kAdderName)) {
      throw CompileError("'+' used before an adder is registered (no predicate '" + std::string(kAdderName) + "')");
    }
    const Dfa& a = predicates_.at(kAdderName);
    if (a.alphabet().tracks() != 3) throw CompileError("registered adder must have 3 tracks");
    return a;
  }

  /// Two-track relations for `c*x` ('*') and `x/c` ('/'), built from the
  /// current adder.
  std::map<std::pair<char, Natural>, Dfa>& term_relations() { return term_relations_; }

  /// Loads a Walnut file. Names starting with an uppercase letter become
  /// DFAOs, others predicates.
  void load_file(const std::filesystem::path& path, std::string name = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CompileError("cannot open '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    if (name.empty()) name = path.stem().string();
    WalnutAutomaton w;
    try {
      w = read_walnut(buffer.str());
    } catch (const FormatError& e) {
      throw CompileError(path.string() + ": " + e.what());
    }
    if (!name.empty() && std::isupper(static_cast<unsigned char>(name[0]))) {
      define_dfao(name, w.automaton);
    } else {
      define_predicate(name, to_dfa(w.automaton));
    }
  }

  std::vector<std::string> predicate_names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : predicates_) out.push_back(k);
    return out;
  }
  std::vector<std::string> dfao_names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : dfaos_) out.push_back(k);
    return out;
  }

 private:
  bool try_load(const std::string& name) {
    for (const auto& dir : search_path_) {
      auto file = dir / (name + ".txt");
      if (std::filesystem::exists(file)) {
        load_file(file, name);
        return true;
      }
    }
    return false;
  }

  const NumerationSystem* sys_;
  std::vector<std::filesystem::path> search_path_;
  std::map<std::string, Dfa> predicates_;
  std::map<std::string, Dfao> dfaos_;
  mutable std::map<std::size_t, Dfa> domains_;
  std::map<std::pair<char, Natural>, Dfa> term_relations_;
};

// ---------------------------------------------------------------------------
// Primitive relations (single automata over explicit tracks)

/// Two tracks (x, y) with x cmp y, by msd-first comparison of equal-length
/// words (numeric order for canonical representations).
inline Dfa comparison_automaton(Cmp cmp, Digit bound) {
  Alphabet a = Alphabet::uniform(2, bound);
  Dfa d(a, 3);  // 0 equal so far, 1 x<y, 2 x>y
  for (Letter l = 0; l < a.size(); ++l) {
    const Digit x = a.digit(l, 0), y = a.digit(l, 1);
    d.set_next(0, l, x == y ? 0 : (x < y ? 1 : 2));
    d.set_next(1, l, 1);
    d.set_next(2, l, 2);
  }
  auto accept = [&](int s) {
    switch (cmp) {
      case Cmp::Eq: return s == 0;
      case Cmp::Ne: return s != 0;
      case Cmp::Lt: return s == 1;
      case Cmp::Le: return s != 2;
      case Cmp::Gt: return s == 2;
      case Cmp::Ge: return s != 1;
    }
    return false;
  };
  for (int s = 0; s < 3; ++s) d.set_accepting(s, accept(s));
  return d;
}

/// One track: 0* (c)_K.
inline Dfa constant_automaton(const NumerationSystem& sys, Natural c) {
  DigitWord w = sys.to_canonical(c);
  Alphabet a = Alphabet::uniform(1, sys.max_digit());
  Dfa d(a, w.size() + 1);
  d.set_next(0, 0, 0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i == 0 && w[0] == 0) continue;
    d.set_next(static_cast<StateId>(i), static_cast<Letter>(w[i]), static_cast<StateId>(i + 1));
  }
  d.set_accepting(static_cast<StateId>(w.size()));
  return minimize(d);
}

/// Two tracks (x, y): D1 on x and D2 on y are both defined and (un)equal.
inline Dfa output_relation(const Dfao& d1, const Dfao& d2, bool equal) {
  Alphabet a = Alphabet::uniform(2, d1.alphabet().bound(0));
  const std::size_t n2 = d2.num_states();
  Dfa d(a, d1.num_states() * n2);
  for (StateId p = 0; p < static_cast<StateId>(d1.num_states()); ++p) {
    for (StateId q = 0; q < static_cast<StateId>(n2); ++q) {
      const auto s = static_cast<StateId>(static_cast<std::size_t>(p) * n2 + static_cast<std::size_t>(q));
      d.set_accepting(s, (d1.output(p) == d2.output(q)) == equal);
      for (Letter l = 0; l < a.size(); ++l) {
        StateId tp = d1.next(p, static_cast<Letter>(a.digit(l, 0)));
        StateId tq = d2.next(q, static_cast<Letter>(a.digit(l, 1)));
        if (tp == kNoState || tq == kNoState) continue;
        d.set_next(s, l, static_cast<StateId>(static_cast<std::size_t>(tp) * n2 + static_cast<std::size_t>(tq)));
      }
    }
  }
  return minimize(d);
}

/// One track: the DFAO is defined and its output does (not) equal c.
inline Dfa output_constant(const Dfao& d, int c, bool equal) {
  Dfa out(d.alphabet(), d.num_states());
  for (StateId s = 0; s < static_cast<StateId>(d.num_states()); ++s) {
    out.set_accepting(s, (d.output(s) == c) == equal);
    for (Letter l = 0; l < d.alphabet().size(); ++l) out.set_next(s, l, d.next(s, l));
  }
  return minimize(out);
}

/// Two tracks (n, z) with n = x·a and z = 0·x: z drops the last digit of
/// n. The state is the digit z must show next.
inline Dfa shift_automaton(Digit bound) {
  Alphabet a = Alphabet::uniform(2, bound);
  Dfa d(a, static_cast<std::size_t>(bound) + 1);
  for (StateId s = 0; s <= bound; ++s) {
    d.set_accepting(s);
    for (Letter l = 0; l < a.size(); ++l) {
      if (a.digit(l, 1) == s) d.set_next(s, l, a.digit(l, 0));
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// Relation algebra

class Compiler {
 public:
  explicit Compiler(Environment& env) : env_(env) {}

  /// Places automaton `a` (tracks = args, repeats allowed) on the sorted
  /// variable set of `args`, restricted to the domain.
  Relation place(const Dfa& a, const std::vector<std::string>& args) const {
    if (a.alphabet().tracks() != args.size()) throw CompileError("internal: arity mismatch in place()");
    std::vector<std::string> vars(args);
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    Alphabet target = env_.alphabet(vars.size());
    std::vector<std::size_t> src;
    for (const auto& v : args) src.push_back(static_cast<std::size_t>(std::lower_bound(vars.begin(), vars.end(), v) - vars.begin()));
    auto amap = track_map(target, a.alphabet(), src);
    std::vector<Letter> id(target.size());
    for (Letter l = 0; l < id.size(); ++l) id[l] = l;
    return Relation{minimize(product(a, amap, env_.domain(vars.size()), id, target, BoolOp::And)), vars};
  }

  Relation combine(const Relation& x, const Relation& y, BoolOp op) const {
    std::vector<std::string> vars;
    std::set_union(x.vars.begin(), x.vars.end(), y.vars.begin(), y.vars.end(), std::back_inserter(vars));
    Alphabet target = env_.alphabet(vars.size());
    auto positions = [&](const std::vector<std::string>& vs) {
      std::vector<std::size_t> out;
      for (const auto& v : vs) out.push_back(static_cast<std::size_t>(std::lower_bound(vars.begin(), vars.end(), v) - vars.begin()));
      return out;
    };
    auto xp = positions(x.vars), yp = positions(y.vars);
    auto xmap = track_map(target, x.dfa.alphabet(), xp);
    auto ymap = track_map(target, y.dfa.alphabet(), yp);
    Dfa p = product(x.dfa, xmap, y.dfa, ymap, target, op);
    // Tracks present on one side only are unconstrained by the other.
    if (op != BoolOp::And) p = product(p, env_.domain(vars.size()), BoolOp::And);
    return Relation{minimize(p), vars};
  }

  Relation negate(const Relation& x) const {
    return Relation{minimize(product(env_.domain(x.vars.size()), x.dfa, BoolOp::AndNot)), x.vars};
  }

  Relation exists(const Relation& x, const std::string& var) const {
    auto it = std::lower_bound(x.vars.begin(), x.vars.end(), var);
    if (it == x.vars.end() || *it != var) return x;
    Relation out;
    out.dfa = exists_track(x.dfa, static_cast<std::size_t>(it - x.vars.begin()));
    out.vars = x.vars;
    out.vars.erase(out.vars.begin() + (it - x.vars.begin()));
    return out;
  }

  Relation forall(const Relation& x, const std::string& var) const { return negate(exists(negate(x), var)); }

  Relation constant(bool value) const {
    Dfa d(Alphabet{}, 1);
    d.set_accepting(0, value);
    d.set_next(0, 0, 0);
    return Relation{minimize(d), {}};
  }

  Relation compile(const Formula& f) {
    switch (f.kind) {
      case Formula::Kind::True: return constant(true);
      case Formula::Kind::False: return constant(false);
      case Formula::Kind::Not: return negate(compile(*f.children[0]));
      case Formula::Kind::And: return combine(compile(*f.children[0]), compile(*f.children[1]), BoolOp::And);
      case Formula::Kind::Or: return combine(compile(*f.children[0]), compile(*f.children[1]), BoolOp::Or);
      case Formula::Kind::Implies:
        return combine(compile(*f.children[0]), compile(*f.children[1]), BoolOp::Implies);
      case Formula::Kind::Iff: return combine(compile(*f.children[0]), compile(*f.children[1]), BoolOp::Iff);
      case Formula::Kind::Exists: return exists(compile(*f.children[0]), f.name);
      case Formula::Kind::Forall: return forall(compile(*f.children[0]), f.name);
      case Formula::Kind::Compare:
      case Formula::Kind::Call:
      case Formula::Kind::OutputConst:
      case Formula::Kind::OutputEq: return compile_atom(f);
    }
    throw CompileError("internal: unknown formula kind");
  }

 private:
  struct Lowering {
    std::vector<Relation> constraints;
    std::set<std::string> fresh;
  };

  std::string fresh_var(Lowering& low) {
    std::string v = "#" + std::to_string(++fresh_counter_);
    low.fresh.insert(v);
    return v;
  }

  static std::string where(const SourcePos& p) { return std::to_string(p.line) + ":" + std::to_string(p.column) + ": "; }

  std::string lower_multiple(Natural c, const std::string& operand, Lowering& low, const SourcePos& pos) {
    if (c > kMaxConstantFactor) {
      throw CompileError(where(pos) + "constant factor " + std::to_string(c) + " exceeds " +
                         std::to_string(kMaxConstantFactor));
    }
    if (c == 0) return lower_constant(0, low);
    // Binary method: running sum of the doubled operand.
    std::optional<std::string> sum;
    std::string power = operand;
    while (true) {
      if (c & 1) {
        if (!sum) {
          sum = power;
        } else {
          std::string v = fresh_var(low);
          low.constraints.push_back(place(env_.adder(), {*sum, power, v}));
          sum = v;
        }
      }
      c >>= 1;
      if (c == 0) break;
      std::string v = fresh_var(low);
      low.constraints.push_back(place(env_.adder(), {power, power, v}));
      power = v;
    }
    return *sum;
  }

  std::string lower_constant(Natural c, Lowering& low) {
    std::string v = fresh_var(low);
    low.constraints.push_back(place(constant_automaton(env_.system(), c), {v}));
    return v;
  }

  std::string lower(const Term& t, Lowering& low) {
    switch (t.kind) {
      case Term::Kind::Var: return t.name;
      case Term::Kind::Const: return lower_constant(t.value, low);
      case Term::Kind::Add: {
        std::string a = lower(*t.args[0], low), b = lower(*t.args[1], low);
        std::string v = fresh_var(low);
        low.constraints.push_back(place(adder_at(t.pos), {a, b, v}));
        return v;
      }
      case Term::Kind::Sub: {
        // a - b = d  iff  b + d = a; no d exists when b > a.
        std::string a = lower(*t.args[0], low), b = lower(*t.args[1], low);
        std::string d = fresh_var(low);
        low.constraints.push_back(place(adder_at(t.pos), {b, d, a}));
        return d;
      }
      case Term::Kind::Mul: {
        std::string a = lower(*t.args[0], low);
        if (t.value == 1) return a;
        if (t.value == 0) return lower_constant(0, low);
        std::string v = fresh_var(low);
        low.constraints.push_back(place(term_relation('*', t.value, t.pos), {a, v}));
        return v;
      }
      case Term::Kind::Div: {
        std::string a = lower(*t.args[0], low);
        if (t.value > kMaxConstantFactor) {
          throw CompileError(where(t.pos) + "divisor " + std::to_string(t.value) + " exceeds " +
                             std::to_string(kMaxConstantFactor));
        }
        if (t.value == 1) return a;
        std::string q = fresh_var(low);
        low.constraints.push_back(place(term_relation('/', t.value, t.pos), {a, q}));
        return q;
      }
    }
    throw CompileError("internal: unknown term kind");
  }

  /// Relation on (x, y) with y = c*x ('*') or y = floor(x/c) ('/'). Built
  /// once per constant so atoms never carry the intermediate tracks.
  const Dfa& term_relation(char op, Natural c, const SourcePos& pos) {
    auto& cache = env_.term_relations();
    if (auto it = cache.find({op, c}); it != cache.end()) return it->second;
    Lowering sub;
    std::string y;
    if (op == '*') {
      y = lower_multiple(c, "x", sub, pos);
    } else {
      // x / c = q  iff  c*q + r = x for some r < c.
      y = fresh_var(sub);
      std::string r = fresh_var(sub);
      std::string k = lower_constant(c, sub);
      sub.constraints.push_back(place(comparison_automaton(Cmp::Lt, env_.system().max_digit()), {r, k}));
      std::string m = lower_multiple(c, y, sub, pos);
      sub.constraints.push_back(place(adder_at(pos), {m, r, "x"}));
    }
    Relation rel = finish(place(comparison_automaton(Cmp::Eq, env_.system().max_digit()), {y, "y"}), sub);
    if (rel.vars != std::vector<std::string>{"x", "y"}) throw CompileError("internal: term relation tracks");
    return cache.emplace(std::make_pair(op, c), std::move(rel.dfa)).first->second;
  }

  const Dfa& adder_at(const SourcePos& pos) {
    try {
      return env_.adder();
    } catch (const CompileError& e) {
      throw CompileError(where(pos) + e.what());
    }
  }

  /// Conjoins the atom with its term constraints, eliminating each fresh
  /// variable as soon as no pending constraint mentions it.
  Relation finish(Relation atom, Lowering& low) {
    std::vector<Relation> pending = std::move(low.constraints);
    Relation acc = std::move(atom);
    auto mentioned = [&](const std::string& v) {
      for (const auto& r : pending) {
        if (std::binary_search(r.vars.begin(), r.vars.end(), v)) return true;
      }
      return false;
    };
    auto eliminate = [&]() {
      for (const auto& v : std::vector<std::string>(acc.vars)) {
        if (low.fresh.count(v) && !mentioned(v)) acc = exists(acc, v);
      }
    };
    eliminate();
    while (!pending.empty()) {
      // Among constraints touching the accumulator, take the one leaving the
      // fewest tracks after elimination; ties go to the latest, since outer
      // terms were lowered last and connect directly to the atom.
      std::size_t pick = pending.size() - 1;
      std::size_t best = SIZE_MAX;
      for (std::size_t i = pending.size(); i-- > 0;) {
        bool touches = false;
        for (const auto& v : pending[i].vars) touches = touches || std::binary_search(acc.vars.begin(), acc.vars.end(), v);
        if (!touches) continue;
        std::vector<std::string> joined;
        std::set_union(acc.vars.begin(), acc.vars.end(), pending[i].vars.begin(), pending[i].vars.end(),
                       std::back_inserter(joined));
        std::size_t remaining = 0;
        for (const auto& v : joined) {
          bool kept = !low.fresh.count(v);
          for (std::size_t j = 0; j < pending.size() && !kept; ++j) {
            kept = j != i && std::binary_search(pending[j].vars.begin(), pending[j].vars.end(), v);
          }
          remaining += kept ? 1 : 0;
        }
        if (remaining < best) {
          best = remaining;
          pick = i;
        }
      }
      Relation next = std::move(pending[pick]);
      pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(pick));
      acc = combine(acc, next, BoolOp::And);
      eliminate();
    }
    return acc;
  }

  Relation compile_atom(const Formula& f) {
    Lowering low;
    const Digit bound = env_.system().max_digit();
    switch (f.kind) {
      case Formula::Kind::Compare: {
        std::string a = lower(*f.terms[0], low), b = lower(*f.terms[1], low);
        return finish(place(comparison_automaton(f.cmp, bound), {a, b}), low);
      }
      case Formula::Kind::Call: {
        const Dfa* p;
        try {
          p = &env_.predicate(f.name);
        } catch (const CompileError& e) {
          throw CompileError(where(f.pos) + e.what());
        }
        if (p->alphabet().tracks() != f.terms.size()) {
          throw CompileError(where(f.pos) + "$" + f.name + " takes " + std::to_string(p->alphabet().tracks()) +
                             " arguments, got " + std::to_string(f.terms.size()));
        }
        Dfa pred = *p;  // the environment may grow while lowering
        std::vector<std::string> args;
        for (const auto& t : f.terms) args.push_back(lower(*t, low));
        if (args.empty()) return finish(Relation{pred, {}}, low);
        return finish(place(pred, args), low);
      }
      case Formula::Kind::OutputConst: {
        Dfao d = lookup_dfao(f.name, f.pos);
        std::string a = lower(*f.terms[0], low);
        return finish(place(output_constant(d, f.output, f.cmp == Cmp::Eq), {a}), low);
      }
      case Formula::Kind::OutputEq: {
        Dfao d1 = lookup_dfao(f.name, f.pos);
        Dfao d2 = lookup_dfao(f.name2, f.pos);
        std::string a = lower(*f.terms[0], low), b = lower(*f.terms[1], low);
        return finish(place(output_relation(d1, d2, f.cmp == Cmp::Eq), {a, b}), low);
      }
      default: break;
    }
    throw CompileError("internal: not an atom");
  }

  Dfao lookup_dfao(const std::string& name, const SourcePos& pos) {
    try {
      return env_.dfao(name);
    } catch (const CompileError& e) {
      throw CompileError(where(pos) + e.what());
    }
  }

  Environment& env_;
  std::size_t fresh_counter_ = 0;
};

inline void check_system(const Query& q, const Environment& env) {
  if (!q.system.empty() && q.system != env.system().name()) {
    throw CompileError("formula selects system '" + q.system + "' but the active system is '" + env.system().name() + "'");
  }
}

inline Relation compile(const std::string& text, Environment& env) {
  Query q = parse_query(text);
  check_system(q, env);
  return Compiler(env).compile(*q.formula);
}

inline bool eval_sentence(const std::string& text, Environment& env) {
  Relation r = compile(text, env);
  if (!r.closed()) {
    std::string list;
    for (const auto& v : r.vars) list += (list.empty() ? "" : ", ") + v;
    throw CompileError("sentence has free variables: " + list);
  }
  return r.holds();
}

/// Compiles and stores a predicate whose tracks are its free variables in
/// alphabetical order.
inline Relation def_predicate(const std::string& name, const std::string& text, Environment& env) {
  Relation r = compile(text, env);
  env.define_predicate(name, r.dfa);
  return r;
}

/// DFAO whose output is i when the i-th (1-based) one-track predicate
/// accepts and 0 when none does.
inline Dfao combine_predicates(const std::string& name, const std::vector<std::string>& preds, Environment& env) {
  if (preds.empty()) throw CompileError("combine needs at least one predicate");
  std::vector<Dfa> parts;
  for (const auto& p : preds) {
    const Dfa& d = env.predicate(p);
    if (d.alphabet().tracks() != 1) throw CompileError("combine: $" + p + " must have exactly one track");
    parts.push_back(totalize(d));
  }
  // Product over all parts; the state is a tuple of component states.
  const Alphabet& a = parts[0].alphabet();
  std::map<std::vector<StateId>, StateId> ids;
  std::vector<std::vector<StateId>> states;
  std::vector<StateId> start(parts.size(), 0);
  ids.emplace(start, 0);
  states.push_back(start);
  std::vector<std::vector<StateId>> delta;
  for (std::size_t i = 0; i < states.size(); ++i) {
    std::vector<StateId> row(a.size());
    for (Letter l = 0; l < a.size(); ++l) {
      std::vector<StateId> t(parts.size());
      for (std::size_t j = 0; j < parts.size(); ++j) t[j] = parts[j].next(states[i][j], l);
      auto [it, inserted] = ids.try_emplace(t, static_cast<StateId>(states.size()));
      if (inserted) states.push_back(t);
      row[l] = it->second;
    }
    delta.push_back(std::move(row));
  }
  Dfao out(a, states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    int value = 0;
    for (std::size_t j = 0; j < parts.size(); ++j) {
      if (!parts[j].accepting(states[i][j])) continue;
      if (value != 0) {
        // Witness: shortest word reaching this state.
        Dfa reach(a, states.size());
        for (std::size_t s = 0; s < states.size(); ++s) {
          for (Letter l = 0; l < a.size(); ++l) {
            if (s < delta.size()) reach.set_next(static_cast<StateId>(s), l, delta[s][l]);
          }
        }
        reach.set_accepting(static_cast<StateId>(i));
        auto w = shortest_accepted(reach);
        std::string word;
        for (Letter l : *w) word += a.letter_string(l);
        throw CompileError("combine: $" + preds[static_cast<std::size_t>(value - 1)] + " and $" + preds[j] +
                           " both accept \"" + word + "\"");
      }
      value = static_cast<int>(j + 1);
    }
    out.set_output(static_cast<StateId>(i), value);
    for (Letter l = 0; l < a.size(); ++l) out.set_next(static_cast<StateId>(i), l, delta[i][l]);
  }
  Dfao m = minimize(out);
  env.define_dfao(name, m);
  return m;
}

/// `reg name sys... "regex"`: tracks are listed numeration systems or
/// digit sets, each of which must use the active system's digits.
inline Dfa reg_predicate(const std::string& name, const std::vector<std::string>& systems, const std::string& regex,
                         Environment& env) {
  if (systems.empty()) throw CompileError("reg needs at least one track");
  for (const auto& s : systems) {
    Digit bound;
    try {
      bound = default_system_bound(s);
    } catch (const std::exception& e) {
      throw CompileError(std::string("reg: ") + e.what());
    }
    if (bound != env.system().max_digit()) {
      throw CompileError("reg: track '" + s + "' does not use the digits of " + env.system().name());
    }
  }
  Dfa d = from_regex(regex, env.alphabet(systems.size()));
  env.define_predicate(name, d);
  return d;
}

}  // namespace autoseq

#pragma once

// Theorem-by-theorem verification. Each suite runs one shipped script
// through the engine (the exact layer, valid for all n) and a set of
// brute-force checks against the oracles (bounded n). A suite passes only
// when both layers pass.

#include <cmath>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <set>

#include "autoseq/inference.hpp"
#include "autoseq/oracles.hpp"
#include "autoseq/script.hpp"
#include "autoseq/words.hpp"

#ifndef AUTOSEQ_ASSET_DIR
#define AUTOSEQ_ASSET_DIR "assets"
#endif

namespace autoseq {

inline std::filesystem::path asset_dir() {
  if (const char* dir = std::getenv("AUTOSEQ_ASSETS")) return dir;
  return AUTOSEQ_ASSET_DIR;
}

// ---------------------------------------------------------------------------
// Reports

struct StatementOutcome {
  std::string kind;
  std::string name;
  std::optional<bool> verdict;
  std::optional<bool> expected;
  std::size_t states = 0;
  double seconds = 0;

  bool pass() const { return !expected || verdict == expected; }
};

struct CheckOutcome {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
  bool informational = false;  // reported, does not affect the verdict
};

struct TheoremReport {
  std::string id;
  std::string title;
  std::vector<StatementOutcome> statements;
  std::vector<CheckOutcome> checks;
  std::string error;

  bool pass() const {
    if (!error.empty()) return false;
    for (const auto& s : statements) {
      if (!s.pass()) return false;
    }
    for (const auto& c : checks) {
      if (!c.pass && !c.informational) return false;
    }
    return true;
  }
};

inline std::string verdict_text(const std::optional<bool>& v) { return v ? (*v ? "TRUE" : "FALSE") : "-"; }

/// Timings are optional so that default output is reproducible.
inline std::string to_text(const TheoremReport& r, bool timings = false) {
  std::ostringstream out;
  out << "[" << (r.pass() ? "PASS" : "FAIL") << "] " << r.id << ": " << r.title << "\n";
  for (const auto& s : r.statements) {
    out << "  " << std::left << std::setw(8) << s.kind << std::setw(16) << s.name << std::setw(6)
        << verdict_text(s.verdict) << " states=" << s.states;
    if (timings) out << " " << std::fixed << std::setprecision(3) << s.seconds << "s";
    if (!s.pass()) out << "  expected " << verdict_text(s.expected);
    out << "\n";
  }
  for (const auto& c : r.checks) {
    out << "  check   " << (c.pass ? "ok   " : (c.informational ? "note " : "FAIL ")) << c.name;
    if (!c.detail.empty()) out << " (" << c.detail << ")";
    if (timings) out << " " << std::fixed << std::setprecision(3) << c.seconds << "s";
    out << "\n";
  }
  if (!r.error.empty()) out << "  error: " << r.error << "\n";
  return out.str();
}

inline nlohmann::json to_json(const TheoremReport& r, bool timings = false) {
  nlohmann::json j;
  j["id"] = r.id;
  j["title"] = r.title;
  j["pass"] = r.pass();
  j["statements"] = nlohmann::json::array();
  for (const auto& s : r.statements) {
    nlohmann::json e{{"kind", s.kind}, {"name", s.name}, {"states", s.states}};
    if (timings) e["seconds"] = s.seconds;
    e["verdict"] = s.verdict ? nlohmann::json(*s.verdict) : nlohmann::json(nullptr);
    e["expected"] = s.expected ? nlohmann::json(*s.expected) : nlohmann::json(nullptr);
    j["statements"].push_back(e);
  }
  j["checks"] = nlohmann::json::array();
  for (const auto& c : r.checks) {
    nlohmann::json e{{"name", c.name}, {"pass", c.pass}, {"informational", c.informational}, {"detail", c.detail}};
    if (timings) e["seconds"] = c.seconds;
    j["checks"].push_back(e);
  }
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

// ---------------------------------------------------------------------------
// Support automata

struct SupportAutomata {
  Dfa has22;
  Dfa lastd;
  Dfa kshift;
  Dfa isk;
  Dfa pair;
};

/// Builds the helper automata; registers kshift in `env` when absent
/// (the scripts register the others themselves).
inline SupportAutomata build_support_automata(Environment& env) {
  SupportAutomata s;
  const Digit b = env.system().max_digit();
  s.has22 = from_regex("(0|1|2)*22(0|1|2)*", Alphabet::uniform(1, b));
  s.lastd = from_regex("()|([0,0]|[1,0]|[2,0])*([0,0]|[1,1]|[2,2])", Alphabet::uniform(2, b));
  s.kshift = minimize(shift_automaton(b));
  s.isk = from_regex("0*10*", Alphabet::uniform(1, b));
  s.pair = from_regex("[0,0]*[1,0][0,1][0,0]*", Alphabet::uniform(2, b));
  if (!env.has_predicate("kshift")) env.define_predicate("kshift", s.kshift);
  return s;
}

// ---------------------------------------------------------------------------
// Guessed automata

struct GuessSpec {
  const char* oracle;
  const char* predicate;
  std::size_t expected_states;  // complete minimal DFA, 0 if unspecified
};

inline const std::vector<GuessSpec>& guess_specs() {
  static const std::vector<GuessSpec> specs = {
      {"add-relation", "add", 42}, {"incr-relation", "incr", 0}, {"gut", "gut", 17}, {"aa", "aa", 23},
      {"bb", "bb", 24},            {"qq", "qq", 45},             {"hh", "hh", 0},
  };
  return specs;
}

struct GuessOutcome {
  GuessSpec spec;
  StabilizeResult result;
  std::size_t states = 0;
};

/// Guesses every sequence automaton from its oracle and stores it.
inline std::vector<GuessOutcome> guess_all(Environment& env, SequenceCache& cache, std::size_t l_max = 16) {
  std::vector<GuessOutcome> out;
  for (const auto& spec : guess_specs()) {
    StabilizeResult r = stabilize(named_oracle(spec.oracle, cache), 4, l_max, env.system());
    env.define_predicate(spec.predicate, r.automaton);
    out.push_back({spec, r, complete_state_count(r.automaton)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Closed form for g

/// floor(sqrt(v)) for 64-bit v.
inline std::uint64_t isqrt(std::uint64_t v) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(v)));
  while (r > 0 && r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

/// Exact evaluation of the two-case floor formula with alpha = (sqrt 3 - 1)/2
/// and beta = sqrt(3)/3, via floor(alpha n) = (isqrt(3n^2) - n) / 2 and
/// floor(alpha n + beta) = (isqrt(3(3n+2)^2) - 3n) / 6.
inline Natural closed_form_exact(Natural n, Digit last_digit) {
  if (n > 100000000ULL) throw std::overflow_error("closed_form_exact: n too large");
  if (last_digit == 1) return 2 * ((isqrt(3 * n * n) - n) / 2) + 1;
  const Natural m = 3 * n + 2;
  return 2 * ((isqrt(3 * m * m) - 3 * n) / 6);
}

struct ClosedFormSweep {
  std::size_t mismatches = 0;
  std::size_t guarded = 0;  // floors recomputed exactly near an integer
  Natural first_mismatch = 0;
};

/// Compares the floor formula against g(n) for n <= max_n. Floors are
/// taken in long double from 50-digit constants; any argument within
/// 1e-9 of an integer is recomputed exactly.
inline ClosedFormSweep closed_form_sweep(Natural max_n, SequenceCache& cache,
                                         const NumerationSystem& sys = NumerationSystem::kimberling()) {
  using boost::multiprecision::sqrt;
  const HighPrecision r3 = sqrt(HighPrecision(3));
  const auto alpha = static_cast<long double>((r3 - 1) / 2);
  const auto beta = static_cast<long double>(r3 / 3);
  ClosedFormSweep out;
  for (Natural n = 0; n <= max_n; ++n) {
    const DigitWord rep = sys.to_canonical(n);
    const Digit last = rep.empty() ? 0 : rep.back();
    const long double arg = alpha * static_cast<long double>(n) + (last == 1 ? 0.0L : beta);
    const long double fl = std::floor(arg);
    Natural value;
    if (arg - fl < 1e-9L || fl + 1 - arg < 1e-9L) {
      ++out.guarded;
      value = closed_form_exact(n, last);
    } else {
      value = 2 * static_cast<Natural>(fl) + (last == 1 ? 1 : 0);
    }
    if (value != cache.g(static_cast<std::size_t>(n))) {
      if (out.mismatches++ == 0) out.first_mismatch = n;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Subword complexity limits

using Wide = unsigned __int128;

inline std::string wide_string(Wide v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s += static_cast<char>('0' + static_cast<int>(v % 10));
    v /= 10;
  }
  return {s.rbegin(), s.rend()};
}

/// Counts m < n accepted by a one-track automaton whose language is
/// zero-invariant and restricted to canonical words, working in 128 bits.
class AcceptedBelow {
 public:
  AcceptedBelow(const Dfa& a, const NumerationSystem& sys, std::size_t max_len) : a_(totalize(a)), sys_(&sys) {
    basis_ = {1};
    const auto& c = sys.coefficients();
    const auto& init = sys.initial_terms();
    for (std::size_t i = 1; i < init.size() && basis_.size() < max_len + 1; ++i) basis_.push_back(init[i]);
    while (basis_.size() < max_len + 1) {
      Wide next = 0;
      for (std::size_t j = 0; j < c.size(); ++j) next += static_cast<Wide>(c[j]) * basis_[basis_.size() - 1 - j];
      if (next < basis_.back()) throw std::overflow_error("AcceptedBelow: basis overflow");
      basis_.push_back(next);
    }
    // counts_[len][s] = accepted words of length len from s.
    const std::size_t n = a_.num_states(), k = a_.alphabet().size();
    counts_.assign(max_len + 1, std::vector<Wide>(n, 0));
    for (StateId s = 0; s < static_cast<StateId>(n); ++s) counts_[0][s] = a_.accepting(s) ? 1 : 0;
    for (std::size_t len = 1; len <= max_len; ++len) {
      for (StateId s = 0; s < static_cast<StateId>(n); ++s) {
        Wide total = 0;
        for (Letter l = 0; l < k; ++l) total += counts_[len - 1][a_.next(s, l)];
        counts_[len][s] = total;
      }
    }
  }

  Wide basis(std::size_t i) const { return basis_.at(i); }

  /// Greedy digits of n, padded to `len`.
  std::vector<Digit> digits(Wide n, std::size_t len) const {
    std::vector<Digit> out(len, 0);
    for (std::size_t i = len; i-- > 0;) {
      Wide d = n / basis_[i];
      if (d > static_cast<Wide>(sys_->max_digit())) d = static_cast<Wide>(sys_->max_digit());
      out[len - 1 - i] = static_cast<Digit>(d);
      n -= d * basis_[i];
    }
    if (n != 0) throw std::overflow_error("AcceptedBelow: value needs more digits");
    return out;
  }

  /// #{m < n : accepted}. Canonical padded words of equal length compare
  /// lexicographically as their values do.
  Wide count_below(Wide n) const {
    const std::size_t len = counts_.size() - 1;
    std::vector<Digit> w = digits(n, len);
    Wide total = 0;
    StateId s = 0;
    for (std::size_t i = 0; i < len; ++i) {
      for (Digit d = 0; d < w[i]; ++d) total += counts_[len - 1 - i][a_.next(s, static_cast<Letter>(d))];
      s = a_.next(s, static_cast<Letter>(w[i]));
    }
    return total;
  }

 private:
  Dfa a_;
  const NumerationSystem* sys_;
  std::vector<Wide> basis_;
  std::vector<std::vector<Wide>> counts_;
};

struct ComplexityLimits {
  double limsup = 0;
  double liminf = 0;
};

/// rho(n) = n + 1 + #{m < n : hastwo(m)} for n >= 1, evaluated exactly at
/// the endpoints x_i, x_i + K_{2i}, y_i, y_i + K_{2i+1} of the two-special
/// intervals, where x_i = K_1 + K_3 + ... + K_{2i+1} and
/// y_i = K_0 + K_2 + ... + K_{2i+2}. Returns the extreme ratios rho(n)/n at
/// the two deepest levels.
inline ComplexityLimits complexity_limits(std::size_t depth, const Dfa& hastwo,
                                          const NumerationSystem& sys = NumerationSystem::kimberling()) {
  if (depth < 1 || depth > 25) throw std::invalid_argument("complexity_limits: depth must be in [1, 25]");
  AcceptedBelow counter(hastwo, sys, 2 * depth + 6);
  ComplexityLimits out{0, 1e9};
  Wide x = 0, y = counter.basis(0);
  for (std::size_t i = 0; i <= depth; ++i) {
    x += counter.basis(2 * i + 1);
    y += counter.basis(2 * i + 2);
    if (i + 2 < depth) continue;
    for (Wide e : {x, x + counter.basis(2 * i), y, y + counter.basis(2 * i + 1)}) {
      const Wide rho = e + 1 + counter.count_below(e);
      const double ratio = static_cast<double>(static_cast<long double>(rho) / static_cast<long double>(e));
      out.limsup = std::max(out.limsup, ratio);
      out.liminf = std::min(out.liminf, ratio);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Morphism identities

/// u^n(0) = s(r^{n-1}(01)) and u^n(1) = s(r^{n-1}(2012)) for 1 <= n <= max_n.
inline bool stu_identities(std::size_t max_n) {
  const Morphism u = u_morphism(), r = r_morphism();
  for (std::size_t n = 1; n <= max_n; ++n) {
    if (u.iterate("0", n) != r.code(r.iterate("01", n - 1))) return false;
    if (u.iterate("1", n) != r.code(r.iterate("2012", n - 1))) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Suites

struct SuiteSpec {
  const char* id;
  const char* title;
  const char* script;
  std::vector<const char*> requires_scripts;
};

inline const std::vector<SuiteSpec>& suite_specs() {
  static const std::vector<SuiteSpec> specs = {
      {"adder", "adder axioms", "01_adder.txt", {}},
      {"kimberling", "DFAO for k and its prefix factorization", "02_kimberling.txt", {}},
      {"gut", "synchronized automaton for g", "03_gut.txt", {}},
      {"irvine", "g counts ones of k; g([xa]) = 2[x] + a; closed form", "04_irvine.txt", {"02_kimberling.txt"}},
      {"positions", "A, B and Q", "05_positions.txt", {"02_kimberling.txt"}},
      {"parity", "g mod 2 and its partial sums", "06_parity.txt", {}},
      {"complexity", "right-special factors and subword complexity", "07_complexity.txt", {"02_kimberling.txt"}},
      {"critical", "critical exponent", "08_critical.txt", {"02_kimberling.txt"}},
  };
  return specs;
}

/// Statements whose expected verdict is FALSE.
inline bool expected_verdict(const std::string& name) { return name != "nothree"; }

struct SuiteOptions {
  std::size_t irvine_bound = 100000;
  Natural closed_form_bound = 1000000;
  std::size_t crucial_len = 8;
  std::size_t prefix_scan = 100000;
  std::size_t rs_bound = 500;
  std::size_t complexity_depth = 20;
  std::size_t klong5_i_max = 5;
  std::size_t oracle_bound = 10000;
};

/// Shared state for a run: one Environment that accumulates the scripts'
/// definitions in order.
class SuiteContext {
 public:
  explicit SuiteContext(SuiteOptions options = {}) : options_(options) {
    env_.add_search_dir(asset_dir() / "automata");
    guesses_ = guess_all(env_, cache_);
    support_ = build_support_automata(env_);
  }

  Environment& env() { return env_; }
  SequenceCache& cache() { return cache_; }
  const SuiteOptions& options() const { return options_; }
  const std::vector<GuessOutcome>& guesses() const { return guesses_; }
  const SupportAutomata& support() const { return support_; }

  std::vector<StatementResult> ensure_script(const std::string& script) {
    auto it = ran_.find(script);
    if (it != ran_.end()) return it->second;
    auto results = run_script_file(asset_dir() / "scripts" / script, env_);
    return ran_.emplace(script, results).first->second;
  }

  const Dfa& predicate(const std::string& name) { return env_.predicate(name); }

 private:
  SuiteOptions options_;
  Environment env_;
  SequenceCache cache_;
  std::vector<GuessOutcome> guesses_;
  SupportAutomata support_;
  std::map<std::string, std::vector<StatementResult>> ran_;
};

namespace detail {

template <class F>
CheckOutcome timed_check(const std::string& name, F f) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckOutcome c{name, false, "", 0};
  try {
    c.pass = f(c.detail);
  } catch (const std::exception& e) {
    c.pass = false;
    c.detail = std::string("error: ") + e.what();
  }
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return c;
}

/// The automaton relation R(n, x) agrees with x = f(n) for n < bound.
template <class F>
bool relation_matches(const Dfa& rel, std::size_t bound, F f, std::string& detail) {
  const auto& sys = NumerationSystem::kimberling();
  for (std::size_t n = 0; n < bound; ++n) {
    const Natural want = f(n);
    if (!accepts(rel, encode_tuple(sys, {static_cast<Natural>(n), want}))) {
      detail = "rejects n=" + std::to_string(n) + " value " + std::to_string(want);
      return false;
    }
    // Functionality spot-check: neighbors are rejected.
    if (accepts(rel, encode_tuple(sys, {static_cast<Natural>(n), want + 1}))) {
      detail = "accepts n=" + std::to_string(n) + " value " + std::to_string(want + 1);
      return false;
    }
  }
  detail = "n < " + std::to_string(bound);
  return true;
}

template <class F>
bool dfao_matches(const Dfao& d, std::size_t bound, F f, std::string& detail) {
  const auto& sys = NumerationSystem::kimberling();
  for (std::size_t n = 0; n < bound; ++n) {
    auto out = output_of(d, single_track_word(sys.to_canonical(n)));
    if (!out || *out != f(n)) {
      detail = "n=" + std::to_string(n) + " output " + (out ? std::to_string(*out) : "undefined");
      return false;
    }
  }
  detail = "n < " + std::to_string(bound);
  return true;
}

}  // namespace detail

/// Accepted (n, p) pairs of klong5, as canonical words without leading
/// zero tuples, up to word length max_len, sorted.
inline std::vector<std::pair<Natural, Natural>> decode_pairs(const Dfa& rel, std::size_t max_len,
                                                             const NumerationSystem& sys) {
  std::vector<std::pair<Natural, Natural>> out;
  for (const Word& w : accepted_words(rel, max_len)) {
    if (!w.empty() && w.front() == 0) continue;
    auto v = decode_tuple(sys, rel.alphabet(), w);
    out.emplace_back(v[0], v[1]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Pairs ([121(01)^i s]_K, [10(00)^i t]_K) for i <= i_max over the given
/// (s, t) suffix choices.
inline std::vector<std::pair<Natural, Natural>> klong5_family(
    std::size_t i_max, const std::vector<std::pair<std::string, std::string>>& suffixes, const NumerationSystem& sys) {
  std::vector<std::pair<Natural, Natural>> out;
  for (std::size_t i = 0; i <= i_max; ++i) {
    std::string n = "121", p = "10";
    for (std::size_t j = 0; j < i; ++j) {
      n += "01";
      p += "00";
    }
    for (const auto& [s, t] : suffixes) out.emplace_back(sys.value_of(n + s), sys.value_of(p + t));
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// The family as usually stated: suffixes (0, 0) and (02, 00).
inline std::vector<std::pair<Natural, Natural>> klong5_stated_family(std::size_t i_max, const NumerationSystem& sys) {
  return klong5_family(i_max, {{"0", "0"}, {"02", "00"}}, sys);
}

/// The family the automaton accepts, confirmed on the word: suffixes
/// (00, 00) and (002, 000).
inline std::vector<std::pair<Natural, Natural>> klong5_observed_family(std::size_t i_max, const NumerationSystem& sys) {
  return klong5_family(i_max, {{"00", "00"}, {"002", "000"}}, sys);
}

/// A position i at which the factor of length n has least period p, found
/// by the engine from klper.
inline std::optional<Natural> klper_witness(Environment& env, Natural n, Natural p) {
  Relation r = compile("i>=1 & $klper(i," + std::to_string(n) + "," + std::to_string(p) + ")", env);
  auto w = shortest_accepted(r.dfa);
  if (!w) return std::nullopt;
  return decode_tuple(env.system(), r.dfa.alphabet(), *w)[0];
}

inline TheoremReport run_suite(const std::string& id, SuiteContext& ctx) {
  auto spec_it = std::find_if(suite_specs().begin(), suite_specs().end(),
                              [&](const SuiteSpec& s) { return s.id == id; });
  if (spec_it == suite_specs().end()) throw std::invalid_argument("unknown theorem id '" + id + "'");
  const SuiteSpec& spec = *spec_it;
  TheoremReport report{spec.id, spec.title, {}, {}, {}};
  const auto& sys = ctx.env().system();
  const auto& opt = ctx.options();
  SequenceCache& cache = ctx.cache();
  try {
    for (const char* dep : spec.requires_scripts) ctx.ensure_script(dep);
    for (const auto& r : ctx.ensure_script(spec.script)) {
      StatementOutcome s{to_string(r.statement.kind), r.statement.name, r.verdict, std::nullopt, r.states, r.seconds};
      if (r.statement.kind == Statement::Kind::Eval || r.verdict) s.expected = expected_verdict(s.name);
      report.statements.push_back(s);
    }
  } catch (const std::exception& e) {
    report.error = e.what();
    return report;
  }
  auto add = [&](CheckOutcome c) { report.checks.push_back(std::move(c)); };
  auto state_check = [&](const std::string& pred) {
    for (const auto& g : ctx.guesses()) {
      if (g.spec.predicate != pred) continue;
      const std::string title = g.spec.expected_states == 0
                                    ? "guessed " + pred + " stabilizes"
                                    : "guessed " + pred + " has " + std::to_string(g.spec.expected_states) + " states";
      add(detail::timed_check(title, [&](std::string& d) {
        d = "normalized count " + std::to_string(g.states) + ", stable at length " +
            std::to_string(g.result.stable_length);
        return g.spec.expected_states == 0 || g.states == g.spec.expected_states;
      }));
    }
  };

  if (id == "adder") {
    state_check("add");
    add(detail::timed_check("add(x,y,z) iff x+y=z for x,y <= 200", [&](std::string& d) {
      const Dfa& a = ctx.predicate("add");
      for (Natural x = 0; x <= 200; ++x) {
        for (Natural y = 0; y <= 200; ++y) {
          for (Natural z : {x + y, x + y + 1, x + y == 0 ? 1 : x + y - 1}) {
            if (accepts(a, encode_tuple(sys, {x, y, z})) != (z == x + y)) {
              d = "(" + std::to_string(x) + "," + std::to_string(y) + "," + std::to_string(z) + ")";
              return false;
            }
          }
        }
      }
      return true;
    }));
    add(detail::timed_check("incr equals the constructed incrementer",
                            [&](std::string&) { return equivalent(ctx.predicate("incr"), build_incrementer(sys)); }));
  } else if (id == "kimberling") {
    add(detail::timed_check("K matches k", [&](std::string& d) {
      return detail::dfao_matches(ctx.env().dfao("K"), opt.oracle_bound, [&](std::size_t n) { return cache.k(n); }, d);
    }));
    add(detail::timed_check("KP is the morphism DFAO of 1->110, 0->11", [&](std::string&) {
      Dfao from_morphism = minimize(morphism_to_dfao(kimberling_morphism(), '1', sys));
      Dfa a = output_equals(ctx.env().dfao("KP"), 1), b = output_equals(from_morphism, 1);
      return equivalent(a, b) && equivalent(output_equals(ctx.env().dfao("KP"), 0), output_equals(from_morphism, 0));
    }));
    add(detail::timed_check("k[1..K_n] = k[1..K_{n-1}]^2 k[1..K_{n-2}]^2 for 2 <= n <= 12", [&](std::string& d) {
      const std::string& k = cache.k_prefix(sys.basis_term(12));
      for (std::size_t n = 2; n <= 12; ++n) {
        const std::string a = k.substr(0, sys.basis_term(n - 1)), b = k.substr(0, sys.basis_term(n - 2));
        if (k.substr(0, sys.basis_term(n)) != a + a + b + b) {
          d = "n=" + std::to_string(n);
          return false;
        }
      }
      return true;
    }));
  } else if (id == "gut") {
    state_check("gut");
    add(detail::timed_check("gut matches g", [&](std::string& d) {
      return detail::relation_matches(ctx.predicate("gut"), opt.oracle_bound, [&](std::size_t n) { return cache.g(n); },
                                      d);
    }));
  } else if (id == "irvine") {
    add(detail::timed_check("g(n) = k(1) + ... + k(n)", [&](std::string& d) {
      Natural sum = 0;
      for (std::size_t n = 0; n <= opt.irvine_bound; ++n) {
        if (n > 0) sum += static_cast<Natural>(cache.k(n));
        if (cache.g(n) != sum) {
          d = "n=" + std::to_string(n);
          return false;
        }
      }
      d = "n <= " + std::to_string(opt.irvine_bound);
      return true;
    }));
    add(detail::timed_check("g([xa]) = 2[x] + a for canonical x", [&](std::string& d) {
      std::size_t count = 0;
      std::vector<DigitWord> layer{{}};
      for (std::size_t len = 0; len <= opt.crucial_len; ++len) {
        std::vector<DigitWord> next;
        for (const DigitWord& x : layer) {
          for (Digit a = 0; a <= sys.max_digit(); ++a) {
            DigitWord xa = x;
            xa.push_back(a);
            if (!sys.avoids_forbidden(xa)) continue;
            ++count;
            if (cache.g(sys.value_of(xa)) != 2 * sys.value_of(x) + static_cast<Natural>(a)) {
              d = "x=" + to_string(x) + " a=" + std::to_string(a);
              return false;
            }
            if (!xa.empty() && xa.front() != 0) next.push_back(xa);
          }
        }
        layer = std::move(next);
      }
      d = std::to_string(count) + " pairs, |x| <= " + std::to_string(opt.crucial_len);
      return true;
    }));
    add(detail::timed_check("closed form matches g", [&](std::string& d) {
      ClosedFormSweep s = closed_form_sweep(opt.closed_form_bound, cache, sys);
      d = "n <= " + std::to_string(opt.closed_form_bound) + ", " + std::to_string(s.guarded) + " exact recomputations";
      if (s.mismatches) d += ", first mismatch n=" + std::to_string(s.first_mismatch);
      return s.mismatches == 0;
    }));
    add(detail::timed_check("kshift drops the last digit", [&](std::string& d) {
      const Dfa& ks = ctx.predicate("kshift");
      for (Natural n = 0; n < 2000; ++n) {
        DigitWord w = sys.to_canonical(n);
        if (!w.empty()) w.pop_back();
        const Natural z = sys.value_of(w);
        if (!accepts(ks, encode_tuple(sys, {n, z})) ||
            accepts(ks, encode_tuple(sys, {n, z + 1}))) {
          d = "n=" + std::to_string(n);
          return false;
        }
      }
      return true;
    }));
  } else if (id == "positions") {
    state_check("aa");
    state_check("bb");
    state_check("qq");
    add(detail::timed_check("aa matches A", [&](std::string& d) {
      return detail::relation_matches(ctx.predicate("aa"), opt.oracle_bound, [&](std::size_t n) { return cache.A(n); }, d);
    }));
    add(detail::timed_check("bb matches B", [&](std::string& d) {
      return detail::relation_matches(ctx.predicate("bb"), opt.oracle_bound, [&](std::size_t n) { return cache.B(n); }, d);
    }));
    add(detail::timed_check("qq matches Q", [&](std::string& d) {
      return detail::relation_matches(ctx.predicate("qq"), opt.oracle_bound, [&](std::size_t n) { return cache.Q(n); }, d);
    }));
    add(detail::timed_check("A and B partition the positive integers", [&](std::string& d) {
      const std::size_t bound = 100000;
      std::vector<std::uint8_t> seen(bound + 1, 0);
      for (std::size_t n = 1; cache.A(n) <= bound; ++n) ++seen[cache.A(n)];
      for (std::size_t n = 1; cache.B(n) <= bound; ++n) ++seen[cache.B(n)];
      for (std::size_t m = 1; m <= bound; ++m) {
        if (seen[m] != 1) {
          d = "m=" + std::to_string(m);
          return false;
        }
      }
      d = "up to " + std::to_string(bound);
      return true;
    }));
    add(detail::timed_check("A(n) least, B(n) greatest t with Q(t) = n", [&](std::string& d) {
      const std::size_t bound = 2000;
      const std::size_t t_max = cache.B(bound) + 1;
      std::map<Natural, std::pair<Natural, Natural>> span;
      for (std::size_t t = 0; t <= t_max + 10; ++t) {
        auto [it, inserted] = span.try_emplace(cache.Q(t), t, t);
        if (!inserted) it->second.second = t;
      }
      for (std::size_t n = 1; n <= bound; ++n) {
        auto it = span.find(n);
        if (it == span.end() || it->second.first != cache.A(n) || it->second.second != cache.B(n)) {
          d = "n=" + std::to_string(n);
          return false;
        }
      }
      d = "n <= " + std::to_string(bound);
      return true;
    }));
    add(detail::timed_check("B(n) = 2A(n) + n", [&](std::string& d) {
      for (std::size_t n = 0; n <= opt.oracle_bound; ++n) {
        if (cache.B(n) != 2 * cache.A(n) + n) {
          d = "n=" + std::to_string(n);
          return false;
        }
      }
      return true;
    }));
  } else if (id == "parity") {
    state_check("hh");
    add(detail::timed_check("GP matches g mod 2", [&](std::string& d) {
      return detail::dfao_matches(ctx.env().dfao("GP"), opt.oracle_bound, [&](std::size_t n) { return cache.g_prime(n); },
                                  d);
    }));
    add(detail::timed_check("g' equals the fixed point of 0->01, 1->0010", [&](std::string& d) {
      const std::string u = u_morphism().fixed_point('0', opt.oracle_bound);
      for (std::size_t n = 0; n < opt.oracle_bound; ++n) {
        if (u[n] - '0' != cache.g_prime(n)) {
          d = "n=" + std::to_string(n);
          return false;
        }
      }
      d = "prefix of length " + std::to_string(opt.oracle_bound);
      return true;
    }));
    add(detail::timed_check("GP equals s(r^w(0))", [&](std::string& d) {
      Dfao from_morphism = morphism_to_dfao(r_morphism(), '0', sys);
      return detail::dfao_matches(from_morphism, opt.oracle_bound, [&](std::size_t n) { return cache.g_prime(n); }, d);
    }));
    add(detail::timed_check("u^n(0) = s(r^{n-1}(01)), u^n(1) = s(r^{n-1}(2012))",
                            [&](std::string& d) {
                              d = "1 <= n <= 10";
                              return stu_identities(10);
                            }));
    add(detail::timed_check("g(n) = 2h(n) + g'(n)", [&](std::string& d) {
      for (std::size_t n = 0; n <= opt.irvine_bound; ++n) {
        if (cache.g(n) != 2 * cache.h_sum(n) + static_cast<Natural>(cache.g_prime(n))) {
          d = "n=" + std::to_string(n);
          return false;
        }
      }
      d = "n <= " + std::to_string(opt.irvine_bound);
      return true;
    }));
    add(detail::timed_check("hh matches h", [&](std::string& d) {
      return detail::relation_matches(ctx.predicate("hh"), opt.oracle_bound, [&](std::size_t n) { return cache.h_sum(n); },
                                      d);
    }));
  } else if (id == "complexity") {
    const std::size_t bound = opt.rs_bound;
    auto index = std::make_shared<FactorIndex>(cache.k_prefix(std::max<std::size_t>(200 * bound, 4 * bound + 8)).substr(
        0, std::max<std::size_t>(200 * bound, 4 * bound + 8)));
    add(detail::timed_check("right-special count is 1 or 2", [&](std::string& d) {
      for (std::size_t n = 0; n <= bound; ++n) {
        const std::size_t c = index->rs_count(n);
        if (c < 1 || c > 2) {
          d = "n=" + std::to_string(n) + " count " + std::to_string(c);
          return false;
        }
      }
      d = "n <= " + std::to_string(bound);
      return true;
    }));
    add(detail::timed_check("hastwo agrees with brute force", [&](std::string& d) {
      const Dfa& h = ctx.predicate("hastwo");
      for (std::size_t n = 0; n <= bound; ++n) {
        if (accepts(h, single_track_word(sys.to_canonical(n))) != (index->rs_count(n) == 2)) {
          d = "n=" + std::to_string(n);
          return false;
        }
      }
      d = "n <= " + std::to_string(bound);
      return true;
    }));
    add(detail::timed_check("complexity from hastwo matches factor counts", [&](std::string& d) {
      const Dfa& h = ctx.predicate("hastwo");
      std::size_t rho = 1;
      for (std::size_t n = 0; n <= bound; ++n) {
        if (index->complexity(n) != rho) {
          d = "n=" + std::to_string(n);
          return false;
        }
        rho += accepts(h, single_track_word(sys.to_canonical(n))) ? 2 : 1;
      }
      d = "n <= " + std::to_string(bound);
      return true;
    }));
    add(detail::timed_check("repaired ul matches the interval family up to length 14", [&](std::string& d) {
      const Dfa& ul = ctx.predicate("ul");
      std::set<std::pair<Natural, Natural>> got, want;
      for (const auto& pr : decode_pairs(ul, 14, sys)) got.insert(pr);
      auto fits = [&](Natural a, Natural b) {
        return std::max(sys.to_canonical(a).size(), sys.to_canonical(b).size()) <= 14;
      };
      Natural x = 0, y = sys.basis_term(0);
      for (std::size_t i = 0; 2 * i + 2 <= 14; ++i) {
        x += sys.basis_term(2 * i + 1);
        y += sys.basis_term(2 * i + 2);
        if (fits(x, x + sys.basis_term(2 * i))) want.emplace(x, x + sys.basis_term(2 * i));
        if (fits(y, y + sys.basis_term(2 * i + 1))) want.emplace(y, y + sys.basis_term(2 * i + 1));
      }
      d = std::to_string(got.size()) + " pairs";
      return got == want;
    }));
    add(detail::timed_check("ul intervals agree with brute force", [&](std::string& d) {
      const Dfa& ul = ctx.predicate("ul");
      std::vector<std::uint8_t> covered(bound + 1, 0);
      for (const auto& [x, y] : decode_pairs(ul, 14, sys)) {
        for (Natural n = x; n < y && n <= bound; ++n) covered[n] = 1;
      }
      for (std::size_t n = 0; n <= bound; ++n) {
        if ((covered[n] != 0) != (index->rs_count(n) == 2)) {
          d = "n=" + std::to_string(n);
          return false;
        }
      }
      d = "n <= " + std::to_string(bound);
      return true;
    }));
    add(detail::timed_check("complexity limits", [&](std::string& d) {
      ComplexityLimits lim = complexity_limits(opt.complexity_depth, ctx.predicate("hastwo"), sys);
      const double sup = (30 + std::sqrt(3.0)) / 23, inf = (3 + std::sqrt(3.0)) / 4;
      std::ostringstream s;
      s << std::setprecision(10) << "depth " << opt.complexity_depth << ": limsup " << lim.limsup << ", liminf "
        << lim.liminf;
      d = s.str();
      return std::abs(lim.limsup - sup) < 1e-3 && std::abs(lim.liminf - inf) < 1e-3;
    }));
  } else if (id == "critical") {
    const std::string prefix = cache.k_prefix(opt.prefix_scan).substr(0, opt.prefix_scan);
    add(detail::timed_check("max exponent in prefix lies in [5, 5.1548)", [&](std::string& d) {
      Repetition r = critical_exponent_scan(prefix, 4.0);
      std::ostringstream s;
      s << std::setprecision(8) << r.exponent() << " at " << r.start << ", length " << r.length << ", period "
        << r.period;
      d = s.str();
      return r.exponent() >= 5.0 && r.exponent() < 5.1548;
    }));
    const auto family = klong5_observed_family(opt.klong5_i_max, sys);
    std::size_t max_len = 0;
    for (const auto& [n, p] : family) max_len = std::max(max_len, sys.to_canonical(n).size());
    std::vector<std::pair<Natural, Natural>> decoded;
    add(detail::timed_check("klong5 pairs are (121(01)^i00, 10(00)^i00) and (121(01)^i002, 10(00)^i000)",
                            [&](std::string& d) {
                              decoded = decode_pairs(ctx.predicate("klong5"), max_len, sys);
                              d = std::to_string(decoded.size()) + " pairs with words of length <= " +
                                  std::to_string(max_len);
                              return decoded == family;
                            }));
    {
      // The stated family differs from the word: e.g. the longest factor
      // with period 8 has length 40, so (41, 8) cannot be accepted.
      CheckOutcome note = detail::timed_check("klong5 pairs are (121(01)^i0, 10(00)^i0) and (121(01)^i02, 10(00)^i00)",
                                              [&](std::string& d) {
                                                auto stated = klong5_stated_family(opt.klong5_i_max, sys);
                                                std::size_t hits = 0;
                                                for (const auto& pr : stated) {
                                                  hits += std::binary_search(decoded.begin(), decoded.end(), pr);
                                                }
                                                d = std::to_string(hits) + " of " + std::to_string(stated.size()) +
                                                    " accepted";
                                                return hits == stated.size();
                                              });
      note.informational = true;
      add(note);
    }
    add(detail::timed_check("decoded klong5 pairs confirmed on the word", [&](std::string& d) {
      if (decoded.empty()) return false;
      for (const auto& [n, p] : decoded) {
        auto i = klper_witness(ctx.env(), n, p);
        if (!i) {
          d = "no position for n=" + std::to_string(n);
          return false;
        }
        const std::string w = cache.k_prefix(*i + n + 2);
        // Position i is 0-based on k_0 k_1 ..., and k_0 is not a letter of the word.
        const std::string factor = w.substr(*i - 1, n);
        if (least_period(factor) != p || n <= 5 * p) {
          d = "n=" + std::to_string(n) + " p=" + std::to_string(p);
          return false;
        }
        // Maximal: extending by one letter on either side breaks period p.
        if (w[*i - 1 + n] == w[*i - 1 + n - p] || (*i >= 2 && w[*i - 2] == w[*i - 2 + p])) {
          d = "not maximal: n=" + std::to_string(n) + " p=" + std::to_string(p);
          return false;
        }
      }
      d = std::to_string(decoded.size()) + " pairs";
      return true;
    }));
    add(detail::timed_check("every repetition of exponent > 5 in the prefix is covered by klong5", [&](std::string& d) {
      std::size_t found = 0;
      for (const auto& r : longest_runs(prefix, prefix.size() / 5)) {
        if (r.length <= 5 * r.period || least_period(prefix.substr(r.start, r.length)) != r.period) continue;
        ++found;
        bool covered = false;
        for (const auto& [n, p] : decoded) covered = covered || (p == r.period && n >= r.length);
        if (!covered) {
          d = "length " + std::to_string(r.length) + " period " + std::to_string(r.period);
          return false;
        }
      }
      d = std::to_string(found) + " repetitions";
      return found > 0;
    }));
  }
  return report;
}

inline std::vector<TheoremReport> run_paper_suite(SuiteContext& ctx) {
  std::vector<TheoremReport> out;
  for (const auto& spec : suite_specs()) out.push_back(run_suite(spec.id, ctx));
  return out;
}

}  // namespace autoseq

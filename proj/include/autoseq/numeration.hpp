#pragma once

/**
 * @file numeration.hpp
 * @brief Linear numeration systems defined by a basis recurrence and a set
 * of forbidden digit factors.
 *
 * The built-in instance `msd_kim` has basis K_0 = 1, K_1 = 3,
 * K_n = 2 K_{n-1} + 2 K_{n-2}, digits {0,1,2}, and canonical words avoid
 * the factor "22". Words are msd-first; the empty word represents 0.
 */

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "autoseq/automaton.hpp"
#include "autoseq/regex.hpp"

namespace autoseq {

using Natural = std::uint64_t;
using DigitWord = std::vector<Digit>;

class NumerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline Natural checked_add(Natural a, Natural b) {
  Natural r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("natural number overflow");
  return r;
}

inline Natural checked_mul(Natural a, Natural b) {
  Natural r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("natural number overflow");
  return r;
}

}  // namespace detail

inline std::string to_string(const DigitWord& w) {
  std::string s;
  for (Digit d : w) s += static_cast<char>('0' + d);
  return s;
}

inline DigitWord digits_from_string(std::string_view s) {
  DigitWord w;
  for (char c : s) {
    if (c < '0' || c > '9') throw NumerationError(std::string("not a digit: '") + c + "'");
    w.push_back(c - '0');
  }
  return w;
}

class NumerationSystem {
 public:
  NumerationSystem(std::string name, std::vector<Natural> coefficients,
                   std::vector<Natural> initial_terms, Digit max_digit,
                   std::vector<std::string> forbidden)
      : name_(std::move(name)),
        coefficients_(std::move(coefficients)),
        initial_(std::move(initial_terms)),
        max_digit_(max_digit),
        forbidden_(std::move(forbidden)) {
    if (coefficients_.empty() || coefficients_.size() != initial_.size()) {
      throw NumerationError("recurrence order must equal the number of initial terms");
    }
    if (max_digit_ < 1 || max_digit_ > 9) throw NumerationError("digit bound must be in 1..9");
    if (initial_.front() != 1) throw NumerationError("basis must start at 1");
    for (std::size_t i = 1; i < initial_.size(); ++i) {
      if (initial_[i] <= initial_[i - 1]) throw NumerationError("initial terms must be strictly increasing");
    }
    for (const auto& f : forbidden_) {
      if (f.empty()) throw NumerationError("empty forbidden factor");
      digits_from_string(f);
    }
    basis_ = initial_;
    while (true) {
      const std::size_t n = basis_.size();
      Natural next = 0;
      try {
        for (std::size_t j = 0; j < coefficients_.size(); ++j) {
          next = detail::checked_add(next, detail::checked_mul(coefficients_[j], basis_[n - 1 - j]));
        }
      } catch (const std::overflow_error&) {
        break;
      }
      if (next <= basis_.back()) throw NumerationError("basis must be strictly increasing");
      basis_.push_back(next);
    }
  }

  /// The K-system used throughout: registered as "msd_kim".
  static const NumerationSystem& kimberling() {
    static const NumerationSystem k("msd_kim", {2, 2}, {1, 3}, 2, {"22"});
    return k;
  }

  /// Zeckendorf (Fibonacci) system, used as a cross-validation fixture.
  static const NumerationSystem& zeckendorf() {
    static const NumerationSystem f("msd_fib", {1, 1}, {1, 2}, 1, {"11"});
    return f;
  }

  /// Definition file, one "key = value" per line:
  ///   name = msd_kim
  ///   coefficients = 2 2
  ///   initial = 1 3
  ///   digits = 2
  ///   forbidden = 22
  static NumerationSystem parse(std::string_view text) {
    std::string name;
    std::vector<Natural> coefficients, initial;
    Digit max_digit = -1;
    std::vector<std::string> forbidden;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      auto eq = line.find('=');
      if (eq == std::string::npos) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        throw NumerationError("line " + std::to_string(line_no) + ": expected key = value");
      }
      std::istringstream key_in(line.substr(0, eq)), values(line.substr(eq + 1));
      std::string key;
      key_in >> key;
      std::string v;
      if (key == "name") {
        values >> name;
      } else if (key == "coefficients") {
        while (values >> v) coefficients.push_back(std::stoull(v));
      } else if (key == "initial") {
        while (values >> v) initial.push_back(std::stoull(v));
      } else if (key == "digits") {
        values >> max_digit;
      } else if (key == "forbidden") {
        while (values >> v) forbidden.push_back(v);
      } else {
        throw NumerationError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
      }
    }
    if (name.empty()) throw NumerationError("numeration system needs a name");
    return NumerationSystem(name, coefficients, initial, max_digit, forbidden);
  }

  static NumerationSystem load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NumerationError("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
  }

  const std::string& name() const { return name_; }
  Digit max_digit() const { return max_digit_; }
  const std::vector<Natural>& coefficients() const { return coefficients_; }
  const std::vector<Natural>& initial_terms() const { return initial_; }
  const std::vector<std::string>& forbidden() const { return forbidden_; }

  /// Number of basis terms representable without overflow.
  std::size_t representable_terms() const { return basis_.size(); }

  Natural basis_term(std::size_t i) const {
    if (i >= basis_.size()) {
      throw std::overflow_error("basis term " + std::to_string(i) + " of " + name_ + " exceeds 64 bits");
    }
    return basis_[i];
  }

  /// Greedy representation: msd-first, no leading zeros, empty for 0.
  DigitWord to_canonical(Natural n) const {
    if (n == 0) return {};
    std::size_t top = 0;
    while (top + 1 < basis_.size() && basis_[top + 1] <= n) ++top;
    DigitWord out;
    for (std::size_t i = top + 1; i-- > 0;) {
      Natural d = n / basis_[i];
      if (d > static_cast<Natural>(max_digit_)) d = static_cast<Natural>(max_digit_);
      out.push_back(static_cast<Digit>(d));
      n -= d * basis_[i];
    }
    if (n != 0) throw NumerationError("greedy representation did not terminate at 0");
    return out;
  }

  /// Sum of a_i * K_i with a_0 the last digit; leading zeros are harmless.
  Natural value_of(std::span<const Digit> w) const {
    Natural v = 0;
    const std::size_t len = w.size();
    for (std::size_t j = 0; j < len; ++j) {
      Digit d = w[j];
      if (d < 0 || d > max_digit_) throw NumerationError("digit " + std::to_string(d) + " out of range");
      if (d == 0) continue;
      v = detail::checked_add(v, detail::checked_mul(static_cast<Natural>(d), basis_term(len - 1 - j)));
    }
    return v;
  }

  Natural value_of(std::string_view w) const { return value_of(digits_from_string(w)); }

  bool avoids_forbidden(std::span<const Digit> w) const {
    std::string s = to_string(DigitWord(w.begin(), w.end()));
    for (const auto& f : forbidden_) {
      if (s.find(f) != std::string::npos) return false;
    }
    return true;
  }

  bool is_canonical(std::span<const Digit> w) const {
    if (!w.empty() && w.front() == 0) return false;
    for (Digit d : w) {
      if (d < 0 || d > max_digit_) return false;
    }
    return avoids_forbidden(w);
  }

  /// Single-track DFA for canonical words padded with any number of leading
  /// zeros (the domain of a variable in synchronized automata).
  Dfa padded_recognizer() const {
    // States are the longest suffixes of the input that are proper prefixes
    // of some forbidden factor.
    std::vector<std::string> prefixes{""};
    for (const auto& f : forbidden_) {
      for (std::size_t len = 1; len < f.size(); ++len) prefixes.push_back(f.substr(0, len));
    }
    std::sort(prefixes.begin(), prefixes.end());
    prefixes.erase(std::unique(prefixes.begin(), prefixes.end()), prefixes.end());
    auto index_of = [&](const std::string& s) {
      return static_cast<StateId>(std::find(prefixes.begin(), prefixes.end(), s) - prefixes.begin());
    };
    std::stable_sort(prefixes.begin(), prefixes.end(),
                     [](const std::string& a, const std::string& b) { return a.size() < b.size(); });
    Alphabet alphabet = Alphabet::uniform(1, max_digit_);
    Dfa out(alphabet, prefixes.size());
    for (std::size_t s = 0; s < prefixes.size(); ++s) {
      out.set_accepting(static_cast<StateId>(s));
      for (Digit d = 0; d <= max_digit_; ++d) {
        std::string w = prefixes[s] + static_cast<char>('0' + d);
        bool dead = false;
        for (const auto& f : forbidden_) {
          if (w.size() >= f.size() && w.compare(w.size() - f.size(), f.size(), f) == 0) dead = true;
        }
        if (dead) continue;
        std::string suffix = w;
        while (std::find(prefixes.begin(), prefixes.end(), suffix) == prefixes.end()) suffix.erase(0, 1);
        out.set_next(static_cast<StateId>(s), static_cast<Letter>(d), index_of(suffix));
      }
    }
    return minimize(out);
  }

  /// Accepts exactly the canonical representations (no leading zeros).
  Dfa canonical_recognizer() const {
    Dfa padded = padded_recognizer();
    Dfa out(padded.alphabet(), padded.num_states() + 1);
    const auto fresh = static_cast<StateId>(padded.num_states());
    for (StateId s = 0; s < static_cast<StateId>(padded.num_states()); ++s) {
      out.set_accepting(s, padded.accepting(s));
      for (Letter l = 0; l < padded.alphabet().size(); ++l) out.set_next(s, l, padded.next(s, l));
    }
    out.set_accepting(fresh, padded.accepting(0));
    for (Letter l = 1; l < padded.alphabet().size(); ++l) out.set_next(fresh, l, padded.next(0, l));
    // Make the fresh state initial by swapping it with state 0.
    Dfa swapped(out.alphabet(), out.num_states());
    auto remap = [&](StateId s) { return s == 0 ? fresh : (s == fresh ? 0 : s); };
    for (StateId s = 0; s < static_cast<StateId>(out.num_states()); ++s) {
      swapped.set_accepting(remap(s), out.accepting(s));
      for (Letter l = 0; l < out.alphabet().size(); ++l) {
        StateId t = out.next(s, l);
        if (t != kNoState) swapped.set_next(remap(s), l, remap(t));
      }
    }
    return minimize(swapped);
  }

 private:
  std::string name_;
  std::vector<Natural> coefficients_;
  std::vector<Natural> initial_;
  Digit max_digit_;
  std::vector<std::string> forbidden_;
  std::vector<Natural> basis_;
};

// ---------------------------------------------------------------------------
// Multi-track encoding

/// Pads each component's canonical word with leading zeros to a common
/// length (at least `min_length`) and zips them into tuple letters.
inline Word encode_tuple(const NumerationSystem& sys, std::span<const Natural> values,
                         std::size_t min_length = 0) {
  std::vector<DigitWord> reps;
  std::size_t len = min_length;
  for (Natural v : values) {
    reps.push_back(sys.to_canonical(v));
    len = std::max(len, reps.back().size());
  }
  Alphabet alphabet = Alphabet::uniform(values.size(), sys.max_digit());
  Word w(len);
  std::vector<Digit> tuple(values.size());
  for (std::size_t i = 0; i < len; ++i) {
    for (std::size_t t = 0; t < values.size(); ++t) {
      const std::size_t pad = len - reps[t].size();
      tuple[t] = i < pad ? 0 : reps[t][i - pad];
    }
    w[i] = alphabet.encode(tuple);
  }
  return w;
}

inline Word encode_tuple(const NumerationSystem& sys, std::initializer_list<Natural> values,
                         std::size_t min_length = 0) {
  std::vector<Natural> v(values);
  return encode_tuple(sys, std::span<const Natural>(v), min_length);
}

/// Splits a tuple word into its per-track digit words.
inline std::vector<DigitWord> split_tracks(const Alphabet& alphabet, std::span<const Letter> w) {
  std::vector<DigitWord> out(alphabet.tracks());
  for (Letter l : w) {
    for (std::size_t t = 0; t < alphabet.tracks(); ++t) out[t].push_back(alphabet.digit(l, t));
  }
  return out;
}

inline std::vector<Natural> decode_tuple(const NumerationSystem& sys, const Alphabet& alphabet,
                                         std::span<const Letter> w) {
  std::vector<Natural> out;
  for (const auto& track : split_tracks(alphabet, w)) out.push_back(sys.value_of(track));
  return out;
}

inline Word single_track_word(const DigitWord& digits) {
  return Word(digits.begin(), digits.end());
}

// ---------------------------------------------------------------------------
// Incrementer

/// Synchronized automaton accepting (n, n+1) in the K-system.
///
/// The successor of a canonical word x a w, where a in {0,1} (an implicit
/// leading 0 counts) and w is the maximal suffix in (21)*(e|2), is
/// x (a+1) 0^{|w|}. The three ending cases are:
///   ...0 -> ...1,  ...a(21)^i -> ...(a+1)0^{2i},  ...a(21)^i 2 -> ...(a+1)0^{2i+1}.
/// The last family (e.g. 212 -> 1000) is the carry case of "a2 -> (a+1)0".
inline Dfa build_incrementer(const NumerationSystem& sys = NumerationSystem::kimberling()) {
  if (sys.coefficients() != std::vector<Natural>{2, 2} || sys.initial_terms() != std::vector<Natural>{1, 3} ||
      sys.max_digit() != 2) {
    throw NumerationError("build_incrementer: construction is specific to the K-system");
  }
  Alphabet pair = Alphabet::uniform(2, 2);
  Dfa shape = from_regex("([0,0]|[1,1]|[2,2])*([0,1]|[1,2])([2,0][1,0])*(()|[2,0])", pair);
  // Both tracks must be (padded) canonical.
  Dfa domain = sys.padded_recognizer();
  Dfa both(pair, 1);
  {
    std::vector<std::size_t> first{0}, second{1};
    auto m0 = track_map(pair, domain.alphabet(), first);
    auto m1 = track_map(pair, domain.alphabet(), second);
    both = product(domain, m0, domain, m1, pair, BoolOp::And);
  }
  return minimize(product(shape, both, BoolOp::And));
}

// ---------------------------------------------------------------------------
// Binet form

using HighPrecision = boost::multiprecision::cpp_bin_float_50;

/// Closed-form constants of the K-basis to 50 significant digits:
/// K_n = lead * gamma^n + trail * delta^n.
struct BinetConstants {
  HighPrecision gamma;
  HighPrecision delta;
  HighPrecision lead;
  HighPrecision trail;
  HighPrecision error_bound;  // absolute bound on each constant

  static BinetConstants compute() {
    using boost::multiprecision::sqrt;
    HighPrecision r3 = sqrt(HighPrecision(3));
    BinetConstants c;
    c.gamma = 1 + r3;
    c.delta = 1 - r3;
    c.lead = HighPrecision(1) / 2 + r3 / 3;
    c.trail = HighPrecision(1) / 2 - r3 / 3;
    c.error_bound = HighPrecision("1e-48");
    return c;
  }

  HighPrecision basis(std::size_t n) const {
    using boost::multiprecision::pow;
    return lead * pow(gamma, static_cast<int>(n)) + trail * pow(delta, static_cast<int>(n));
  }
};

/// True iff for every i <= max_i the rounded Binet value equals K_i and
/// K_{i+1} - gamma K_i = (2 - sqrt 3) delta^i within 1e-9. Throws when the
/// working precision cannot certify the comparison.
inline bool binet_check(std::size_t max_i,
                        const NumerationSystem& sys = NumerationSystem::kimberling()) {
  using boost::multiprecision::abs;
  using boost::multiprecision::pow;
  using boost::multiprecision::sqrt;
  const BinetConstants c = BinetConstants::compute();
  if (max_i + 1 >= sys.representable_terms()) {
    throw NumerationError("binet_check: basis term " + std::to_string(max_i + 1) + " exceeds 64 bits");
  }
  // Relative error of gamma^i grows like i * eps; require it stays far below 1e-12.
  HighPrecision propagated = c.error_bound * pow(c.gamma, static_cast<int>(max_i + 1)) * (max_i + 2) * 4;
  if (propagated > HighPrecision("1e-12")) {
    throw NumerationError("binet_check: precision budget exceeded");
  }
  const HighPrecision two_minus_r3 = 2 - sqrt(HighPrecision(3));
  for (std::size_t i = 0; i <= max_i; ++i) {
    HighPrecision value = c.basis(i);
    HighPrecision exact(sys.basis_term(i));
    if (abs(value - exact) >= HighPrecision("0.5")) return false;
    HighPrecision residual = HighPrecision(sys.basis_term(i + 1)) - c.gamma * exact;
    HighPrecision predicted = two_minus_r3 * pow(c.delta, static_cast<int>(i));
    if (abs(residual - predicted) > HighPrecision("1e-9")) return false;
  }
  return true;
}

}  // namespace autoseq

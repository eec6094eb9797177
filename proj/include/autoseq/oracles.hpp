#pragma once

/**
 * @file oracles.hpp
 * @brief Definition-level computation of every sequence studied here:
 * Gutkovskiy's recurrence g, the Kimberling word k, positions A and B of its
 * ones and zeros, the sequence Q, g' = g mod 2 and its partial sums h.
 * These are the brute-force ground truth for guessing and verification.
 */

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "autoseq/automaton.hpp"
#include "autoseq/numeration.hpp"

namespace autoseq {

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Letter substitution with an optional coding. Letters are single chars.
struct Morphism {
  std::map<char, std::string> images;
  std::map<char, char> coding;  // empty means identity

  std::string apply(const std::string& w) const {
    std::string out;
    for (char c : w) {
      auto it = images.find(c);
      if (it == images.end()) throw OracleError(std::string("morphism: no image for '") + c + "'");
      out += it->second;
    }
    return out;
  }

  std::string iterate(std::string w, std::size_t times) const {
    for (std::size_t i = 0; i < times; ++i) w = apply(w);
    return w;
  }

  std::string code(const std::string& w) const {
    if (coding.empty()) return w;
    std::string out;
    for (char c : w) out += coding.at(c);
    return out;
  }

  /// Prefix of length >= len of the fixed point starting with `seed`.
  std::string fixed_point(char seed, std::size_t len) const {
    auto it = images.find(seed);
    if (it == images.end() || it->second.empty() || it->second.front() != seed || it->second.size() < 2) {
      throw OracleError(std::string("morphism is not prolongable on '") + seed + "'");
    }
    std::string w(1, seed);
    while (w.size() < len) w = apply(w);
    return w;
  }
};

/// h: 1 -> 110, 0 -> 11, whose fixed point is the Kimberling word k.
inline Morphism kimberling_morphism() { return Morphism{{{'1', "110"}, {'0', "11"}}, {}}; }

/// u: 0 -> 01, 1 -> 0010.
inline Morphism u_morphism() { return Morphism{{{'0', "01"}, {'1', "0010"}}, {}}; }

/// r: 0 -> 012, 1 -> 012, 2 -> 01 with coding s: 0,2 -> 0, 1 -> 1.
inline Morphism r_morphism() {
  return Morphism{{{'0', "012"}, {'1', "012"}, {'2', "01"}}, {{'0', '0'}, {'1', '1'}, {'2', '0'}}};
}

/// DFAO reading msd-first representations: one state per letter (the seed
/// is state 0, others in order of first appearance), the transition on
/// digit d from letter c goes to the d-th letter of image(c), and each
/// state outputs the coded value of its letter.
inline Dfao morphism_to_dfao(const Morphism& m, char seed, const NumerationSystem& sys) {
  std::vector<char> letters{seed};
  for (std::size_t i = 0; i < letters.size(); ++i) {
    auto it = m.images.find(letters[i]);
    if (it == m.images.end()) throw OracleError(std::string("morphism: no image for '") + letters[i] + "'");
    if (it->second.size() > static_cast<std::size_t>(sys.max_digit()) + 1) {
      throw OracleError("morphism image longer than the digit alphabet");
    }
    for (char c : it->second) {
      if (std::find(letters.begin(), letters.end(), c) == letters.end()) letters.push_back(c);
    }
  }
  Dfao d(Alphabet::uniform(1, sys.max_digit()), letters.size());
  for (std::size_t s = 0; s < letters.size(); ++s) {
    const std::string& image = m.images.at(letters[s]);
    for (std::size_t digit = 0; digit < image.size(); ++digit) {
      auto target = std::find(letters.begin(), letters.end(), image[digit]) - letters.begin();
      d.set_next(static_cast<StateId>(s), static_cast<Letter>(digit), static_cast<StateId>(target));
    }
    char out = m.coding.empty() ? letters[s] : m.coding.at(letters[s]);
    d.set_output(static_cast<StateId>(s), out - '0');
  }
  return d;
}

/// Memoized sequences. Not synchronized: use one instance per thread, or
/// warm it up before sharing for reads.
class SequenceCache {
 public:
  /// g(0) = 0, g(n) = n - g(floor(g(n-1) / 2)).
  Natural g(std::size_t n) {
    while (g_.size() <= n) {
      const std::size_t m = g_.size();
      if (m == 0) {
        g_.push_back(0);
        continue;
      }
      const auto inner = static_cast<std::size_t>(g_[m - 1] / 2);
      if (inner >= m) throw OracleError("g: inner index not below n (implementation bug)");
      g_.push_back(m - g_[inner]);
    }
    return g_[n];
  }

  /// Prefix k_1 k_2 ... of the fixed point of h, at least `len` letters.
  const std::string& k_prefix(std::size_t len) {
    if (k_.size() < len) {
      if (k_.empty()) k_ = "1";
      const Morphism h = kimberling_morphism();
      while (k_.size() < len) k_ = h.apply(k_);
    }
    return k_;
  }

  /// k(0) = 0; k(n) = n-th letter of the fixed point (1-based).
  int k(std::size_t n) {
    if (n == 0) return 0;
    return k_prefix(n)[n - 1] - '0';
  }

  /// Position of the n-th one in k (A) or zero (B); A(0) = B(0) = 0.
  Natural A(std::size_t n) { return position(n, '1', ones_); }
  Natural B(std::size_t n) { return position(n, '0', zeros_); }

  /// Q(n) = n for n <= 1; Q(m) when n = Q(m) + 2m and Q(m) occurs exactly
  /// once among Q(1..n-1); otherwise the least positive integer absent
  /// from Q(1..n-1).
  Natural Q(std::size_t n) {
    while (q_.size() <= n) extend_q();
    return q_[n];
  }

  int g_prime(std::size_t n) { return static_cast<int>(g(n) % 2); }

  /// h(n) = sum of g'(i) for 0 <= i < n.
  Natural h_sum(std::size_t n) {
    while (h_.size() <= n) {
      if (h_.empty()) {
        h_.push_back(0);
        continue;
      }
      const std::size_t m = h_.size();
      h_.push_back(h_[m - 1] + static_cast<Natural>(g_prime(m - 1)));
    }
    return h_[n];
  }

 private:
  Natural position(std::size_t n, char letter, std::vector<Natural>& table) {
    if (table.empty()) table.push_back(0);
    std::size_t scanned = scanned_[letter == '1' ? 0 : 1];
    while (table.size() <= n) {
      const std::string& w = k_prefix(std::max<std::size_t>(scanned + 1, 2 * scanned));
      for (; scanned < w.size() && table.size() <= n; ++scanned) {
        if (w[scanned] == letter) table.push_back(scanned + 1);
      }
    }
    scanned_[letter == '1' ? 0 : 1] = scanned;
    return table[n];
  }

  void extend_q() {
    const std::size_t n = q_.size();
    if (n <= 1) {
      q_.push_back(n);
      note(n, n);
      return;
    }
    // Candidates m with Q(m) + 2m = n were recorded when Q(m) was computed.
    std::optional<Natural> chosen;
    auto it = targets_.find(n);
    if (it != targets_.end()) {
      for (std::size_t m : it->second) {
        const Natural value = q_[m];
        // Occurrences among Q(1..n-1).
        auto c = count_.find(value);
        const std::size_t occurrences = c == count_.end() ? 0 : c->second;
        if (occurrences != 1) continue;
        if (chosen && *chosen != value) throw OracleError("Q: ambiguous definition at n = " + std::to_string(n));
        chosen = value;
      }
    }
    Natural value;
    if (chosen) {
      value = *chosen;
    } else {
      while (present_.size() > mex_ && present_[mex_]) ++mex_;
      value = mex_;
    }
    q_.push_back(value);
    note(n, value);
  }

  void note(std::size_t n, Natural value) {
    if (n >= 1) {
      ++count_[value];
      if (present_.size() <= value) present_.resize(value + 1, 0);
      present_[value] = 1;
    }
    targets_[value + 2 * n].push_back(n);
    targets_.erase(n);
  }

  std::vector<Natural> g_;
  std::string k_;
  std::vector<Natural> ones_, zeros_;
  std::size_t scanned_[2] = {0, 0};
  std::vector<Natural> q_;
  std::map<Natural, std::size_t> count_;
  std::vector<std::uint8_t> present_{1};  // 0 is never a candidate
  std::size_t mex_ = 1;
  std::map<Natural, std::vector<std::size_t>> targets_;
  std::vector<Natural> h_;
};

/// Named sequences for the CLI: g, k, A, B, Q, gprime, h.
inline Natural sequence_value(SequenceCache& cache, const std::string& name, std::size_t n) {
  if (name == "g") return cache.g(n);
  if (name == "k") return static_cast<Natural>(cache.k(n));
  if (name == "A") return cache.A(n);
  if (name == "B") return cache.B(n);
  if (name == "Q") return cache.Q(n);
  if (name == "gprime") return static_cast<Natural>(cache.g_prime(n));
  if (name == "h") return cache.h_sum(n);
  throw OracleError("unknown sequence '" + name + "'");
}

}  // namespace autoseq

#pragma once

// Generators and brute-force helpers shared by the test suites.

#include <fstream>
#include <functional>
#include <sstream>
#include <random>
#include <string>
#include <vector>

#include "autoseq/automaton.hpp"
#include "autoseq/numeration.hpp"

namespace autoseq::testing {

using Rng = std::mt19937_64;

/// Every word over `alphabet` of length exactly `len`, in radix order.
inline std::vector<Word> words_of_length(const Alphabet& alphabet, std::size_t len) {
  std::vector<Word> out{Word{}};
  for (std::size_t i = 0; i < len; ++i) {
    std::vector<Word> next;
    for (const auto& w : out) {
      for (Letter l = 0; l < alphabet.size(); ++l) {
        Word v = w;
        v.push_back(l);
        next.push_back(std::move(v));
      }
    }
    out = std::move(next);
  }
  return out;
}

inline std::vector<Word> words_up_to(const Alphabet& alphabet, std::size_t max_len) {
  std::vector<Word> out;
  for (std::size_t len = 0; len <= max_len; ++len) {
    auto layer = words_of_length(alphabet, len);
    out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

/// Random partial DFA: each transition is present with probability
/// `density`, each state accepting with probability 1/2.
inline Dfa random_dfa(Rng& rng, const Alphabet& alphabet, std::size_t states, double density = 0.85) {
  Dfa a(alphabet, states);
  std::uniform_int_distribution<StateId> target(0, static_cast<StateId>(states) - 1);
  std::bernoulli_distribution present(density), accept(0.5);
  for (StateId s = 0; s < static_cast<StateId>(states); ++s) {
    a.set_accepting(s, accept(rng));
    for (Letter l = 0; l < alphabet.size(); ++l) {
      if (present(rng)) a.set_next(s, l, target(rng));
    }
  }
  return a;
}

inline std::string read_asset(const std::string& relative) {
  std::ifstream in(std::string(AUTOSEQ_ASSET_DIR) + "/" + relative, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

/// Word over one track from a digit string such as "102".
inline Word digits(const std::string& s) { return single_track_word(digits_from_string(s)); }

/// Word over two tracks from two equal-length digit strings.
inline Word pair_word(const Alphabet& alphabet, const std::string& x, const std::string& y) {
  Word w;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Digit t[2] = {x[i] - '0', y[i] - '0'};
    w.push_back(alphabet.encode(t));
  }
  return w;
}

}  // namespace autoseq::testing

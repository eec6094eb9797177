#pragma once

/// @file words.hpp
/// @brief Brute-force combinatorics on a finite prefix of an infinite
/// word: factor counts, right-special factors, least periods and the
/// largest exponent of a repetition.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace autoseq {

class WordsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Least period of w (|w| for the empty and aperiodic cases), from the
/// prefix function.
inline std::size_t least_period(std::string_view w) {
  if (w.empty()) return 0;
  std::vector<std::size_t> pi(w.size(), 0);
  for (std::size_t i = 1; i < w.size(); ++i) {
    std::size_t k = pi[i - 1];
    while (k > 0 && w[i] != w[k]) k = pi[k - 1];
    if (w[i] == w[k]) ++k;
    pi[i] = k;
  }
  return w.size() - pi.back();
}

/// Suffix array and LCP table over a prefix.
class FactorIndex {
 public:
  explicit FactorIndex(std::string prefix) : text_(std::move(prefix)) {
    build_suffix_array();
    build_lcp();
  }

  const std::string& text() const { return text_; }
  std::size_t size() const { return text_.size(); }
  const std::vector<std::size_t>& suffix_array() const { return sa_; }
  /// lcp()[r] = longest common prefix of suffixes sa[r-1] and sa[r].
  const std::vector<std::size_t>& lcp() const { return lcp_; }

  /// Number of distinct factors of length n.
  std::size_t complexity(std::size_t n) const {
    guard(n);
    if (n == 0) return 1;
    std::size_t count = 0;
    for_each_class(n, [&](std::size_t, std::size_t) { ++count; });
    return count;
  }

  /// Number of length-n factors w with both w0 and w1 in the prefix.
  std::size_t rs_count(std::size_t n) const {
    guard(n + 1);
    std::size_t count = 0;
    // Classes of suffixes sharing their first n letters that continue
    // with at least two different letters.
    std::size_t r = 0;
    const std::size_t len = sa_.size();
    while (r < len) {
      if (text_.size() - sa_[r] < n + 1) {
        ++r;
        continue;
      }
      const char first = text_[sa_[r] + n];
      bool special = false;
      std::size_t run_min = SIZE_MAX;
      std::size_t s = r + 1;
      for (; s < len; ++s) {
        run_min = std::min(run_min, lcp_[s]);
        if (run_min < n) break;
        if (text_.size() - sa_[s] >= n + 1 && text_[sa_[s] + n] != first) special = true;
      }
      if (special) ++count;
      r = s;
    }
    return count;
  }

 private:
  void guard(std::size_t n) const {
    if (text_.size() < 4 * n) {
      throw WordsError("prefix of length " + std::to_string(text_.size()) + " too short for factors of length " +
                       std::to_string(n));
    }
  }

  // Calls f(first, last) for each maximal SA range of suffixes with
  // length >= n sharing their first n letters.
  template <class F>
  void for_each_class(std::size_t n, F f) const {
    std::size_t start = SIZE_MAX;
    std::size_t run_min = SIZE_MAX;
    for (std::size_t r = 0; r < sa_.size(); ++r) {
      if (r > 0) run_min = std::min(run_min, lcp_[r]);
      if (text_.size() - sa_[r] < n) continue;
      if (start == SIZE_MAX || run_min < n) {
        if (start != SIZE_MAX) f(start, r);
        start = r;
      }
      run_min = SIZE_MAX;
    }
    if (start != SIZE_MAX) f(start, sa_.size());
  }

  void build_suffix_array() {
    // Prefix doubling with radix-free sort; adequate for prefixes up to 10^6.
    const std::size_t n = text_.size();
    sa_.resize(n);
    std::iota(sa_.begin(), sa_.end(), 0);
    std::vector<std::size_t> rank(n), tmp(n);
    for (std::size_t i = 0; i < n; ++i) rank[i] = static_cast<unsigned char>(text_[i]);
    for (std::size_t k = 1;; k <<= 1) {
      auto key = [&](std::size_t i) { return std::pair(rank[i], i + k < n ? rank[i + k] + 1 : 0); };
      std::sort(sa_.begin(), sa_.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
      tmp[sa_[0]] = 0;
      for (std::size_t i = 1; i < n; ++i) tmp[sa_[i]] = tmp[sa_[i - 1]] + (key(sa_[i - 1]) < key(sa_[i]) ? 1 : 0);
      rank.swap(tmp);
      if (n == 0 || rank[sa_[n - 1]] == n - 1) break;
    }
  }

  void build_lcp() {
    // Kasai's algorithm.
    const std::size_t n = text_.size();
    lcp_.assign(n, 0);
    std::vector<std::size_t> inv(n);
    for (std::size_t r = 0; r < n; ++r) inv[sa_[r]] = r;
    std::size_t h = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (inv[i] == 0) {
        h = 0;
        continue;
      }
      const std::size_t j = sa_[inv[i] - 1];
      while (i + h < n && j + h < n && text_[i + h] == text_[j + h]) ++h;
      lcp_[inv[i]] = h;
      if (h > 0) --h;
    }
  }

  std::string text_;
  std::vector<std::size_t> sa_;
  std::vector<std::size_t> lcp_;
};

/// A factor w[start .. start+length-1] with least period `period`.
struct Repetition {
  std::size_t start = 0;
  std::size_t length = 0;
  std::size_t period = 0;

  double exponent() const { return period == 0 ? 0.0 : static_cast<double>(length) / static_cast<double>(period); }
};

/// For each period p <= max_period, the longest factor having period p
/// (not necessarily least), ignoring factors shorter than 2p. A factor
/// whose least period is q < p shows up with a larger exponent under q,
/// so the maximum exponent over the list is the maximum over all factors
/// of exponent at least 2.
inline std::vector<Repetition> longest_runs(std::string_view w, std::size_t max_period) {
  std::vector<Repetition> out;
  const std::size_t n = w.size();
  for (std::size_t p = 1; p <= max_period && p < n; ++p) {
    Repetition best{0, p, p};
    // A stretch of >= p positions with w[i] = w[i+p] contains a multiple
    // of p, so sampling there finds every such stretch.
    for (std::size_t j = 0; j + p < n;) {
      if (w[j] != w[j + p]) {
        j += p;
        continue;
      }
      std::size_t lo = j, hi = j;
      while (lo > 0 && w[lo - 1] == w[lo - 1 + p]) --lo;
      while (hi + p < n && w[hi] == w[hi + p]) ++hi;
      if (hi - lo + p > best.length) best = {lo, hi - lo + p, p};
      j = (hi / p + 1) * p;
    }
    out.push_back(best);
  }
  return out;
}

/// Largest exponent |x|/p over factors x of w with period p, where the
/// factor must fit in w. Periods are scanned up to |w| / floor_exponent.
inline Repetition critical_exponent_scan(std::string_view w, double floor_exponent = 1.0) {
  if (w.size() < 2) throw WordsError("critical_exponent_scan: word too short");
  const auto max_p = static_cast<std::size_t>(static_cast<double>(w.size()) / std::max(1.0, floor_exponent));
  Repetition best;
  for (const auto& r : longest_runs(w, max_p)) {
    // Compare length/period exactly.
    if (best.period == 0 || r.length * best.period > best.length * r.period) best = r;
  }
  best.period = least_period(w.substr(best.start, best.length));
  return best;
}

}  // namespace autoseq

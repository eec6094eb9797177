#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "autoseq/oracles.hpp"
#include "autoseq/walnut_io.hpp"
#include "autoseq/words.hpp"
#include "support.hpp"

using namespace autoseq;
using namespace autoseq::testing;

namespace {

const NumerationSystem& K() { return NumerationSystem::kimberling(); }

Natural isqrt(Natural v) {
  auto r = static_cast<Natural>(std::sqrt(static_cast<double>(v)));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

/// floor(alpha n) and floor(alpha n + beta) with alpha = (sqrt3 - 1)/2 and
/// beta = sqrt3/3, in integers: sqrt(3 n^2) and sqrt((3n + 2)^2 / 3) are
/// irrational for n >= 1, so flooring them first does not change the result.
Natural floor_alpha(Natural n) { return (isqrt(3 * n * n) - n) / 2; }
Natural floor_alpha_beta(Natural n) { return (isqrt((3 * n + 2) * (3 * n + 2) / 3) - n) / 2; }

std::size_t naive_complexity(const std::string& w, std::size_t n) {
  std::set<std::string> f;
  for (std::size_t i = 0; i + n <= w.size(); ++i) f.insert(w.substr(i, n));
  return f.size();
}

std::size_t naive_period(const std::string& w) {
  for (std::size_t p = 1; p < w.size(); ++p) {
    bool ok = true;
    for (std::size_t i = 0; i + p < w.size() && ok; ++i) ok = w[i] == w[i + p];
    if (ok) return p;
  }
  return w.size();
}

std::size_t naive_rs(const std::string& w, std::size_t n) {
  std::map<std::string, std::set<char>> right;
  for (std::size_t i = 0; i + n < w.size(); ++i) right[w.substr(i, n)].insert(w[i + n]);
  std::size_t count = 0;
  for (const auto& [x, letters] : right) count += letters.size() >= 2 ? 1 : 0;
  return count;
}

/// Largest |x| / p over factors x with period p, by checking every factor.
double naive_max_exponent(const std::string& w) {
  double best = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t j = i + 2; j <= w.size(); ++j) {
      const std::string x = w.substr(i, j - i);
      best = std::max(best, static_cast<double>(x.size()) / static_cast<double>(naive_period(x)));
    }
  }
  return best;
}

std::string random_word(Rng& rng, std::size_t len, char letters) {
  std::uniform_int_distribution<int> d(0, letters - 1);
  std::string w;
  for (std::size_t i = 0; i < len; ++i) w += static_cast<char>('0' + d(rng));
  return w;
}

}  // namespace

TEST(Gutkovskiy, TableValues) {
  SequenceCache c;
  const std::vector<Natural> g = {0, 1, 2, 2, 3, 4, 4, 5, 6, 7, 8, 8};
  const std::vector<int> k = {0, 1, 1, 0, 1, 1, 0, 1, 1, 1, 1, 0};
  for (std::size_t n = 0; n < g.size(); ++n) {
    EXPECT_EQ(c.g(n), g[n]) << n;
    EXPECT_EQ(c.k(n), k[n]) << n;
  }
}

TEST(Gutkovskiy, CacheIsTransparent) {
  SequenceCache warm, cold;
  for (Natural n = 0; n <= 20000; ++n) warm.g(n);
  for (Natural n = 20000; n >= 997; n -= 997) ASSERT_EQ(SequenceCache().g(n), warm.g(n));
  EXPECT_EQ(cold.Q(500), warm.Q(500));
  EXPECT_EQ(cold.A(300), warm.A(300));
}

TEST(Kimberling, PrefixAndFixedPoint) {
  SequenceCache c;
  EXPECT_EQ(c.k_prefix(10).substr(0, 10), "1101101111");
  EXPECT_EQ(kimberling_morphism().fixed_point('1', 8).substr(0, 8), "11011011");
  EXPECT_THROW(kimberling_morphism().fixed_point('0', 8), OracleError);
  EXPECT_THROW(kimberling_morphism().apply("12"), OracleError);
}

TEST(Kimberling, MorphismDfaoIsKp) {
  Dfao d = morphism_to_dfao(kimberling_morphism(), '1', K());
  ASSERT_EQ(d.num_states(), 2u);
  EXPECT_EQ(d.next(0, 2), 1);
  EXPECT_EQ(d.output(1), 0);
  EXPECT_EQ(d.next(1, 2), kNoState);
  EXPECT_EQ(write_walnut(d, {"msd_kim"}), read_asset("automata/KP.txt"));
  SequenceCache c;
  for (Natural n = 0; n <= 10000; ++n) {
    ASSERT_EQ(output_of(d, single_track_word(K().to_canonical(n))), c.k(n + 1)) << n;
  }
}

TEST(Kimberling, IrvineIdentity) {
  SequenceCache c;
  Natural sum = 0;
  for (Natural n = 1; n <= 100000; ++n) {
    sum += static_cast<Natural>(c.k(n));
    ASSERT_EQ(c.g(n), sum) << n;
  }
}

TEST(Gutkovskiy, ClosedForm) {
  SequenceCache c;
  for (Natural n = 1; n <= 1000000; ++n) {
    const DigitWord w = K().to_canonical(n);
    const Natural want = w.back() == 1 ? 2 * floor_alpha(n) + 1 : 2 * floor_alpha_beta(n);
    ASSERT_EQ(c.g(n), want) << n;
  }
}

TEST(Gutkovskiy, LastDigitShift) {
  // g([xa]) = 2[x] + a for canonical xa.
  SequenceCache c;
  Dfa canonical = K().canonical_recognizer();
  std::size_t checked = 0;
  for (const auto& w : words_up_to(Alphabet::uniform(1, 2), 8)) {
    for (Digit a = 0; a <= 2; ++a) {
      Word xa = w;
      xa.push_back(static_cast<Letter>(a));
      if (!accepts(canonical, w) || !accepts(canonical, xa)) continue;
      const Natural x = K().value_of(DigitWord(w.begin(), w.end()));
      ASSERT_EQ(c.g(K().value_of(DigitWord(xa.begin(), xa.end()))), 2 * x + a);
      ++checked;
    }
  }
  EXPECT_GT(checked, 3000u);
}

TEST(Positions, TableValues) {
  SequenceCache c;
  const std::vector<Natural> A = {0, 1, 2, 4, 5, 7, 8, 9, 10, 12, 13, 15, 16, 17, 18, 20};
  const std::vector<Natural> B = {0, 3, 6, 11, 14, 19, 22, 25, 28, 33, 36, 41, 44, 47, 50, 55};
  const std::vector<Natural> Q = {0, 1, 2, 1, 3, 4, 2, 5, 6, 7, 8, 3, 9, 10, 4, 11};
  for (std::size_t n = 0; n < A.size(); ++n) {
    EXPECT_EQ(c.A(n), A[n]) << n;
    EXPECT_EQ(c.B(n), B[n]) << n;
    EXPECT_EQ(c.Q(n), Q[n]) << n;
  }
}

TEST(Positions, AgreeWithScanOfK) {
  SequenceCache c;
  const std::string& k = c.k_prefix(50000);
  std::size_t ones = 0, zeros = 0;
  for (std::size_t i = 0; i < 50000; ++i) {
    if (k[i] == '1') {
      ASSERT_EQ(c.A(++ones), i + 1);
    } else {
      ASSERT_EQ(c.B(++zeros), i + 1);
    }
  }
}

TEST(Positions, ZerosFollowOnes) {
  SequenceCache c;
  for (Natural n = 0; n <= 10000; ++n) ASSERT_EQ(c.B(n), 2 * c.A(n) + n) << n;
}

TEST(Positions, CompositionBounds) {
  SequenceCache c;
  for (Natural n = 1; n <= 10000; ++n) {
    const auto a = static_cast<std::int64_t>(c.A(n)), b = static_cast<std::int64_t>(c.B(n));
    const auto ab = static_cast<std::int64_t>(c.A(c.B(n)));
    const auto ba = static_cast<std::int64_t>(c.B(c.A(n)));
    ASSERT_TRUE(ab - a - b == -1 || ab - a - b == 0) << n;
    ASSERT_GE(ba - a - b, -3) << n;
    ASSERT_LE(ba - a - b, 1) << n;
  }
}

TEST(Positions, QMatchesDefinitionByBruteForce) {
  // Direct reading of the definition, quadratic.
  const std::size_t N = 3000;
  std::vector<Natural> q = {0, 1};
  for (std::size_t n = 2; n <= N; ++n) {
    std::optional<Natural> v;
    for (std::size_t m = 1; m < n; ++m) {
      if (q[m] + 2 * m != n) continue;
      std::size_t occurrences = 0;
      for (std::size_t i = 1; i < n; ++i) occurrences += q[i] == q[m] ? 1 : 0;
      if (occurrences == 1) v = q[m];
    }
    if (!v) {
      Natural x = 1;
      while (std::find(q.begin() + 1, q.end(), x) != q.end()) ++x;
      v = x;
    }
    q.push_back(*v);
  }
  SequenceCache c;
  for (std::size_t n = 0; n <= N; ++n) ASSERT_EQ(c.Q(n), q[n]) << n;
  EXPECT_NO_THROW(c.Q(200000));
}

TEST(Parity, TableValues) {
  SequenceCache c;
  const std::vector<int> gp = {0, 1, 0, 0, 1, 0, 0, 1, 0, 1, 0, 0, 1, 0, 0, 1, 0, 1, 0, 0, 1};
  const std::vector<Natural> h = {0, 0, 1, 1, 1, 2, 2, 2, 3, 3, 4, 4, 4, 5, 5, 5, 6, 6, 7, 7, 7};
  for (std::size_t n = 0; n < gp.size(); ++n) {
    EXPECT_EQ(c.g_prime(n), gp[n]) << n;
    EXPECT_EQ(c.h_sum(n), h[n]) << n;
  }
}

TEST(Parity, FixedPointOfU) {
  SequenceCache c;
  const std::string u = u_morphism().fixed_point('0', 10000);
  for (std::size_t n = 0; n < 10000; ++n) ASSERT_EQ(u[n] - '0', c.g_prime(n)) << n;
}

TEST(Parity, CodedIteratesAgree) {
  const Morphism u = u_morphism(), r = r_morphism();
  for (std::size_t n = 1; n <= 10; ++n) {
    EXPECT_EQ(u.iterate("0", n), r.code(r.iterate("01", n - 1))) << n;
    EXPECT_EQ(u.iterate("1", n), r.code(r.iterate("2012", n - 1))) << n;
  }
}

TEST(Parity, GIsTwiceHPlusParity) {
  SequenceCache c;
  for (Natural n = 0; n <= 100000; ++n) ASSERT_EQ(c.g(n), 2 * c.h_sum(n) + static_cast<Natural>(c.g_prime(n))) << n;
}

TEST(Parity, NamedSequences) {
  SequenceCache c;
  EXPECT_EQ(sequence_value(c, "g", 11), 8u);
  EXPECT_EQ(sequence_value(c, "Q", 14), 4u);
  EXPECT_EQ(sequence_value(c, "h", 20), 7u);
  EXPECT_THROW(sequence_value(c, "zz", 1), OracleError);
}

TEST(Words, LeastPeriodMatchesNaive) {
  Rng rng(11);
  EXPECT_EQ(least_period(""), 0u);
  for (int i = 0; i < 2000; ++i) {
    const std::string w = random_word(rng, 1 + i % 30, static_cast<char>(1 + i % 3));
    ASSERT_EQ(least_period(w), naive_period(w)) << w;
  }
}

TEST(Words, FactorCountsMatchNaive) {
  Rng rng(12);
  for (int i = 0; i < 200; ++i) {
    const std::string w = random_word(rng, 40 + i % 60, static_cast<char>(2 + i % 2));
    FactorIndex idx(w);
    for (std::size_t n = 0; 4 * (n + 1) <= w.size(); ++n) {
      ASSERT_EQ(idx.complexity(n), naive_complexity(w, n)) << w << " " << n;
      ASSERT_EQ(idx.rs_count(n), naive_rs(w, n)) << w << " " << n;
    }
  }
  EXPECT_THROW(FactorIndex("0101").complexity(2), WordsError);
}

TEST(Words, KimberlingComplexityByIndex) {
  SequenceCache c;
  const std::string k = c.k_prefix(20000).substr(0, 20000);
  FactorIndex idx(k);
  for (std::size_t n = 1; n <= 60; ++n) {
    ASSERT_EQ(idx.complexity(n), naive_complexity(k, n)) << n;
    ASSERT_EQ(idx.rs_count(n), naive_rs(k, n)) << n;
  }
}

TEST(Words, CriticalExponentMatchesNaive) {
  Rng rng(13);
  for (int i = 0; i < 300; ++i) {
    const std::string w = random_word(rng, 2 + i % 40, static_cast<char>(2 + i % 2));
    const Repetition r = critical_exponent_scan(w);
    const double naive = naive_max_exponent(w);
    if (naive < 2) continue;  // only repetitions of exponent >= 2 are scanned
    ASSERT_NEAR(r.exponent(), naive, 1e-12) << w;
    ASSERT_EQ(r.period, naive_period(w.substr(r.start, r.length))) << w;
  }
  EXPECT_THROW(critical_exponent_scan("1"), WordsError);
}

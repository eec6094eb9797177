#include <gtest/gtest.h>

#include <map>
#include <set>

#include "autoseq/oracles.hpp"
#include "support.hpp"

using namespace autoseq;
using namespace autoseq::testing;

namespace {

const NumerationSystem& K() { return NumerationSystem::kimberling(); }

// Independent greedy expansion over the recurrence, without the class.
std::string naive_rep(Natural n) {
  std::vector<Natural> basis{1, 3};
  while (basis.back() <= n) basis.push_back(2 * basis[basis.size() - 1] + 2 * basis[basis.size() - 2]);
  std::string out;
  for (std::size_t i = basis.size(); i-- > 0;) {
    Natural d = std::min<Natural>(2, n / basis[i]);
    if (!out.empty() || d) out += static_cast<char>('0' + d);
    n -= d * basis[i];
  }
  return out;
}

bool radix_less(const DigitWord& a, const DigitWord& b) {
  return a.size() != b.size() ? a.size() < b.size() : a < b;
}

}  // namespace

TEST(Basis, FirstTerms) {
  EXPECT_EQ(K().basis_term(0), 1u);
  EXPECT_EQ(K().basis_term(1), 3u);
  EXPECT_EQ(K().basis_term(2), 8u);
  EXPECT_EQ(K().basis_term(3), 2u * 8 + 2 * 3);
}

TEST(Basis, OverflowIsDetected) {
  const std::size_t n = K().representable_terms();
  EXPECT_GT(n, 40u);
  EXPECT_NO_THROW(K().basis_term(n - 1));
  EXPECT_THROW(K().basis_term(n), std::overflow_error);
  EXPECT_THROW(K().value_of(DigitWord(n + 1, 1)), std::overflow_error);
}

TEST(Canonical, TableValues) {
  const std::vector<std::string> table = {"", "1", "2", "10", "11", "12", "20", "21", "100", "101", "102"};
  for (Natural n = 0; n < table.size(); ++n) EXPECT_EQ(to_string(K().to_canonical(n)), table[n]) << n;
}

TEST(Canonical, MatchesIndependentGreedy) {
  for (Natural n = 0; n <= 20000; ++n) ASSERT_EQ(to_string(K().to_canonical(n)), naive_rep(n));
}

TEST(ValueOf, NonCanonicalAndLeadingZeros) {
  EXPECT_EQ(K().value_of("22"), 8u);
  EXPECT_EQ(K().value_of(""), 0u);
  EXPECT_EQ(K().value_of("000102"), K().value_of("102"));
  EXPECT_THROW(K().value_of("13"), NumerationError);
  EXPECT_THROW(digits_from_string("1a"), NumerationError);
}

TEST(Recognizer, CanonicalWords) {
  Dfa c = K().canonical_recognizer();
  EXPECT_TRUE(accepts(c, digits("102")));
  EXPECT_FALSE(accepts(c, digits("22")));
  EXPECT_FALSE(accepts(c, digits("01")));
  EXPECT_TRUE(accepts(c, Word{}));
}

TEST(Recognizer, AgreesWithCanonicalPredicate) {
  Dfa c = K().canonical_recognizer();
  Dfa p = K().padded_recognizer();
  for (const auto& w : words_up_to(Alphabet::uniform(1, 2), 8)) {
    DigitWord d(w.begin(), w.end());
    ASSERT_EQ(accepts(c, w), K().is_canonical(d));
    ASSERT_EQ(accepts(p, w), to_string(d).find("22") == std::string::npos);
  }
}

TEST(Properties, RoundtripToOneMillion) {
  for (Natural n = 0; n <= 1000000; ++n) ASSERT_EQ(K().value_of(K().to_canonical(n)), n);
}

TEST(Properties, CanonicalWordsEnumerateAnInitialSegment) {
  Dfa c = K().canonical_recognizer();
  std::set<Natural> values;
  std::size_t count = 0;
  for (const auto& w : accepted_words(c, 12)) {
    ++count;
    values.insert(K().value_of(DigitWord(w.begin(), w.end())));
  }
  EXPECT_EQ(values.size(), count);
  EXPECT_EQ(*values.begin(), 0u);
  EXPECT_EQ(*values.rbegin(), count - 1);
  // Words of length <= 12 represent exactly [0, K_12).
  EXPECT_EQ(count, K().basis_term(12));
}

TEST(Properties, RadixOrderIsMonotone) {
  DigitWord prev = K().to_canonical(0);
  for (Natural n = 1; n <= 100000; ++n) {
    DigitWord cur = K().to_canonical(n);
    ASSERT_TRUE(radix_less(prev, cur)) << n;
    prev = std::move(cur);
  }
}

TEST(Incrementer, SevenToEight) {
  Dfa incr = build_incrementer();
  ASSERT_EQ(to_string(K().to_canonical(7)), "21");
  ASSERT_EQ(to_string(K().to_canonical(8)), "100");
  EXPECT_TRUE(accepts(incr, encode_tuple(K(), {7, 8})));
  EXPECT_TRUE(accepts(incr, encode_tuple(K(), {0, 1})));
  EXPECT_FALSE(accepts(incr, encode_tuple(K(), {3, 5})));
}

TEST(Incrementer, ExactlyTheSuccessorPairs) {
  Dfa incr = build_incrementer();
  for (Natural n = 0; n <= 100000; ++n) {
    ASSERT_TRUE(accepts(incr, encode_tuple(K(), {n, n + 1}))) << n;
    ASSERT_FALSE(accepts(incr, encode_tuple(K(), {n, n + 2}))) << n;
    ASSERT_FALSE(accepts(incr, encode_tuple(K(), {n + 1, n}))) << n;
  }
  // Every accepted pair word of length <= 7 decodes to a successor pair.
  for (const auto& w : accepted_words(incr, 7)) {
    auto v = decode_tuple(K(), incr.alphabet(), w);
    ASSERT_EQ(v[1], v[0] + 1);
  }
}

TEST(Binet, HoldsThroughThirty) {
  EXPECT_TRUE(binet_check(30));
  const BinetConstants c = BinetConstants::compute();
  EXPECT_EQ(static_cast<long>(boost::multiprecision::round(c.basis(2))), 8);
  // i = 0: K_1 - gamma K_0 = 2 - sqrt(3).
  const HighPrecision residual = HighPrecision(3) - c.gamma;
  EXPECT_LT(boost::multiprecision::abs(residual - (2 - boost::multiprecision::sqrt(HighPrecision(3)))),
            HighPrecision("1e-40"));
}

TEST(Binet, RefusesBeyondPrecisionBudget) {
  EXPECT_THROW(binet_check(K().representable_terms()), NumerationError);
}

TEST(Words, PrefixFactorization) {
  // K-words: k[1..K_n] = K_{n-1} K_{n-1} K_{n-2} K_{n-2}.
  SequenceCache cache;
  const std::string& k = cache.k_prefix(K().basis_term(12));
  EXPECT_EQ(k.substr(0, 8), "11011011");
  for (std::size_t n = 2; n <= 12; ++n) {
    const std::string a = k.substr(0, K().basis_term(n - 1));
    const std::string b = k.substr(0, K().basis_term(n - 2));
    ASSERT_EQ(k.substr(0, K().basis_term(n)), a + a + b + b) << n;
  }
}

TEST(System, ParsesDefinitionFile) {
  NumerationSystem s = NumerationSystem::parse("name = msd_kim\ncoefficients = 2 2\ninitial = 1 3\ndigits = 2\nforbidden = 22\n");
  EXPECT_EQ(s.name(), "msd_kim");
  for (Natural n = 0; n < 500; ++n) ASSERT_EQ(s.to_canonical(n), K().to_canonical(n));
  EXPECT_THROW(NumerationSystem::parse("name = x\ncoefficients = 1\ninitial = 2\ndigits = 1\n"), NumerationError);
  EXPECT_THROW(NumerationSystem::parse("bogus line\n"), NumerationError);
}

TEST(System, ZeckendorfFixture) {
  const auto& f = NumerationSystem::zeckendorf();
  EXPECT_EQ(to_string(f.to_canonical(12)), "10101");
  Dfa c = f.canonical_recognizer();
  for (Natural n = 0; n < 2000; ++n) {
    DigitWord w = f.to_canonical(n);
    ASSERT_EQ(f.value_of(w), n);
    ASSERT_TRUE(accepts(c, single_track_word(w)));
  }
  // The rewrite rules are specific to the K-system.
  EXPECT_THROW(build_incrementer(f), NumerationError);
}

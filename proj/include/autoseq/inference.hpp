#pragma once

// Guessing synchronized automata from oracle data.
//
// A sample at bound L classifies every word of length <= L: a word is
// accepted iff every track avoids the forbidden factors and the decoded
// tuple is in the relation. For relations given by an enumerator the
// positive words (tuples below K_L, shortest padding) are stored sorted.
// Linear relations sum(a_t x_t) = c are classified symbolically instead,
// since the 3-track adder needs lengths whose tuple counts do not fit in
// memory.
//
// The learner builds the minimal acyclic automaton of the sample and
// identifies prefixes by their residuals truncated to a fixed depth.

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "autoseq/automaton.hpp"
#include "autoseq/numeration.hpp"
#include "autoseq/oracles.hpp"

namespace autoseq {

class InferenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// sum(coefficients[t] * x_t) = constant.
struct LinearForm {
  std::vector<std::int64_t> coefficients;
  std::int64_t constant = 0;
};

struct RelationOracle {
  std::string name;
  std::size_t arity = 0;
  std::function<bool(std::span<const Natural>)> member;
  /// Optional: call `emit` once per member tuple with every component
  /// below `bound`. Without it (and without `linear`), all of
  /// [0, bound)^arity is scanned through `member`.
  std::function<void(Natural bound, const std::function<void(std::span<const Natural>)>& emit)> enumerate;
  std::optional<LinearForm> linear;
};

inline RelationOracle functional_oracle(std::string name, std::function<Natural(Natural)> f) {
  RelationOracle o;
  o.name = std::move(name);
  o.arity = 2;
  o.member = [f](std::span<const Natural> v) { return f(v[0]) == v[1]; };
  o.enumerate = [f](Natural bound, const std::function<void(std::span<const Natural>)>& emit) {
    for (Natural n = 0; n < bound; ++n) {
      Natural t[2] = {n, f(n)};
      if (t[1] < bound) emit(t);
    }
  };
  return o;
}

/// Named oracles: gut, incr-relation, add-relation, aa, bb, qq, hh, and
/// the empty relation "false". The cache must outlive the oracle.
inline RelationOracle named_oracle(const std::string& name, SequenceCache& cache) {
  if (name == "gut") return functional_oracle(name, [&cache](Natural n) { return cache.g(n); });
  if (name == "aa") return functional_oracle(name, [&cache](Natural n) { return cache.A(n); });
  if (name == "bb") return functional_oracle(name, [&cache](Natural n) { return cache.B(n); });
  if (name == "qq") return functional_oracle(name, [&cache](Natural n) { return cache.Q(n); });
  if (name == "hh") return functional_oracle(name, [&cache](Natural n) { return cache.h_sum(n); });
  if (name == "incr-relation") {
    RelationOracle o = functional_oracle(name, [](Natural n) { return n + 1; });
    o.linear = LinearForm{{-1, 1}, 1};
    return o;
  }
  if (name == "add-relation") {
    RelationOracle o;
    o.name = name;
    o.arity = 3;
    o.member = [](std::span<const Natural> v) { return v[0] + v[1] == v[2]; };
    o.enumerate = [](Natural bound, const std::function<void(std::span<const Natural>)>& emit) {
      for (Natural x = 0; x < bound; ++x) {
        for (Natural y = 0; x + y < bound; ++y) {
          Natural t[3] = {x, y, x + y};
          emit(t);
        }
      }
    };
    o.linear = LinearForm{{1, 1, -1}, 0};
    return o;
  }
  if (name == "false") {
    RelationOracle o;
    o.name = name;
    o.arity = 1;
    o.member = [](std::span<const Natural>) { return false; };
    return o;
  }
  throw InferenceError("unknown oracle '" + name + "'");
}

inline const std::vector<std::string>& oracle_names() {
  static const std::vector<std::string> names{"gut", "incr-relation", "add-relation", "aa", "bb", "qq", "hh"};
  return names;
}

namespace detail {

/// Residual tracker for a linear relation over the K-system. After a
/// prefix p, with S_r = sum_t a_t * [p_t 0^r]_K, a suffix s of length r
/// completes a member iff sum_t a_t [s_t]_K = c - S_r. The basis
/// recurrence gives S_{r+2} = 2 S_{r+1} + 2 S_r, so (S_0, S_1) plus the
/// "last digit was 2" flags determine the residual.
struct LinearKey {
  std::int64_t s0 = 0, s1 = 0;
  std::uint32_t flags = 0;
  bool operator==(const LinearKey&) const = default;
};

class LinearTracker {
 public:
  LinearTracker(LinearForm form, const NumerationSystem& sys, Alphabet alphabet)
      : form_(std::move(form)), sys_(&sys), alphabet_(std::move(alphabet)) {
    if (sys.coefficients() != std::vector<Natural>{2, 2} || sys.initial_terms() != std::vector<Natural>{1, 3} ||
        sys.forbidden() != std::vector<std::string>{"22"}) {
      throw InferenceError("linear samples are implemented for the K-system only");
    }
    if (form_.coefficients.size() != alphabet_.tracks()) throw InferenceError("linear form arity mismatch");
    for (std::int64_t a : form_.coefficients) (a > 0 ? pos_ : neg_) += a > 0 ? a : -a;
    weight_.resize(alphabet_.size());
    for (Letter l = 0; l < alphabet_.size(); ++l) {
      std::int64_t e = 0;
      for (std::size_t t = 0; t < alphabet_.tracks(); ++t) e += form_.coefficients[t] * alphabet_.digit(l, t);
      weight_[l] = e;
    }
  }

  std::int64_t constant() const { return form_.constant; }

  std::optional<LinearKey> step(const LinearKey& k, Letter l) const {
    std::uint32_t flags = 0;
    for (std::size_t t = 0; t < alphabet_.tracks(); ++t) {
      const Digit d = alphabet_.digit(l, t);
      if (d == 2 && (k.flags >> t & 1u)) return std::nullopt;
      if (d == 2) flags |= 1u << t;
    }
    const std::int64_t e = weight_[l];
    return LinearKey{k.s1 + e, 2 * k.s1 + 2 * k.s0 + 3 * e, flags};
  }

  bool accepting(const LinearKey& k) const { return k.s0 == form_.constant; }

  /// False when no suffix of length <= budget can complete the prefix.
  bool viable(const LinearKey& k, std::size_t budget) const {
    __int128 a = k.s0, b = k.s1;
    for (std::size_t r = 0; r <= budget; ++r) {
      const __int128 top = static_cast<__int128>(sys_->basis_term(r)) - 1;
      const __int128 need = static_cast<__int128>(form_.constant) - a;
      if (need >= -static_cast<__int128>(neg_) * top && need <= static_cast<__int128>(pos_) * top) return true;
      const __int128 c = 2 * b + 2 * a;
      a = b;
      b = c;
    }
    return false;
  }

 private:
  LinearForm form_;
  const NumerationSystem* sys_;
  Alphabet alphabet_;
  std::int64_t pos_ = 0, neg_ = 0;
  std::vector<std::int64_t> weight_;
};

}  // namespace detail

/// Classification of every word of length <= bound.
class ClassifiedSample {
 public:
  ClassifiedSample(const NumerationSystem& sys, Alphabet alphabet, std::size_t bound)
      : sys_(&sys), alphabet_(std::move(alphabet)), bound_(bound) {}

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t bound() const { return bound_; }
  const NumerationSystem& system() const { return *sys_; }

  bool symbolic() const { return tracker_ != nullptr; }
  const detail::LinearTracker& tracker() const { return *tracker_; }
  void set_tracker(std::shared_ptr<const detail::LinearTracker> t) { tracker_ = std::move(t); }

  /// Explicit positive words (shortest encodings), sorted after finish().
  std::size_t size() const { return offsets_.size(); }
  std::span<const std::uint8_t> word(std::size_t i) const {
    const std::size_t end = i + 1 < offsets_.size() ? offsets_[i + 1] : letters_.size();
    return {letters_.data() + offsets_[i], end - offsets_[i]};
  }
  void add(std::span<const std::uint8_t> w) {
    offsets_.push_back(letters_.size());
    letters_.insert(letters_.end(), w.begin(), w.end());
  }

  void finish() {
    std::vector<std::size_t> order(size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      auto wa = word(a), wb = word(b);
      return std::lexicographical_compare(wa.begin(), wa.end(), wb.begin(), wb.end());
    });
    std::vector<std::uint8_t> letters;
    std::vector<std::size_t> offsets;
    letters.reserve(letters_.size());
    offsets.reserve(order.size());
    for (std::size_t i : order) {
      offsets.push_back(letters.size());
      auto w = word(i);
      letters.insert(letters.end(), w.begin(), w.end());
    }
    letters_.swap(letters);
    offsets_.swap(offsets);
  }

  bool label(std::span<const Letter> w) const {
    if (w.size() > bound_) throw InferenceError("word longer than the sample bound");
    for (const auto& track : split_tracks(alphabet_, w)) {
      if (!sys_->avoids_forbidden(track)) return false;
    }
    if (symbolic()) {
      detail::LinearKey k;
      for (Letter l : w) k = *tracker_->step(k, l);
      return tracker_->accepting(k);
    }
    std::size_t lead = 0;
    while (lead < w.size() && w[lead] == 0) ++lead;
    std::vector<std::uint8_t> stripped(w.begin() + static_cast<std::ptrdiff_t>(lead), w.end());
    auto it = std::partition_point(offsets_.begin(), offsets_.end(), [&](const std::size_t& off) {
      auto m = word(static_cast<std::size_t>(&off - offsets_.data()));
      return std::lexicographical_compare(m.begin(), m.end(), stripped.begin(), stripped.end());
    });
    if (it == offsets_.end()) return false;
    auto m = word(static_cast<std::size_t>(it - offsets_.begin()));
    return std::equal(m.begin(), m.end(), stripped.begin(), stripped.end());
  }

 private:
  const NumerationSystem* sys_;
  Alphabet alphabet_;
  std::size_t bound_;
  std::vector<std::uint8_t> letters_;
  std::vector<std::size_t> offsets_;
  std::shared_ptr<const detail::LinearTracker> tracker_;
};

inline ClassifiedSample enumerate_sample(const RelationOracle& oracle, std::size_t bound,
                                         const NumerationSystem& sys = NumerationSystem::kimberling()) {
  if (bound < 1) throw InferenceError("sample bound must be >= 1");
  if (oracle.arity == 0) throw InferenceError("oracle arity must be >= 1");
  Alphabet alphabet = Alphabet::uniform(oracle.arity, sys.max_digit());
  if (alphabet.size() > 256) throw InferenceError("alphabet too large for the learner");
  ClassifiedSample sample(sys, alphabet, bound);
  if (oracle.linear) {
    sample.set_tracker(std::make_shared<detail::LinearTracker>(*oracle.linear, sys, alphabet));
    return sample;
  }
  const Natural limit = sys.basis_term(bound);
  std::vector<DigitWord> reps(static_cast<std::size_t>(limit));
  for (Natural n = 0; n < limit; ++n) reps[static_cast<std::size_t>(n)] = sys.to_canonical(n);

  std::vector<std::uint8_t> w;
  std::vector<Digit> digits(oracle.arity);
  auto emit = [&](std::span<const Natural> tuple) {
    if (tuple.size() != oracle.arity) throw InferenceError("oracle emitted a tuple of wrong arity");
    std::size_t len = 0;
    for (Natural v : tuple) {
      if (v >= limit) return;
      len = std::max(len, reps[static_cast<std::size_t>(v)].size());
    }
    w.assign(len, 0);
    for (std::size_t i = 0; i < len; ++i) {
      for (std::size_t t = 0; t < tuple.size(); ++t) {
        const DigitWord& r = reps[static_cast<std::size_t>(tuple[t])];
        const std::size_t pad = len - r.size();
        digits[t] = i < pad ? 0 : r[i - pad];
      }
      w[i] = static_cast<std::uint8_t>(alphabet.encode(digits));
    }
    sample.add(w);
  };
  if (oracle.enumerate) {
    oracle.enumerate(limit, emit);
  } else {
    std::vector<Natural> tuple(oracle.arity, 0);
    while (true) {
      if (oracle.member(tuple)) emit(tuple);
      std::size_t t = 0;
      while (t < tuple.size() && ++tuple[t] == limit) tuple[t++] = 0;
      if (t == tuple.size()) break;
    }
  }
  sample.finish();
  return sample;
}

namespace detail {

/// Hash-consed finite languages: node = (final, sorted children).
class WordDag {
 public:
  struct Node {
    bool final = false;
    std::vector<std::pair<std::uint8_t, std::int32_t>> children;
  };
  static constexpr std::int32_t kEmpty = 0;

  WordDag() {
    nodes_.push_back(Node{});
    register_.emplace(signature(nodes_[0]), kEmpty);
  }

  /// Minimal acyclic automaton of a sorted word list; returns its root.
  std::int32_t add_sorted(const ClassifiedSample& s) {
    std::vector<Node> path(1);
    std::vector<std::uint8_t> prev;
    for (std::size_t i = 0; i < s.size(); ++i) {
      auto w = s.word(i);
      std::size_t common = 0;
      while (common < w.size() && common < prev.size() && w[common] == prev[common]) ++common;
      freeze(path, prev, common);
      for (std::size_t j = common; j < w.size(); ++j) path.push_back(Node{});
      path.back().final = true;
      prev.assign(w.begin(), w.end());
    }
    freeze(path, prev, 0);
    return intern(path[0]);
  }

  const Node& node(std::int32_t id) const { return nodes_[static_cast<std::size_t>(id)]; }
  std::size_t size() const { return nodes_.size(); }

  std::int32_t child(std::int32_t id, std::uint8_t letter) const {
    for (auto [l, c] : node(id).children) {
      if (l == letter) return c;
    }
    return kEmpty;
  }

  std::int32_t intern(const Node& n) {
    auto [it, inserted] = register_.try_emplace(signature(n), static_cast<std::int32_t>(nodes_.size()));
    if (inserted) nodes_.push_back(n);
    return it->second;
  }

 private:
  static std::vector<std::int32_t> signature(const Node& n) {
    std::vector<std::int32_t> sig{n.final ? 1 : 0};
    for (auto [l, c] : n.children) {
      sig.push_back(l);
      sig.push_back(c);
    }
    return sig;
  }

  void freeze(std::vector<Node>& path, const std::vector<std::uint8_t>& word, std::size_t keep) {
    while (path.size() > keep + 1) {
      Node n = std::move(path.back());
      path.pop_back();
      path.back().children.emplace_back(word[path.size() - 1], intern(n));
    }
  }

  std::vector<Node> nodes_;
  std::unordered_map<std::vector<std::int32_t>, std::int32_t, VectorHash<std::int32_t>> register_;
};

/// The sample as a DAG whose root is the language of words <= bound.
/// Every node reached by a prefix of length j holds exactly the residual
/// restricted to length <= bound - j.
class SampleDag {
 public:
  explicit SampleDag(const ClassifiedSample& s) : bound_(s.bound()) {
    if (s.symbolic()) {
      root_ = build_linear(s.tracker(), s.alphabet(), LinearKey{}, bound_);
      return;
    }
    const std::int32_t words = dag_.add_sorted(s);
    // Leading zero letters shorten the budget by one and lead back to the
    // same shortest encodings.
    std::vector<std::int32_t> chain(bound_ + 1);
    for (std::size_t j = 0; j <= bound_; ++j) {
      WordDag::Node n;
      n.final = dag_.node(words).final;
      if (j > 0) {
        n.children.emplace_back(0, chain[j - 1]);
        for (auto [l, c] : dag_.node(words).children) {
          if (l != 0) n.children.emplace_back(l, truncate(c, j - 1));
        }
        std::erase_if(n.children, [](const auto& e) { return e.second == WordDag::kEmpty; });
      }
      chain[j] = dag_.intern(n);
    }
    root_ = chain[bound_];
  }

  std::int32_t root() const { return root_; }
  const WordDag& dag() const { return dag_; }

  /// Residual `v` restricted to words of length <= d.
  std::int32_t truncate(std::int32_t v, std::size_t d) {
    if (v == WordDag::kEmpty) return v;
    const std::uint64_t key = static_cast<std::uint64_t>(v) * (bound_ + 2) + d;
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    WordDag::Node n;
    n.final = dag_.node(v).final;
    if (d > 0) {
      for (auto [l, c] : dag_.node(v).children) {
        std::int32_t t = truncate(c, d - 1);
        if (t != WordDag::kEmpty) n.children.emplace_back(l, t);
      }
    }
    std::int32_t id = dag_.intern(n);
    memo_.emplace(key, id);
    return id;
  }

 private:
  struct KeyHash {
    std::size_t operator()(const std::pair<LinearKey, std::size_t>& k) const noexcept {
      std::size_t seed = std::hash<std::int64_t>{}(k.first.s0);
      hash_combine(seed, std::hash<std::int64_t>{}(k.first.s1));
      hash_combine(seed, k.first.flags);
      hash_combine(seed, k.second);
      return seed;
    }
  };

  std::int32_t build_linear(const LinearTracker& t, const Alphabet& alphabet, const LinearKey& key,
                            std::size_t budget) {
    auto memo_key = std::make_pair(key, budget);
    if (auto it = linear_memo_.find(memo_key); it != linear_memo_.end()) return it->second;
    WordDag::Node n;
    n.final = t.accepting(key);
    if (budget > 0) {
      for (Letter l = 0; l < alphabet.size(); ++l) {
        std::optional<LinearKey> next = t.step(key, l);
        if (!next || !t.viable(*next, budget - 1)) continue;
        std::int32_t c = build_linear(t, alphabet, *next, budget - 1);
        if (c != WordDag::kEmpty) n.children.emplace_back(static_cast<std::uint8_t>(l), c);
      }
    }
    std::int32_t id = dag_.intern(n);
    linear_memo_.emplace(memo_key, id);
    return id;
  }

  std::size_t bound_;
  WordDag dag_;
  std::int32_t root_ = WordDag::kEmpty;
  std::unordered_map<std::uint64_t, std::int32_t> memo_;
  std::unordered_map<std::pair<LinearKey, std::size_t>, std::int32_t, KeyHash> linear_memo_;
};

}  // namespace detail

struct LearnResult {
  Dfa automaton;
  std::size_t bound = 0;
  std::size_t split = 0;  // prefix length used to collect states
};

/// Hypothesis consistent with every word of length <= bound, or nullopt
/// when no split of the bound yields a closed, consistent table.
inline std::optional<LearnResult> learn_dfa(const ClassifiedSample& sample) {
  const Alphabet& alphabet = sample.alphabet();
  const std::size_t L = sample.bound();
  const std::size_t k = alphabet.size();
  detail::SampleDag sd(sample);
  const detail::WordDag& dag = sd.dag();
  using Id = std::int32_t;
  const Id empty = detail::WordDag::kEmpty;
  const Id root = sd.root();
  if (root == empty) return LearnResult{Dfa(alphabet, 1), L, 0};

  for (std::size_t split = 0; split < L; ++split) {
    const std::size_t m = L - 1 - split;
    // Nodes reached by prefixes of length <= split, in BFS order.
    std::unordered_map<Id, std::size_t> depth{{root, 0}};
    std::vector<Id> order{root};
    for (std::size_t i = 0; i < order.size(); ++i) {
      const std::size_t d = depth[order[i]];
      if (d == split) continue;
      for (auto [l, c] : dag.node(order[i]).children) {
        if (depth.try_emplace(c, d + 1).second) order.push_back(c);
      }
    }
    if (sd.truncate(root, m) == empty) continue;
    std::unordered_map<Id, StateId> cls;  // truncated residual -> state
    std::vector<Id> reps;
    for (Id v : order) {
      Id t = sd.truncate(v, m);
      if (t != empty && cls.try_emplace(t, static_cast<StateId>(reps.size())).second) reps.push_back(t);
    }
    std::vector<StateId> delta(reps.size() * k, kNoState);
    std::vector<std::uint8_t> filled(reps.size(), 0);
    std::vector<StateId> row(k);
    bool ok = true;
    for (Id v : order) {
      Id t = sd.truncate(v, m);
      if (t == empty) continue;
      const auto s = static_cast<std::size_t>(cls.at(t));
      std::fill(row.begin(), row.end(), kNoState);
      for (auto [l, c] : dag.node(v).children) {
        Id tc = sd.truncate(c, m);
        if (tc == empty) continue;
        auto it = cls.find(tc);
        if (it == cls.end()) {
          ok = false;  // not closed
          break;
        }
        row[l] = it->second;
      }
      if (!ok) break;
      auto dst = delta.begin() + static_cast<std::ptrdiff_t>(s * k);
      if (!filled[s]) {
        std::copy(row.begin(), row.end(), dst);
        filled[s] = 1;
      } else if (!std::equal(row.begin(), row.end(), dst)) {
        ok = false;  // inconsistent
        break;
      }
    }
    if (!ok) continue;
    Dfa h(alphabet, reps.size());
    for (std::size_t s = 0; s < reps.size(); ++s) {
      h.set_accepting(static_cast<StateId>(s), dag.node(reps[s]).final);
      for (Letter l = 0; l < k; ++l) h.set_next(static_cast<StateId>(s), l, delta[s * k + l]);
    }

    // Agreement with the whole sample: walk (state, node, depth) triples.
    std::unordered_set<std::uint64_t> seen;
    std::vector<std::tuple<StateId, Id, std::size_t>> stack{{0, root, 0}};
    const std::uint64_t nodes = dag.size() + 1;
    while (!stack.empty() && ok) {
      auto [s, v, d] = stack.back();
      stack.pop_back();
      if ((s != kNoState && h.accepting(s)) != dag.node(v).final) {
        ok = false;
        break;
      }
      if (d == L) continue;
      if (s == kNoState) {
        ok = v == empty;  // a sample word the hypothesis rejects
        continue;
      }
      for (Letter l = 0; l < k; ++l) {
        StateId t = h.next(s, l);
        Id c = dag.child(v, static_cast<std::uint8_t>(l));
        if (t == kNoState && c == empty) continue;
        const std::uint64_t key =
            (static_cast<std::uint64_t>(t + 1) * nodes + static_cast<std::uint64_t>(c)) * (L + 1) + d + 1;
        if (seen.insert(key).second) stack.emplace_back(t, c, d + 1);
      }
    }
    if (ok) return LearnResult{minimize(h), L, split};
  }
  return std::nullopt;
}

struct StabilizeResult {
  Dfa automaton;
  std::size_t stable_length = 0;  // first L whose hypothesis matched L + 1
  double seconds = 0;
};

/// Learns at L0, L0+1, ... and returns the first hypothesis isomorphic to
/// the next one. Throws if that does not happen by L_max.
inline StabilizeResult stabilize(const RelationOracle& oracle, std::size_t l0, std::size_t l_max,
                                 const NumerationSystem& sys = NumerationSystem::kimberling()) {
  if (l0 < 2) throw InferenceError("stabilize: starting length must be >= 2");
  const auto start = std::chrono::steady_clock::now();
  std::optional<Dfa> previous;
  for (std::size_t L = l0; L <= l_max; ++L) {
    std::optional<LearnResult> r = learn_dfa(enumerate_sample(oracle, L, sys));
    if (r && previous && isomorphic(*previous, r->automaton)) {
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      return StabilizeResult{*previous, L - 1, elapsed.count()};
    }
    previous = r ? std::optional<Dfa>(r->automaton) : std::nullopt;
  }
  throw InferenceError("oracle '" + oracle.name + "' did not stabilize by length " + std::to_string(l_max));
}

/// State count of the minimal complete DFA (rejecting sink included when
/// some transition is missing). This is the convention of the quoted
/// counts 17, 23, 24, 45, 42.
inline std::size_t complete_state_count(const Dfa& a) {
  Dfa m = minimize(a);
  if (is_empty(m)) return 1;
  return m.num_states() + (m.is_complete() ? 0 : 1);
}

}  // namespace autoseq

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "support.hpp"

namespace autoseq::testing {

// Random formulas paired with a direct evaluator. Terms evaluate to
// nullopt when a subtraction goes negative; such atoms are false.

using Assignment = std::map<std::string, Natural>;
using TermEval = std::function<std::optional<Natural>(const Assignment&)>;
using FormulaEval = std::function<bool(const Assignment&)>;

struct GenTerm {
  std::string text;
  TermEval eval;
};

struct GenFormula {
  std::string text;
  FormulaEval eval;
};

class FormulaGenerator {
 public:
  FormulaGenerator(std::uint64_t seed, std::vector<std::string> vars) : rng_(seed), vars_(std::move(vars)) {}

  GenTerm term(int depth) {
    const int pick = uniform(0, depth <= 0 ? 1 : 5);
    if (pick == 0) {
      std::string v = vars_[uniform(0, static_cast<int>(vars_.size()) - 1)];
      return {v, [v](const Assignment& a) { return std::optional<Natural>(a.at(v)); }};
    }
    if (pick == 1) {
      const Natural c = static_cast<Natural>(uniform(0, 12));
      return {std::to_string(c), [c](const Assignment&) { return std::optional<Natural>(c); }};
    }
    if (pick == 2 || pick == 3) {
      GenTerm x = term(depth - 1), y = term(depth - 1);
      const bool add = pick == 2;
      return {"(" + x.text + (add ? "+" : "-") + y.text + ")", [x, y, add](const Assignment& a) -> std::optional<Natural> {
                auto p = x.eval(a), q = y.eval(a);
                if (!p || !q) return std::nullopt;
                if (add) return *p + *q;
                if (*q > *p) return std::nullopt;
                return *p - *q;
              }};
    }
    GenTerm x = term(depth - 1);
    const Natural c = static_cast<Natural>(uniform(1, 5));
    if (pick == 4) {
      return {std::to_string(c) + "*" + x.text, [x, c](const Assignment& a) -> std::optional<Natural> {
                auto p = x.eval(a);
                if (!p) return std::nullopt;
                return c * *p;
              }};
    }
    return {"(" + x.text + ")/" + std::to_string(c), [x, c](const Assignment& a) -> std::optional<Natural> {
              auto p = x.eval(a);
              if (!p) return std::nullopt;
              return *p / c;
            }};
  }

  GenFormula atom() {
    static const char* ops[] = {"=", "!=", "<", "<=", ">", ">="};
    const int op = uniform(0, 5);
    GenTerm x = term(2), y = term(1);
    return {x.text + ops[op] + y.text, [x, y, op](const Assignment& a) {
              auto p = x.eval(a), q = y.eval(a);
              if (!p || !q) return false;
              switch (op) {
                case 0: return *p == *q;
                case 1: return *p != *q;
                case 2: return *p < *q;
                case 3: return *p <= *q;
                case 4: return *p > *q;
                default: return *p >= *q;
              }
            }};
  }

  GenFormula formula(int depth) {
    if (depth <= 0) return atom();
    const int pick = uniform(0, 5);
    if (pick == 0) {
      GenFormula f = formula(depth - 1);
      return {"~(" + f.text + ")", [f](const Assignment& a) { return !f.eval(a); }};
    }
    if (pick == 5) return atom();
    GenFormula f = formula(depth - 1), g = formula(depth - 1);
    static const char* ops[] = {"", "&", "|", "=>", "<=>"};
    return {"(" + f.text + ")" + ops[pick] + "(" + g.text + ")", [f, g, pick](const Assignment& a) {
              const bool p = f.eval(a), q = g.eval(a);
              switch (pick) {
                case 1: return p && q;
                case 2: return p || q;
                case 3: return !p || q;
                default: return p == q;
              }
            }};
  }

 private:
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  Rng rng_;
  std::vector<std::string> vars_;
};

}  // namespace autoseq::testing

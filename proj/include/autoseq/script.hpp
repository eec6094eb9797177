#pragma once

// Command files: def, eval, reg, combine and load statements, each ended
// by ':' (or ';'). Strings are double-quoted and may span lines; '#'
// starts a comment outside strings.

#include <chrono>
#include <functional>

#include "autoseq/engine.hpp"

namespace autoseq {

class ScriptError : public std::runtime_error {
 public:
  ScriptError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct Statement {
  enum class Kind { Def, Eval, Reg, Combine, Load };
  Kind kind = Kind::Eval;
  std::string name;
  std::vector<std::string> args;  // reg: track systems; combine: predicates; load: file
  std::string text;               // def/eval formula or reg regex
  std::size_t line = 0;
};

inline const char* to_string(Statement::Kind k) {
  switch (k) {
    case Statement::Kind::Def: return "def";
    case Statement::Kind::Eval: return "eval";
    case Statement::Kind::Reg: return "reg";
    case Statement::Kind::Combine: return "combine";
    case Statement::Kind::Load: return "load";
  }
  return "?";
}

inline std::vector<Statement> parse_script(const std::string& src) {
  struct Word {
    std::string text;
    bool quoted;
    std::size_t line;
  };
  std::vector<Statement> out;
  std::vector<Word> words;
  std::size_t line = 1;
  auto flush = [&](std::size_t at) {
    if (words.empty()) throw ScriptError("empty statement", at);
    const std::string& kw = words[0].text;
    Statement s;
    s.line = words[0].line;
    if (words[0].quoted) throw ScriptError("statement must start with a command", s.line);
    auto need_name = [&]() {
      if (words.size() < 2 || words[1].quoted) throw ScriptError(kw + ": missing name", s.line);
      s.name = words[1].text;
    };
    auto need_string_last = [&](std::size_t count) {
      if (words.size() != count || !words.back().quoted) {
        throw ScriptError(kw + ": expected a quoted " + (kw == "reg" ? "regex" : "formula") + " at the end", s.line);
      }
      s.text = words.back().text;
    };
    if (kw == "def" || kw == "eval") {
      s.kind = kw == "def" ? Statement::Kind::Def : Statement::Kind::Eval;
      need_name();
      need_string_last(3);
    } else if (kw == "reg") {
      s.kind = Statement::Kind::Reg;
      need_name();
      if (words.size() < 4) throw ScriptError("reg: expected track systems and a quoted regex", s.line);
      need_string_last(words.size());
      for (std::size_t i = 2; i + 1 < words.size(); ++i) {
        if (words[i].quoted) throw ScriptError("reg: only the last argument may be quoted", s.line);
        s.args.push_back(words[i].text);
      }
    } else if (kw == "combine") {
      s.kind = Statement::Kind::Combine;
      need_name();
      for (std::size_t i = 2; i < words.size(); ++i) {
        if (words[i].quoted) throw ScriptError("combine: unexpected string", s.line);
        s.args.push_back(words[i].text);
      }
      if (s.args.empty()) throw ScriptError("combine: no predicates listed", s.line);
    } else if (kw == "load") {
      s.kind = Statement::Kind::Load;
      if (words.size() != 2) throw ScriptError("load: expected one file name", s.line);
      s.args.push_back(words[1].text);
    } else {
      throw ScriptError("unknown command '" + kw + "'", s.line);
    }
    out.push_back(std::move(s));
    words.clear();
  };
  std::size_t i = 0;
  while (i < src.size()) {
    const char c = src[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
    } else if (c == ':' || c == ';') {
      flush(line);
      ++i;
    } else if (c == '"') {
      const std::size_t start_line = line;
      std::string text;
      ++i;
      while (i < src.size() && src[i] != '"') {
        if (src[i] == '\n') ++line;
        text += src[i++];
      }
      if (i == src.size()) throw ScriptError("unterminated string", start_line);
      ++i;
      words.push_back({text, true, start_line});
    } else {
      std::string text;
      while (i < src.size() && !std::isspace(static_cast<unsigned char>(src[i])) && src[i] != '"' && src[i] != ':' &&
             src[i] != ';' && src[i] != '#') {
        text += src[i++];
      }
      words.push_back({text, false, line});
    }
  }
  if (!words.empty()) throw ScriptError("missing ':' after statement", words[0].line);
  return out;
}

struct StatementResult {
  Statement statement;
  std::optional<bool> verdict;  // eval, or def of a closed formula
  std::size_t states = 0;       // minimal automaton, partial transitions
  double seconds = 0;
};

struct ScriptOptions {
  std::filesystem::path base_dir;  // resolves relative load paths
  std::function<void(const StatementResult&)> on_result;
};

inline StatementResult run_statement(const Statement& s, Environment& env, const ScriptOptions& opts = {}) {
  StatementResult r{s, std::nullopt, 0, 0};
  const auto t0 = std::chrono::steady_clock::now();
  try {
    switch (s.kind) {
      case Statement::Kind::Def: {
        Relation rel = def_predicate(s.name, s.text, env);
        r.states = rel.dfa.num_states();
        if (rel.closed()) r.verdict = rel.holds();
        break;
      }
      case Statement::Kind::Eval: {
        Relation rel = compile(s.text, env);
        if (!rel.closed()) {
          std::string list;
          for (const auto& v : rel.vars) list += (list.empty() ? "" : ", ") + v;
          throw CompileError("sentence has free variables: " + list);
        }
        r.states = rel.dfa.num_states();
        r.verdict = rel.holds();
        break;
      }
      case Statement::Kind::Reg: r.states = reg_predicate(s.name, s.args, s.text, env).num_states(); break;
      case Statement::Kind::Combine: r.states = combine_predicates(s.name, s.args, env).num_states(); break;
      case Statement::Kind::Load: {
        std::filesystem::path p = s.args[0];
        if (p.is_relative() && !opts.base_dir.empty() && std::filesystem::exists(opts.base_dir / p)) {
          p = opts.base_dir / p;
        } else if (p.is_relative() && !std::filesystem::exists(p)) {
          for (const auto& dir : env.search_path()) {
            if (std::filesystem::exists(dir / p)) {
              p = dir / p;
              break;
            }
          }
        }
        env.load_file(p);
        break;
      }
    }
  } catch (const ParseError& e) {
    throw ScriptError(std::string(to_string(s.kind)) + " " + s.name + ": " + e.what(), s.line + e.line() - 1);
  } catch (const std::exception& e) {
    if (dynamic_cast<const ScriptError*>(&e)) throw;
    throw ScriptError(std::string(to_string(s.kind)) + " " + s.name + ": " + e.what(), s.line);
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (opts.on_result) opts.on_result(r);
  return r;
}

inline std::vector<StatementResult> run_script(const std::string& src, Environment& env, const ScriptOptions& opts = {}) {
  std::vector<StatementResult> out;
  for (const auto& s : parse_script(src)) out.push_back(run_statement(s, env, opts));
  return out;
}

inline std::vector<StatementResult> run_script_file(const std::filesystem::path& path, Environment& env,
                                                    ScriptOptions opts = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScriptError("cannot open '" + path.string() + "'", 0);
  std::stringstream buffer;
  buffer << in.rdbuf();
  if (opts.base_dir.empty()) opts.base_dir = path.parent_path();
  return run_script(buffer.str(), env, opts);
}

}  // namespace autoseq

#pragma once

// Command-line front end. run_cli() takes the arguments after the program
// name and writes to the given streams, so tests can drive it in-process.
// Exit codes: 0 success, 1 verification failure, 2 usage or input error.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <memory>

#include "autoseq/reproduction.hpp"

namespace autoseq {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Marker for the empty representation of 0 in human-readable output.
inline constexpr const char* kEmptyMarker = "(empty)";

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CliConfig {
  std::string system = "msd_kim";  // built-in name or definition file
  std::string format = "text";     // text | dot | walnut | tsv
  std::string out_path;            // empty: the output stream
  bool quiet = false;
};

namespace cli_detail {

inline NumerationSystem resolve_system(const std::string& spec) {
  if (spec == NumerationSystem::kimberling().name()) return NumerationSystem::kimberling();
  if (spec == NumerationSystem::zeckendorf().name()) return NumerationSystem::zeckendorf();
  if (!std::filesystem::exists(spec)) throw UsageError("unknown numeration system '" + spec + "'");
  return NumerationSystem::load(spec);
}

inline Natural parse_natural(const std::string& s, const char* what) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw UsageError(std::string(what) + ": not a natural number: '" + s + "'");
  }
  try {
    return std::stoull(s);
  } catch (const std::out_of_range&) {
    throw UsageError(std::string(what) + ": out of range: '" + s + "'");
  }
}

inline std::string word_text(const DigitWord& w, bool tsv) {
  if (w.empty()) return tsv ? "" : kEmptyMarker;
  return to_string(w);
}

inline const std::vector<std::string>& sequence_names() {
  static const std::vector<std::string> names{"g", "k", "A", "B", "Q", "gprime", "h"};
  return names;
}

}  // namespace cli_detail

/// Runs one command. `args` excludes the program name.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CliConfig cfg;
  CLI::App app{"Automatic-sequence toolkit for the K-numeration system", "autoseq"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  app.add_option("--system", cfg.system, "Numeration system: built-in name or definition file");
  app.add_option("--format", cfg.format, "Output format")
      ->check(CLI::IsMember({"text", "dot", "walnut", "tsv"}));
  app.add_option("--out", cfg.out_path, "Write output to this file");
  app.add_flag("--quiet", cfg.quiet, "Suppress metadata and per-item progress");

  std::string seq_name, seq_from, seq_to;
  auto* seq = app.add_subcommand("seq", "Print a named sequence over an index range");
  seq->add_option("name", seq_name, "g, k, A, B, Q, gprime or h")->required();
  seq->add_option("from", seq_from)->required();
  seq->add_option("to", seq_to)->required();

  std::string rep_arg;
  bool rep_word = false;
  auto* rep = app.add_subcommand("rep", "Convert between naturals and representations");
  rep->add_option("value", rep_arg, "A natural, or a digit word with --word")->required();
  rep->add_flag("--word", rep_word, "Treat the argument as a digit word");

  std::string guess_oracle;
  std::size_t guess_max = 16;
  auto* guess = app.add_subcommand("guess", "Learn an automaton from a named oracle");
  guess->add_option("oracle", guess_oracle)->required();
  guess->add_option("--max-length", guess_max, "Largest sample length");

  std::string run_file;
  auto* run = app.add_subcommand("run", "Execute a command file in a fresh environment");
  run->add_option("script", run_file)->required();

  std::string verify_id;
  bool verify_json = false, verify_timings = false;
  auto* verify = app.add_subcommand("verify", "Run verification suites");
  verify->add_option("id", verify_id, "Suite id or 'all'")->required();
  verify->add_flag("--json", verify_json, "JSON report");
  verify->add_flag("--timings", verify_timings, "Include wall-clock timings");

  std::string export_name;
  std::vector<std::string> export_scripts;
  auto* exp = app.add_subcommand("export", "Write a predicate or automaton as DOT or Walnut text");
  exp->add_option("name", export_name)->required();
  exp->add_option("--script", export_scripts, "Command files to run first");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "autoseq: " << e.what() << "\n";
    return kExitUsage;
  }

  std::ofstream file;
  if (!cfg.out_path.empty()) {
    file.open(cfg.out_path, std::ios::binary);
    if (!file) {
      err << "autoseq: cannot write '" << cfg.out_path << "'\n";
      return kExitUsage;
    }
  }
  std::ostream& dest = cfg.out_path.empty() ? out : file;
  const bool tsv = cfg.format == "tsv";

  try {
    const NumerationSystem sys = cli_detail::resolve_system(cfg.system);
    const bool default_system = sys.name() == NumerationSystem::kimberling().name();
    auto require_default = [&](const char* cmd) {
      if (!default_system) throw UsageError(std::string(cmd) + " is defined for msd_kim only");
    };
    auto fresh_env = [&]() {
      auto env = std::make_unique<Environment>(sys);
      if (default_system) env->add_search_dir(asset_dir() / "automata");
      return env;
    };
    auto emit_automaton = [&](const auto& a, const std::string& name, std::size_t tracks) {
      if (cfg.format == "dot") {
        dest << write_dot(a, name);
      } else if (cfg.format == "tsv") {
        throw UsageError("automata are written as dot or walnut");
      } else {
        dest << write_walnut(a, std::vector<std::string>(tracks, sys.name()));
      }
    };

    if (*seq) {
      require_default("seq");
      const auto& names = cli_detail::sequence_names();
      if (std::find(names.begin(), names.end(), seq_name) == names.end()) {
        throw UsageError("unknown sequence '" + seq_name + "'");
      }
      const Natural from = cli_detail::parse_natural(seq_from, "from");
      const Natural to = cli_detail::parse_natural(seq_to, "to");
      if (from > to) throw UsageError("from must not exceed to");
      SequenceCache cache;
      for (Natural n = from; n <= to; ++n) {
        dest << n << (tsv ? '\t' : ' ') << sequence_value(cache, seq_name, n) << "\n";
      }
      return kExitOk;
    }

    if (*rep) {
      if (rep_word) {
        DigitWord w;
        try {
          w = digits_from_string(rep_arg);
        } catch (const NumerationError& e) {
          throw UsageError(e.what());
        }
        for (Digit d : w) {
          if (d > sys.max_digit()) throw UsageError("digit " + std::to_string(d) + " exceeds " + sys.name() + " bound");
        }
        const Natural v = sys.value_of(w);
        const char* flag = sys.is_canonical(w) ? "canonical" : "non-canonical";
        if (tsv) {
          dest << rep_arg << '\t' << v << '\t' << flag << "\n";
        } else {
          dest << v << ' ' << flag << "\n";
        }
      } else {
        const Natural n = cli_detail::parse_natural(rep_arg, "rep");
        const std::string w = cli_detail::word_text(sys.to_canonical(n), tsv);
        if (tsv) {
          dest << n << '\t' << w << "\n";
        } else {
          dest << w << "\n";
        }
      }
      return kExitOk;
    }

    if (*guess) {
      const auto& names = oracle_names();
      if (std::find(names.begin(), names.end(), guess_oracle) == names.end()) {
        throw UsageError("unknown oracle '" + guess_oracle + "'");
      }
      if (guess_max < 4) throw UsageError("--max-length must be at least 4");
      SequenceCache cache;
      RelationOracle oracle = named_oracle(guess_oracle, cache);
      StabilizeResult r;
      try {
        r = stabilize(oracle, 4, guess_max, sys);
      } catch (const InferenceError& e) {
        err << "autoseq: " << e.what() << "\n";
        return kExitFailure;
      }
      emit_automaton(r.automaton, guess_oracle, oracle.arity);
      if (!cfg.quiet) {
        err << "oracle " << guess_oracle << ": stable at length " << r.stable_length << ", "
            << complete_state_count(r.automaton) << " states\n";
      }
      return kExitOk;
    }

    if (*run) {
      auto env = fresh_env();
      ScriptOptions opts;
      opts.on_result = [&](const StatementResult& r) {
        const auto& s = r.statement;
        if (r.verdict) {
          dest << s.name << (tsv ? '\t' : ' ') << (*r.verdict ? "TRUE" : "FALSE") << "\n";
        } else if (!cfg.quiet) {
          const std::string label = s.kind == Statement::Kind::Load ? s.args[0] : s.name;
          dest << label << (tsv ? '\t' : ' ') << r.states << (tsv ? "" : " states") << "\n";
        }
      };
      run_script_file(run_file, *env, opts);
      return kExitOk;
    }

    if (*verify) {
      require_default("verify");
      const auto& specs = suite_specs();
      const bool all = verify_id == "all";
      if (!all && std::none_of(specs.begin(), specs.end(), [&](const SuiteSpec& s) { return verify_id == s.id; })) {
        throw UsageError("unknown suite '" + verify_id + "'");
      }
      SuiteContext ctx;
      bool pass = true;
      nlohmann::json reports = nlohmann::json::array();
      for (const auto& spec : specs) {
        if (!all && verify_id != spec.id) continue;
        TheoremReport r = run_suite(spec.id, ctx);
        pass = pass && r.pass();
        if (verify_json) {
          reports.push_back(to_json(r, verify_timings));
        } else if (cfg.quiet) {
          dest << (r.pass() ? "PASS " : "FAIL ") << r.id << "\n";
        } else {
          dest << to_text(r, verify_timings);
        }
      }
      if (verify_json) dest << reports.dump(2) << "\n";
      return pass ? kExitOk : kExitFailure;
    }

    if (*exp) {
      auto env = fresh_env();
      for (const auto& script : export_scripts) run_script_file(script, *env);
      if (env->has_dfao(export_name) ||
          (!env->has_predicate(export_name) && !export_name.empty() && std::isupper(static_cast<unsigned char>(export_name[0])))) {
        emit_automaton(env->dfao(export_name), export_name, 1);
      } else {
        const Dfa& a = env->predicate(export_name);
        emit_automaton(a, export_name, a.alphabet().tracks());
      }
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "autoseq: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ScriptError& e) {
    err << "autoseq: " << (run_file.empty() ? "" : run_file + ": ") << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "autoseq: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace autoseq

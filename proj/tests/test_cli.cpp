#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "autoseq/cli.hpp"
#include "autoseq/inference.hpp"
#include "autoseq/walnut_io.hpp"
#include "support.hpp"

using namespace autoseq;
using namespace autoseq::testing;

namespace {

struct Outcome {
  int code = 0;
  std::string out, err;
};

Outcome cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  Outcome o;
  o.code = run_cli(std::move(args), out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::string script(const std::string& name) { return std::string(AUTOSEQ_ASSET_DIR) + "/scripts/" + name; }

std::string rows(const std::vector<Natural>& values, std::size_t from = 0) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) s += std::to_string(from + i) + " " + std::to_string(values[i]) + "\n";
  return s;
}

std::size_t count_of(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST(Seq, TableRows) {
  EXPECT_EQ(cli({"seq", "g", "0", "11"}).out, rows({0, 1, 2, 2, 3, 4, 4, 5, 6, 7, 8, 8}));
  EXPECT_EQ(cli({"seq", "k", "0", "11"}).out, rows({0, 1, 1, 0, 1, 1, 0, 1, 1, 1, 1, 0}));
  EXPECT_EQ(cli({"seq", "A", "0", "15"}).out, rows({0, 1, 2, 4, 5, 7, 8, 9, 10, 12, 13, 15, 16, 17, 18, 20}));
  EXPECT_EQ(cli({"seq", "B", "0", "15"}).out, rows({0, 3, 6, 11, 14, 19, 22, 25, 28, 33, 36, 41, 44, 47, 50, 55}));
  EXPECT_EQ(cli({"seq", "Q", "0", "15"}).out, rows({0, 1, 2, 1, 3, 4, 2, 5, 6, 7, 8, 3, 9, 10, 4, 11}));
  EXPECT_EQ(cli({"seq", "gprime", "0", "20"}).out,
            rows({0, 1, 0, 0, 1, 0, 0, 1, 0, 1, 0, 0, 1, 0, 0, 1, 0, 1, 0, 0, 1}));
  EXPECT_EQ(cli({"seq", "h", "0", "20"}).out, rows({0, 0, 1, 1, 1, 2, 2, 2, 3, 3, 4, 4, 4, 5, 5, 5, 6, 6, 7, 7, 7}));
}

TEST(Seq, SingleRowAndTsv) {
  Outcome o = cli({"seq", "g", "5", "5"});
  EXPECT_EQ(o.code, kExitOk);
  EXPECT_EQ(o.out, "5 4\n");
  EXPECT_EQ(cli({"--format", "tsv", "seq", "g", "5", "5"}).out, "5\t4\n");
  EXPECT_EQ(cli({"seq", "g", "5", "5", "--format", "tsv"}).out, "5\t4\n");
}

TEST(Seq, UsageErrors) {
  EXPECT_EQ(cli({"seq", "zz", "0", "3"}).code, kExitUsage);
  EXPECT_EQ(cli({"seq", "g", "4", "3"}).code, kExitUsage);
  EXPECT_EQ(cli({"seq", "g", "x", "3"}).code, kExitUsage);
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"--format", "pdf", "seq", "g", "0", "1"}).code, kExitUsage);
}

TEST(Rep, TableTwo) {
  const std::vector<std::string> table = {"(empty)", "1", "2", "10", "11", "12", "20", "21", "100", "101", "102"};
  for (std::size_t n = 0; n < table.size(); ++n) EXPECT_EQ(cli({"rep", std::to_string(n)}).out, table[n] + "\n");
  EXPECT_EQ(cli({"--format", "tsv", "rep", "0"}).out, "0\t\n");
  EXPECT_EQ(cli({"--format", "tsv", "rep", "10"}).out, "10\t102\n");
}

TEST(Rep, Words) {
  EXPECT_EQ(cli({"rep", "--word", "22"}).out, "8 non-canonical\n");
  EXPECT_EQ(cli({"rep", "--word", "102"}).out, "10 canonical\n");
  EXPECT_EQ(cli({"--format", "tsv", "rep", "--word", "22"}).out, "22\t8\tnon-canonical\n");
  EXPECT_EQ(cli({"rep", "--word", "13"}).code, kExitUsage);
  EXPECT_EQ(cli({"rep", "abc"}).code, kExitUsage);
}

TEST(Rep, OtherSystems) {
  EXPECT_EQ(cli({"--system", "msd_fib", "rep", "12"}).out, "10101\n");
  const auto dir = std::filesystem::temp_directory_path() / "autoseq_cli_test";
  std::filesystem::create_directories(dir);
  const auto file = dir / "kim.sys";
  std::ofstream(file) << "name = msd_kim\ncoefficients = 2 2\ninitial = 1 3\ndigits = 2\nforbidden = 22\n";
  EXPECT_EQ(cli({"--system", file.string(), "rep", "10"}).out, "102\n");
  EXPECT_EQ(cli({"--system", "nope", "rep", "10"}).code, kExitUsage);
}

TEST(Guess, GutkovskiyAutomaton) {
  Outcome o = cli({"guess", "gut", "--max-length", "14"});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  WalnutAutomaton w = read_walnut(o.out);
  EXPECT_EQ(complete_state_count(to_dfa(w.automaton)), 17u);
  EXPECT_NE(o.err.find("stable at length 8, 17 states"), std::string::npos) << o.err;
  EXPECT_TRUE(cli({"--quiet", "guess", "gut", "--max-length", "14"}).err.empty());
  EXPECT_EQ(cli({"guess", "gut", "--max-length", "14"}).out, o.out);
}

TEST(Guess, UnstableAndUnknown) {
  Outcome o = cli({"guess", "gut", "--max-length", "8"});
  EXPECT_EQ(o.code, kExitFailure);
  EXPECT_TRUE(o.out.empty());
  EXPECT_EQ(cli({"guess", "nope"}).code, kExitUsage);
  EXPECT_EQ(cli({"--format", "tsv", "guess", "gut"}).code, kExitUsage);
}

TEST(Run, AdderChecksPrintSixTrueLines) {
  Outcome o = cli({"run", script("01_adder.txt")});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  EXPECT_EQ(count_of(o.out, " TRUE\n"), 6u) << o.out;
  EXPECT_EQ(count_of(o.out, "FALSE"), 0u);
  EXPECT_EQ(cli({"--quiet", "run", script("01_adder.txt")}).out, o.out);
}

TEST(Run, ErrorsCarryTheLocation) {
  const auto file = std::filesystem::temp_directory_path() / "autoseq_cli_bad.txt";
  std::ofstream(file) << "eval ok \"?msd_kim Ax x=x\":\neval bad \"?msd_kim Ax x=\":\n";
  Outcome o = cli({"run", file.string()});
  EXPECT_EQ(o.code, kExitUsage);
  EXPECT_NE(o.err.find(file.string()), std::string::npos) << o.err;
  EXPECT_NE(o.err.find("2"), std::string::npos) << o.err;
  EXPECT_EQ(cli({"run", "/nonexistent/script.txt"}).code, kExitUsage);
}

TEST(Verify, AdderSuite) {
  Outcome o = cli({"--quiet", "verify", "adder"});
  EXPECT_EQ(o.code, kExitOk) << o.out;
  EXPECT_EQ(o.out, "PASS adder\n");
  Outcome j = cli({"verify", "adder", "--json"});
  auto parsed = nlohmann::json::parse(j.out);
  ASSERT_EQ(parsed.size(), 1u);
  EXPECT_EQ(parsed[0]["pass"], true);
  EXPECT_EQ(cli({"verify", "adder"}).out, cli({"verify", "adder"}).out);
  EXPECT_EQ(cli({"verify", "nope"}).code, kExitUsage);
  EXPECT_EQ(cli({"--system", "msd_fib", "verify", "adder"}).code, kExitUsage);
}

TEST(Export, PredicateAndDfao) {
  Outcome d = cli({"export", "K", "--script", script("02_kimberling.txt"), "--format", "dot"});
  ASSERT_EQ(d.code, kExitOk) << d.err;
  EXPECT_EQ(d.out.rfind("digraph", 0), 0u) << d.out;
  Outcome w = cli({"export", "gut"});
  ASSERT_EQ(w.code, kExitOk) << w.err;
  EXPECT_EQ(complete_state_count(to_dfa(read_walnut(w.out).automaton)), 17u);
  EXPECT_EQ(cli({"--format", "tsv", "export", "gut"}).code, kExitUsage);
  EXPECT_EQ(cli({"export", "nothing_here"}).code, kExitUsage);
}

TEST(Output, WritesToFile) {
  const auto file = std::filesystem::temp_directory_path() / "autoseq_cli_out.txt";
  std::filesystem::remove(file);
  Outcome o = cli({"--out", file.string(), "seq", "g", "0", "3"});
  EXPECT_EQ(o.code, kExitOk);
  EXPECT_TRUE(o.out.empty());
  std::ifstream in(file);
  std::stringstream s;
  s << in.rdbuf();
  EXPECT_EQ(s.str(), "0 0\n1 1\n2 2\n3 2\n");
}

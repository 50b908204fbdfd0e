// Golden-file tests for the hrush binary. Usage:
//   test_cli <path-to-hrush> <golden-dir>
// With HRUSH_UPDATE_GOLDEN=1 the expected outputs are rewritten instead.

#include <gtest/gtest.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <regex>
#include <string>
#include <vector>

#include "hrush/hrush.hpp"
#include "support/cli_runner.hpp"
#include "support/oracles.hpp"

using namespace hrush;
namespace fs = std::filesystem;

namespace {

cli::Runner* runner = nullptr;

std::vector<cli::Case> cases() {
  static const auto c = cli::load_cases(runner->golden);
  return c;
}

const cli::Case& find_case(const std::string& name) {
  static const auto all = cases();
  for (const auto& c : all) {
    if (c.name == name) return c;
  }
  throw std::runtime_error("no golden case " + name);
}

Graph graph_from_dot(const std::string& dot) {
  std::set<Vertex> vertices;
  std::vector<Edge> edges;
  const std::regex node(R"(^\s*(\d+) \[)"), arc(R"(^\s*(\d+) -> (\d+))");
  std::stringstream ss(dot);
  std::string line;
  std::smatch m;
  while (std::getline(ss, line)) {
    if (std::regex_search(line, m, arc)) {
      const auto a = static_cast<Vertex>(std::stoul(m[1])), b = static_cast<Vertex>(std::stoul(m[2]));
      edges.push_back({std::min(a, b), std::max(a, b)});
    } else if (std::regex_search(line, m, node)) {
      vertices.insert(static_cast<Vertex>(std::stoul(m[1])));
    }
  }
  return Graph({vertices.begin(), vertices.end()}, std::move(edges));
}

}  // namespace

TEST(Golden, EveryCaseMatches) {
  const bool update = std::getenv("HRUSH_UPDATE_GOLDEN") != nullptr;
  for (const auto& c : cases()) {
    SCOPED_TRACE(c.name);
    const auto r = runner->run(c);
    EXPECT_EQ(r.exit_code, c.exit) << r.err;
    const fs::path expected = fs::path(runner->golden) / (c.name + ".out");
    if (update) {
      std::ofstream(expected, std::ios::binary) << r.out;
      continue;
    }
    ASSERT_TRUE(fs::exists(expected)) << expected;
    EXPECT_EQ(r.out, cli::slurp(expected));
  }
}

TEST(Golden, RepeatedRunsAreByteIdentical) {
  for (const auto& c : cases()) {
    SCOPED_TRACE(c.name);
    EXPECT_EQ(runner->run(c).out, runner->run(c).out);
  }
}

TEST(Golden, ThreadCountDoesNotChangeOutput) {
  std::size_t checked = 0;
  for (const auto& c : cases()) {
    if (!c.threads) continue;
    SCOPED_TRACE(c.name);
    const auto one = runner->run(c, {"--threads", "1"});
    for (const char* t : {"2", "4"}) {
      EXPECT_EQ(runner->run(c, {"--threads", t}).out, one.out);
    }
    EXPECT_EQ(one.out, cli::slurp(fs::path(runner->golden) / (c.name + ".out")));
    ++checked;
  }
  EXPECT_GE(checked, 2u);
}

TEST(Golden, JsonOutputsRoundTrip) {
  for (const auto& c : cases()) {
    if (c.exit >= 2 || std::find(c.args.begin(), c.args.end(), "dot") != c.args.end()) continue;
    SCOPED_TRACE(c.name);
    const auto r = runner->run(c);
    const Json doc = Json::parse(r.out);
    EXPECT_EQ(doc.at("schema_version"), 1);
    std::string command = c.args[0];
    if (command == "gadget") command += " " + c.args[1];
    EXPECT_EQ(doc.at("command"), command);
    EXPECT_EQ(doc.dump(2) + "\n", r.out);
    EXPECT_TRUE(doc.contains("result"));
  }
}

TEST(ExitCodes, NegativeDecisionsStillPrintJson) {
  const auto r = runner->run(find_case("check_sparse_k4_k1"));
  EXPECT_EQ(r.exit_code, 1);
  const Json doc = Json::parse(r.out);
  EXPECT_EQ(doc.at("result").at("violator"), Json::parse("[0,1,2,3]"));
}

TEST(ExitCodes, UsageErrors) {
  cli::Case c{"usage", {"check-sparse", "--k"}, "", 2, false, {}};
  EXPECT_EQ(runner->run(c).exit_code, 2);
  c.args = {"no-such-command"};
  EXPECT_EQ(runner->run(c).exit_code, 2);
  c.args = {"closure", "--set", "0"};
  EXPECT_EQ(runner->run(c).exit_code, 2);
  c.args = {"gadget", "t1", "--m", "2"};
  EXPECT_EQ(runner->run(c).exit_code, 2);
  c.args = {"member", "--class", "CF_d"};
  c.input = "inputs/c5.json";
  EXPECT_EQ(runner->run(c).exit_code, 2);
}

TEST(ExitCodes, MalformedJsonNamesTheLocation) {
  const auto r = runner->run(find_case("malformed_input"));
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_TRUE(r.out.empty());
  EXPECT_NE(r.err.find(":2:1:"), std::string::npos) << r.err;
  const auto b = runner->run(find_case("bad_vertex_id"));
  EXPECT_NE(b.err.find("/edges/0/1"), std::string::npos) << b.err;
}

TEST(ExitCodes, ResourceLimitFromEnvironment) {
  const auto& c = find_case("aut_over_limit");
  const auto r = runner->run(c);
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_NE(r.err.find("HK_MAX_VERTICES"), std::string::npos);
  auto relaxed = c;
  relaxed.env = {{"HK_MAX_VERTICES", "5"}};
  EXPECT_EQ(runner->run(relaxed).exit_code, 0);
}

TEST(Dot, T1HasGirthSix) {
  const auto r = runner->run(find_case("gadget_t1_m3_dot"));
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out.rfind("digraph T1 {", 0), 0u);
  const Graph g = graph_from_dot(r.out);
  EXPECT_EQ(g, build_t1(3).graph);
  EXPECT_EQ(oracle::girth(g), 6u);
  EXPECT_NE(r.out.find("0 [label=\"c\", shape=box]"), std::string::npos);
}

TEST(Dot, T0IsATree) {
  const Graph g = graph_from_dot(runner->run(find_case("gadget_t0_n4_dot")).out);
  EXPECT_EQ(g.vertex_count(), 8u);
  EXPECT_FALSE(oracle::girth(g));
}

TEST(Cli, ClosureOfNonAdjacentPairIsSmall) {
  for (const char* name : {"closure_dcl_pair", "closure_dcl_c5"}) {
    const Json doc = Json::parse(runner->run(find_case(name)).out);
    EXPECT_LE(doc.at("result").at("closure").size(), 3u) << name;
  }
}

TEST(Cli, VerifyConsumesBuildOutput) {
  const Json doc = Json::parse(runner->run(find_case("verify_d0")).out);
  EXPECT_TRUE(doc.at("result").at("reduct_consistency").at("pass").get<bool>());
}

int main(int argc, char** argv) {
  ::testing::InitGoogleTest(&argc, argv);
  if (argc < 3) {
    std::cerr << "usage: test_cli <hrush> <golden-dir>\n";
    return 2;
  }
  cli::Runner r{argv[1], argv[2]};
  runner = &r;
  return RUN_ALL_TESTS();
}

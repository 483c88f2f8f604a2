#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "idx/errors.hpp"
#include "idx/influence.hpp"
#include "idx/learning.hpp"
#include "support/fixtures.hpp"

using namespace idx;

namespace {

std::set<std::pair<std::string, std::string>> named_edges(const Classifier& c,
                                                          const InfluenceGraph& g) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& e : g.edges())
    out.insert({c.variable(e.source).name, c.variable(e.target).name});
  return out;
}

}  // namespace

TEST_CASE("influence edges reverse the dependency edges into classifications") {
  Classifier c = fixtures::play_outside_model();
  InfluenceGraph g = influences(c);
  CHECK(g.kind() == GraphKind::Full);
  CHECK(named_edges(c, g) == std::set<std::pair<std::string, std::string>>{
                                 {"w", "o"}, {"t", "o"}, {"r", "o"}, {"t", "r"}, {"p", "r"}});
  // Both classifications are outputs of the full graph.
  std::set<std::string> outs;
  for (int v : g.outputs()) outs.insert(c.variable(v).name);
  CHECK(outs == std::set<std::string>{"r", "o"});
}

TEST_CASE("adjacency queries agree with the edge list") {
  Classifier c = fixtures::play_outside_model();
  InfluenceGraph g = influences(c);
  auto idx = [&](const char* n) { return c.require_index(n); };
  CHECK(g.has_edge(idx("t"), idx("r")));
  CHECK(g.has_edge(idx("r"), idx("o")));
  CHECK_FALSE(g.has_edge(idx("w"), idx("r")));
  CHECK_FALSE(g.has_edge(idx("r"), idx("t"))); // influences point into classifications

  std::vector<int> r_parents = {idx("t"), idx("p")};
  std::sort(r_parents.begin(), r_parents.end());
  CHECK(g.parents(idx("r")) == r_parents);
  CHECK(g.targets(idx("t")).size() == 2);
  CHECK(g.targets(idx("p")) == std::vector<int>{idx("r")});
  // Edges sorted by (target, source).
  auto sorted = g.edges();
  std::sort(sorted.begin(), sorted.end(), [](const InfluenceEdge& a, const InfluenceEdge& b) {
    return std::tie(a.target, a.source) < std::tie(b.target, b.source);
  });
  CHECK(sorted == g.edges());
}

TEST_CASE("input-output influences pair every observation with every output") {
  Classifier c = fixtures::play_outside_model();
  InfluenceGraph g = io_influences(c, {"r", "o"});
  CHECK(g.kind() == GraphKind::InputOutput);
  CHECK(g.edge_count() == 6);
  CHECK(named_edges(c, g) == std::set<std::pair<std::string, std::string>>{
                                 {"w", "r"}, {"t", "r"}, {"p", "r"},
                                 {"w", "o"}, {"t", "o"}, {"p", "o"}});

  InfluenceGraph single = io_influences(c, {"o"});
  CHECK(named_edges(c, single) == std::set<std::pair<std::string, std::string>>{
                                      {"w", "o"}, {"t", "o"}, {"p", "o"}});
  // r is a classification, not an input: never a source here.
  auto idx = [&](const char* n) { return c.require_index(n); };
  CHECK_FALSE(single.has_edge(idx("r"), idx("o")));
}

TEST_CASE("output lists are validated") {
  Classifier c = fixtures::play_outside_model();
  CHECK_THROWS_AS(io_influences(c, {}), UsageError);
  CHECK_THROWS_AS(io_influences(c, {"r", "r"}), UsageError);
  CHECK_THROWS_AS(io_influences(c, {"w"}), UsageError);     // observation
  CHECK_THROWS_AS(io_influences(c, {"nope"}), UsageError);  // unknown
}

TEST_CASE("graphs coincide exactly when every influencer is an input of every output") {
  // Naive Bayes: single classification, all observations direct children.
  Dataset d = fixtures::play_outside_data();
  Hyperparams h;
  h.alpha = 0.1;
  Classifier nbc = fit_nbc(d, "o", h);
  CHECK(coincide(nbc, {"o"}));
  CHECK(influences(nbc).edges() == io_influences(nbc, {"o"}).edges());

  // The chained model has the (r, o) influence, which is not input-output.
  Classifier bcc = fixtures::play_outside_model();
  CHECK_FALSE(coincide(bcc, {"r", "o"}));
  CHECK_FALSE(coincide(bcc, {"o"}));
}

TEST_CASE("dot rendering names the variables and styles the parts") {
  Classifier c = fixtures::play_outside_model();
  std::string dot = influence_to_dot(c, influences(c));
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK(dot.find("\"p\" -> \"r\"") != std::string::npos);
  CHECK(dot.find("\"r\" -> \"o\"") != std::string::npos);
  CHECK(dot.find("dashed") != std::string::npos);
  CHECK(dot.find("fillcolor=grey") != std::string::npos);
  // Deterministic output.
  CHECK(dot == influence_to_dot(c, influences(c)));
}

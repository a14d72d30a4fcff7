#include <map>

#include "doctest.h"
#include "navkit/trajectories.hpp"
#include "test_util.hpp"

using namespace navkit;
using testutil::make_chain;
using testutil::make_random_graph;

namespace {

// hub 0 with k leaves; leaves have no out-edges
Graph make_star(std::size_t leaves) {
  std::vector<Node> nodes(leaves + 1);
  for (std::size_t i = 0; i <= leaves; ++i) {
    nodes[i].title = "star node " + std::to_string(i);
    nodes[i].text = "node";
    nodes[i].article_id = static_cast<std::uint32_t>(i);
  }
  for (std::size_t i = 1; i <= leaves; ++i) {
    nodes[0].out.push_back({EdgeType::Hyperlink, static_cast<NodeId>(i)});
  }
  return Graph(std::move(nodes));
}

Graph make_cycle(std::size_t n) {
  std::vector<Node> nodes(n);
  for (NodeId i = 0; i < n; ++i) {
    nodes[i].title = "cycle node " + std::to_string(i);
    nodes[i].text = "node";
    nodes[i].out.push_back({EdgeType::Hyperlink, static_cast<NodeId>((i + 1) % n)});
  }
  return Graph(std::move(nodes));
}

}  // namespace

TEST_CASE("forward walk on an out-degree-1 chain is the unique walk") {
  Graph g = make_cycle(4);  // every node out-degree 1
  Rng rng(1);
  Trajectory t = sample_forward(g, 3, rng);
  REQUIRE(t.nodes.size() == 4);
  for (std::size_t i = 0; i + 1 < t.nodes.size(); ++i) {
    CHECK(t.nodes[i + 1] == (t.nodes[i] + 1) % 4);
  }
}

TEST_CASE("forward steps are uniform over out-edges of a star hub") {
  Graph g = make_star(4);
  Rng rng(77);
  std::map<NodeId, int> counts;
  const int samples = 10000;
  for (int i = 0; i < samples; ++i) {
    Trajectory t = sample_forward(g, 1, rng);
    REQUIRE(t.nodes.size() == 2);
    CHECK(t.nodes[0] == 0);  // only the hub supports a 1-step walk
    counts[t.nodes[1]]++;
  }
  for (NodeId leaf = 1; leaf <= 4; ++leaf) {
    double freq = static_cast<double>(counts[leaf]) / samples;
    CHECK(freq == doctest::Approx(0.25).epsilon(0.08));  // 0.25 +/- 0.02
    CHECK(std::abs(freq - 0.25) <= 0.02);
  }
}

TEST_CASE("three-cycle walk of three steps returns to its start") {
  Graph g = make_cycle(3);
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    Trajectory t = sample_forward(g, 3, rng);
    CHECK(t.nodes.front() == t.nodes.back());
  }
}

TEST_CASE("sink-only graph exhausts forward retries") {
  std::vector<Node> nodes(3);
  for (auto& n : nodes) {
    n.title = "sink";
    n.text = "x";
  }
  nodes[0].title = "sink a";
  nodes[1].title = "sink b";
  nodes[2].title = "sink c";
  Graph g(std::move(nodes));
  Rng rng(1);
  CHECK_THROWS_WITH_AS(sample_forward(g, 2, rng), doctest::Contains("sink-heavy"),
                       std::runtime_error);
}

TEST_CASE("reverse sampling of a single edge") {
  Graph g = make_chain(2);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    Trajectory t = sample_reverse(g, 1, rng);
    if (t.target() == 1) {
      REQUIRE(t.nodes.size() == 2);
      CHECK(t.nodes[0] == 0);
    } else {
      // node 0 has no in-edges: degenerate
      CHECK(t.nodes.size() == 1);
      CHECK(t.degenerate);
    }
  }
}

TEST_CASE("reverse trajectories only contain forward edges") {
  auto [g, edges] = make_random_graph(80, 3.0, 10);
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    Trajectory t = sample_reverse(g, 5, rng);
    for (std::size_t k = 0; k + 1 < t.nodes.size(); ++k) {
      bool is_edge = false;
      for (const Edge& e : g.neighbors(t.nodes[k])) {
        if (e.target == t.nodes[k + 1]) is_edge = true;
      }
      CHECK(is_edge);
    }
  }
}

TEST_CASE("shortest sampler on a chain returns the full chain") {
  Graph g = make_chain(6);
  Rng rng(8);
  int hits = 0;
  for (int i = 0; i < 100; ++i) {
    auto t = sample_shortest(g, 5, rng);
    if (!t) continue;  // drawn target was not node 5
    ++hits;
    REQUIRE(t->nodes.size() == 6);
    for (NodeId k = 0; k < 6; ++k) CHECK(t->nodes[k] == k);
  }
  CHECK(hits > 0);
}

TEST_CASE("shortest sampler lengths match the BFS oracle") {
  auto [g, edges] = make_random_graph(120, 3.0, 20);
  Rng rng(14);
  int produced = 0;
  for (int i = 0; i < 200; ++i) {
    auto t = sample_shortest(g, 4, rng);
    if (!t) continue;
    ++produced;
    REQUIRE(t->nodes.size() == 5);
    auto oracle = g.shortest_path(t->nodes.front(), t->nodes.back(), 100);
    REQUIRE(oracle.has_value());
    CHECK(oracle->size() == t->nodes.size());
  }
  CHECK(produced > 0);
}

TEST_CASE("shortest sampler is absent beyond the diameter") {
  Graph g = make_chain(4);
  Rng rng(2);
  for (int i = 0; i < 30; ++i) CHECK(!sample_shortest(g, 9, rng).has_value());
}

TEST_CASE("multistep with max 1 is always one step") {
  Graph g = make_cycle(5);
  Rng rng(3);
  for (int i = 0; i < 50; ++i) CHECK(sample_multistep(g, 1, rng).steps() == 1);
}

TEST_CASE("multistep lengths stay in range and look uniform") {
  Graph g = make_cycle(7);
  Rng rng(123);
  const std::uint32_t tmax = 20;
  const int samples = 20000;
  std::vector<int> counts(tmax + 1, 0);
  for (int i = 0; i < samples; ++i) {
    std::size_t len = sample_multistep(g, tmax, rng).steps();
    REQUIRE(len >= 1);
    REQUIRE(len <= tmax);
    counts[len]++;
  }
  // chi-squared against uniform over {1..20}: 19 dof, p > 0.01 => stat < 36.191
  double expected = static_cast<double>(samples) / tmax;
  double stat = 0;
  for (std::uint32_t l = 1; l <= tmax; ++l) {
    double d = counts[l] - expected;
    stat += d * d / expected;
  }
  CHECK(stat < 36.191);
}

TEST_CASE("edge dropout keeps everything at p=0 and only gold at p=1") {
  auto [g, edges] = make_random_graph(30, 4.0, 4);
  Rng rng(9);
  NodeId node = 0;
  while (g.neighbors(node).size() < 3) ++node;
  std::uint32_t gold = 1;
  auto all = mask_edges(g, node, gold, 0.0, rng);
  CHECK(all.size() == g.neighbors(node).size());
  auto only = mask_edges(g, node, gold, 1.0, rng);
  REQUIRE(only.size() == 1);
  CHECK(only[0] == gold);
}

TEST_CASE("non-gold edges survive dropout at the configured rate") {
  auto [g, edges] = make_random_graph(30, 4.0, 4);
  NodeId node = 0;
  while (g.neighbors(node).size() < 4) ++node;
  Rng rng(31);
  const int trials = 10000;
  std::size_t non_gold = g.neighbors(node).size() - 1;
  std::size_t survived = 0;
  for (int i = 0; i < trials; ++i) {
    survived += mask_edges(g, node, 0, 0.5, rng).size() - 1;
  }
  double rate = static_cast<double>(survived) / (trials * non_gold);
  CHECK(std::abs(rate - 0.5) <= 0.02);
}

TEST_CASE("samplers are deterministic under a fixed seed") {
  auto [g, edges] = make_random_graph(60, 3.0, 77);
  Rng a(5), b(5);
  for (int i = 0; i < 20; ++i) {
    CHECK(sample_forward(g, 4, a).nodes == sample_forward(g, 4, b).nodes);
  }
  Rng c(6), d(6);
  for (int i = 0; i < 20; ++i) {
    CHECK(sample_reverse(g, 4, c).nodes == sample_reverse(g, 4, d).nodes);
  }
}

#pragma once
// Graph diagnostics: degree distributions, sampled shortest-path-length
// distribution (BFS from the highest-in-degree sources), and snapshot
// diffing keyed on (title, para_index).

#include <cstdint>
#include <string>
#include <vector>

#include "navkit/graph.hpp"

namespace navkit {

struct Histogram {
  // bucket i covers [boundaries[i], boundaries[i+1])
  std::vector<std::uint64_t> boundaries;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
};

enum class Direction { In, Out };

// Exact counts, one bucket per degree value 0..max.
Histogram degree_histogram(const Graph& g, Direction dir);

// Power-of-two buckets for power-law plots; bucket k covers [2^k, 2^(k+1))
// with a leading [0,1) bucket.
Histogram log_binned(const Histogram& exact);

struct SplResult {
  Histogram hist;             // shortest-path lengths over reached pairs
  std::uint32_t median = 0;   // smallest L with cumulative count >= half
  std::uint64_t sources = 0;
  std::uint64_t pairs = 0;    // sources * nodes
  std::uint64_t reached = 0;  // pairs with a path within the cap
};

// BFS from the n_sources highest-in-degree nodes (ties by id), cap-limited.
// With n_sources = |N| and a generous cap this is the exact distribution.
SplResult estimate_spl(const Graph& g, std::size_t n_sources, std::uint32_t cap,
                       unsigned workers = 1);

struct GraphDiff {
  std::uint64_t new_articles = 0;
  std::uint64_t deleted_articles = 0;
  std::uint64_t new_nodes = 0;
  std::uint64_t deleted_nodes = 0;
  std::uint64_t common_nodes = 0;
  Histogram edge_changes;  // per-common-node |edge set symmetric difference|
};

// Articles matched by title, nodes by (title, para_index); edges compared as
// (type, target title, target para) sets.
GraphDiff graph_diff(const Graph& a, const Graph& b);

void write_histogram_csv(const std::string& path, const Histogram& h);
std::string diff_to_json(const GraphDiff& d);

}  // namespace navkit

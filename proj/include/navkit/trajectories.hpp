#pragma once
// Trajectory sampling for behavioral cloning: uniform forward walks, uniform
// reverse walks (which truncate at zero-in-degree dead ends), random shortest
// paths, multistep lengths, and per-example action dropout.
//
// All samplers are pure functions of (graph, rng state); parallel callers
// derive independent streams with derive_stream().

#include <cstdint>
#include <optional>
#include <vector>

#include "navkit/graph.hpp"
#include "navkit/rng.hpp"

namespace navkit {

struct Trajectory {
  std::vector<NodeId> nodes;  // length L+1 for an L-step walk
  bool degenerate = false;    // reverse sampling hit a dead end immediately
  NodeId target() const { return nodes.back(); }
  std::size_t steps() const { return nodes.size() - 1; }
};

enum class SamplerKind { Forward, Reverse, ShortestPath };
SamplerKind sampler_kind_from_name(const std::string& name);
std::string sampler_kind_name(SamplerKind k);

// Uniform start, each step uniform over the current out-edge list. Starts
// are resampled (up to 100 tries) when a sink is hit before T steps.
Trajectory sample_forward(const Graph& g, std::uint32_t steps, Rng& rng);

// Uniform target, predecessors uniform over in-neighbors. Dead ends truncate
// the trajectory instead of resampling; a target with no in-edges yields a
// degenerate length-1 trajectory.
Trajectory sample_reverse(const Graph& g, std::uint32_t steps, Rng& rng);

// Uniform target, then a uniform start among nodes at exactly `steps`
// distance (reverse BFS from the target), connected by one shortest path.
// Absent when no node lies at that distance.
std::optional<Trajectory> sample_shortest(const Graph& g, std::uint32_t steps, Rng& rng);

// L ~ Uniform{1..max_steps} (inclusive), then a forward walk of L steps.
Trajectory sample_multistep(const Graph& g, std::uint32_t max_steps, Rng& rng);

// Action dropout: each non-gold out-edge of `node` survives independently
// with probability 1-p_drop; the demonstrated edge always survives. Returns
// indices into g.neighbors(node), in storage order.
std::vector<std::uint32_t> mask_edges(const Graph& g, NodeId node, std::uint32_t gold_edge_index,
                                      double p_drop, Rng& rng);

}  // namespace navkit

#include "navkit/trajectories.hpp"

#include <queue>
#include <stdexcept>

#include "navkit/error.hpp"

namespace navkit {

SamplerKind sampler_kind_from_name(const std::string& name) {
  if (name == "forward") return SamplerKind::Forward;
  if (name == "reverse") return SamplerKind::Reverse;
  if (name == "shortest") return SamplerKind::ShortestPath;
  throw UsageError("unknown sampler '" + name + "' (expected forward|reverse|shortest)");
}

std::string sampler_kind_name(SamplerKind k) {
  switch (k) {
    case SamplerKind::Forward: return "forward";
    case SamplerKind::Reverse: return "reverse";
    case SamplerKind::ShortestPath: return "shortest";
  }
  return "?";
}

Trajectory sample_forward(const Graph& g, std::uint32_t steps, Rng& rng) {
  if (g.empty()) throw std::invalid_argument("sample_forward: empty graph");
  if (steps < 1) throw std::invalid_argument("sample_forward: steps must be >= 1");
  for (int attempt = 0; attempt < 100; ++attempt) {
    Trajectory traj;
    traj.nodes.reserve(steps + 1);
    NodeId cur = static_cast<NodeId>(rng.index(g.size()));
    traj.nodes.push_back(cur);
    bool stuck = false;
    for (std::uint32_t t = 0; t < steps; ++t) {
      auto nb = g.neighbors(cur);
      if (nb.empty()) {
        stuck = true;
        break;
      }
      cur = nb[rng.index(nb.size())].target;
      traj.nodes.push_back(cur);
    }
    if (!stuck) return traj;
  }
  throw std::runtime_error("sample_forward: graph too sink-heavy (100 start retries exhausted)");
}

Trajectory sample_reverse(const Graph& g, std::uint32_t steps, Rng& rng) {
  if (g.empty()) throw std::invalid_argument("sample_reverse: empty graph");
  if (steps < 1) throw std::invalid_argument("sample_reverse: steps must be >= 1");
  NodeId target = static_cast<NodeId>(rng.index(g.size()));
  std::vector<NodeId> rev{target};
  NodeId cur = target;
  for (std::uint32_t t = 0; t < steps; ++t) {
    auto preds = g.reverse_neighbors(cur);
    if (preds.empty()) break;  // dead end: truncate
    cur = preds[rng.index(preds.size())];
    rev.push_back(cur);
  }
  Trajectory traj;
  traj.nodes.assign(rev.rbegin(), rev.rend());
  traj.degenerate = traj.nodes.size() == 1;
  return traj;
}

std::optional<Trajectory> sample_shortest(const Graph& g, std::uint32_t steps, Rng& rng) {
  if (g.empty()) return std::nullopt;
  NodeId target = static_cast<NodeId>(rng.index(g.size()));

  // Reverse BFS from the target, capped at `steps`, collecting the ring of
  // nodes at exactly that distance.
  std::vector<std::uint32_t> dist(g.size(), 0xFFFFFFFFu);
  std::queue<NodeId> queue;
  dist[target] = 0;
  queue.push(target);
  std::vector<NodeId> ring;
  while (!queue.empty()) {
    NodeId u = queue.front();
    queue.pop();
    if (dist[u] == steps) {
      ring.push_back(u);
      continue;
    }
    for (NodeId v : g.reverse_neighbors(u)) {
      if (dist[v] != 0xFFFFFFFFu) continue;
      dist[v] = dist[u] + 1;
      queue.push(v);
    }
  }
  if (ring.empty()) return std::nullopt;

  NodeId start = ring[rng.index(ring.size())];
  auto path = g.shortest_path(start, target, steps);
  if (!path || path->size() != steps + 1) {
    // cannot happen: `start` sits at exactly `steps` by reverse BFS
    throw std::logic_error("sample_shortest: inconsistent distance");
  }
  Trajectory traj;
  traj.nodes = std::move(*path);
  return traj;
}

Trajectory sample_multistep(const Graph& g, std::uint32_t max_steps, Rng& rng) {
  if (max_steps < 1) throw std::invalid_argument("sample_multistep: max_steps must be >= 1");
  std::uint32_t length = 1 + static_cast<std::uint32_t>(rng.below(max_steps));
  return sample_forward(g, length, rng);
}

std::vector<std::uint32_t> mask_edges(const Graph& g, NodeId node, std::uint32_t gold_edge_index,
                                      double p_drop, Rng& rng) {
  auto nb = g.neighbors(node);
  if (gold_edge_index >= nb.size()) {
    throw std::invalid_argument("mask_edges: gold edge index out of range");
  }
  std::vector<std::uint32_t> kept;
  kept.reserve(nb.size());
  for (std::uint32_t i = 0; i < nb.size(); ++i) {
    if (i == gold_edge_index || !rng.bernoulli(p_drop)) kept.push_back(i);
  }
  return kept;
}

}  // namespace navkit

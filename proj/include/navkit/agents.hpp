#pragma once
// Episode execution under a step budget, the baseline agents, and the
// evaluation harness.
//
// An episode starts at `start` with 0 steps used; every move costs one step.
// It ends on reaching the goal node, exhausting the budget, or hitting a node
// with no out-edges. The DFS agents run a depth-limited depth-first search
// with an episode-local visited set; each expansion costs one budget step and
// the reported path is the root-to-termination chain (a valid graph walk).
//
// Episode generation is independent of the agent: episode e derives its RNG
// from (seed, e), so two agents evaluated with the same seed face identical
// (start, target) pairs. Per step an agent does O(out-degree) feature work,
// so an episode costs O(out-degree * budget); evaluation shards episodes
// across workers and aggregates order-independent success counts.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "navkit/embed.hpp"
#include "navkit/graph.hpp"
#include "navkit/policy.hpp"

namespace navkit {

struct TaskSpec {
  enum class Kind { Nav, Multistep, SentenceSearch };
  Kind kind = Kind::Nav;
  std::uint32_t steps = 5;     // T (max length for Multistep)
  std::uint32_t budget = 100;  // B
  std::uint32_t episodes = 1000;
  std::uint64_t seed = 1;
};

TaskSpec::Kind task_kind_from_name(const std::string& name);
std::string task_kind_name(TaskSpec::Kind k);

struct EpisodeResult {
  bool success = false;
  std::uint32_t steps_used = 0;
  std::vector<NodeId> path;
  NodeId target = kInvalidNode;
};

struct PolicyAgent {
  const PolicyParams* params;
};
struct RandomAgent {};
struct GreedyAgent {};
struct RandomDfsAgent {};
struct GreedyDfsAgent {};

using AgentRef = std::variant<PolicyAgent, RandomAgent, GreedyAgent, RandomDfsAgent, GreedyDfsAgent>;

std::string agent_name(const AgentRef& agent);

// Neighbor with the highest cosine similarity to the goal embedding, ties
// broken by lowest node id. Throws when `current` has no out-edges.
NodeId greedy_step(const Graph& g, const EmbeddingTable& table, NodeId current,
                   std::span<const double> goal_embedding);

// Policy step: argmax over scored out-edges, ties by lowest target id.
NodeId policy_step(const Graph& g, const EmbeddingTable& table, const PolicyParams& params,
                   NodeId current, std::span<const double> goal_embedding,
                   const std::vector<NodeId>& visited, ScoreWorkspace& ws);

EpisodeResult run_episode(const AgentRef& agent, const Graph& g, const EmbeddingTable& table,
                          NodeId start, NodeId goal, std::span<const double> goal_embedding,
                          std::uint32_t budget, std::uint32_t dfs_depth, Rng& rng);

EpisodeResult dfs_run(const Graph& g, const EmbeddingTable& table, NodeId start, NodeId goal,
                      std::uint32_t budget, std::uint32_t depth_limit, bool greedy,
                      std::span<const double> goal_embedding, Rng& rng);

struct EpisodeTrace {
  NodeId start, target;
  EpisodeResult result;
  std::uint32_t task_steps;  // sampled trajectory length for this episode
};

struct EvalSummary {
  double success_rate = 0.0;
  double stderr_ = 0.0;  // binomial
  std::uint32_t episodes = 0;
};

// The embedder is only consulted for SentenceSearch goals and may be null
// otherwise.
EvalSummary evaluate(const TaskSpec& task, const AgentRef& agent, const Graph& g,
                     const EmbeddingTable& table, const Embedder* embedder, unsigned workers = 1,
                     std::vector<EpisodeTrace>* traces = nullptr);

void write_trace_dump(const std::string& path, const Graph& g,
                      std::span<const EpisodeTrace> traces);

}  // namespace navkit

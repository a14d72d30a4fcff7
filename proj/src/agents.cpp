#include "navkit/agents.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <thread>

#include "navkit/error.hpp"
#include "navkit/kernels.hpp"

namespace navkit {

TaskSpec::Kind task_kind_from_name(const std::string& name) {
  if (name == "nav") return TaskSpec::Kind::Nav;
  if (name == "multistep") return TaskSpec::Kind::Multistep;
  if (name == "sentence") return TaskSpec::Kind::SentenceSearch;
  throw UsageError("unknown task '" + name + "' (expected nav|multistep|sentence)");
}

std::string task_kind_name(TaskSpec::Kind k) {
  switch (k) {
    case TaskSpec::Kind::Nav: return "nav";
    case TaskSpec::Kind::Multistep: return "multistep";
    case TaskSpec::Kind::SentenceSearch: return "sentence";
  }
  return "?";
}

std::string agent_name(const AgentRef& agent) {
  struct Visitor {
    std::string operator()(const PolicyAgent&) const { return "policy"; }
    std::string operator()(const RandomAgent&) const { return "random"; }
    std::string operator()(const GreedyAgent&) const { return "greedy"; }
    std::string operator()(const RandomDfsAgent&) const { return "random-dfs"; }
    std::string operator()(const GreedyDfsAgent&) const { return "greedy-dfs"; }
  };
  return std::visit(Visitor{}, agent);
}

NodeId greedy_step(const Graph& g, const EmbeddingTable& table, NodeId current,
                   std::span<const double> goal_embedding) {
  auto nb = g.neighbors(current);
  if (nb.empty()) throw std::invalid_argument("greedy_step: node has no out-edges");
  NodeId best = kInvalidNode;
  double best_cos = -2.0;
  for (const Edge& e : nb) {
    double c = cosine_similarity(table.row(e.target), goal_embedding);
    if (c > best_cos || (c == best_cos && e.target < best)) {
      best_cos = c;
      best = e.target;
    }
  }
  return best;
}

NodeId policy_step(const Graph& g, const EmbeddingTable& table, const PolicyParams& params,
                   NodeId current, std::span<const double> goal_embedding,
                   const std::vector<NodeId>& visited, ScoreWorkspace& ws) {
  auto nb = g.neighbors(current);
  if (nb.empty()) throw std::invalid_argument("policy_step: node has no out-edges");
  const std::size_t rows = params.rows();
  ws.feats.resize(nb.size() * rows);
  for (std::size_t i = 0; i < nb.size(); ++i) {
    bool seen = std::find(visited.begin(), visited.end(), nb[i].target) != visited.end();
    fill_action_features({ws.feats.data() + i * rows, rows}, table.row(nb[i].target), nb[i].type,
                         seen);
  }
  score_features(params, table.row(current), goal_embedding, nb.size(), ws);
  std::size_t best = 0;
  for (std::size_t i = 1; i < ws.probs.size(); ++i) {
    if (ws.probs[i] > ws.probs[best] ||
        (ws.probs[i] == ws.probs[best] && nb[i].target < nb[best].target)) {
      best = i;
    }
  }
  return nb[best].target;
}

namespace {

EpisodeResult walk_episode(const AgentRef& agent, const Graph& g, const EmbeddingTable& table,
                           NodeId start, NodeId goal, std::span<const double> goal_embedding,
                           std::uint32_t budget, Rng& rng) {
  EpisodeResult res;
  res.target = goal;
  res.path.push_back(start);
  if (start == goal) {
    res.success = true;
    return res;
  }
  ScoreWorkspace ws;
  NodeId cur = start;
  for (std::uint32_t step = 1; step <= budget; ++step) {
    auto nb = g.neighbors(cur);
    if (nb.empty()) return res;  // terminal sink, steps_used < B
    NodeId next;
    if (std::holds_alternative<RandomAgent>(agent)) {
      next = nb[rng.index(nb.size())].target;
    } else if (std::holds_alternative<GreedyAgent>(agent)) {
      next = greedy_step(g, table, cur, goal_embedding);
    } else {
      next = policy_step(g, table, *std::get<PolicyAgent>(agent).params, cur, goal_embedding,
                         res.path, ws);
    }
    cur = next;
    res.path.push_back(cur);
    res.steps_used = step;
    if (cur == goal) {
      res.success = true;
      return res;
    }
  }
  return res;
}

}  // namespace

EpisodeResult dfs_run(const Graph& g, const EmbeddingTable& table, NodeId start, NodeId goal,
                      std::uint32_t budget, std::uint32_t depth_limit, bool greedy,
                      std::span<const double> goal_embedding, Rng& rng) {
  EpisodeResult res;
  res.target = goal;
  res.path.push_back(start);
  if (start == goal) {
    res.success = true;
    return res;
  }

  std::vector<NodeId> visited{start};
  std::vector<NodeId> chain{start};
  bool done = false;

  auto children_of = [&](NodeId u) {
    auto nb = g.neighbors(u);
    std::vector<NodeId> kids;
    kids.reserve(nb.size());
    for (const Edge& e : nb) kids.push_back(e.target);
    if (greedy) {
      std::vector<std::pair<double, NodeId>> scored;
      scored.reserve(kids.size());
      for (NodeId k : kids) {
        scored.emplace_back(-cosine_similarity(table.row(k), goal_embedding), k);
      }
      std::sort(scored.begin(), scored.end());
      for (std::size_t i = 0; i < kids.size(); ++i) kids[i] = scored[i].second;
    } else {
      for (std::size_t i = kids.size(); i > 1; --i) {
        std::swap(kids[i - 1], kids[rng.index(i)]);
      }
    }
    return kids;
  };

  std::function<void(NodeId, std::uint32_t)> visit = [&](NodeId u, std::uint32_t depth) {
    if (done || depth >= depth_limit) return;
    for (NodeId child : children_of(u)) {
      if (done) return;
      if (std::find(visited.begin(), visited.end(), child) != visited.end()) continue;
      if (res.steps_used >= budget) {
        done = true;
        return;
      }
      res.steps_used++;
      visited.push_back(child);
      chain.push_back(child);
      if (child == goal) {
        res.success = true;
        done = true;
        return;
      }
      visit(child, depth + 1);
      if (done) return;
      chain.pop_back();
    }
  };
  visit(start, 0);
  res.path = chain;
  return res;
}

EpisodeResult run_episode(const AgentRef& agent, const Graph& g, const EmbeddingTable& table,
                          NodeId start, NodeId goal, std::span<const double> goal_embedding,
                          std::uint32_t budget, std::uint32_t dfs_depth, Rng& rng) {
  g.node(start);
  g.node(goal);  // id validation
  if (std::holds_alternative<RandomDfsAgent>(agent)) {
    return dfs_run(g, table, start, goal, budget, dfs_depth, false, goal_embedding, rng);
  }
  if (std::holds_alternative<GreedyDfsAgent>(agent)) {
    return dfs_run(g, table, start, goal, budget, dfs_depth, true, goal_embedding, rng);
  }
  return walk_episode(agent, g, table, start, goal, goal_embedding, budget, rng);
}

EvalSummary evaluate(const TaskSpec& task, const AgentRef& agent, const Graph& g,
                     const EmbeddingTable& table, const Embedder* embedder, unsigned workers,
                     std::vector<EpisodeTrace>* traces) {
  if (task.episodes < 1) throw std::invalid_argument("evaluate: episode count must be >= 1");
  if (task.kind == TaskSpec::Kind::SentenceSearch &&
      (embedder == nullptr || !embedder->supports_sentences())) {
    throw std::invalid_argument("sentence search needs a text embedder");
  }

  std::vector<std::uint8_t> successes(task.episodes, 0);
  if (traces) traces->assign(task.episodes, {});

  auto run_one = [&](std::uint32_t e) {
    // Episode generation is agent-independent: same seed, same episodes.
    Rng rng = derive_stream(task.seed, e);
    std::uint32_t length = task.steps;
    if (task.kind == TaskSpec::Kind::Multistep) {
      length = 1 + static_cast<std::uint32_t>(rng.below(task.steps));
    }
    Trajectory traj = sample_forward(g, length, rng);
    NodeId start = traj.nodes.front();
    NodeId goal = traj.target();
    Vec goal_emb_storage;
    std::span<const double> goal_emb;
    if (task.kind == TaskSpec::Kind::SentenceSearch) {
      std::vector<std::string> sentences = split_sentences(g.node(goal).text);
      if (sentences.empty()) sentences.push_back(g.node(goal).text);
      goal_emb_storage = embedder->embed_sentence(sentences[rng.index(sentences.size())]);
      goal_emb = goal_emb_storage;
    } else {
      goal_emb = table.row(goal);
    }
    EpisodeResult res =
        run_episode(agent, g, table, start, goal, goal_emb, task.budget, length, rng);
    successes[e] = res.success ? 1 : 0;
    if (traces) (*traces)[e] = {start, goal, std::move(res), length};
  };

  if (workers <= 1) {
    for (std::uint32_t e = 0; e < task.episodes; ++e) run_one(e);
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        for (std::uint32_t e = w; e < task.episodes; e += workers) run_one(e);
      });
    }
    for (auto& t : threads) t.join();
  }

  std::uint64_t wins = 0;
  for (std::uint8_t s : successes) wins += s;
  EvalSummary summary;
  summary.episodes = task.episodes;
  summary.success_rate = static_cast<double>(wins) / task.episodes;
  summary.stderr_ =
      std::sqrt(summary.success_rate * (1.0 - summary.success_rate) / task.episodes);
  return summary;
}

void write_trace_dump(const std::string& path, const Graph& g,
                      std::span<const EpisodeTrace> traces) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw UsageError("cannot open '" + path + "' for writing");
  auto label = [&](NodeId id) {
    const Node& n = g.node(id);
    return n.title + " (" + std::to_string(n.para_index) + ")";
  };
  for (std::size_t e = 0; e < traces.size(); ++e) {
    const EpisodeTrace& t = traces[e];
    out << "episode " << e << "\n";
    out << "start: " << label(t.start) << "\n";
    out << "target: " << label(t.target) << "\n";
    out << "path:";
    for (NodeId id : t.result.path) out << " | " << label(id);
    out << "\n";
    out << "result: " << (t.result.success ? "success" : "failure")
        << " steps=" << t.result.steps_used << "\n\n";
  }
}

}  // namespace navkit

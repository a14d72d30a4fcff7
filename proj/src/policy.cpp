#include "navkit/policy.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <cstring>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "navkit/error.hpp"
#include "navkit/kernels.hpp"

namespace navkit {

namespace {

constexpr char kCkptMagic[4] = {'N', 'A', 'V', 'P'};
constexpr std::uint32_t kCkptVersion = 1;

void check_finite(double v, const char* what, std::uint32_t step) {
  if (!std::isfinite(v)) {
    throw std::runtime_error(std::string("training diverged: ") + what + " is not finite at step " +
                             std::to_string(step));
  }
}

// RMSProp: ms = decay*ms + (1-decay)*g^2 ; p -= lr * g / (sqrt(ms) + eps)
void rmsprop_step(std::span<double> param, std::span<const double> grad, std::span<double> ms,
                  const TrainConfig& cfg) {
  for (std::size_t i = 0; i < param.size(); ++i) {
    double g = grad[i];
    ms[i] = cfg.decay * ms[i] + (1.0 - cfg.decay) * g * g;
    param[i] -= cfg.learning_rate * g / (std::sqrt(ms[i]) + cfg.epsilon);
  }
}

}  // namespace

ActionFeatures make_action_features(std::span<const double> embedding, EdgeType type,
                                    bool visited) {
  ActionFeatures f;
  f.v.resize(embedding.size() + kActionExtraDims);
  fill_action_features(f.v, embedding, type, visited);
  return f;
}

void fill_action_features(std::span<double> dst, std::span<const double> embedding, EdgeType type,
                          bool visited) {
  std::size_t d = embedding.size();
  std::copy(embedding.begin(), embedding.end(), dst.begin());
  for (std::size_t i = 0; i < kEdgeTypeCount; ++i) dst[d + i] = 0.0;
  dst[d + static_cast<std::size_t>(type)] = 1.0;
  dst[d + kEdgeTypeCount] = visited ? 1.0 : 0.0;
}

PolicyParams PolicyParams::init(std::size_t dim, std::uint64_t seed, bool with_value_head,
                                std::uint64_t embedder_hash) {
  PolicyParams p;
  p.dim = dim;
  p.embedder_hash = embedder_hash;
  Rng rng = derive_stream(seed, 0x9A7A);
  p.w.resize(p.rows() * p.cols());
  double s = 1.0 / std::sqrt(static_cast<double>(p.cols()));
  for (double& v : p.w) v = rng.normal() * s;
  if (with_value_head) p.value.assign(p.cols(), 0.0);
  return p;
}

void PolicyParams::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot open '" + path + "' for writing");
  out.write(kCkptMagic, 4);
  std::uint32_t version = kCkptVersion;
  std::uint32_t d32 = static_cast<std::uint32_t>(dim);
  std::uint8_t hv = has_value_head() ? 1 : 0;
  out.write(reinterpret_cast<const char*>(&version), sizeof(version));
  out.write(reinterpret_cast<const char*>(&d32), sizeof(d32));
  out.write(reinterpret_cast<const char*>(&hv), sizeof(hv));
  out.write(reinterpret_cast<const char*>(&embedder_hash), sizeof(embedder_hash));
  auto write_f32 = [&](std::span<const double> v) {
    std::vector<float> f(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) f[i] = static_cast<float>(v[i]);
    out.write(reinterpret_cast<const char*>(f.data()),
              static_cast<std::streamsize>(f.size() * sizeof(float)));
  };
  write_f32(w);
  if (hv) write_f32(value);
  if (!out) throw std::runtime_error("short write to '" + path + "'");
}

PolicyParams PolicyParams::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open checkpoint '" + path + "'");
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kCkptMagic, 4) != 0) {
    throw UsageError("checkpoint '" + path + "': bad magic at offset 0");
  }
  std::uint32_t version = 0, d32 = 0;
  std::uint8_t hv = 0;
  std::uint64_t hash = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  in.read(reinterpret_cast<char*>(&d32), sizeof(d32));
  in.read(reinterpret_cast<char*>(&hv), sizeof(hv));
  in.read(reinterpret_cast<char*>(&hash), sizeof(hash));
  if (!in) throw UsageError("checkpoint '" + path + "': truncated header");
  if (version != kCkptVersion) {
    throw UsageError("checkpoint '" + path + "': unsupported version " + std::to_string(version));
  }
  PolicyParams p;
  p.dim = d32;
  p.embedder_hash = hash;
  auto read_f32 = [&](std::vector<double>& v, std::size_t n) {
    std::vector<float> f(n);
    in.read(reinterpret_cast<char*>(f.data()), static_cast<std::streamsize>(n * sizeof(float)));
    if (!in) throw UsageError("checkpoint '" + path + "': truncated weights");
    v.resize(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = f[i];
  };
  read_f32(p.w, p.rows() * p.cols());
  if (hv) read_f32(p.value, p.cols());
  return p;
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    sum += out[i];
  }
  for (double& p : out) p /= sum;
  return out;
}

void score_features(const PolicyParams& params, std::span<const double> s_t,
                    std::span<const double> s_g, std::size_t n_actions, ScoreWorkspace& ws) {
  const std::size_t rows = params.rows();
  const std::size_t cols = params.cols();
  if (s_t.size() != params.dim || s_g.size() != params.dim) {
    throw std::invalid_argument("score_features: embedding dimension mismatch");
  }
  if (n_actions == 0) throw std::invalid_argument("score_features: no actions");

  ws.x.resize(cols);
  std::copy(s_t.begin(), s_t.end(), ws.x.begin());
  std::copy(s_g.begin(), s_g.end(), ws.x.begin() + params.dim);

  ws.uhat.resize(rows);
  kern::matvec(params.w, rows, cols, ws.x, ws.uhat);
  ws.u_norm = kern::l2_norm(ws.uhat);
  if (!(ws.u_norm > 0.0) || !std::isfinite(ws.u_norm)) {
    throw std::runtime_error("score_features: degenerate combined embedding (norm " +
                             std::to_string(ws.u_norm) + ")");
  }
  kern::scale(ws.uhat, 1.0 / ws.u_norm);

  ws.logit_scale = std::sqrt(static_cast<double>(rows));
  ws.logits.resize(n_actions);
  for (std::size_t i = 0; i < n_actions; ++i) {
    std::span<double> row{ws.feats.data() + i * rows, rows};
    double norm = kern::l2_norm(row);
    if (norm == 0.0) throw std::invalid_argument("score_features: zero-norm action vector");
    kern::scale(row, 1.0 / norm);
    ws.logits[i] = ws.logit_scale * kern::dot(ws.uhat, row);
  }
  ws.probs = softmax(ws.logits);
}

void backprop_logits(const PolicyParams& params, const ScoreWorkspace& ws,
                     std::span<const double> dlogits, std::size_t n_actions, std::span<double> dw,
                     std::span<double> ds_g) {
  const std::size_t rows = params.rows();
  const std::size_t cols = params.cols();

  // d loss / d uhat; logits carry the sqrt(rows) temperature
  std::vector<double> g_u(rows, 0.0);
  for (std::size_t i = 0; i < n_actions; ++i) {
    kern::axpy(dlogits[i] * ws.logit_scale, {ws.feats.data() + i * rows, rows}, g_u);
  }
  // through the normalization: du = (g_u - (g_u . uhat) uhat) / |u|
  double proj = kern::dot(g_u, ws.uhat);
  kern::axpy(-proj, ws.uhat, g_u);
  kern::scale(g_u, 1.0 / ws.u_norm);

  if (!dw.empty()) kern::ger(dw, rows, cols, 1.0, g_u, ws.x);

  if (!ds_g.empty()) {
    std::vector<double> dx(cols);
    kern::matvec_t(params.w, rows, cols, g_u, dx);
    for (std::size_t i = 0; i < params.dim; ++i) ds_g[i] += dx[params.dim + i];
  }
}

std::vector<double> score_actions(const PolicyParams& params, std::span<const double> s_t,
                                  std::span<const double> s_g,
                                  std::span<const ActionFeatures> actions) {
  if (actions.empty()) throw std::invalid_argument("score_actions: no actions");
  const std::size_t rows = params.rows();
  ScoreWorkspace ws;
  ws.feats.resize(actions.size() * rows);
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (actions[i].v.size() != rows) {
      throw std::invalid_argument("score_actions: action feature dimension mismatch");
    }
    std::copy(actions[i].v.begin(), actions[i].v.end(), ws.feats.begin() + i * rows);
  }
  score_features(params, s_t, s_g, actions.size(), ws);
  return ws.probs;
}

std::pair<double, std::vector<double>> bc_loss_and_grad(const PolicyParams& params,
                                                        std::span<const BcExample> batch) {
  if (batch.empty()) throw std::invalid_argument("bc_loss_and_grad: empty batch");
  const std::size_t rows = params.rows();
  std::vector<double> dw(params.w.size(), 0.0);
  double loss = 0.0;
  double inv = 1.0 / static_cast<double>(batch.size());
  ScoreWorkspace ws;
  std::vector<double> dlogits;
  for (const BcExample& ex : batch) {
    if (ex.gold_index >= ex.actions.size()) {
      throw std::invalid_argument("bc_loss_and_grad: gold index out of range");
    }
    ws.feats.resize(ex.actions.size() * rows);
    for (std::size_t i = 0; i < ex.actions.size(); ++i) {
      std::copy(ex.actions[i].v.begin(), ex.actions[i].v.end(), ws.feats.begin() + i * rows);
    }
    score_features(params, ex.s_t, ex.s_g, ex.actions.size(), ws);
    loss += -std::log(ws.probs[ex.gold_index]) * inv;
    dlogits.assign(ws.probs.begin(), ws.probs.end());
    dlogits[ex.gold_index] -= 1.0;
    for (double& d : dlogits) d *= inv;
    backprop_logits(params, ws, dlogits, ex.actions.size(), dw, {});
  }
  return {loss, std::move(dw)};
}

// ---- behavioral cloning ----------------------------------------------------

namespace {

struct BcTransition {
  NodeId cur = 0;
  std::uint32_t gold_edge = 0;           // index into g.neighbors(cur)
  std::vector<std::uint32_t> allowed;    // masked action indices (gold included)
  std::vector<NodeId> visited;           // trajectory prefix up to and including cur
  NodeId goal_node = 0;
  Vec goal_emb;                          // non-empty iff GoalMode::Sentence
};

struct BcBatch {
  std::vector<BcTransition> transitions;
  std::uint64_t env_steps = 0;
};

std::uint32_t lowest_edge_to(const Graph& g, NodeId from, NodeId to) {
  auto nb = g.neighbors(from);
  for (std::uint32_t i = 0; i < nb.size(); ++i) {
    if (nb[i].target == to) return i;
  }
  throw std::logic_error("trajectory step is not a graph edge");
}

// A uniformly chosen sentence of the target node's text, embedded as the
// goal; the node title is not part of the sentence.
Vec sentence_goal(const Embedder& embedder, const Graph& g, NodeId target, Rng& rng) {
  std::vector<std::string> sentences = split_sentences(g.node(target).text);
  if (sentences.empty()) sentences.push_back(g.node(target).text);
  return embedder.embed_sentence(sentences[rng.index(sentences.size())]);
}

Trajectory sample_trajectory(const Graph& g, SamplerKind kind, const TrainConfig& cfg, Rng& rng) {
  auto draw_steps = [&] {
    if (cfg.multistep) return 1 + static_cast<std::uint32_t>(rng.below(cfg.trajectory_steps));
    return cfg.trajectory_steps;
  };
  switch (kind) {
    case SamplerKind::Forward:
      return sample_forward(g, draw_steps(), rng);
    case SamplerKind::Reverse:
      return sample_reverse(g, draw_steps(), rng);
    case SamplerKind::ShortestPath: {
      // absent draws (no pair at that distance) are retried; with multistep
      // lengths each retry redraws the length
      for (int attempt = 0; attempt < 1000; ++attempt) {
        auto traj = sample_shortest(g, draw_steps(), rng);
        if (traj) return *traj;
      }
      throw std::runtime_error("shortest-path sampler: no reachable node pair after 1000 tries");
    }
  }
  throw std::logic_error("bad sampler kind");
}

BcBatch make_bc_batch(const Graph& g, const Embedder& embedder, SamplerKind sampler,
                      GoalMode goal_mode, const TrainConfig& cfg, std::uint32_t step) {
  Rng rng = derive_stream(cfg.seed, 1 + step);
  BcBatch batch;
  while (batch.transitions.size() < cfg.batch_size) {
    Trajectory traj = sample_trajectory(g, sampler, cfg, rng);
    batch.env_steps += traj.steps();
    if (traj.nodes.size() < 2) continue;  // degenerate reverse draw
    Vec goal_emb;
    if (goal_mode == GoalMode::Sentence) {
      goal_emb = sentence_goal(embedder, g, traj.target(), rng);
    }
    for (std::size_t t = 0; t + 1 < traj.nodes.size(); ++t) {
      BcTransition tr;
      tr.cur = traj.nodes[t];
      tr.gold_edge = lowest_edge_to(g, tr.cur, traj.nodes[t + 1]);
      tr.allowed = mask_edges(g, tr.cur, tr.gold_edge, cfg.edge_dropout, rng);
      tr.visited.assign(traj.nodes.begin(), traj.nodes.begin() + t + 1);
      tr.goal_node = traj.target();
      tr.goal_emb = goal_emb;
      batch.transitions.push_back(std::move(tr));
    }
  }
  // uniform draw over the pooled transitions: shuffle, then truncate
  for (std::size_t i = batch.transitions.size(); i > 1; --i) {
    std::swap(batch.transitions[i - 1], batch.transitions[rng.index(i)]);
  }
  batch.transitions.resize(cfg.batch_size);
  return batch;
}

// Prefetches batches on worker threads; batches are consumed strictly in
// step order, so the worker count cannot change results.
class BatchPrefetcher {
 public:
  using Maker = std::function<BcBatch(std::uint32_t)>;

  BatchPrefetcher(Maker maker, std::uint32_t total, unsigned workers)
      : maker_(std::move(maker)), total_(total) {
    unsigned n = std::max(1u, workers);
    if (n == 1) return;  // inline mode
    for (unsigned i = 0; i < n; ++i) {
      threads_.emplace_back([this] { work(); });
    }
  }

  ~BatchPrefetcher() {
    {
      std::lock_guard lock(mu_);
      stop_ = true;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  BcBatch get(std::uint32_t step) {
    if (threads_.empty()) return maker_(step);
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return ready_.count(step) > 0; });
    BcBatch b = std::move(ready_.at(step));
    ready_.erase(step);
    cv_.notify_all();
    return b;
  }

 private:
  static constexpr std::size_t kMaxAhead = 16;

  void work() {
    for (;;) {
      std::uint32_t step;
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return stop_ || (next_ < total_ && ready_.size() < kMaxAhead); });
        if (stop_) return;
        step = next_++;
      }
      BcBatch b = maker_(step);
      {
        std::lock_guard lock(mu_);
        ready_.emplace(step, std::move(b));
      }
      cv_.notify_all();
    }
  }

  Maker maker_;
  std::uint32_t total_;
  std::uint32_t next_ = 0;
  bool stop_ = false;
  std::map<std::uint32_t, BcBatch> ready_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::vector<std::thread> threads_;
};

}  // namespace

TrainResult train_bc(const Graph& g, const EmbeddingTable& table, const Embedder& embedder,
                     SamplerKind sampler, GoalMode goal_mode, const TrainConfig& cfg,
                     unsigned workers) {
  if (cfg.learning_rate <= 0) throw std::invalid_argument("learning rate must be > 0");
  if (cfg.batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  if (goal_mode == GoalMode::Sentence && !embedder.supports_sentences()) {
    throw std::invalid_argument("sentence goals require a text embedder");
  }
  if (table.rows() != g.size()) throw std::invalid_argument("embedding table does not cover graph");

  TrainResult result;
  result.params = PolicyParams::init(table.dim, cfg.seed, false, embedder.config_hash());
  PolicyParams& params = result.params;
  const std::size_t rows = params.rows();

  std::vector<double> ms(params.w.size(), 0.0);
  std::vector<double> dw(params.w.size());
  ScoreWorkspace ws;
  std::vector<double> dlogits;

  BatchPrefetcher prefetcher(
      [&](std::uint32_t step) { return make_bc_batch(g, embedder, sampler, goal_mode, cfg, step); },
      cfg.update_steps, workers);

  result.log.reserve(cfg.update_steps);
  for (std::uint32_t step = 0; step < cfg.update_steps; ++step) {
    BcBatch batch = prefetcher.get(step);
    result.env_steps += batch.env_steps;

    std::fill(dw.begin(), dw.end(), 0.0);
    double loss = 0.0;
    std::uint32_t hits = 0;
    double inv = 1.0 / static_cast<double>(batch.transitions.size());
    for (const BcTransition& tr : batch.transitions) {
      auto nb = g.neighbors(tr.cur);
      std::size_t n = tr.allowed.size();
      ws.feats.resize(n * rows);
      std::size_t gold_pos = n;
      for (std::size_t i = 0; i < n; ++i) {
        const Edge& e = nb[tr.allowed[i]];
        bool visited =
            std::find(tr.visited.begin(), tr.visited.end(), e.target) != tr.visited.end();
        fill_action_features({ws.feats.data() + i * rows, rows}, table.row(e.target), e.type,
                             visited);
        if (tr.allowed[i] == tr.gold_edge) gold_pos = i;
      }
      std::span<const double> goal =
          tr.goal_emb.empty() ? table.row(tr.goal_node) : std::span<const double>(tr.goal_emb);
      score_features(params, table.row(tr.cur), goal, n, ws);
      loss += -std::log(ws.probs[gold_pos]) * inv;
      std::size_t argmax =
          std::max_element(ws.probs.begin(), ws.probs.end()) - ws.probs.begin();
      if (argmax == gold_pos) ++hits;
      dlogits.assign(ws.probs.begin(), ws.probs.end());
      dlogits[gold_pos] -= 1.0;
      for (double& d : dlogits) d *= inv;
      backprop_logits(params, ws, dlogits, n, dw, {});
    }
    check_finite(loss, "loss", step);
    rmsprop_step(params.w, dw, ms, cfg);
    result.log.push_back({step, loss, hits * inv});
  }
  return result;
}

// ---- REINFORCE ---------------------------------------------------------------

namespace {

struct RlTransition {
  NodeId cur = 0;
  std::uint32_t action = 0;  // index into g.neighbors(cur)
  std::vector<NodeId> visited;
  NodeId goal = 0;
  double ret = 0.0;  // discounted return
};

}  // namespace

TrainResult reinforce_train(const Graph& g, const EmbeddingTable& table, const TrainConfig& cfg,
                            const PolicyParams* init) {
  if (table.rows() != g.size()) throw std::invalid_argument("embedding table does not cover graph");

  TrainResult result;
  if (init) {
    result.params = *init;
    if (!result.params.has_value_head()) result.params.value.assign(result.params.cols(), 0.0);
  } else {
    result.params = PolicyParams::init(table.dim, cfg.seed, true, 0);
  }
  PolicyParams& params = result.params;
  const std::size_t rows = params.rows();
  const std::size_t cols = params.cols();

  std::vector<double> ms_w(params.w.size(), 0.0), ms_v(cols, 0.0);
  std::vector<double> dw(params.w.size()), dv(cols);
  ScoreWorkspace ws;
  std::vector<double> dlogits;
  std::vector<double> x(cols);

  const std::uint64_t env_budget =
      static_cast<std::uint64_t>(cfg.update_steps) * cfg.batch_size;
  std::uint64_t episode_idx = 0;
  std::uint32_t update_idx = 0;

  auto score_state = [&](NodeId cur, NodeId goal, const std::vector<NodeId>& visited) {
    auto nb = g.neighbors(cur);
    ws.feats.resize(nb.size() * rows);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      bool seen = std::find(visited.begin(), visited.end(), nb[i].target) != visited.end();
      fill_action_features({ws.feats.data() + i * rows, rows}, table.row(nb[i].target),
                           nb[i].type, seen);
    }
    score_features(params, table.row(cur), table.row(goal), nb.size(), ws);
  };

  while (result.env_steps < env_budget) {
    // collect a batch of episodes
    std::vector<RlTransition> batch;
    std::uint32_t episodes = 0, successes = 0;
    while (batch.size() < cfg.batch_size && result.env_steps < env_budget) {
      Rng rng = derive_stream(cfg.seed, 0x4E50000 + episode_idx++);
      ++episodes;
      Trajectory traj = sample_forward(g, cfg.trajectory_steps, rng);
      NodeId cur = traj.nodes.front();
      NodeId goal = traj.target();
      std::vector<NodeId> visited{cur};
      std::vector<RlTransition> episode;
      bool success = cur == goal;
      for (std::uint32_t step = 0; step < cfg.episode_budget && !success; ++step) {
        auto nb = g.neighbors(cur);
        if (nb.empty()) break;
        score_state(cur, goal, visited);
        double r = rng.next_double();
        std::uint32_t action = static_cast<std::uint32_t>(nb.size() - 1);
        double acc = 0.0;
        for (std::size_t i = 0; i < ws.probs.size(); ++i) {
          acc += ws.probs[i];
          if (r < acc) {
            action = static_cast<std::uint32_t>(i);
            break;
          }
        }
        episode.push_back({cur, action, visited, goal, 0.0});
        cur = nb[action].target;
        visited.push_back(cur);
        ++result.env_steps;
        if (cur == goal) success = true;
      }
      if (success) ++successes;
      // terminal reward only; G_t = gamma^(k-1-t) * R for k transitions
      double ret = success ? 1.0 : 0.0;
      for (std::size_t t = episode.size(); t > 0; --t) {
        episode[t - 1].ret = ret;
        ret *= cfg.gamma;
      }
      for (auto& tr : episode) batch.push_back(std::move(tr));
    }
    if (batch.empty()) break;

    std::fill(dw.begin(), dw.end(), 0.0);
    std::fill(dv.begin(), dv.end(), 0.0);
    double policy_loss = 0.0;
    double inv = 1.0 / static_cast<double>(batch.size());
    for (const RlTransition& tr : batch) {
      score_state(tr.cur, tr.goal, tr.visited);
      std::size_t n = ws.probs.size();
      std::copy(table.row(tr.cur).begin(), table.row(tr.cur).end(), x.begin());
      std::copy(table.row(tr.goal).begin(), table.row(tr.goal).end(), x.begin() + params.dim);
      double v = kern::dot(params.value, x);
      double adv = tr.ret - v;
      policy_loss += -adv * std::log(ws.probs[tr.action]) * inv;

      double entropy = 0.0;
      for (double p : ws.probs) {
        if (p > 0) entropy -= p * std::log(p);
      }
      dlogits.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        double logp = std::log(std::max(ws.probs[i], 1e-300));
        dlogits[i] = adv * ws.probs[i] + cfg.entropy_bonus * ws.probs[i] * (logp + entropy);
      }
      dlogits[tr.action] -= adv;
      for (double& d : dlogits) d *= inv;
      backprop_logits(params, ws, dlogits, n, dw, {});

      // value loss: baseline_cost * (v - ret)^2
      kern::axpy(2.0 * cfg.baseline_cost * (v - tr.ret) * inv, x, dv);
    }
    check_finite(policy_loss, "policy loss", update_idx);
    rmsprop_step(params.w, dw, ms_w, cfg);
    rmsprop_step(params.value, dv, ms_v, cfg);
    result.log.push_back(
        {update_idx++, policy_loss, episodes ? static_cast<double>(successes) / episodes : 0.0});
  }
  return result;
}

void write_train_log_csv(const std::string& path, std::span<const TrainLogRow> rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw UsageError("cannot open '" + path + "' for writing");
  out << "step,loss,success_probe\n";
  for (const TrainLogRow& r : rows) {
    out << r.step << ',' << r.loss << ',' << r.probe << '\n';
  }
}

}  // namespace navkit

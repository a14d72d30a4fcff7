#pragma once
// Goal-conditioned link scorer and its training loops.
//
// The scorer is a single learned linear layer W mapping the concatenated
// current/goal embeddings [phi(s_t) ; phi(s_g)] (2d) to a combined embedding
// e_tg (d+5). Both e_tg and each action feature vector
// [phi(candidate) ; edge-type one-hot ; visited bit] are L2-normalized before
// the inner product, and the logits are softmaxed over the out-edge list.
// Unit-vector dots cap logits at +/-1, which would bound the reachable
// probabilities (two actions could never pass ~0.88), so the dot is scaled
// by sqrt(d+5); probabilities stay invariant to rescaling any input vector.
//
// Training is behavioral cloning: mean negative log-likelihood of the
// demonstrated next edge over transitions drawn from freshly sampled
// trajectories, with per-example action dropout (the demonstrated edge always
// survives), optimized with RMSProp. The analytic gradient is exact; tests
// check it against central finite differences.
//
// A REINFORCE loop with a learned linear value baseline on [s_t ; s_g]
// provides the RL comparison and the RL finetune of a cloned policy.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "navkit/embed.hpp"
#include "navkit/graph.hpp"
#include "navkit/trajectories.hpp"

namespace navkit {

inline constexpr std::size_t kActionExtraDims = kEdgeTypeCount + 1;  // type one-hot + visited

struct ActionFeatures {
  Vec v;  // dim d+5
};

ActionFeatures make_action_features(std::span<const double> embedding, EdgeType type, bool visited);

struct PolicyParams {
  std::size_t dim = 0;  // embedding dimension d
  std::vector<double> w;      // (d+5) x (2d), row-major
  std::vector<double> value;  // value head (2d); empty unless RL
  std::uint64_t embedder_hash = 0;

  std::size_t rows() const { return dim + kActionExtraDims; }
  std::size_t cols() const { return 2 * dim; }
  bool has_value_head() const { return !value.empty(); }

  static PolicyParams init(std::size_t dim, std::uint64_t seed, bool with_value_head,
                           std::uint64_t embedder_hash);
  void save(const std::string& path) const;
  static PolicyParams load(const std::string& path);
};

std::vector<double> softmax(std::span<const double> logits);

// Spec-shaped scoring entry point. Throws on an empty action list or a
// zero-norm action vector.
std::vector<double> score_actions(const PolicyParams& params, std::span<const double> s_t,
                                  std::span<const double> s_g,
                                  std::span<const ActionFeatures> actions);

struct BcExample {
  Vec s_t, s_g;
  std::vector<ActionFeatures> actions;
  std::size_t gold_index = 0;
};

// (mean NLL of gold actions, exact analytic gradient d loss / d W).
std::pair<double, std::vector<double>> bc_loss_and_grad(const PolicyParams& params,
                                                        std::span<const BcExample> batch);

// ---- hot-path scorer -------------------------------------------------------

// Reusable buffers for scoring one state against its action set. Fill
// `feats` rows (n x rows(), unnormalized) then call score_features; rows are
// normalized in place and probabilities land in `probs`.
struct ScoreWorkspace {
  std::vector<double> x;     // [s_t ; s_g]
  std::vector<double> uhat;  // normalized combined embedding
  std::vector<double> feats;
  std::vector<double> logits;
  std::vector<double> probs;
  double u_norm = 0.0;
  double logit_scale = 1.0;  // sqrt(rows)
};

void score_features(const PolicyParams& params, std::span<const double> s_t,
                    std::span<const double> s_g, std::size_t n_actions, ScoreWorkspace& ws);

// Accumulates d loss / d W into dw given d loss / d logits, using the
// intermediates left by score_features. Either span may be empty to skip
// that gradient: the target-encoder finetune freezes W and only takes
// d loss / d s_g.
void backprop_logits(const PolicyParams& params, const ScoreWorkspace& ws,
                     std::span<const double> dlogits, std::size_t n_actions, std::span<double> dw,
                     std::span<double> ds_g);

void fill_action_features(std::span<double> dst, std::span<const double> embedding, EdgeType type,
                          bool visited);

// ---- training --------------------------------------------------------------

enum class GoalMode { NodeText, Sentence };

struct TrainConfig {
  double learning_rate = 0.01;
  double decay = 0.9;      // RMSProp
  double epsilon = 1e-10;  // RMSProp
  std::uint32_t batch_size = 64;
  std::uint32_t update_steps = 20000;
  std::uint32_t trajectory_steps = 5;  // T
  bool multistep = false;              // lengths ~ Uniform{1..T}
  double edge_dropout = 0.5;
  std::uint64_t seed = 1;
  // REINFORCE
  double gamma = 0.9;
  double entropy_bonus = 0.01;
  double baseline_cost = 0.5;
  std::uint32_t episode_budget = 100;
};

struct TrainLogRow {
  std::uint32_t step;
  double loss;
  double probe;  // BC: batch argmax accuracy; RL: batch success rate
};

struct TrainResult {
  PolicyParams params;
  std::vector<TrainLogRow> log;
  std::uint64_t env_steps = 0;  // transitions consumed from the graph
};

// Behavioral cloning. Deterministic given (graph, config, seed); the worker
// count only affects wall time (batches for step s derive from (seed, s) and
// are applied in step order).
TrainResult train_bc(const Graph& g, const EmbeddingTable& table, const Embedder& embedder,
                     SamplerKind sampler, GoalMode goal_mode, const TrainConfig& cfg,
                     unsigned workers = 1);

// REINFORCE with a learned value baseline. Runs episodes of the navigation
// task (budget cfg.episode_budget) until cfg.update_steps * cfg.batch_size
// environment transitions are consumed. With `init`, finetunes that policy.
TrainResult reinforce_train(const Graph& g, const EmbeddingTable& table, const TrainConfig& cfg,
                            const PolicyParams* init = nullptr);

void write_train_log_csv(const std::string& path, std::span<const TrainLogRow> rows);

}  // namespace navkit

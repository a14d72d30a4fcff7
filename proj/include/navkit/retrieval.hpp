#pragma once
// Evidence retrieval: BM25 start-node search, policy navigation with a
// claim-derived goal embedding, TF-IDF sentence re-ranking, fuzzy gold
// alignment, target-encoder finetuning and P/R/F1 metrics.
//
// BM25 is Okapi with k1 = 1.2, b = 0.75 over per-node (title + " " + text)
// token counts, idf(t) = ln((N - df + 0.5) / (df + 0.5) + 1); repeated query
// terms contribute once per occurrence. TF-IDF sentence vectors use raw term
// counts weighted by idf(t) = ln((N + 1) / (df + 1)) + 1 with the graph-wide
// document frequencies, compared by cosine.
//
// token_set_ratio follows the classic fuzzy-matching definition: tokenize
// both strings into sorted unique token sets, build the three comparison
// strings (intersection; intersection + sorted remainder of a; intersection +
// sorted remainder of b) and return the maximum pairwise similarity
// round(100 * 2M / (|x| + |y|)), where M counts characters in the
// Ratcliff/Obershelp matching blocks computed on lexicographically ordered
// arguments (tie-breaking among equal longest matches is order-sensitive, and
// the measure must be symmetric). Rounding is half away from zero.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "navkit/embed.hpp"
#include "navkit/graph.hpp"
#include "navkit/policy.hpp"

namespace navkit {

struct Bm25Index {
  double k1 = 1.2;
  double b = 0.75;
  std::size_t node_count = 0;
  double avgdl = 0.0;
  std::vector<std::uint32_t> doc_len;
  std::unordered_map<std::string, std::uint32_t> vocab;          // term -> term id
  std::vector<std::vector<std::pair<NodeId, std::uint32_t>>> postings;  // term id -> (node, tf)

  std::uint32_t df(const std::string& term) const;
};

Bm25Index build_index(const Graph& g);

// Okapi-scored nodes, descending, ties by lowest id, zero-score nodes
// excluded, at most k entries. Throws if the query has no tokens.
std::vector<std::pair<NodeId, double>> bm25_top_k(const Bm25Index& index, std::string_view query,
                                                  std::size_t k);

// (sentence index, score) in stable descending score order.
std::vector<std::pair<std::size_t, double>> tfidf_rank(const Bm25Index& index,
                                                       std::string_view claim,
                                                       std::span<const std::string> sentences);

int token_set_ratio(std::string_view a, std::string_view b);

// Nodes whose text scores >= 80 against the sentence. The aligner caches
// per-node token sets; align_evidence is the one-shot convenience wrapper.
class EvidenceAligner {
 public:
  explicit EvidenceAligner(const Graph& g);
  std::vector<NodeId> align(std::string_view gold_sentence) const;

 private:
  const Graph& g_;
  std::vector<std::vector<std::string>> node_tokens_;  // sorted unique
  std::vector<std::size_t> node_token_chars_;
};

std::vector<NodeId> align_evidence(std::string_view gold_sentence, const Graph& g);

struct Claim {
  std::string id;
  std::string text;
  std::vector<NodeId> gold_nodes;
  std::vector<std::string> gold_sentences;
};

std::vector<Claim> read_claims_jsonl(const std::string& path);
void write_claims_jsonl(const std::string& path, std::span<const Claim> claims);

// Linear d x d map applied to the sentence embedding of a claim; the
// composition is the target encoder phi_target.
struct TargetEncoderParams {
  std::size_t dim = 0;
  std::vector<double> m;  // d x d row-major
  std::uint64_t embedder_hash = 0;

  static TargetEncoderParams identity(std::size_t dim, std::uint64_t embedder_hash);
  Vec apply(std::span<const double> claim_embedding) const;
  void save(const std::string& path) const;
  static TargetEncoderParams load(const std::string& path);
};

struct FinetuneResult {
  TargetEncoderParams params;
  std::vector<TrainLogRow> log;
  std::uint64_t skipped_claims = 0;  // no gold, or gold unreachable from starts
};

// Trains only the target-encoder map on cloning trajectories from BM25
// starts (top 10) to gold nodes via shortest paths, plus the aux_weight-
// scaled L2 distance between phi_target(claim) and phi(gold). Policy and
// node embeddings stay frozen.
FinetuneResult finetune_target_encoder(const TargetEncoderParams& init,
                                       std::span<const Claim> claims_train,
                                       const PolicyParams& policy, const Graph& g,
                                       const EmbeddingTable& table, const Embedder& embedder,
                                       const Bm25Index& index, const TrainConfig& cfg,
                                       double aux_weight = 0.1);

struct PipelineConfig {
  std::size_t k_start = 5;
  std::uint32_t nav_steps = 20;
  std::size_t k_out = 5;
};

struct RankedEvidence {
  std::string sentence;
  double score = 0.0;
  NodeId node = kInvalidNode;
  std::vector<NodeId> provenance;  // walk from the BM25 start to the node
};

struct PipelineResult {
  std::vector<RankedEvidence> top;
  std::size_t visited_nodes = 0;  // <= k_start * (nav_steps + 1)
};

PipelineResult evidence_pipeline(const Claim& claim, const Bm25Index& index,
                                 const PolicyParams& policy,
                                 const TargetEncoderParams& target_params, const Graph& g,
                                 const EmbeddingTable& table, const Embedder& embedder,
                                 const PipelineConfig& cfg);

struct Prf1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// A prediction is correct iff its token_set_ratio to any gold sentence is
// >= 80 (the alignment rule). Throws on an empty gold set.
Prf1 prf1_at_k(std::span<const std::string> predicted, std::span<const std::string> gold,
               std::size_t k = 5);

}  // namespace navkit

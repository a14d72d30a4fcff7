#pragma once
// Pluggable embedding providers for node text, target sentences and actions.
//
// The default provider is a hashed bag of words: tokens are feature-hashed
// into d signed buckets (sign hash gives an unbiased projection), the bucket
// sums are scaled by 1/sqrt(token count) and squashed with tanh. It is a
// pure function of (config, input), so embeddings are reproducible anywhere.
//
// Random features (unit sphere, keyed by node id) exist as an ablation
// baseline, and a precomputed loader accepts vectors from any external
// encoder: header u64 count, u32 dim, then node-id-ordered little-endian
// f32 values.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "navkit/graph.hpp"
#include "navkit/tokenize.hpp"

namespace navkit {

using Vec = std::vector<double>;

enum class EmbedderKind { HashedBow, RandomFeature, Precomputed };

struct EmbedderConfig {
  EmbedderKind kind = EmbedderKind::HashedBow;
  std::size_t dim = 256;  // must be >= 8
  std::uint64_t hash_seed = 0x5EEDull;
  TokenPattern token_pattern = TokenPattern::Alnum;
  std::string vectors_path;  // Precomputed only
};

EmbedderKind embedder_kind_from_name(const std::string& name);
std::string embedder_kind_name(EmbedderKind k);

// Stable hash of the config; stored in checkpoints so a policy cannot be
// loaded against a different embedding space.
std::uint64_t embedder_config_hash(const EmbedderConfig& cfg);

Vec random_feature_embed(NodeId node_id, std::uint64_t seed, std::size_t dim);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

class Embedder {
 public:
  explicit Embedder(EmbedderConfig cfg);

  const EmbedderConfig& config() const { return cfg_; }
  std::size_t dim() const { return cfg_.dim; }
  std::uint64_t config_hash() const { return hash_; }

  // tanh(bucket sums / sqrt(token count)) over tokens of (title + " " + text).
  // Throws if there are no tokens.
  Vec embed_text(std::string_view text, std::string_view title) const;

  // Same pipeline with the title omitted.
  Vec embed_sentence(std::string_view sentence) const;

  Vec embed_node(const Graph& g, NodeId id) const;

  bool supports_sentences() const { return cfg_.kind == EmbedderKind::HashedBow; }

 private:
  Vec embed_tokens(const std::vector<std::string>& tokens) const;

  EmbedderConfig cfg_;
  std::uint64_t hash_;
  std::uint64_t precomputed_count_ = 0;
  std::vector<float> precomputed_;
};

// Node-id-ordered dense matrix of node embeddings, row-major.
struct EmbeddingTable {
  std::size_t dim = 0;
  std::vector<double> data;

  std::span<const double> row(NodeId id) const {
    return {data.data() + static_cast<std::size_t>(id) * dim, dim};
  }
  std::size_t rows() const { return dim == 0 ? 0 : data.size() / dim; }

  static EmbeddingTable build(const Graph& g, const Embedder& embedder, unsigned workers = 1);
};

void write_vectors_file(const std::string& path, std::span<const float> data, std::size_t dim);

}  // namespace navkit

#include "navkit/embed.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "navkit/error.hpp"
#include "navkit/kernels.hpp"
#include "navkit/rng.hpp"

namespace navkit {

namespace {

std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 0xCBF29CE484222325ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace

EmbedderKind embedder_kind_from_name(const std::string& name) {
  if (name == "hashed") return EmbedderKind::HashedBow;
  if (name == "random") return EmbedderKind::RandomFeature;
  if (name == "precomputed") return EmbedderKind::Precomputed;
  throw UsageError("unknown embedder '" + name + "' (expected hashed|random|precomputed)");
}

std::string embedder_kind_name(EmbedderKind k) {
  switch (k) {
    case EmbedderKind::HashedBow: return "hashed";
    case EmbedderKind::RandomFeature: return "random";
    case EmbedderKind::Precomputed: return "precomputed";
  }
  return "?";
}

std::uint64_t embedder_config_hash(const EmbedderConfig& cfg) {
  std::uint64_t h = fnv1a64(embedder_kind_name(cfg.kind));
  h = mix64(h ^ cfg.dim);
  h = mix64(h ^ cfg.hash_seed);
  h = mix64(h ^ static_cast<std::uint64_t>(cfg.token_pattern));
  if (cfg.kind == EmbedderKind::Precomputed) h = mix64(h ^ fnv1a64(cfg.vectors_path));
  return h;
}

Vec random_feature_embed(NodeId node_id, std::uint64_t seed, std::size_t dim) {
  Rng rng = derive_stream(seed, node_id);
  Vec v(dim);
  for (double& x : v) x = rng.normal();
  double norm = kern::l2_norm(v);
  if (norm == 0.0) {  // astronomically unlikely; keep determinism anyway
    v[0] = 1.0;
    norm = 1.0;
  }
  kern::scale(v, 1.0 / norm);
  return v;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  double na = kern::l2_norm(a);
  double nb = kern::l2_norm(b);
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("cosine_similarity: zero vector");
  return kern::dot(a, b) / (na * nb);
}

Embedder::Embedder(EmbedderConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.dim < 8) throw std::invalid_argument("embedding dimension must be >= 8");
  hash_ = embedder_config_hash(cfg_);
  if (cfg_.kind == EmbedderKind::Precomputed) {
    std::ifstream in(cfg_.vectors_path, std::ios::binary);
    if (!in) throw UsageError("cannot open vectors file '" + cfg_.vectors_path + "'");
    std::uint64_t count = 0;
    std::uint32_t dim = 0;
    in.read(reinterpret_cast<char*>(&count), sizeof(count));
    in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
    if (!in) throw UsageError("vectors file '" + cfg_.vectors_path + "': truncated header");
    if (dim != cfg_.dim) {
      throw UsageError("vectors file '" + cfg_.vectors_path + "' has dimension " +
                       std::to_string(dim) + " but config asks for " + std::to_string(cfg_.dim));
    }
    precomputed_count_ = count;
    precomputed_.resize(count * cfg_.dim);
    in.read(reinterpret_cast<char*>(precomputed_.data()),
            static_cast<std::streamsize>(precomputed_.size() * sizeof(float)));
    if (!in) throw UsageError("vectors file '" + cfg_.vectors_path + "': truncated data");
  }
}

Vec Embedder::embed_tokens(const std::vector<std::string>& tokens) const {
  if (tokens.empty()) throw std::invalid_argument("no tokens");
  Vec v(cfg_.dim, 0.0);
  for (const std::string& tok : tokens) {
    std::uint64_t h = mix64(fnv1a64(tok) ^ (cfg_.hash_seed * kGolden));
    std::size_t bucket = static_cast<std::size_t>(h % cfg_.dim);
    double sign = (h >> 63) ? 1.0 : -1.0;
    v[bucket] += sign;
  }
  double s = 1.0 / std::sqrt(static_cast<double>(tokens.size()));
  for (double& x : v) x = std::tanh(x * s);
  return v;
}

Vec Embedder::embed_text(std::string_view text, std::string_view title) const {
  std::string combined;
  combined.reserve(title.size() + 1 + text.size());
  combined.append(title);
  combined.push_back(' ');
  combined.append(text);
  return embed_tokens(tokenize(combined, cfg_.token_pattern));
}

Vec Embedder::embed_sentence(std::string_view sentence) const {
  if (!supports_sentences()) {
    throw std::invalid_argument("embedder '" + embedder_kind_name(cfg_.kind) +
                                "' cannot embed free text");
  }
  return embed_tokens(tokenize(sentence, cfg_.token_pattern));
}

Vec Embedder::embed_node(const Graph& g, NodeId id) const {
  switch (cfg_.kind) {
    case EmbedderKind::HashedBow: {
      const Node& n = g.node(id);
      return embed_text(n.text, n.title);
    }
    case EmbedderKind::RandomFeature:
      return random_feature_embed(id, cfg_.hash_seed, cfg_.dim);
    case EmbedderKind::Precomputed: {
      if (id >= precomputed_count_) {
        throw UsageError("vectors file '" + cfg_.vectors_path + "' has " +
                         std::to_string(precomputed_count_) + " vectors but node " +
                         std::to_string(id) + " was requested");
      }
      Vec v(cfg_.dim);
      const float* row = precomputed_.data() + static_cast<std::size_t>(id) * cfg_.dim;
      for (std::size_t i = 0; i < cfg_.dim; ++i) v[i] = row[i];
      return v;
    }
  }
  throw std::logic_error("bad embedder kind");
}

EmbeddingTable EmbeddingTable::build(const Graph& g, const Embedder& embedder, unsigned workers) {
  if (embedder.config().kind == EmbedderKind::Precomputed) {
    // fail loudly if the file does not cover the graph
    if (g.size() > 0) embedder.embed_node(g, static_cast<NodeId>(g.size() - 1));
  }
  EmbeddingTable table;
  table.dim = embedder.dim();
  table.data.assign(g.size() * table.dim, 0.0);
  auto fill = [&](NodeId begin, NodeId end) {
    for (NodeId id = begin; id < end; ++id) {
      Vec v = embedder.embed_node(g, id);
      std::copy(v.begin(), v.end(), table.data.begin() + static_cast<std::size_t>(id) * table.dim);
    }
  };
  if (workers <= 1 || g.size() < 256) {
    fill(0, static_cast<NodeId>(g.size()));
  } else {
    std::vector<std::thread> threads;
    NodeId chunk = static_cast<NodeId>((g.size() + workers - 1) / workers);
    for (unsigned w = 0; w < workers; ++w) {
      NodeId begin = std::min<NodeId>(w * chunk, static_cast<NodeId>(g.size()));
      NodeId end = std::min<NodeId>(begin + chunk, static_cast<NodeId>(g.size()));
      if (begin < end) threads.emplace_back(fill, begin, end);
    }
    for (auto& t : threads) t.join();
  }
  return table;
}

void write_vectors_file(const std::string& path, std::span<const float> data, std::size_t dim) {
  if (dim == 0 || data.size() % dim != 0) {
    throw std::invalid_argument("vector data size not a multiple of dim");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot open '" + path + "' for writing");
  std::uint64_t count = data.size() / dim;
  std::uint32_t d32 = static_cast<std::uint32_t>(dim);
  out.write(reinterpret_cast<const char*>(&count), sizeof(count));
  out.write(reinterpret_cast<const char*>(&d32), sizeof(d32));
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(float)));
  if (!out) throw std::runtime_error("short write to '" + path + "'");
}

}  // namespace navkit

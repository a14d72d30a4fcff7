#include "navkit/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "json.hpp"
#include "navkit/agents.hpp"
#include "navkit/error.hpp"
#include "navkit/kernels.hpp"
#include "navkit/tokenize.hpp"

namespace navkit {

namespace {

std::string node_index_text(const Node& n) { return n.title + " " + n.text; }

std::vector<std::string> sorted_unique_tokens(std::string_view text) {
  std::vector<std::string> toks = tokenize(text);
  std::sort(toks.begin(), toks.end());
  toks.erase(std::unique(toks.begin(), toks.end()), toks.end());
  return toks;
}

std::string join_tokens(const std::vector<std::string>& toks) {
  std::string out;
  for (const std::string& t : toks) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

// Ratcliff/Obershelp matching blocks: recursively take the first longest
// common substring (lowest start in x, then in y) and recurse on both sides.
// Returns the total matched character count.
std::size_t matching_block_chars(std::string_view x, std::string_view y) {
  if (x.empty() || y.empty()) return 0;
  std::size_t best_i = 0, best_j = 0, best_size = 0;
  std::vector<std::size_t> j2len(y.size() + 1, 0), next(y.size() + 1, 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::fill(next.begin(), next.end(), 0);
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (x[i] != y[j]) continue;
      std::size_t k = (j > 0 ? j2len[j - 1] : 0) + 1;
      next[j] = k;
      if (k > best_size) {
        best_size = k;
        best_i = i + 1 - k;
        best_j = j + 1 - k;
      }
    }
    std::swap(j2len, next);
  }
  if (best_size == 0) return 0;
  return best_size + matching_block_chars(x.substr(0, best_i), y.substr(0, best_j)) +
         matching_block_chars(x.substr(best_i + best_size), y.substr(best_j + best_size));
}

// round(100 * 2M / (|x|+|y|)), half away from zero; both empty -> 0 here
// (the tokenless-inputs = 100 convention lives in tsr_from_sets). Arguments
// are canonically ordered first: tie-breaking among equal longest matches
// would otherwise make the block total depend on argument order.
int sequence_ratio(std::string_view x, std::string_view y) {
  if (x.empty() && y.empty()) return 0;
  if (y < x) std::swap(x, y);
  double m = static_cast<double>(matching_block_chars(x, y));
  return static_cast<int>(std::llround(200.0 * m / static_cast<double>(x.size() + y.size())));
}

int tsr_from_sets(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() && b.empty()) return 100;  // documented convention
  std::vector<std::string> inter, only_a, only_b;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(only_a));
  std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(only_b));
  std::string t0 = join_tokens(inter);
  std::string ra = join_tokens(only_a);
  std::string rb = join_tokens(only_b);
  std::string t1 = t0.empty() ? ra : (ra.empty() ? t0 : t0 + " " + ra);
  std::string t2 = t0.empty() ? rb : (rb.empty() ? t0 : t0 + " " + rb);
  return std::max({sequence_ratio(t0, t1), sequence_ratio(t0, t2), sequence_ratio(t1, t2)});
}

std::size_t joined_len(std::size_t token_chars, std::size_t count) {
  return count == 0 ? 0 : token_chars + count - 1;
}

}  // namespace

int token_set_ratio(std::string_view a, std::string_view b) {
  return tsr_from_sets(sorted_unique_tokens(a), sorted_unique_tokens(b));
}

// ---- BM25 -------------------------------------------------------------------

std::uint32_t Bm25Index::df(const std::string& term) const {
  auto it = vocab.find(term);
  if (it == vocab.end()) return 0;
  return static_cast<std::uint32_t>(postings[it->second].size());
}

Bm25Index build_index(const Graph& g) {
  if (g.empty()) throw std::invalid_argument("build_index: empty graph");
  Bm25Index idx;
  idx.node_count = g.size();
  idx.doc_len.resize(g.size());
  std::uint64_t total_len = 0;
  for (NodeId id = 0; id < g.size(); ++id) {
    std::vector<std::string> toks = tokenize(node_index_text(g.node(id)));
    idx.doc_len[id] = static_cast<std::uint32_t>(toks.size());
    total_len += toks.size();
    std::sort(toks.begin(), toks.end());
    for (std::size_t i = 0; i < toks.size();) {
      std::size_t j = i;
      while (j < toks.size() && toks[j] == toks[i]) ++j;
      auto [it, fresh] = idx.vocab.try_emplace(toks[i], idx.postings.size());
      if (fresh) idx.postings.emplace_back();
      idx.postings[it->second].emplace_back(id, static_cast<std::uint32_t>(j - i));
      i = j;
    }
  }
  idx.avgdl = static_cast<double>(total_len) / static_cast<double>(g.size());
  return idx;
}

std::vector<std::pair<NodeId, double>> bm25_top_k(const Bm25Index& index, std::string_view query,
                                                  std::size_t k) {
  if (k < 1) throw std::invalid_argument("bm25_top_k: k must be >= 1");
  std::vector<std::string> terms = tokenize(query);
  if (terms.empty()) throw std::invalid_argument("bm25_top_k: empty query after tokenization");

  std::vector<double> scores(index.node_count, 0.0);
  double n = static_cast<double>(index.node_count);
  for (const std::string& term : terms) {
    auto it = index.vocab.find(term);
    if (it == index.vocab.end()) continue;  // absent term contributes 0
    const auto& posting = index.postings[it->second];
    double df = static_cast<double>(posting.size());
    double idf = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
    for (const auto& [node, tf] : posting) {
      double tfd = static_cast<double>(tf);
      double norm = index.k1 * (1.0 - index.b + index.b * index.doc_len[node] / index.avgdl);
      scores[node] += idf * tfd * (index.k1 + 1.0) / (tfd + norm);
    }
  }

  std::vector<std::pair<NodeId, double>> hits;
  for (NodeId id = 0; id < scores.size(); ++id) {
    if (scores[id] > 0.0) hits.emplace_back(id, scores[id]);
  }
  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (hits.size() > k) hits.resize(k);
  return hits;
}

std::vector<std::pair<std::size_t, double>> tfidf_rank(const Bm25Index& index,
                                                       std::string_view claim,
                                                       std::span<const std::string> sentences) {
  if (sentences.empty()) throw std::invalid_argument("tfidf_rank: no sentences");
  double n = static_cast<double>(index.node_count);
  auto idf = [&](const std::string& term) {
    return std::log((n + 1.0) / (static_cast<double>(index.df(term)) + 1.0)) + 1.0;
  };
  auto weigh = [&](std::string_view text) {
    std::unordered_map<std::string, double> w;
    for (std::string& t : tokenize(text)) w[std::move(t)] += 1.0;
    double norm2 = 0.0;
    for (auto& [term, tf] : w) {
      tf *= idf(term);
      norm2 += tf * tf;
    }
    return std::make_pair(std::move(w), std::sqrt(norm2));
  };

  auto [cw, cnorm] = weigh(claim);
  std::vector<std::pair<std::size_t, double>> ranked(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    auto [sw, snorm] = weigh(sentences[i]);
    double dot = 0.0;
    for (const auto& [term, weight] : sw) {
      auto it = cw.find(term);
      if (it != cw.end()) dot += weight * it->second;
    }
    double score = (cnorm == 0.0 || snorm == 0.0) ? 0.0 : dot / (cnorm * snorm);
    ranked[i] = {i, score};
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return ranked;
}

// ---- evidence alignment -----------------------------------------------------

EvidenceAligner::EvidenceAligner(const Graph& g) : g_(g) {
  node_tokens_.resize(g.size());
  node_token_chars_.resize(g.size());
  for (NodeId id = 0; id < g.size(); ++id) {
    node_tokens_[id] = sorted_unique_tokens(g.node(id).text);
    std::size_t chars = 0;
    for (const std::string& t : node_tokens_[id]) chars += t.size();
    node_token_chars_[id] = chars;
  }
}

std::vector<NodeId> EvidenceAligner::align(std::string_view gold_sentence) const {
  if (gold_sentence.empty()) throw std::invalid_argument("align: empty sentence");
  std::vector<std::string> sent = sorted_unique_tokens(gold_sentence);
  std::size_t sent_chars = 0;
  for (const std::string& t : sent) sent_chars += t.size();

  std::vector<NodeId> out;
  for (NodeId id = 0; id < g_.size(); ++id) {
    const auto& node = node_tokens_[id];
    // intersection size/chars by linear merge
    std::size_t ic = 0, ichars = 0;
    std::size_t i = 0, j = 0;
    while (i < sent.size() && j < node.size()) {
      int c = sent[i].compare(node[j]);
      if (c == 0) {
        ++ic;
        ichars += sent[i].size();
        ++i;
        ++j;
      } else if (c < 0) {
        ++i;
      } else {
        ++j;
      }
    }
    // upper bound on the ratio (matching chars can't exceed the shorter string)
    std::size_t t0 = joined_len(ichars, ic);
    std::size_t t1 = joined_len(sent_chars, sent.size());
    std::size_t t2 = joined_len(node_token_chars_[id], node.size());
    auto bound = [](std::size_t x, std::size_t y) {
      if (x + y == 0) return 0.0;
      return 200.0 * static_cast<double>(std::min(x, y)) / static_cast<double>(x + y);
    };
    double ub = std::max({bound(t0, t1), bound(t0, t2), bound(t1, t2)});
    if (ub < 79.5) continue;
    if (tsr_from_sets(sent, node) >= 80) out.push_back(id);
  }
  return out;
}

std::vector<NodeId> align_evidence(std::string_view gold_sentence, const Graph& g) {
  return EvidenceAligner(g).align(gold_sentence);
}

// ---- claims IO ----------------------------------------------------------------

std::vector<Claim> read_claims_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open claims file '" + path + "'");
  std::vector<Claim> claims;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw UsageError("claims '" + path + "' line " + std::to_string(lineno) + ": " + e.what());
    }
    Claim c;
    c.id = j.value("id", std::to_string(lineno));
    c.text = j.at("text").get<std::string>();
    if (c.text.empty()) {
      throw UsageError("claims '" + path + "' line " + std::to_string(lineno) + ": empty text");
    }
    if (j.contains("gold_sentences")) {
      c.gold_sentences = j.at("gold_sentences").get<std::vector<std::string>>();
    }
    if (j.contains("gold_node_ids")) {
      c.gold_nodes = j.at("gold_node_ids").get<std::vector<NodeId>>();
    }
    claims.push_back(std::move(c));
  }
  return claims;
}

void write_claims_jsonl(const std::string& path, std::span<const Claim> claims) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw UsageError("cannot open '" + path + "' for writing");
  for (const Claim& c : claims) {
    nlohmann::json j;
    j["id"] = c.id;
    j["text"] = c.text;
    j["gold_sentences"] = c.gold_sentences;
    j["gold_node_ids"] = c.gold_nodes;
    out << j.dump() << '\n';
  }
}

// ---- target encoder -----------------------------------------------------------

namespace {
constexpr char kEncMagic[4] = {'N', 'A', 'V', 'T'};
}

TargetEncoderParams TargetEncoderParams::identity(std::size_t dim, std::uint64_t embedder_hash) {
  TargetEncoderParams p;
  p.dim = dim;
  p.embedder_hash = embedder_hash;
  p.m.assign(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) p.m[i * dim + i] = 1.0;
  return p;
}

Vec TargetEncoderParams::apply(std::span<const double> claim_embedding) const {
  if (claim_embedding.size() != dim) {
    throw std::invalid_argument("target encoder: dimension mismatch");
  }
  Vec out(dim);
  kern::matvec(m, dim, dim, claim_embedding, out);
  return out;
}

void TargetEncoderParams::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot open '" + path + "' for writing");
  out.write(kEncMagic, 4);
  std::uint32_t d32 = static_cast<std::uint32_t>(dim);
  out.write(reinterpret_cast<const char*>(&d32), sizeof(d32));
  out.write(reinterpret_cast<const char*>(&embedder_hash), sizeof(embedder_hash));
  std::vector<float> f(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) f[i] = static_cast<float>(m[i]);
  out.write(reinterpret_cast<const char*>(f.data()),
            static_cast<std::streamsize>(f.size() * sizeof(float)));
  if (!out) throw std::runtime_error("short write to '" + path + "'");
}

TargetEncoderParams TargetEncoderParams::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open target encoder '" + path + "'");
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kEncMagic, 4) != 0) {
    throw UsageError("target encoder '" + path + "': bad magic at offset 0");
  }
  std::uint32_t d32 = 0;
  std::uint64_t hash = 0;
  in.read(reinterpret_cast<char*>(&d32), sizeof(d32));
  in.read(reinterpret_cast<char*>(&hash), sizeof(hash));
  if (!in) throw UsageError("target encoder '" + path + "': truncated header");
  TargetEncoderParams p;
  p.dim = d32;
  p.embedder_hash = hash;
  std::vector<float> f(p.dim * p.dim);
  in.read(reinterpret_cast<char*>(f.data()),
          static_cast<std::streamsize>(f.size() * sizeof(float)));
  if (!in) throw UsageError("target encoder '" + path + "': truncated weights");
  p.m.resize(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) p.m[i] = f[i];
  return p;
}

// ---- target encoder finetune ---------------------------------------------------

namespace {

struct EncTransition {
  NodeId cur = 0;
  std::uint32_t gold_edge = 0;
  std::vector<NodeId> visited;
  std::size_t claim_idx = 0;
  NodeId gold_node = 0;
};

}  // namespace

FinetuneResult finetune_target_encoder(const TargetEncoderParams& init,
                                       std::span<const Claim> claims_train,
                                       const PolicyParams& policy, const Graph& g,
                                       const EmbeddingTable& table, const Embedder& embedder,
                                       const Bm25Index& index, const TrainConfig& cfg,
                                       double aux_weight) {
  FinetuneResult result;
  result.params = init;
  TargetEncoderParams& params = result.params;
  const std::size_t d = params.dim;
  const std::size_t rows = policy.rows();
  constexpr std::size_t kStarts = 10;
  constexpr std::uint32_t kPathCap = 50;

  // Cloning pool: shortest paths from BM25 starts to the nearest gold node.
  std::vector<Vec> claim_embs;
  std::vector<EncTransition> pool;
  for (const Claim& claim : claims_train) {
    if (claim.gold_nodes.empty()) {
      result.skipped_claims++;
      continue;
    }
    std::vector<std::pair<NodeId, double>> starts;
    try {
      starts = bm25_top_k(index, claim.text, kStarts);
    } catch (const std::invalid_argument&) {
      result.skipped_claims++;
      continue;
    }
    std::size_t claim_idx = claim_embs.size();
    std::size_t added = 0;
    for (const auto& [start, score] : starts) {
      // nearest gold by BFS path length
      std::optional<std::vector<NodeId>> best;
      for (NodeId gold : claim.gold_nodes) {
        auto path = g.shortest_path(start, gold, kPathCap);
        if (path && (!best || path->size() < best->size())) best = path;
      }
      if (!best || best->size() < 2) continue;
      const std::vector<NodeId>& path = *best;
      for (std::size_t t = 0; t + 1 < path.size(); ++t) {
        EncTransition tr;
        tr.cur = path[t];
        auto nb = g.neighbors(tr.cur);
        tr.gold_edge = kInvalidNode;
        for (std::uint32_t e = 0; e < nb.size(); ++e) {
          if (nb[e].target == path[t + 1]) {
            tr.gold_edge = e;
            break;
          }
        }
        tr.visited.assign(path.begin(), path.begin() + t + 1);
        tr.claim_idx = claim_idx;
        tr.gold_node = path.back();
        pool.push_back(std::move(tr));
        ++added;
      }
    }
    if (added == 0) {
      result.skipped_claims++;
      continue;
    }
    claim_embs.push_back(embedder.embed_sentence(claim.text));
  }
  if (pool.empty() || cfg.update_steps == 0) return result;

  std::vector<double> ms(params.m.size(), 0.0);
  std::vector<double> dm(params.m.size());
  std::vector<double> ds_g(d);
  ScoreWorkspace ws;
  std::vector<double> dlogits;

  for (std::uint32_t step = 0; step < cfg.update_steps; ++step) {
    Rng rng = derive_stream(cfg.seed, 0xE4C0 + step);
    std::fill(dm.begin(), dm.end(), 0.0);
    double loss = 0.0;
    std::uint32_t hits = 0;
    double inv = 1.0 / static_cast<double>(cfg.batch_size);
    for (std::uint32_t b = 0; b < cfg.batch_size; ++b) {
      const EncTransition& tr = pool[rng.index(pool.size())];
      const Vec& c = claim_embs[tr.claim_idx];
      Vec goal = params.apply(c);

      auto nb = g.neighbors(tr.cur);
      std::size_t n = nb.size();
      ws.feats.resize(n * rows);
      for (std::size_t i = 0; i < n; ++i) {
        bool seen =
            std::find(tr.visited.begin(), tr.visited.end(), nb[i].target) != tr.visited.end();
        fill_action_features({ws.feats.data() + i * rows, rows}, table.row(nb[i].target),
                             nb[i].type, seen);
      }
      score_features(policy, table.row(tr.cur), goal, n, ws);
      loss += -std::log(ws.probs[tr.gold_edge]) * inv;
      std::size_t argmax = std::max_element(ws.probs.begin(), ws.probs.end()) - ws.probs.begin();
      if (argmax == tr.gold_edge) ++hits;

      dlogits.assign(ws.probs.begin(), ws.probs.end());
      dlogits[tr.gold_edge] -= 1.0;
      for (double& x : dlogits) x *= inv;
      std::fill(ds_g.begin(), ds_g.end(), 0.0);
      // the policy is frozen: route the gradient only into s_g = M c
      backprop_logits(policy, ws, dlogits, n, {}, ds_g);
      kern::ger(dm, d, d, 1.0, ds_g, c);

      // aux: aux_weight * || M c - phi(gold) ||_2
      Vec diff = goal;
      kern::axpy(-1.0, table.row(tr.gold_node), diff);
      double nd = kern::l2_norm(diff);
      loss += aux_weight * nd * inv;
      if (nd > 1e-12) {
        kern::scale(diff, aux_weight * inv / nd);
        kern::ger(dm, d, d, 1.0, diff, c);
      }
    }
    if (!std::isfinite(loss)) {
      throw std::runtime_error("target encoder finetune diverged at step " + std::to_string(step));
    }
    for (std::size_t i = 0; i < params.m.size(); ++i) {
      double grad = dm[i];
      ms[i] = cfg.decay * ms[i] + (1.0 - cfg.decay) * grad * grad;
      params.m[i] -= cfg.learning_rate * grad / (std::sqrt(ms[i]) + cfg.epsilon);
    }
    result.log.push_back({step, loss, hits * inv});
  }
  return result;
}

// ---- pipeline -------------------------------------------------------------------

PipelineResult evidence_pipeline(const Claim& claim, const Bm25Index& index,
                                 const PolicyParams& policy,
                                 const TargetEncoderParams& target_params, const Graph& g,
                                 const EmbeddingTable& table, const Embedder& embedder,
                                 const PipelineConfig& cfg) {
  std::vector<std::pair<NodeId, double>> starts;
  try {
    starts = bm25_top_k(index, claim.text, cfg.k_start);
  } catch (const std::invalid_argument&) {
    starts.clear();
  }
  if (starts.empty()) throw UsageError("evidence pipeline: no start nodes for claim " + claim.id);

  Vec goal = target_params.apply(embedder.embed_sentence(claim.text));

  struct Visit {
    std::vector<NodeId> provenance;
  };
  std::unordered_map<NodeId, Visit> first_visit;
  std::vector<NodeId> visit_order;
  auto record = [&](NodeId node, const std::vector<NodeId>& path) {
    if (first_visit.count(node)) return;
    first_visit.emplace(node, Visit{path});
    visit_order.push_back(node);
  };

  ScoreWorkspace ws;
  for (const auto& [start, score] : starts) {
    std::vector<NodeId> path{start};
    record(start, path);
    NodeId cur = start;
    for (std::uint32_t step = 0; step < cfg.nav_steps; ++step) {
      if (g.neighbors(cur).empty()) break;
      cur = policy_step(g, table, policy, cur, goal, path, ws);
      path.push_back(cur);
      record(cur, path);
    }
  }

  // Pool sentences of visited nodes, deduplicated by exact string.
  std::vector<std::string> sentences;
  std::vector<NodeId> sentence_node;
  std::unordered_set<std::string> seen;
  for (NodeId node : visit_order) {
    for (std::string& s : split_sentences(g.node(node).text)) {
      if (!seen.insert(s).second) continue;
      sentences.push_back(std::move(s));
      sentence_node.push_back(node);
    }
  }

  PipelineResult result;
  result.visited_nodes = visit_order.size();
  if (sentences.empty()) return result;

  auto ranked = tfidf_rank(index, claim.text, sentences);
  for (std::size_t r = 0; r < ranked.size() && r < cfg.k_out; ++r) {
    auto [idx, score] = ranked[r];
    RankedEvidence ev;
    ev.sentence = sentences[idx];
    ev.score = score;
    ev.node = sentence_node[idx];
    ev.provenance = first_visit.at(ev.node).provenance;
    result.top.push_back(std::move(ev));
  }
  return result;
}

Prf1 prf1_at_k(std::span<const std::string> predicted, std::span<const std::string> gold,
               std::size_t k) {
  if (k < 1) throw std::invalid_argument("prf1_at_k: k must be >= 1");
  if (gold.empty()) throw std::invalid_argument("prf1_at_k: empty gold set");
  std::size_t n = std::min(predicted.size(), k);
  if (n == 0) return {0.0, 0.0, 0.0};

  std::size_t correct = 0;
  std::vector<std::uint8_t> gold_hit(gold.size(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    bool any = false;
    for (std::size_t j = 0; j < gold.size(); ++j) {
      if (token_set_ratio(predicted[i], gold[j]) >= 80) {
        any = true;
        gold_hit[j] = 1;
      }
    }
    if (any) ++correct;
  }
  std::size_t matched_gold = 0;
  for (std::uint8_t h : gold_hit) matched_gold += h;

  Prf1 out;
  out.precision = static_cast<double>(correct) / static_cast<double>(n);
  out.recall = static_cast<double>(matched_gold) / static_cast<double>(gold.size());
  if (out.precision + out.recall > 0) {
    out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
  }
  return out;
}

}  // namespace navkit

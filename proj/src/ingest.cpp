#include "navkit/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "navkit/error.hpp"
#include "navkit/rng.hpp"
#include "navkit/tokenize.hpp"

namespace navkit {

namespace {

constexpr std::size_t kMinBodyChars = 200;
constexpr std::size_t kBoundaryWindow = 20;  // words around the chunk target

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

struct WordRange {
  std::size_t begin, end;  // [begin, end) into body
};

std::vector<WordRange> word_ranges(std::string_view body) {
  std::vector<WordRange> out;
  std::size_t i = 0;
  while (i < body.size()) {
    while (i < body.size() && is_space(body[i])) ++i;
    if (i >= body.size()) break;
    std::size_t start = i;
    while (i < body.size() && !is_space(body[i])) ++i;
    out.push_back({start, i});
  }
  return out;
}

bool ends_sentence(std::string_view body, const WordRange& w) {
  char c = body[w.end - 1];
  return c == '.' || c == '!' || c == '?';
}

std::size_t count_words(std::string_view s) { return word_ranges(s).size(); }

// whitespace-separated word count (titles use this, not the tokenizer)
std::size_t title_word_count(std::string_view title) { return count_words(title); }

struct ArticlePlan {
  std::string title;
  std::uint32_t topic;
  bool stub;
};

}  // namespace

std::string BuildReport::to_text() const {
  std::ostringstream os;
  os << "documents: " << docs_in << " (filtered: " << docs_filtered << ")\n";
  os << "nodes: " << nodes << "\n";
  os << "edges.hyperlink: " << edges_by_type[0] << "\n";
  os << "edges.next: " << edges_by_type[1] << "\n";
  os << "edges.prev: " << edges_by_type[2] << "\n";
  os << "edges.mention: " << edges_by_type[3] << "\n";
  os << "links.dropped: " << dropped_links << "\n";
  return os.str();
}

std::vector<Chunk> chunk_document(const RawDocument& doc, std::size_t target_words) {
  if (target_words < 1) throw std::invalid_argument("target_words must be >= 1");
  const std::string& body = doc.body;
  std::vector<WordRange> words = word_ranges(body);
  if (words.empty()) return {};

  // window <= target-1 keeps at least one word per chunk and <= 2x target total
  const std::size_t window = std::min<std::size_t>(kBoundaryWindow, target_words - 1);
  std::vector<std::pair<std::size_t, std::size_t>> ranges;  // chunk char ranges
  std::size_t cur = 0;           // first word of the chunk being formed
  std::size_t chunk_begin = 0;   // char offset of that chunk
  while (cur < words.size()) {
    std::size_t remaining = words.size() - cur;
    if (remaining <= target_words + window) {
      ranges.emplace_back(chunk_begin, body.size());
      break;
    }
    // Prefer a sentence boundary within the window; otherwise cut at exactly
    // target_words (a whitespace boundary by construction).
    std::size_t lo = cur + target_words - window;   // cut after word index >= lo-1
    std::size_t hi = cur + target_words + window;   // cut after word index <= hi-1
    std::size_t cut_after = cur + target_words - 1;  // fallback
    std::size_t best_dist = SIZE_MAX;
    for (std::size_t w = lo - 1; w <= hi - 1; ++w) {
      if (!ends_sentence(body, words[w])) continue;
      std::size_t len = w + 1 - cur;
      std::size_t dist = len > target_words ? len - target_words : target_words - len;
      if (dist < best_dist) {
        best_dist = dist;
        cut_after = w;
      }
    }
    std::size_t next_begin = words[cut_after + 1].begin;
    ranges.emplace_back(chunk_begin, next_begin);
    chunk_begin = next_begin;
    cur = cut_after + 1;
  }

  std::vector<Chunk> chunks(ranges.size());
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    chunks[i].text = body.substr(ranges[i].first, ranges[i].second - ranges[i].first);
  }
  for (const LinkSpan& link : doc.links) {
    for (std::size_t i = 0; i < ranges.size(); ++i) {
      if (link.char_start >= ranges[i].first && link.char_start < ranges[i].second) {
        LinkSpan local = link;
        local.char_start -= ranges[i].first;
        local.char_end = std::min(link.char_end, ranges[i].second) - ranges[i].first;
        chunks[i].links.push_back(std::move(local));
        break;
      }
    }
  }
  return chunks;
}

Graph assemble_graph(const std::vector<ChunkedDoc>& docs, BuildReport* report) {
  BuildReport local;
  BuildReport& rep = report ? *report : local;

  // Node layout & title resolution.
  std::vector<Node> nodes;
  std::unordered_map<std::string, NodeId> first_chunk;
  std::uint32_t article_id = 0;
  for (const ChunkedDoc& doc : docs) {
    if (doc.chunks.empty()) continue;
    if (first_chunk.count(doc.title)) {
      throw UsageError("duplicate title '" + doc.title + "' in corpus");
    }
    first_chunk.emplace(doc.title, static_cast<NodeId>(nodes.size()));
    for (std::uint32_t p = 0; p < doc.chunks.size(); ++p) {
      Node n;
      n.article_id = article_id;
      n.para_index = p;
      n.title = doc.title;
      n.text = doc.chunks[p].text;
      nodes.push_back(std::move(n));
    }
    ++article_id;
  }

  // Mention candidates: titles of at least two words, searched
  // case-insensitively as exact substrings.
  struct MentionCandidate {
    std::string lowered;
    NodeId target;
  };
  std::vector<MentionCandidate> mention_candidates;
  for (const ChunkedDoc& doc : docs) {
    if (doc.chunks.empty()) continue;
    if (title_word_count(doc.title) < 2) continue;
    mention_candidates.push_back({lowercase_ascii(doc.title), first_chunk.at(doc.title)});
  }

  // Edges. Per node: Next, Prev, hyperlinks in span order, mentions in
  // first-occurrence order.
  NodeId id = 0;
  for (const ChunkedDoc& doc : docs) {
    if (doc.chunks.empty()) continue;
    NodeId base = id;
    for (std::uint32_t p = 0; p < doc.chunks.size(); ++p, ++id) {
      Node& n = nodes[id];
      std::set<std::pair<EdgeType, NodeId>> seen;
      auto add_edge = [&](EdgeType t, NodeId target) {
        if (target == id) return;  // self-loops dropped
        if (!seen.insert({t, target}).second) return;
        n.out.push_back({t, target});
        rep.edges_by_type[static_cast<std::size_t>(t)]++;
      };
      if (p + 1 < doc.chunks.size()) add_edge(EdgeType::Next, base + p + 1);
      if (p > 0) add_edge(EdgeType::Prev, base + p - 1);
      for (const LinkSpan& link : doc.chunks[p].links) {
        auto it = first_chunk.find(link.target_title);
        if (it == first_chunk.end()) {
          rep.dropped_links++;
          continue;
        }
        add_edge(EdgeType::Hyperlink, it->second);
      }
      std::string lowered = lowercase_ascii(n.text);
      std::vector<std::pair<std::size_t, NodeId>> mentions;
      for (const MentionCandidate& cand : mention_candidates) {
        std::size_t pos = lowered.find(cand.lowered);
        if (pos != std::string::npos) mentions.emplace_back(pos, cand.target);
      }
      std::sort(mentions.begin(), mentions.end());
      for (const auto& [pos, target] : mentions) add_edge(EdgeType::Mention, target);
    }
  }

  rep.nodes = nodes.size();
  return Graph(std::move(nodes));
}

Graph build_graph(const std::vector<RawDocument>& corpus, BuildReport* report) {
  BuildReport local;
  BuildReport& rep = report ? *report : local;
  rep.docs_in = corpus.size();

  std::vector<ChunkedDoc> docs;
  docs.reserve(corpus.size());
  for (const RawDocument& doc : corpus) {
    if (doc.body.size() < kMinBodyChars) {
      rep.docs_filtered++;
      continue;
    }
    docs.push_back({doc.title, chunk_document(doc)});
  }
  return assemble_graph(docs, report);
}

// ---- synthetic corpus ------------------------------------------------------

std::uint64_t synth_shared_vocab(const SynthSpec& spec) {
  return std::clamp<std::uint64_t>(spec.vocab_size / 20, 8, 40);
}

std::vector<ChunkedDoc> synth_corpus(const SynthSpec& spec) {
  if (spec.n_articles < 1 || spec.paras_per_article < 1 || spec.vocab_size < 1 ||
      spec.n_topics < 1) {
    throw std::invalid_argument("synth spec counts must be positive");
  }
  if (spec.p_intra < 0 || spec.p_intra > 1 || spec.p_long < 0 || spec.p_long > 1) {
    throw std::invalid_argument("synth spec probabilities must be in [0,1]");
  }

  Rng rng(spec.seed);

  auto vocab_word = [&](std::uint64_t i) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "w%05llu",
                  static_cast<unsigned long long>(i % spec.vocab_size));
    return std::string(buf);
  };
  // Topic vocabularies are overlapping windows along the vocabulary line
  // (75% overlap between neighbors), so embedding similarity forms a
  // gradient that reaches about three topics out - far enough to see where
  // a long-range link leads. A small head of the vocabulary is a shared
  // pool drawn everywhere (stopword-like: common per corpus, rare per
  // sentence).
  const std::uint64_t shared = synth_shared_vocab(spec);
  const std::uint64_t window = std::max<std::uint64_t>(
      4, 4 * (spec.vocab_size - shared) / (spec.n_topics + 3));
  auto shared_word = [&](Rng& r) { return vocab_word(r.below(shared)); };
  auto topic_word = [&](Rng& r, std::uint32_t topic) {
    return vocab_word(shared + topic * (window / 4) + r.below(window));
  };
  auto article_word = [&](Rng& r, std::uint32_t article) {
    return "a" + std::to_string(article) + "w" + std::to_string(r.below(6));
  };

  std::vector<ArticlePlan> plans(spec.n_articles);
  for (std::uint32_t i = 0; i < spec.n_articles; ++i) {
    ArticlePlan& p = plans[i];
    // topic from i/2 so the stub rule (odd i) stays uncorrelated with topics
    p.topic = (i / 2) % spec.n_topics;
    p.stub = spec.n_articles >= 20 && (i % 2 == 1);
    p.title = topic_word(rng, p.topic) + " " + topic_word(rng, p.topic) + " a" + std::to_string(i);
  }

  // Link/mention targets exclude stubs so stub chunks keep zero in-edges
  // (reverse-walk dead ends).
  std::vector<std::vector<std::uint32_t>> linkable_by_topic(spec.n_topics);
  for (std::uint32_t i = 0; i < spec.n_articles; ++i) {
    if (plans[i].stub) continue;
    linkable_by_topic[plans[i].topic].push_back(i);
  }

  auto pick_other = [&](Rng& r, const std::vector<std::uint32_t>& pool,
                        std::uint32_t self) -> std::int64_t {
    if (pool.empty() || (pool.size() == 1 && pool[0] == self)) return -1;
    for (int attempt = 0; attempt < 16; ++attempt) {
      std::uint32_t cand = pool[r.index(pool.size())];
      if (cand != self) return cand;
    }
    return -1;
  };

  // Long-range links go to a nearby topic along the vocabulary line (offset
  // 1..3), never the own topic. Like real hyperlinks they connect related
  // content, so goal similarity keeps a gradient along multi-hop routes.
  auto pick_long = [&](Rng& r, std::uint32_t topic, std::uint32_t self) -> std::int64_t {
    for (int attempt = 0; attempt < 16; ++attempt) {
      std::int64_t offset = 1 + static_cast<std::int64_t>(r.below(2));
      if (r.bernoulli(0.5)) offset = -offset;
      std::int64_t t = static_cast<std::int64_t>(topic) + offset;
      if (t < 0 || t >= static_cast<std::int64_t>(spec.n_topics)) continue;
      std::int64_t cand = pick_other(r, linkable_by_topic[static_cast<std::size_t>(t)], self);
      if (cand >= 0) return cand;
    }
    return -1;
  };

  std::vector<ChunkedDoc> docs(spec.n_articles);
  for (std::uint32_t i = 0; i < spec.n_articles; ++i) {
    const ArticlePlan& plan = plans[i];
    ChunkedDoc& doc = docs[i];
    doc.title = plan.title;
    std::uint32_t paras = plan.stub ? 1 : spec.paras_per_article;
    doc.chunks.resize(paras);
    for (std::uint32_t p = 0; p < paras; ++p) {
      Chunk& chunk = doc.chunks[p];
      std::uint64_t n_words = 80 + rng.below(40);
      std::string text;
      std::uint64_t sentence_left = 6 + rng.below(8);
      // word mix: topic words give a similarity gradient across the graph,
      // shared words are stopword-like, article words make chunks of one
      // article embed close together (the agent's cue for the final hops)
      for (std::uint64_t w = 0; w < n_words; ++w) {
        double r = rng.next_double();
        std::string word = r < 0.62   ? topic_word(rng, plan.topic)
                           : r < 0.80 ? shared_word(rng)
                                      : article_word(rng, i);
        if (!text.empty()) text.push_back(' ');
        text += word;
        if (--sentence_left == 0 || w + 1 == n_words) {
          text.push_back('.');
          sentence_left = 6 + rng.below(8);
        }
      }
      if (rng.bernoulli(0.08)) {
        std::int64_t target = pick_other(rng, linkable_by_topic[plan.topic], i);
        if (target >= 0) text += " " + plans[target].title + ".";
      }
      chunk.text = std::move(text);

      std::vector<WordRange> words = word_ranges(chunk.text);
      auto add_link = [&](std::int64_t target, std::size_t word_idx) {
        if (target < 0 || word_idx >= words.size()) return;
        chunk.links.push_back({plans[target].title, words[word_idx].begin, words[word_idx].end});
      };
      // Several link attempts per paragraph keep the out-degree high enough
      // that a budgeted DFS cannot exhaust the task-radius ball and the
      // policy has a rich action set at every step. Stubs link out more: a
      // healthy share of all in-edges then comes from zero-in-degree nodes,
      // which is what traps reverse walks.
      std::size_t intra_attempts = plan.stub ? 4 : 3;
      for (std::size_t attempt = 0; attempt < intra_attempts; ++attempt) {
        if (rng.bernoulli(spec.p_intra)) {
          add_link(pick_other(rng, linkable_by_topic[plan.topic], i), attempt);
        }
      }
      for (std::size_t attempt = 0; attempt < 2; ++attempt) {
        if (rng.bernoulli(spec.p_long)) {
          add_link(pick_long(rng, plan.topic, i), intra_attempts + attempt);
        }
      }
    }
  }
  return docs;
}

bool weakly_connected(const Graph& g) {
  if (g.size() <= 1) return true;
  std::vector<NodeId> parent(g.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<NodeId(NodeId)> find = [&](NodeId x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (NodeId id = 0; id < g.size(); ++id) {
    for (const Edge& e : g.neighbors(id)) {
      NodeId a = find(id), b = find(e.target);
      if (a != b) parent[a] = b;
    }
  }
  NodeId root = find(0);
  for (NodeId id = 1; id < g.size(); ++id) {
    if (find(id) != root) return false;
  }
  return true;
}

Graph synth_graph(const SynthSpec& spec, BuildReport* report) {
  std::vector<ChunkedDoc> docs = synth_corpus(spec);
  for (int attempt = 0; attempt < 5; ++attempt) {
    BuildReport rep;
    Graph g = assemble_graph(docs, &rep);
    if (weakly_connected(g)) {
      if (report) *report = rep;
      return g;
    }
    // Fallback: chain hyperlinks between component representatives.
    std::vector<NodeId> parent(g.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<NodeId(NodeId)> find = [&](NodeId x) {
      while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
      }
      return x;
    };
    for (NodeId id = 0; id < g.size(); ++id) {
      for (const Edge& e : g.neighbors(id)) {
        NodeId a = find(id), b = find(e.target);
        if (a != b) parent[a] = b;
      }
    }
    std::vector<std::string> reps;  // article titles, smallest node first
    std::set<NodeId> seen_roots;
    for (NodeId id = 0; id < g.size(); ++id) {
      if (seen_roots.insert(find(id)).second) reps.push_back(g.node(id).title);
    }
    for (std::size_t k = 0; k + 1 < reps.size(); ++k) {
      for (ChunkedDoc& doc : docs) {
        if (doc.title != reps[k]) continue;
        Chunk& chunk = doc.chunks.front();
        std::vector<WordRange> words = word_ranges(chunk.text);
        chunk.links.push_back({reps[k + 1], words.front().begin, words.front().end});
        break;
      }
    }
  }
  throw std::runtime_error("synth_graph: could not connect graph after retries");
}

std::pair<Graph, Graph> split_disjoint(const Graph& g) {
  if (g.size() < 2) throw std::invalid_argument("split_disjoint requires >= 2 nodes");

  std::vector<NodeId> order(g.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::size_t> in_degree(g.size());
  for (NodeId id = 0; id < g.size(); ++id) in_degree[id] = g.reverse_neighbors(id).size();
  // In-degree ties are broken by a hash of the id, not the id itself:
  // consecutive ids are chain neighbors, and id-ordered ties would give them
  // strictly alternating parity, shredding both halves into fragments.
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    if (in_degree[a] != in_degree[b]) return in_degree[a] > in_degree[b];
    return mix64(a) < mix64(b);
  });
  // rank r (1-based): odd -> train, even -> eval
  std::vector<std::uint8_t> parity(g.size());
  for (std::size_t r = 0; r < order.size(); ++r) parity[order[r]] = (r + 1) % 2;

  auto grow = [&](NodeId seed, std::uint8_t want) {
    std::vector<std::uint8_t> taken(g.size(), 0);
    std::vector<NodeId> queue{seed};
    taken[seed] = 1;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      NodeId u = queue[qi];
      auto try_add = [&](NodeId v) {
        if (!taken[v] && parity[v] == want) {
          taken[v] = 1;
          queue.push_back(v);
        }
      };
      for (const Edge& e : g.neighbors(u)) try_add(e.target);
      for (NodeId v : g.reverse_neighbors(u)) try_add(v);
    }
    return taken;
  };

  auto build_side = [&](const std::vector<std::uint8_t>& taken) {
    std::vector<NodeId> remap(g.size(), kInvalidNode);
    std::vector<Node> nodes;
    for (NodeId id = 0; id < g.size(); ++id) {
      if (!taken[id]) continue;
      remap[id] = static_cast<NodeId>(nodes.size());
      Node n = g.node(id);
      n.out.clear();
      nodes.push_back(std::move(n));
    }
    for (NodeId id = 0; id < g.size(); ++id) {
      if (!taken[id]) continue;
      for (const Edge& e : g.neighbors(id)) {
        if (taken[e.target]) nodes[remap[id]].out.push_back({e.type, remap[e.target]});
      }
    }
    return Graph(std::move(nodes));
  };

  std::vector<std::uint8_t> train_taken = grow(order[0], parity[order[0]]);
  std::vector<std::uint8_t> eval_taken = grow(order[1], parity[order[1]]);
  return {build_side(train_taken), build_side(eval_taken)};
}

std::vector<RawDocument> read_corpus_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open corpus file '" + path + "'");
  std::vector<RawDocument> docs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw UsageError("corpus '" + path + "' line " + std::to_string(lineno) + ": " + e.what());
    }
    RawDocument doc;
    doc.doc_id = j.value("doc_id", "");
    doc.title = j.at("title").get<std::string>();
    doc.body = j.at("body").get<std::string>();
    if (j.contains("links")) {
      for (const auto& l : j.at("links")) {
        LinkSpan span;
        span.target_title = l.at("target_title").get<std::string>();
        span.char_start = l.at("char_start").get<std::size_t>();
        span.char_end = l.at("char_end").get<std::size_t>();
        if (span.char_start >= span.char_end || span.char_end > doc.body.size()) {
          throw UsageError("corpus '" + path + "' line " + std::to_string(lineno) +
                           ": link span out of range");
        }
        doc.links.push_back(std::move(span));
      }
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

void write_corpus_jsonl(const std::string& path, const std::vector<RawDocument>& docs) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw UsageError("cannot open '" + path + "' for writing");
  for (const RawDocument& doc : docs) {
    nlohmann::json j;
    j["doc_id"] = doc.doc_id;
    j["title"] = doc.title;
    j["body"] = doc.body;
    nlohmann::json links = nlohmann::json::array();
    for (const LinkSpan& l : doc.links) {
      links.push_back({{"target_title", l.target_title},
                       {"char_start", l.char_start},
                       {"char_end", l.char_end}});
    }
    j["links"] = std::move(links);
    out << j.dump() << '\n';
  }
}

}  // namespace navkit

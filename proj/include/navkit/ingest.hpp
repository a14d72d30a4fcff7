#pragma once
// Corpus ingestion: chunk linked documents into ~100-word nodes, extract
// typed edges (next/prev chains, hyperlinks to the target article's first
// chunk, exact-title mention edges), filter short documents, and build the
// navigation graph. Also: seeded synthetic corpora for desk-scale runs and
// the parity-based disjoint train/eval split.
//
// Corpus input is JSON lines, one document per line:
//   {"doc_id": "...", "title": "...", "body": "...",
//    "links": [{"target_title": "...", "char_start": 10, "char_end": 18}]}

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "navkit/graph.hpp"

namespace navkit {

struct LinkSpan {
  std::string target_title;
  std::size_t char_start = 0;
  std::size_t char_end = 0;
};

struct RawDocument {
  std::string doc_id;
  std::string title;
  std::string body;
  std::vector<LinkSpan> links;
};

struct Chunk {
  std::string text;
  std::vector<LinkSpan> links;  // offsets relative to this chunk
};

// Chunked document ready for graph assembly.
struct ChunkedDoc {
  std::string title;
  std::vector<Chunk> chunks;
};

struct BuildReport {
  std::uint64_t docs_in = 0;
  std::uint64_t docs_filtered = 0;  // under the 200-character body filter
  std::uint64_t nodes = 0;
  std::uint64_t edges_by_type[kEdgeTypeCount] = {0, 0, 0, 0};
  std::uint64_t dropped_links = 0;  // hyperlink targets absent from corpus
  std::string to_text() const;
};

// Splits body into ~target_words chunks, cutting at a sentence boundary when
// one lies within +/-20 words of the target, otherwise at a whitespace.
// Chunks are contiguous substrings (their concatenation equals body); each
// link is assigned to the chunk containing its start offset.
std::vector<Chunk> chunk_document(const RawDocument& doc, std::size_t target_words = 100);

// Assembles a graph from pre-chunked documents. Duplicate titles are an
// error; link targets missing from the corpus are dropped and counted.
Graph assemble_graph(const std::vector<ChunkedDoc>& docs, BuildReport* report = nullptr);

// Filter (<200 chars), chunk, assemble.
Graph build_graph(const std::vector<RawDocument>& corpus, BuildReport* report = nullptr);

struct SynthSpec {
  std::uint32_t n_articles = 250;
  std::uint32_t paras_per_article = 8;
  std::uint32_t vocab_size = 6000;
  std::uint32_t n_topics = 20;
  double p_intra = 0.9;  // per-paragraph chance of an intra-topic hyperlink
  double p_long = 0.1;   // per-paragraph chance of a long-range hyperlink
  std::uint64_t seed = 1;
};

// Deterministic synthetic graph. Articles are grouped into topics sharing a
// vocabulary slice, so hashed bag-of-words embeddings carry navigable
// semantics. When n_articles >= 20, every 25th article is a one-paragraph
// "stub" that nothing links to: those nodes have zero in-edges and trap
// reverse walks. If the result is not weakly connected, hyperlinks chaining
// component representatives are added and the graph rebuilt.
Graph synth_graph(const SynthSpec& spec, BuildReport* report = nullptr);

// Generates the raw corpus behind synth_graph (used by the claims tooling).
std::vector<ChunkedDoc> synth_corpus(const SynthSpec& spec);

// Size of the stopword-like shared vocabulary head (words w00000..w<n-1>
// drawn by every topic).
std::uint64_t synth_shared_vocab(const SynthSpec& spec);

// Parity split: rank nodes by in-degree (ties by id), odd ranks seed the
// train side and even ranks the eval side; each side grows from its seed by
// repeatedly absorbing same-parity neighbors (either direction), then keeps
// only edges between retained nodes. Node ids are renumbered densely;
// article ids, titles and para indices keep their source values, so split
// subgraphs may hold non-consecutive para indices of an article.
std::pair<Graph, Graph> split_disjoint(const Graph& g);

std::vector<RawDocument> read_corpus_jsonl(const std::string& path);
void write_corpus_jsonl(const std::string& path, const std::vector<RawDocument>& docs);

bool weakly_connected(const Graph& g);

}  // namespace navkit

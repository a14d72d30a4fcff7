#pragma once
// Immutable navigation graph: text nodes with typed out-edges, lazily built
// reverse adjacency, BFS shortest paths, and a binary serialization format.
//
// File format (graph.navg), all integers little-endian:
//   ┌──────────────────────────────────────────────────┐
//   │ magic "NAVG" (4 bytes)                           │
//   │ u32 version = 1                                  │
//   │ u64 node_count                                   │
//   │ u64 offsets[node_count + 1]  (into record area)  │
//   │ records, one per node:                           │
//   │   varint article_id, varint para_index           │
//   │   varint title_len, title bytes                  │
//   │   varint text_len, text bytes                    │
//   │   varint edge_count, then per edge:              │
//   │     u8 edge_type, signed varint target delta     │
//   └──────────────────────────────────────────────────┘
// Edge targets are delta-encoded in storage order (zigzag varints, previous
// target starts at 0). The offset table gives O(1) access to any record;
// identical graphs serialize to identical bytes.
//
// The graph is immutable after build/load: concurrent readers need no
// synchronization. Reverse adjacency (the exact transpose of the forward
// adjacency) is built on demand, once, behind a std::once_flag.

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace navkit {

using NodeId = std::uint32_t;
inline constexpr NodeId kInvalidNode = 0xFFFFFFFFu;

enum class EdgeType : std::uint8_t { Hyperlink = 0, Next = 1, Prev = 2, Mention = 3 };
inline constexpr std::size_t kEdgeTypeCount = 4;

std::string_view edge_type_name(EdgeType t);

struct Edge {
  EdgeType type;
  NodeId target;
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Node {
  std::uint32_t article_id = 0;
  std::uint32_t para_index = 0;
  std::string title;
  std::string text;
  std::vector<Edge> out;
};

class Graph {
 public:
  Graph() = default;
  explicit Graph(std::vector<Node> nodes);

  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }

  const Node& node(NodeId id) const {
    check_id(id);
    return nodes_[id];
  }

  // Out-edges in storage order.
  std::span<const Edge> neighbors(NodeId id) const {
    check_id(id);
    return nodes_[id].out;
  }

  // In-neighbors (exact transpose of the forward adjacency). Duplicates
  // appear once per distinct (type, source) edge, mirroring out_edges.
  std::span<const NodeId> reverse_neighbors(NodeId id) const;

  // Minimal-edge-count path src..dst of length <= cap, or nullopt.
  // Unweighted edges make BFS the exact special case of Dijkstra.
  std::optional<std::vector<NodeId>> shortest_path(NodeId src, NodeId dst,
                                                   std::uint32_t cap) const;

  // NodeId of the first chunk of the article with this exact title,
  // or kInvalidNode.
  NodeId find_title(std::string_view title) const;

  std::uint64_t edge_count() const;

  void save(const std::string& path) const;
  static Graph load(const std::string& path);

  // One JSON object per line, for debugging.
  void dump_jsonl(const std::string& path) const;

  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  // Lazy reverse adjacency lives behind a pointer so Graph stays movable.
  struct ReverseAdj {
    std::once_flag once;
    std::vector<std::vector<NodeId>> lists;
  };

  void check_id(NodeId id) const;
  void build_title_map();
  void ensure_reverse() const;

  std::vector<Node> nodes_;
  std::unordered_map<std::string, NodeId> title_to_first_chunk_;
  mutable std::unique_ptr<ReverseAdj> reverse_ = std::make_unique<ReverseAdj>();
};

}  // namespace navkit

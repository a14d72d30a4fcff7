#include "navkit/graph.hpp"

#include <algorithm>
#include <cstring>
#include <deque>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "navkit/error.hpp"

namespace navkit {

namespace {

// ---- little-endian primitives & varints -----------------------------------

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_varint(std::string& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<char>((v & 0x7F) | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<char>(v));
}

void put_svarint(std::string& out, std::int64_t v) {
  // zigzag
  put_varint(out, (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63));
}

struct Reader {
  const unsigned char* data;
  std::size_t size;
  std::size_t pos = 0;

  [[noreturn]] void truncated() const {
    throw UsageError("graph file: unexpected end of file at offset " + std::to_string(pos));
  }

  std::uint8_t u8() {
    if (pos + 1 > size) truncated();
    return data[pos++];
  }

  std::uint32_t u32() {
    if (pos + 4 > size) truncated();
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data[pos + i]) << (8 * i);
    pos += 4;
    return v;
  }

  std::uint64_t u64() {
    if (pos + 8 > size) truncated();
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data[pos + i]) << (8 * i);
    pos += 8;
    return v;
  }

  std::uint64_t varint() {
    std::uint64_t v = 0;
    int shift = 0;
    for (;;) {
      if (pos >= size) truncated();
      unsigned char b = data[pos++];
      v |= static_cast<std::uint64_t>(b & 0x7F) << shift;
      if ((b & 0x80) == 0) return v;
      shift += 7;
      if (shift > 63) throw UsageError("graph file: varint overflow at offset " + std::to_string(pos));
    }
  }

  std::int64_t svarint() {
    std::uint64_t z = varint();
    return static_cast<std::int64_t>(z >> 1) ^ -static_cast<std::int64_t>(z & 1);
  }

  std::string bytes(std::size_t n) {
    if (pos + n > size) truncated();
    std::string s(reinterpret_cast<const char*>(data + pos), n);
    pos += n;
    return s;
  }
};

constexpr char kMagic[4] = {'N', 'A', 'V', 'G'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

std::string_view edge_type_name(EdgeType t) {
  switch (t) {
    case EdgeType::Hyperlink: return "Hyperlink";
    case EdgeType::Next: return "Next";
    case EdgeType::Prev: return "Prev";
    case EdgeType::Mention: return "Mention";
  }
  return "?";
}

Graph::Graph(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    for (const Edge& e : nodes_[id].out) {
      if (e.target >= nodes_.size()) {
        throw std::invalid_argument("edge target " + std::to_string(e.target) +
                                    " out of range for graph of " + std::to_string(nodes_.size()) +
                                    " nodes");
      }
      if (e.target == id) {
        throw std::invalid_argument("self-loop at node " + std::to_string(id));
      }
    }
  }
  build_title_map();
}

void Graph::check_id(NodeId id) const {
  if (id >= nodes_.size()) throw std::out_of_range("unknown node " + std::to_string(id));
}

void Graph::build_title_map() {
  title_to_first_chunk_.clear();
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    const Node& n = nodes_[id];
    if (n.para_index == 0) title_to_first_chunk_.emplace(n.title, id);
  }
}

void Graph::ensure_reverse() const {
  std::call_once(reverse_->once, [this] {
    auto& lists = reverse_->lists;
    lists.assign(nodes_.size(), {});
    for (NodeId id = 0; id < nodes_.size(); ++id) {
      for (const Edge& e : nodes_[id].out) lists[e.target].push_back(id);
    }
  });
}

std::span<const NodeId> Graph::reverse_neighbors(NodeId id) const {
  check_id(id);
  ensure_reverse();
  return reverse_->lists[id];
}

std::optional<std::vector<NodeId>> Graph::shortest_path(NodeId src, NodeId dst,
                                                        std::uint32_t cap) const {
  check_id(src);
  check_id(dst);
  if (src == dst) return std::vector<NodeId>{src};
  if (cap == 0) return std::nullopt;

  std::vector<NodeId> parent(nodes_.size(), kInvalidNode);
  std::vector<std::uint32_t> dist(nodes_.size(), 0);
  std::deque<NodeId> queue;
  parent[src] = src;
  queue.push_back(src);
  while (!queue.empty()) {
    NodeId u = queue.front();
    queue.pop_front();
    if (dist[u] >= cap) continue;
    for (const Edge& e : nodes_[u].out) {
      NodeId v = e.target;
      if (parent[v] != kInvalidNode) continue;
      parent[v] = u;
      dist[v] = dist[u] + 1;
      if (v == dst) {
        std::vector<NodeId> path;
        for (NodeId w = dst; w != src; w = parent[w]) path.push_back(w);
        path.push_back(src);
        std::reverse(path.begin(), path.end());
        return path;
      }
      queue.push_back(v);
    }
  }
  return std::nullopt;
}

NodeId Graph::find_title(std::string_view title) const {
  auto it = title_to_first_chunk_.find(std::string(title));
  return it == title_to_first_chunk_.end() ? kInvalidNode : it->second;
}

std::uint64_t Graph::edge_count() const {
  std::uint64_t n = 0;
  for (const Node& node : nodes_) n += node.out.size();
  return n;
}

void Graph::save(const std::string& path) const {
  std::string records;
  std::vector<std::uint64_t> offsets;
  offsets.reserve(nodes_.size() + 1);
  for (const Node& n : nodes_) {
    offsets.push_back(records.size());
    put_varint(records, n.article_id);
    put_varint(records, n.para_index);
    put_varint(records, n.title.size());
    records.append(n.title);
    put_varint(records, n.text.size());
    records.append(n.text);
    put_varint(records, n.out.size());
    std::int64_t prev = 0;
    for (const Edge& e : n.out) {
      records.push_back(static_cast<char>(e.type));
      put_svarint(records, static_cast<std::int64_t>(e.target) - prev);
      prev = static_cast<std::int64_t>(e.target);
    }
  }
  offsets.push_back(records.size());

  std::string header;
  header.append(kMagic, 4);
  put_u32(header, kVersion);
  put_u64(header, nodes_.size());
  for (std::uint64_t off : offsets) put_u64(header, off);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot open '" + path + "' for writing");
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(records.data(), static_cast<std::streamsize>(records.size()));
  if (!out) throw std::runtime_error("short write to '" + path + "'");
}

Graph Graph::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open graph file '" + path + "'");
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  Reader r{reinterpret_cast<const unsigned char*>(buf.data()), buf.size()};
  if (buf.size() < 4 || std::memcmp(buf.data(), kMagic, 4) != 0) {
    throw UsageError("graph file '" + path + "': bad magic at offset 0");
  }
  r.pos = 4;
  std::uint32_t version = r.u32();
  if (version != kVersion) {
    throw UsageError("graph file '" + path + "': unsupported version " + std::to_string(version) +
                     " (expected " + std::to_string(kVersion) + ")");
  }
  std::uint64_t count = r.u64();
  std::vector<std::uint64_t> offsets(count + 1);
  for (auto& off : offsets) off = r.u64();
  std::size_t records_start = r.pos;
  if (records_start + offsets[count] != buf.size()) {
    throw UsageError("graph file '" + path + "': record area size mismatch at offset " +
                     std::to_string(records_start) + " (file truncated or trailing bytes)");
  }

  std::vector<Node> nodes;
  nodes.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    if (r.pos != records_start + offsets[i]) {
      throw UsageError("graph file '" + path + "': bad record offset for node " +
                       std::to_string(i) + " at offset " + std::to_string(r.pos));
    }
    Node n;
    n.article_id = static_cast<std::uint32_t>(r.varint());
    n.para_index = static_cast<std::uint32_t>(r.varint());
    n.title = r.bytes(r.varint());
    n.text = r.bytes(r.varint());
    std::uint64_t edge_count = r.varint();
    n.out.reserve(edge_count);
    std::int64_t prev = 0;
    for (std::uint64_t e = 0; e < edge_count; ++e) {
      std::uint8_t type = r.u8();
      if (type >= kEdgeTypeCount) {
        throw UsageError("graph file '" + path + "': bad edge type at offset " +
                         std::to_string(r.pos - 1));
      }
      std::int64_t target = prev + r.svarint();
      if (target < 0 || static_cast<std::uint64_t>(target) >= count) {
        throw UsageError("graph file '" + path + "': edge target out of range at offset " +
                         std::to_string(r.pos));
      }
      n.out.push_back({static_cast<EdgeType>(type), static_cast<NodeId>(target)});
      prev = target;
    }
    nodes.push_back(std::move(n));
  }
  return Graph(std::move(nodes));
}

void Graph::dump_jsonl(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw UsageError("cannot open '" + path + "' for writing");
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    const Node& n = nodes_[id];
    nlohmann::json j;
    j["id"] = id;
    j["article_id"] = n.article_id;
    j["title"] = n.title;
    j["para_index"] = n.para_index;
    j["text"] = n.text;
    nlohmann::json edges = nlohmann::json::array();
    for (const Edge& e : n.out) {
      edges.push_back({std::string(edge_type_name(e.type)), e.target});
    }
    j["edges"] = std::move(edges);
    out << j.dump() << '\n';
  }
}

}  // namespace navkit

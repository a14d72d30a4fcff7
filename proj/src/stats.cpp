#include "navkit/stats.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <thread>

#include "json.hpp"
#include "navkit/error.hpp"

namespace navkit {

namespace {

Histogram from_counts(std::vector<std::uint64_t> counts) {
  Histogram h;
  h.counts = std::move(counts);
  h.boundaries.resize(h.counts.size() + 1);
  std::iota(h.boundaries.begin(), h.boundaries.end(), 0);
  h.total = std::accumulate(h.counts.begin(), h.counts.end(), std::uint64_t{0});
  return h;
}

}  // namespace

Histogram degree_histogram(const Graph& g, Direction dir) {
  std::vector<std::uint64_t> counts;
  auto bump = [&](std::size_t degree) {
    if (degree >= counts.size()) counts.resize(degree + 1, 0);
    counts[degree]++;
  };
  for (NodeId id = 0; id < g.size(); ++id) {
    bump(dir == Direction::Out ? g.neighbors(id).size() : g.reverse_neighbors(id).size());
  }
  if (counts.empty()) counts.push_back(0);
  return from_counts(std::move(counts));
}

Histogram log_binned(const Histogram& exact) {
  Histogram h;
  h.boundaries.push_back(0);
  h.boundaries.push_back(1);
  h.counts.push_back(exact.counts.empty() ? 0 : exact.counts[0]);
  std::uint64_t lo = 1;
  while (lo < exact.counts.size()) {
    std::uint64_t hi = lo * 2;
    std::uint64_t c = 0;
    for (std::uint64_t v = lo; v < hi && v < exact.counts.size(); ++v) c += exact.counts[v];
    h.boundaries.push_back(hi);
    h.counts.push_back(c);
    lo = hi;
  }
  h.total = exact.total;
  return h;
}

SplResult estimate_spl(const Graph& g, std::size_t n_sources, std::uint32_t cap,
                       unsigned workers) {
  if (n_sources > g.size()) throw std::invalid_argument("estimate_spl: n_sources > node count");

  std::vector<NodeId> order(g.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::size_t> in_deg(g.size());
  for (NodeId id = 0; id < g.size(); ++id) in_deg[id] = g.reverse_neighbors(id).size();
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    if (in_deg[a] != in_deg[b]) return in_deg[a] > in_deg[b];
    return a < b;
  });
  order.resize(n_sources);

  auto bfs_counts = [&](NodeId src) {
    std::vector<std::uint64_t> counts(cap + 1, 0);
    std::vector<std::uint32_t> dist(g.size(), 0xFFFFFFFFu);
    std::deque<NodeId> queue;
    dist[src] = 0;
    counts[0]++;
    queue.push_back(src);
    while (!queue.empty()) {
      NodeId u = queue.front();
      queue.pop_front();
      if (dist[u] >= cap) continue;
      for (const Edge& e : g.neighbors(u)) {
        if (dist[e.target] != 0xFFFFFFFFu) continue;
        dist[e.target] = dist[u] + 1;
        counts[dist[e.target]]++;
        queue.push_back(e.target);
      }
    }
    return counts;
  };

  std::vector<std::uint64_t> counts(cap + 1, 0);
  if (workers <= 1 || order.size() < 2) {
    for (NodeId src : order) {
      auto c = bfs_counts(src);
      for (std::size_t i = 0; i <= cap; ++i) counts[i] += c[i];
    }
  } else {
    // histogram merge is associative, so sharding sources is safe
    std::vector<std::vector<std::uint64_t>> partial(workers,
                                                    std::vector<std::uint64_t>(cap + 1, 0));
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        for (std::size_t i = w; i < order.size(); i += workers) {
          auto c = bfs_counts(order[i]);
          for (std::size_t k = 0; k <= cap; ++k) partial[w][k] += c[k];
        }
      });
    }
    for (auto& t : threads) t.join();
    for (const auto& p : partial) {
      for (std::size_t k = 0; k <= cap; ++k) counts[k] += p[k];
    }
  }

  SplResult result;
  result.hist = from_counts(std::move(counts));
  result.sources = n_sources;
  result.pairs = static_cast<std::uint64_t>(n_sources) * g.size();
  result.reached = result.hist.total;
  std::uint64_t half = (result.reached + 1) / 2;
  std::uint64_t cum = 0;
  for (std::size_t l = 0; l < result.hist.counts.size(); ++l) {
    cum += result.hist.counts[l];
    if (cum >= half && half > 0) {
      result.median = static_cast<std::uint32_t>(l);
      break;
    }
  }
  return result;
}

GraphDiff graph_diff(const Graph& a, const Graph& b) {
  using NodeKey = std::pair<std::string, std::uint32_t>;  // (title, para)
  auto index_nodes = [](const Graph& g) {
    std::map<NodeKey, NodeId> m;
    for (NodeId id = 0; id < g.size(); ++id) {
      m.emplace(NodeKey{g.node(id).title, g.node(id).para_index}, id);
    }
    return m;
  };
  auto titles = [](const Graph& g) {
    std::set<std::string> t;
    for (NodeId id = 0; id < g.size(); ++id) t.insert(g.node(id).title);
    return t;
  };

  auto nodes_a = index_nodes(a);
  auto nodes_b = index_nodes(b);
  auto titles_a = titles(a);
  auto titles_b = titles(b);

  GraphDiff d;
  for (const auto& t : titles_b) {
    if (!titles_a.count(t)) d.new_articles++;
  }
  for (const auto& t : titles_a) {
    if (!titles_b.count(t)) d.deleted_articles++;
  }

  auto edge_key_set = [](const Graph& g, NodeId id) {
    std::set<std::tuple<std::uint8_t, std::string, std::uint32_t>> s;
    for (const Edge& e : g.neighbors(id)) {
      const Node& t = g.node(e.target);
      s.insert({static_cast<std::uint8_t>(e.type), t.title, t.para_index});
    }
    return s;
  };

  std::vector<std::uint64_t> change_counts;
  for (const auto& [key, id_a] : nodes_a) {
    auto it = nodes_b.find(key);
    if (it == nodes_b.end()) {
      d.deleted_nodes++;
      continue;
    }
    d.common_nodes++;
    auto ea = edge_key_set(a, id_a);
    auto eb = edge_key_set(b, it->second);
    std::size_t common = 0;
    for (const auto& k : ea) common += eb.count(k);
    std::size_t change = (ea.size() - common) + (eb.size() - common);
    if (change >= change_counts.size()) change_counts.resize(change + 1, 0);
    change_counts[change]++;
  }
  for (const auto& [key, id_b] : nodes_b) {
    if (!nodes_a.count(key)) d.new_nodes++;
  }
  if (change_counts.empty()) change_counts.push_back(0);
  d.edge_changes = from_counts(std::move(change_counts));
  return d;
}

void write_histogram_csv(const std::string& path, const Histogram& h) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw UsageError("cannot open '" + path + "' for writing");
  out << "bucket,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out << h.boundaries[i] << ',' << h.counts[i] << '\n';
  }
}

std::string diff_to_json(const GraphDiff& d) {
  nlohmann::json j;
  j["new_articles"] = d.new_articles;
  j["deleted_articles"] = d.deleted_articles;
  j["new_nodes"] = d.new_nodes;
  j["deleted_nodes"] = d.deleted_nodes;
  j["common_nodes"] = d.common_nodes;
  nlohmann::json hist = nlohmann::json::array();
  for (std::size_t i = 0; i < d.edge_changes.counts.size(); ++i) {
    hist.push_back({d.edge_changes.boundaries[i], d.edge_changes.counts[i]});
  }
  j["edge_change_histogram"] = std::move(hist);
  return j.dump(2);
}

}  // namespace navkit

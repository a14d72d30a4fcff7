// Temporary diagnostics for tuning the synthetic benchmark. Not installed.

#include <algorithm>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "navkit/agents.hpp"
#include "navkit/embed.hpp"
#include "navkit/graph.hpp"
#include "navkit/ingest.hpp"
#include "navkit/retrieval.hpp"
#include "navkit/tokenize.hpp"

using namespace navkit;

namespace {

bool is_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

bool is_article_word(std::string_view tok) {
  if (tok.size() < 4 || tok[0] != 'a') return false;
  std::size_t w = tok.find('w', 1);
  if (w == std::string_view::npos) return false;
  return is_digits(tok.substr(1, w - 1)) && is_digits(tok.substr(w + 1));
}

bool is_vocab_word(std::string_view tok) {
  return tok.size() >= 2 && tok[0] == 'w' && is_digits(tok.substr(1));
}

void probe_spec(const SynthSpec& spec) {
  Graph g = synth_graph(spec);
  Bm25Index index = build_index(g);
  std::printf("== articles %u paras %u p_intra %.2f p_long %.2f: nodes %zu edges %llu\n",
              spec.n_articles, spec.paras_per_article, spec.p_intra, spec.p_long, g.size(),
              static_cast<unsigned long long>(g.edge_count()));

  {
    Rng rng(4);
    double total = 0;
    int degenerate = 0;
    for (int i = 0; i < 3000; ++i) {
      Trajectory t = sample_reverse(g, 5, rng);
      total += t.steps();
      degenerate += t.degenerate;
    }
    int zero_in = 0;
    for (NodeId id = 0; id < g.size(); ++id) zero_in += g.reverse_neighbors(id).empty();
    std::printf("   reverse mean steps %.2f, degenerate %.1f%%, zero-in %d\n", total / 3000,
                degenerate / 30.0, zero_in);
  }

  {
    Embedder embedder{EmbedderConfig{EmbedderKind::HashedBow, 512, 0x5EED}};
    EmbeddingTable table = EmbeddingTable::build(g, embedder);
    TaskSpec task;
    task.steps = 5;
    task.budget = 50;
    task.episodes = 400;
    task.seed = 5150;
    double rnd = evaluate(task, RandomAgent{}, g, table, &embedder).success_rate;
    double gdfs = evaluate(task, GreedyDfsAgent{}, g, table, &embedder).success_rate;
    double grd = evaluate(task, GreedyAgent{}, g, table, &embedder).success_rate;
    double rdfs = evaluate(task, RandomDfsAgent{}, g, table, &embedder).success_rate;
    std::printf("   random %.3f greedy %.3f random-dfs %.3f greedy-dfs %.3f\n", rnd, grd, rdfs,
                gdfs);

    // cosine vs topic distance
    {
      Rng crng(9);
      std::map<int, std::pair<double, int>> by_dist;
      for (int s = 0; s < 4000; ++s) {
        NodeId x = static_cast<NodeId>(crng.below(g.size()));
        NodeId y = static_cast<NodeId>(crng.below(g.size()));
        auto topic_of = [&](NodeId id) {
          // titles look like "wNNNNN wNNNNN aK"; article topic = (K/2) % 20
          const std::string& t = g.node(id).title;
          std::size_t pos = t.rfind(" a");
          int k = std::atoi(t.c_str() + pos + 2);
          return (k / 2) % 20;
        };
        int d = std::abs(topic_of(x) - topic_of(y));
        if (d > 6) continue;
        auto& acc = by_dist[d];
        acc.first += cosine_similarity(table.row(x), table.row(y));
        acc.second++;
      }
      std::printf("   cos by topic dist:");
      for (auto& [d, acc] : by_dist) std::printf(" %d:%.3f", d, acc.first / acc.second);
      std::printf("\n");
    }

    TrainConfig cfg;
    cfg.trajectory_steps = 5;
    cfg.update_steps = 6000;
    cfg.batch_size = 64;
    cfg.seed = 11;
    TrainResult fwd = train_bc(g, table, embedder, SamplerKind::Forward, GoalMode::NodeText, cfg);
    double head_probe = 0, tail_probe = 0, head_loss = 0, tail_loss = 0;
    for (int i = 0; i < 100; ++i) {
      head_probe += fwd.log[i].probe;
      tail_probe += fwd.log[fwd.log.size() - 1 - i].probe;
      head_loss += fwd.log[i].loss;
      tail_loss += fwd.log[fwd.log.size() - 1 - i].loss;
    }
    std::printf("   train loss %.3f->%.3f probe %.3f->%.3f\n", head_loss / 100, tail_loss / 100,
                head_probe / 100, tail_probe / 100);
    double pol = evaluate(task, PolicyAgent{&fwd.params}, g, table, &embedder).success_rate;
    TrainResult rev = train_bc(g, table, embedder, SamplerKind::Reverse, GoalMode::NodeText, cfg);
    double rpol = evaluate(task, PolicyAgent{&rev.params}, g, table, &embedder).success_rate;
    std::printf("   rfbc(6000up) %.3f reverse-policy %.3f\n", pol, rpol);

    // success stratified by start->goal distance
    {
      std::vector<EpisodeTrace> traces;
      evaluate(task, PolicyAgent{&fwd.params}, g, table, &embedder, 1, &traces);
      std::map<int, std::pair<int, int>> by_d;
      double mean_steps = 0;
      int wins = 0;
      for (auto& t : traces) {
        auto p = g.shortest_path(t.start, t.target, 50);
        int d = p ? static_cast<int>(p->size()) - 1 : 99;
        by_d[d].second++;
        if (t.result.success) {
          by_d[d].first++;
          mean_steps += t.result.steps_used;
          ++wins;
        }
      }
      std::printf("   policy success by distance:");
      for (auto& [d, wl] : by_d) std::printf(" %d:%.2f(%d)", d, 1.0 * wl.first / wl.second, wl.second);
      std::printf(" | mean win steps %.1f\n", wins ? mean_steps / wins : 0.0);
    }
  }

  {
    Rng rng(777);
    int tried = 0, viable = 0, gold_hit = 0, band = 0, ok = 0;
    double dsum = 0;
    for (int attempt = 0; attempt < 3000 && ok < 300; ++attempt) {
      ++tried;
      NodeId gold = static_cast<NodeId>(rng.below(g.size()));
      const Node& node = g.node(gold);
      auto sentences = split_sentences(node.text);
      if (sentences.empty()) continue;
      const std::string& sentence = sentences[rng.index(sentences.size())];
      auto toks = tokenize(sentence);
      if (toks.size() < 8) continue;
      std::vector<std::string> aw, sw;
      for (auto& t : toks) {
        if (is_article_word(t)) aw.push_back(t);
        else if (is_vocab_word(t)) {
          std::uint64_t idx = 0;
          for (char c : std::string_view(t).substr(1)) idx = idx * 10 + (c - '0');
          if (idx < synth_shared_vocab(spec)) sw.push_back(t);
        }
      }
      std::sort(aw.begin(), aw.end());
      aw.erase(std::unique(aw.begin(), aw.end()), aw.end());
      std::sort(sw.begin(), sw.end());
      sw.erase(std::unique(sw.begin(), sw.end()), sw.end());
      (void)aw;
      if (sw.size() < 4) continue;
      // cross-article claim: title of an article that links to gold's article
      NodeId gold_head = g.find_title(node.title);
      std::vector<std::uint32_t> linkers;
      for (NodeId src : g.reverse_neighbors(gold_head)) {
        if (g.node(src).article_id != node.article_id) linkers.push_back(src);
      }
      if (linkers.empty()) continue;
      ++viable;
      const Node& m = g.node(linkers[rng.index(linkers.size())]);
      std::string text = m.title;
      for (std::size_t i = 0; i < std::min<std::size_t>(4, sw.size()); ++i) text += " " + sw[i];
      auto starts = bm25_top_k(index, text, 5);
      if (starts.size() < 3) continue;
      bool bad = false;
      double sum = 0;
      for (auto& [s, score] : starts) {
        if (s == gold) {
          ++gold_hit;
          bad = true;
          break;
        }
        auto p = g.shortest_path(s, gold, 25);
        if (!p || p->size() < 2) {
          bad = true;
          break;
        }
        sum += static_cast<double>(p->size() - 1);
      }
      if (bad) continue;
      double mean = sum / starts.size();
      if (mean < 2.5 || mean > 6.5) {
        ++band;
        continue;
      }
      ++ok;
      dsum += mean;
    }
    std::printf("   claims: tried %d viable %d gold_in_top5 %d band_rejects %d ok %d mean %.2f\n",
                tried, viable, gold_hit, band, ok, ok ? dsum / ok : 0.0);
  }
}

}  // namespace

int main() {
  SynthSpec base;
  base.vocab_size = 900;
  base.n_topics = 20;
  base.seed = 20177331;

  SynthSpec a = base;
  a.n_articles = 1000;
  a.paras_per_article = 3;
  a.p_intra = 0.9;
  a.p_long = 0.7;
  probe_spec(a);



  return 0;
}

// navkit: build navigation graphs from linked corpora, train link-selection
// policies by behavioral cloning, evaluate them against baseline agents, and
// run the BM25 -> navigate -> re-rank evidence pipeline.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "navkit/agents.hpp"
#include "navkit/embed.hpp"
#include "navkit/error.hpp"
#include "navkit/graph.hpp"
#include "navkit/ingest.hpp"
#include "navkit/kernels.hpp"
#include "navkit/policy.hpp"
#include "navkit/retrieval.hpp"
#include "navkit/stats.hpp"

namespace fs = std::filesystem;
using namespace navkit;

namespace {

struct CommonOpts {
  std::string out_dir;
  unsigned workers = 1;
  std::string kernels = "auto";
};

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("-o,--out", c.out_dir, "output directory")->required();
  cmd->add_option("--workers", c.workers, "worker threads (results are identical for any count)");
  cmd->add_option("--kernels", c.kernels, "vector kernel backend: auto|scalar|avx2|neon");
}

void prepare_out(const CommonOpts& c, CLI::App* cmd) {
  kern::set_backend(kern::backend_from_name(c.kernels));
  fs::create_directories(c.out_dir);
  // resolved configuration lives next to the outputs for reproducibility
  std::ofstream cfg(fs::path(c.out_dir) / "resolved_config.txt", std::ios::trunc);
  cfg << cmd->config_to_str(true, false);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw UsageError("cannot open '" + path.string() + "' for writing");
  out << text;
}

struct EmbedOpts {
  std::string kind = "hashed";
  std::size_t dim = 256;
  std::uint64_t hash_seed = 0x5EED;
  std::string vectors_path;
};

void add_embed(CLI::App* cmd, EmbedOpts& e) {
  cmd->add_option("--embedder", e.kind, "embedding provider: hashed|random|precomputed");
  cmd->add_option("--dim", e.dim, "embedding dimension");
  cmd->add_option("--hash-seed", e.hash_seed, "embedder hash seed");
  cmd->add_option("--vectors", e.vectors_path, "precomputed vectors file");
}

Embedder make_embedder(const EmbedOpts& e) {
  EmbedderConfig cfg;
  cfg.kind = embedder_kind_from_name(e.kind);
  cfg.dim = e.dim;
  cfg.hash_seed = e.hash_seed;
  cfg.vectors_path = e.vectors_path;
  return Embedder(cfg);
}

PolicyParams load_checkpoint(const std::string& path, const Embedder& embedder) {
  PolicyParams p = PolicyParams::load(path);
  if (p.embedder_hash != embedder.config_hash()) {
    throw UsageError("checkpoint '" + path +
                     "' was trained with a different embedder configuration");
  }
  if (p.dim != embedder.dim()) {
    throw UsageError("checkpoint '" + path + "' dimension mismatch");
  }
  return p;
}

// ---- build ------------------------------------------------------------------

struct BuildOpts {
  CommonOpts common;
  std::string corpus;
  bool synth = false;
  bool dump_nodes = false;
  SynthSpec spec;
};

int run_build(const BuildOpts& o, CLI::App* cmd) {
  prepare_out(o.common, cmd);
  BuildReport report;
  Graph g;
  if (o.synth) {
    g = synth_graph(o.spec, &report);
  } else {
    if (o.corpus.empty()) throw UsageError("build needs --corpus FILE or --synth");
    g = build_graph(read_corpus_jsonl(o.corpus), &report);
  }
  fs::path out(o.common.out_dir);
  g.save((out / "graph.navg").string());
  write_text(out / "build_report.txt", report.to_text());
  if (o.dump_nodes) g.dump_jsonl((out / "nodes.jsonl").string());
  std::cout << report.to_text();
  return 0;
}

// ---- train ------------------------------------------------------------------

struct TrainOpts {
  CommonOpts common;
  EmbedOpts embed;
  std::string graph;
  std::string sampler = "forward";
  std::string task = "nav";
  TrainConfig cfg;
  bool rl = false;
  std::string rl_finetune;  // checkpoint to start REINFORCE from
};

int run_train(const TrainOpts& o, CLI::App* cmd) {
  prepare_out(o.common, cmd);
  Graph g = Graph::load(o.graph);
  Embedder embedder = make_embedder(o.embed);
  EmbeddingTable table = EmbeddingTable::build(g, embedder, o.common.workers);

  TrainConfig cfg = o.cfg;
  TaskSpec::Kind task = task_kind_from_name(o.task);
  cfg.multistep = task == TaskSpec::Kind::Multistep;
  GoalMode goal_mode =
      task == TaskSpec::Kind::SentenceSearch ? GoalMode::Sentence : GoalMode::NodeText;

  TrainResult result;
  if (o.rl || !o.rl_finetune.empty()) {
    std::optional<PolicyParams> init;
    if (!o.rl_finetune.empty()) init = load_checkpoint(o.rl_finetune, embedder);
    result = reinforce_train(g, table, cfg, init ? &*init : nullptr);
    result.params.embedder_hash = embedder.config_hash();
  } else {
    result = train_bc(g, table, embedder, sampler_kind_from_name(o.sampler), goal_mode, cfg,
                      o.common.workers);
  }

  fs::path out(o.common.out_dir);
  result.params.save((out / "policy.ckpt").string());
  write_train_log_csv((out / "train_log.csv").string(), result.log);
  std::cout << "trained " << result.log.size() << " updates, env steps " << result.env_steps
            << "\n";
  return 0;
}

// ---- eval -------------------------------------------------------------------

struct EvalOpts {
  CommonOpts common;
  EmbedOpts embed;
  std::string graph;
  std::string agent = "random";
  std::string checkpoint;
  std::string trace_path;
  TaskSpec task;
  std::string task_name = "nav";
};

int run_eval(const EvalOpts& o, CLI::App* cmd) {
  prepare_out(o.common, cmd);
  Graph g = Graph::load(o.graph);
  Embedder embedder = make_embedder(o.embed);
  EmbeddingTable table = EmbeddingTable::build(g, embedder, o.common.workers);

  TaskSpec task = o.task;
  task.kind = task_kind_from_name(o.task_name);

  AgentRef agent = RandomAgent{};
  PolicyParams params;
  if (o.agent == "policy") {
    if (o.checkpoint.empty()) throw UsageError("--agent policy needs --checkpoint");
    params = load_checkpoint(o.checkpoint, embedder);
    agent = PolicyAgent{&params};
  } else if (o.agent == "random") {
    agent = RandomAgent{};
  } else if (o.agent == "greedy") {
    agent = GreedyAgent{};
  } else if (o.agent == "random-dfs") {
    agent = RandomDfsAgent{};
  } else if (o.agent == "greedy-dfs") {
    agent = GreedyDfsAgent{};
  } else {
    throw UsageError("unknown agent '" + o.agent +
                     "' (valid: policy, random, greedy, random-dfs, greedy-dfs)");
  }

  std::vector<EpisodeTrace> traces;
  EvalSummary summary = evaluate(task, agent, g, table, &embedder, o.common.workers,
                                 o.trace_path.empty() ? nullptr : &traces);

  fs::path out(o.common.out_dir);
  std::ofstream csv(out / "eval.csv", std::ios::trunc);
  csv << "task,agent,T,B,episodes,success_rate,stderr\n";
  csv << task_kind_name(task.kind) << ',' << agent_name(agent) << ',' << task.steps << ','
      << task.budget << ',' << summary.episodes << ',' << summary.success_rate << ','
      << summary.stderr_ << '\n';
  if (!o.trace_path.empty()) write_trace_dump(o.trace_path, g, traces);
  std::cout << agent_name(agent) << " success " << summary.success_rate << " +/- "
            << summary.stderr_ << "\n";
  return 0;
}

// ---- retrieve ----------------------------------------------------------------

struct RetrieveOpts {
  CommonOpts common;
  EmbedOpts embed;
  std::string graph;
  std::string checkpoint;
  std::string claims;
  std::string target_encoder;
  bool train_encoder = false;
  TrainConfig cfg;
  PipelineConfig pipeline;
};

int run_retrieve(const RetrieveOpts& o, CLI::App* cmd) {
  prepare_out(o.common, cmd);
  Graph g = Graph::load(o.graph);
  Embedder embedder = make_embedder(o.embed);
  if (!embedder.supports_sentences()) {
    throw UsageError("the evidence pipeline needs a text embedder (use --embedder hashed)");
  }
  EmbeddingTable table = EmbeddingTable::build(g, embedder, o.common.workers);
  Bm25Index index = build_index(g);
  PolicyParams policy = load_checkpoint(o.checkpoint, embedder);
  std::vector<Claim> claims = read_claims_jsonl(o.claims);
  fs::path out(o.common.out_dir);

  if (o.train_encoder) {
    TargetEncoderParams init =
        o.target_encoder.empty() ? TargetEncoderParams::identity(embedder.dim(),
                                                                 embedder.config_hash())
                                 : TargetEncoderParams::load(o.target_encoder);
    FinetuneResult ft =
        finetune_target_encoder(init, claims, policy, g, table, embedder, index, o.cfg);
    ft.params.save((out / "target_encoder.navt").string());
    write_train_log_csv((out / "finetune_log.csv").string(), ft.log);
    std::cout << "finetuned target encoder on " << claims.size() << " claims ("
              << ft.skipped_claims << " skipped)\n";
    return 0;
  }

  TargetEncoderParams encoder =
      o.target_encoder.empty()
          ? TargetEncoderParams::identity(embedder.dim(), embedder.config_hash())
          : TargetEncoderParams::load(o.target_encoder);

  struct ClaimOutput {
    PipelineResult result;
    std::optional<Prf1> prf;
    std::vector<int> node_hit;  // recall@k node-exact hits, k = 1..5
  };
  std::vector<ClaimOutput> outputs(claims.size());

  auto run_claim = [&](std::size_t i) {
    const Claim& claim = claims[i];
    ClaimOutput& co = outputs[i];
    co.result = evidence_pipeline(claim, index, policy, encoder, g, table, embedder, o.pipeline);
    std::vector<std::string> predicted;
    for (const RankedEvidence& ev : co.result.top) predicted.push_back(ev.sentence);
    if (!claim.gold_sentences.empty()) {
      co.prf = prf1_at_k(predicted, claim.gold_sentences, o.pipeline.k_out);
    }
    if (!claim.gold_nodes.empty()) {
      co.node_hit.assign(5, 0);
      for (std::size_t k = 1; k <= 5; ++k) {
        bool hit = false;
        for (std::size_t r = 0; r < co.result.top.size() && r < k; ++r) {
          for (NodeId gold : claim.gold_nodes) {
            if (co.result.top[r].node == gold) hit = true;
          }
        }
        co.node_hit[k - 1] = hit ? 1 : 0;
      }
    }
  };

  if (o.common.workers <= 1) {
    for (std::size_t i = 0; i < claims.size(); ++i) run_claim(i);
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < o.common.workers; ++w) {
      threads.emplace_back([&, w] {
        for (std::size_t i = w; i < claims.size(); i += o.common.workers) run_claim(i);
      });
    }
    for (auto& t : threads) t.join();
  }

  std::ofstream results(out / "results.jsonl", std::ios::trunc);
  std::ofstream metrics(out / "metrics.csv", std::ios::trunc);
  metrics << "claim_id,p5,r5,f15,recall1,recall2,recall3,recall4,recall5\n";
  double sum_p = 0, sum_r = 0, sum_f = 0;
  std::size_t n_prf = 0;
  double sum_hit[5] = {0, 0, 0, 0, 0};
  std::size_t n_hit = 0;
  for (std::size_t i = 0; i < claims.size(); ++i) {
    const ClaimOutput& co = outputs[i];
    nlohmann::json j;
    j["id"] = claims[i].id;
    nlohmann::json sents = nlohmann::json::array();
    for (const RankedEvidence& ev : co.result.top) {
      sents.push_back({{"text", ev.sentence},
                       {"score", ev.score},
                       {"node", ev.node},
                       {"provenance", ev.provenance}});
    }
    j["sentences"] = std::move(sents);
    j["visited_nodes"] = co.result.visited_nodes;
    metrics << claims[i].id << ',';
    if (co.prf) {
      j["p5"] = co.prf->precision;
      j["r5"] = co.prf->recall;
      j["f15"] = co.prf->f1;
      metrics << co.prf->precision << ',' << co.prf->recall << ',' << co.prf->f1;
      sum_p += co.prf->precision;
      sum_r += co.prf->recall;
      sum_f += co.prf->f1;
      ++n_prf;
    } else {
      metrics << ",,";
    }
    for (std::size_t k = 0; k < 5; ++k) {
      metrics << ',';
      if (!co.node_hit.empty()) metrics << co.node_hit[k];
    }
    metrics << '\n';
    if (!co.node_hit.empty()) {
      ++n_hit;
      for (std::size_t k = 0; k < 5; ++k) sum_hit[k] += co.node_hit[k];
    }
    results << j.dump() << '\n';
  }
  metrics << "mean,";
  if (n_prf) {
    metrics << sum_p / n_prf << ',' << sum_r / n_prf << ',' << sum_f / n_prf;
  } else {
    metrics << ",,";
  }
  for (std::size_t k = 0; k < 5; ++k) {
    metrics << ',';
    if (n_hit) metrics << sum_hit[k] / n_hit;
  }
  metrics << '\n';
  if (n_prf) {
    std::cout << "P@5 " << sum_p / n_prf << "  R@5 " << sum_r / n_prf << "  F1@5 "
              << sum_f / n_prf << " over " << n_prf << " claims\n";
  }
  return 0;
}

// ---- stats -------------------------------------------------------------------

struct StatsOpts {
  CommonOpts common;
  std::string graph;
  std::string diff_graph;
  std::size_t spl_sources = 64;
  std::uint32_t spl_cap = 64;
};

int run_stats(const StatsOpts& o, CLI::App* cmd) {
  prepare_out(o.common, cmd);
  Graph g = Graph::load(o.graph);
  fs::path out(o.common.out_dir);

  Histogram out_deg = degree_histogram(g, Direction::Out);
  Histogram in_deg = degree_histogram(g, Direction::In);
  write_histogram_csv((out / "degree_out.csv").string(), out_deg);
  write_histogram_csv((out / "degree_in.csv").string(), in_deg);
  write_histogram_csv((out / "degree_out_log.csv").string(), log_binned(out_deg));
  write_histogram_csv((out / "degree_in_log.csv").string(), log_binned(in_deg));

  SplResult spl = estimate_spl(g, std::min(o.spl_sources, g.size()), o.spl_cap, o.common.workers);
  write_histogram_csv((out / "spl.csv").string(), spl.hist);
  std::ostringstream summary;
  summary << "sources: " << spl.sources << "\npairs: " << spl.pairs
          << "\nreached: " << spl.reached << "\nmedian: " << spl.median << "\n";
  write_text(out / "spl_summary.txt", summary.str());
  std::cout << summary.str();

  if (!o.diff_graph.empty()) {
    Graph g2 = Graph::load(o.diff_graph);
    write_text(out / "diff.json", diff_to_json(graph_diff(g, g2)));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"goal-conditioned navigation on linked text graphs"};
  app.require_subcommand(1);
  app.set_config("--config");

  BuildOpts build_opts;
  CLI::App* build = app.add_subcommand("build", "build a graph from a corpus or synthetic spec");
  add_common(build, build_opts.common);
  build->add_option("--corpus", build_opts.corpus, "JSON-lines corpus file");
  build->add_flag("--synth", build_opts.synth, "generate a synthetic graph");
  build->add_flag("--dump-nodes", build_opts.dump_nodes, "also write nodes.jsonl");
  build->add_option("--articles", build_opts.spec.n_articles, "synthetic article count");
  build->add_option("--paras", build_opts.spec.paras_per_article, "paragraphs per article");
  build->add_option("--vocab", build_opts.spec.vocab_size, "synthetic vocabulary size");
  build->add_option("--topics", build_opts.spec.n_topics, "topic count");
  build->add_option("--p-intra", build_opts.spec.p_intra, "intra-topic link probability");
  build->add_option("--p-long", build_opts.spec.p_long, "long-range link probability");
  build->add_option("--seed", build_opts.spec.seed, "synthetic seed");

  TrainOpts train_opts;
  CLI::App* train = app.add_subcommand("train", "train a link-selection policy");
  add_common(train, train_opts.common);
  add_embed(train, train_opts.embed);
  train->add_option("--graph", train_opts.graph, "graph file")->required();
  train->add_option("--sampler", train_opts.sampler, "forward|reverse|shortest");
  train->add_option("--task", train_opts.task, "nav|multistep|sentence");
  train->add_option("--steps", train_opts.cfg.trajectory_steps, "trajectory steps T");
  train->add_option("--updates", train_opts.cfg.update_steps, "optimizer updates");
  train->add_option("--batch", train_opts.cfg.batch_size, "batch size");
  train->add_option("--lr", train_opts.cfg.learning_rate, "learning rate");
  train->add_option("--decay", train_opts.cfg.decay, "RMSProp decay");
  train->add_option("--epsilon", train_opts.cfg.epsilon, "RMSProp epsilon");
  train->add_option("--dropout", train_opts.cfg.edge_dropout, "action dropout probability");
  train->add_option("--seed", train_opts.cfg.seed, "training seed");
  train->add_flag("--rl", train_opts.rl, "train with REINFORCE instead of cloning");
  train->add_option("--rl-finetune", train_opts.rl_finetune, "REINFORCE-finetune this checkpoint");
  train->add_option("--gamma", train_opts.cfg.gamma, "RL discount");
  train->add_option("--entropy", train_opts.cfg.entropy_bonus, "RL entropy bonus");
  train->add_option("--episode-budget", train_opts.cfg.episode_budget, "RL episode budget");

  EvalOpts eval_opts;
  CLI::App* eval = app.add_subcommand("eval", "evaluate an agent on a navigation task");
  add_common(eval, eval_opts.common);
  add_embed(eval, eval_opts.embed);
  eval->add_option("--graph", eval_opts.graph, "graph file")->required();
  eval->add_option("--agent", eval_opts.agent, "policy|random|greedy|random-dfs|greedy-dfs");
  eval->add_option("--checkpoint", eval_opts.checkpoint, "policy checkpoint");
  eval->add_option("--task", eval_opts.task_name, "nav|multistep|sentence");
  eval->add_option("--steps", eval_opts.task.steps, "task steps T");
  eval->add_option("--budget", eval_opts.task.budget, "step budget B");
  eval->add_option("--episodes", eval_opts.task.episodes, "episode count");
  eval->add_option("--seed", eval_opts.task.seed, "evaluation seed");
  eval->add_option("--trace", eval_opts.trace_path, "write per-episode trace dump to this file");

  RetrieveOpts ret_opts;
  CLI::App* retrieve = app.add_subcommand("retrieve", "run the evidence-retrieval pipeline");
  add_common(retrieve, ret_opts.common);
  add_embed(retrieve, ret_opts.embed);
  retrieve->add_option("--graph", ret_opts.graph, "graph file")->required();
  retrieve->add_option("--checkpoint", ret_opts.checkpoint, "policy checkpoint")->required();
  retrieve->add_option("--claims", ret_opts.claims, "claims JSON-lines file")->required();
  retrieve->add_option("--target-encoder", ret_opts.target_encoder, "target encoder file");
  retrieve->add_flag("--train-encoder", ret_opts.train_encoder,
                     "finetune the target encoder on these claims instead of evaluating");
  retrieve->add_option("--k-start", ret_opts.pipeline.k_start, "BM25 start nodes");
  retrieve->add_option("--nav-steps", ret_opts.pipeline.nav_steps, "navigation steps per start");
  retrieve->add_option("--k-out", ret_opts.pipeline.k_out, "ranked sentences to keep");
  retrieve->add_option("--updates", ret_opts.cfg.update_steps, "finetune updates");
  retrieve->add_option("--batch", ret_opts.cfg.batch_size, "finetune batch size");
  retrieve->add_option("--lr", ret_opts.cfg.learning_rate, "finetune learning rate");
  retrieve->add_option("--seed", ret_opts.cfg.seed, "finetune seed");

  StatsOpts stats_opts;
  CLI::App* stats = app.add_subcommand("stats", "graph statistics and snapshot diff");
  add_common(stats, stats_opts.common);
  stats->add_option("--graph", stats_opts.graph, "graph file")->required();
  stats->add_option("--diff", stats_opts.diff_graph, "second graph to diff against");
  stats->add_option("--spl-sources", stats_opts.spl_sources, "BFS sources for path lengths");
  stats->add_option("--spl-cap", stats_opts.spl_cap, "BFS depth cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (build->parsed()) return run_build(build_opts, build);
    if (train->parsed()) return run_train(train_opts, train);
    if (eval->parsed()) return run_eval(eval_opts, eval);
    if (retrieve->parsed()) return run_retrieve(ret_opts, retrieve);
    if (stats->parsed()) return run_stats(stats_opts, stats);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

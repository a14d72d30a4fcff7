// End-to-end CLI checks: exit codes, determinism, file outputs.

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "test_util.hpp"

namespace fs = std::filesystem;
using testutil::read_file;
using testutil::run_cli;
using testutil::TempDir;

namespace {

std::string fixture(const std::string& name) {
  return std::string(NAVKIT_TEST_DATA) + "/" + name;
}

}  // namespace

TEST_CASE("build from the fixture corpus is deterministic") {
  TempDir dir("cli_build");
  auto r1 = run_cli("build --corpus " + fixture("fixture_corpus.jsonl") + " -o " + dir.file("a"),
                    dir);
  REQUIRE(r1.exit_code == 0);
  auto r2 = run_cli("build --corpus " + fixture("fixture_corpus.jsonl") + " -o " + dir.file("b"),
                    dir);
  REQUIRE(r2.exit_code == 0);
  std::string g1 = read_file(dir.file("a") + "/graph.navg");
  std::string g2 = read_file(dir.file("b") + "/graph.navg");
  REQUIRE(!g1.empty());
  CHECK(g1 == g2);
  CHECK(fs::exists(dir.file("a") + "/build_report.txt"));
  CHECK(fs::exists(dir.file("a") + "/resolved_config.txt"));
}

TEST_CASE("synthetic build with the same seed is identical") {
  TempDir dir("cli_synth");
  auto r1 = run_cli("build --synth --articles 40 --seed 7 -o " + dir.file("a"), dir);
  auto r2 = run_cli("build --synth --articles 40 --seed 7 -o " + dir.file("b"), dir);
  REQUIRE(r1.exit_code == 0);
  REQUIRE(r2.exit_code == 0);
  CHECK(read_file(dir.file("a") + "/graph.navg") == read_file(dir.file("b") + "/graph.navg"));
}

TEST_CASE("missing corpus file exits 2 with a message") {
  TempDir dir("cli_missing");
  auto r = run_cli("build --corpus /nonexistent/corpus.jsonl -o " + dir.file("x"), dir);
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("train writes a checkpoint and one log row per update") {
  TempDir dir("cli_train");
  REQUIRE(run_cli("build --synth --articles 1 --paras 3 --seed 12 -o " + dir.file("g"), dir)
              .exit_code == 0);
  auto r = run_cli("train --graph " + dir.file("g") + "/graph.navg --dim 32 --updates 40 "
                   "--batch 8 --steps 2 --sampler forward -o " + dir.file("t"),
                   dir);
  REQUIRE(r.exit_code == 0);
  CHECK(fs::exists(dir.file("t") + "/policy.ckpt"));
  std::string log = read_file(dir.file("t") + "/train_log.csv");
  // header + 40 rows
  CHECK(std::count(log.begin(), log.end(), '\n') == 41);
  // the sampler choice is recorded with the run
  std::string cfg = read_file(dir.file("t") + "/resolved_config.txt");
  CHECK(cfg.find("sampler=") != std::string::npos);
  CHECK(cfg.find("forward") != std::string::npos);
}

TEST_CASE("every sampler name is accepted") {
  TempDir dir("cli_samplers");
  REQUIRE(run_cli("build --synth --articles 20 --seed 5 -o " + dir.file("g"), dir).exit_code == 0);
  for (const std::string s : {"forward", "reverse", "shortest"}) {
    auto r = run_cli("train --graph " + dir.file("g") + "/graph.navg --dim 32 --updates 3 "
                     "--batch 4 --steps 2 --sampler " + s + " -o " + dir.file("t_" + s),
                     dir);
    CHECK(r.exit_code == 0);
  }
}

TEST_CASE("unknown agent exits 2 and lists the valid ones") {
  TempDir dir("cli_agent");
  REQUIRE(run_cli("build --synth --articles 20 --seed 5 -o " + dir.file("g"), dir).exit_code == 0);
  auto r = run_cli("eval --graph " + dir.file("g") + "/graph.navg --agent wanderer --episodes 5 "
                   "-o " + dir.file("e"),
                   dir);
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("random-dfs") != std::string::npos);
}

TEST_CASE("eval is reproducible across runs and workers") {
  TempDir dir("cli_eval");
  REQUIRE(run_cli("build --synth --articles 30 --seed 6 -o " + dir.file("g"), dir).exit_code == 0);
  std::string base = "eval --graph " + dir.file("g") + "/graph.navg --agent random --dim 32 "
                     "--task nav --steps 3 --budget 20 --episodes 50 --seed 11 ";
  auto r1 = run_cli(base + "-o " + dir.file("e1"), dir);
  auto r2 = run_cli(base + "-o " + dir.file("e2"), dir);
  auto r4 = run_cli(base + "--workers 4 -o " + dir.file("e4"), dir);
  REQUIRE(r1.exit_code == 0);
  REQUIRE(r2.exit_code == 0);
  REQUIRE(r4.exit_code == 0);
  CHECK(read_file(dir.file("e1") + "/eval.csv") == read_file(dir.file("e2") + "/eval.csv"));
  CHECK(read_file(dir.file("e1") + "/eval.csv") == read_file(dir.file("e4") + "/eval.csv"));
}

TEST_CASE("trace dump follows the title (para) convention") {
  TempDir dir("cli_trace");
  REQUIRE(run_cli("build --synth --articles 20 --seed 9 -o " + dir.file("g"), dir).exit_code == 0);
  auto r = run_cli("eval --graph " + dir.file("g") + "/graph.navg --agent random --dim 32 "
                   "--task nav --steps 2 --budget 10 --episodes 3 --seed 2 --trace " +
                   dir.file("trace.txt") + " -o " + dir.file("e"),
                   dir);
  REQUIRE(r.exit_code == 0);
  std::string trace = read_file(dir.file("trace.txt"));
  // entries are "Title (para_index)"
  std::size_t open = trace.find(" (");
  REQUIRE(open != std::string::npos);
  std::size_t close = trace.find(')', open);
  REQUIRE(close != std::string::npos);
  for (std::size_t i = open + 2; i < close; ++i) CHECK(isdigit(trace[i]));
  CHECK(trace.find("target: ") != std::string::npos);
}

TEST_CASE("stats outputs degree and spl csvs, and diff json") {
  TempDir dir("cli_stats");
  REQUIRE(run_cli("build --synth --articles 30 --seed 6 -o " + dir.file("g"), dir).exit_code == 0);
  REQUIRE(run_cli("build --synth --articles 30 --seed 8 -o " + dir.file("h"), dir).exit_code == 0);
  auto r = run_cli("stats --graph " + dir.file("g") + "/graph.navg --diff " + dir.file("h") +
                   "/graph.navg -o " + dir.file("s"),
                   dir);
  REQUIRE(r.exit_code == 0);
  std::string deg = read_file(dir.file("s") + "/degree_out.csv");
  CHECK(deg.find("bucket,count") == 0);
  CHECK(fs::exists(dir.file("s") + "/degree_in.csv"));
  CHECK(fs::exists(dir.file("s") + "/spl.csv"));
  CHECK(read_file(dir.file("s") + "/diff.json").find("edge_change_histogram") !=
        std::string::npos);

  // self diff has zero changes
  auto rs = run_cli("stats --graph " + dir.file("g") + "/graph.navg --diff " + dir.file("g") +
                    "/graph.navg -o " + dir.file("sd"),
                    dir);
  REQUIRE(rs.exit_code == 0);
  std::string self_diff = read_file(dir.file("sd") + "/diff.json");
  CHECK(self_diff.find("\"new_nodes\": 0") != std::string::npos);
  CHECK(self_diff.find("\"deleted_nodes\": 0") != std::string::npos);
}

TEST_CASE("retrieve smoke test with identity encoder") {
  TempDir dir("cli_retrieve");
  REQUIRE(run_cli("build --synth --articles 30 --seed 14 -o " + dir.file("g"), dir).exit_code ==
          0);
  REQUIRE(run_cli("train --graph " + dir.file("g") + "/graph.navg --dim 32 --updates 30 "
                  "--batch 8 --steps 2 --task sentence -o " + dir.file("t"),
                  dir)
              .exit_code == 0);
  // nodes.jsonl gives us a claim sentence source
  REQUIRE(run_cli("build --synth --articles 30 --seed 14 --dump-nodes -o " + dir.file("g2"), dir)
              .exit_code == 0);
  // hand-make one claim from node 0's text via the dump
  std::string nodes = read_file(dir.file("g2") + "/nodes.jsonl");
  auto text_pos = nodes.find("\"text\":\"");
  REQUIRE(text_pos != std::string::npos);
  auto end = nodes.find('.', text_pos);
  std::string sentence = nodes.substr(text_pos + 8, end - (text_pos + 8));
  std::ofstream claims(dir.file("claims.jsonl"));
  claims << R"({"id": "c0", "text": ")" << sentence << R"(", "gold_sentences": [")" << sentence
         << R"("], "gold_node_ids": [0]})" << "\n";
  claims.close();

  auto r = run_cli("retrieve --graph " + dir.file("g") + "/graph.navg --checkpoint " +
                   dir.file("t") + "/policy.ckpt --dim 32 --claims " + dir.file("claims.jsonl") +
                   " --nav-steps 4 -o " + dir.file("r"),
                   dir);
  REQUIRE(r.exit_code == 0);
  std::string metrics = read_file(dir.file("r") + "/metrics.csv");
  CHECK(metrics.find("claim_id,p5,r5,f15,recall1,recall2,recall3,recall4,recall5") == 0);
  CHECK(metrics.find("mean,") != std::string::npos);
  std::string results = read_file(dir.file("r") + "/results.jsonl");
  CHECK(results.find("\"provenance\"") != std::string::npos);
}

TEST_CASE("checkpoint embedder mismatch is a usage error") {
  TempDir dir("cli_mismatch");
  REQUIRE(run_cli("build --synth --articles 20 --seed 3 -o " + dir.file("g"), dir).exit_code == 0);
  REQUIRE(run_cli("train --graph " + dir.file("g") + "/graph.navg --dim 32 --updates 3 --batch 4 "
                  "--steps 2 -o " + dir.file("t"),
                  dir)
              .exit_code == 0);
  auto r = run_cli("eval --graph " + dir.file("g") + "/graph.navg --agent policy --checkpoint " +
                   dir.file("t") + "/policy.ckpt --dim 64 --episodes 5 -o " + dir.file("e"),
                   dir);
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("embedder") != std::string::npos);
}

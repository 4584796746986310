#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "stnsim/io.hpp"
#include "stnsim/presets.hpp"
#include "stnsim/simengine.hpp"

using namespace stnsim;
using Catch::Matchers::ContainsSubstring;

namespace {

std::filesystem::path scratch_dir() {
  auto p = std::filesystem::temp_directory_path() / "stnsim_io_test";
  std::filesystem::create_directories(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream o;
  o << in.rdbuf();
  return o.str();
}

int column_count(const std::string& line) {
  int n = 1;
  for (char c : line)
    if (c == ',') ++n;
  return n;
}

} // namespace

TEST_CASE("config json round-trips through parse and serialize unchanged") {
  for (const char* name : {"smoke", "paper-fig4"}) {
    INFO("preset " << name);
    const ExperimentConfig cfg = preset_config(name);
    const Json j = to_json(cfg);
    const ExperimentConfig back = config_from_json(j);
    CHECK(to_json(back) == j);
  }
  // An empty object falls back to the default preset wholesale.
  const ExperimentConfig def = config_from_json(Json::object());
  CHECK(to_json(def) == to_json(preset_config("paper-fig4")));
}

TEST_CASE("config typos are rejected with their full path") {
  Json j = to_json(preset_config("smoke"));

  SECTION("top level") {
    j["bogus"] = 1;
    REQUIRE_THROWS_WITH(config_from_json(j),
                        ContainsSubstring("unknown field <root>.bogus"));
  }
  SECTION("nested section") {
    j["sac"]["bogus"] = 1;
    REQUIRE_THROWS_WITH(config_from_json(j), ContainsSubstring("unknown field sac.bogus"));
  }
  SECTION("array element") {
    j["topology"]["nodes"][0]["bogus"] = 1;
    REQUIRE_THROWS_WITH(config_from_json(j),
                        ContainsSubstring("unknown field topology.nodes[].bogus"));
  }
  SECTION("wrong value type names the key") {
    j["seed"] = "not-a-number";
    REQUIRE_THROWS_WITH(config_from_json(j),
                        ContainsSubstring("bad value at <root>.seed"));
  }
  SECTION("future schema versions are refused") {
    j["schema_version"] = 2;
    REQUIRE_THROWS_WITH(config_from_json(j),
                        ContainsSubstring("unsupported schema_version"));
  }
  SECTION("unknown preset name") {
    j["preset"] = "no-such-preset";
    REQUIRE_THROWS(config_from_json(j));
  }
}

TEST_CASE("config hash ignores run-length knobs and tracks dynamics") {
  const ExperimentConfig base = preset_config("smoke");
  const std::string h = canonical_config_hash(base);
  REQUIRE(h.size() == 16);

  // Knobs that may legitimately differ between training and evaluating the
  // same model must not move the hash.
  ExperimentConfig same = base;
  same.seed += 17;
  same.episodes = 9999;
  same.eval_episodes = 3;
  same.scheme = Scheme::Rrp;
  same.preset = "renamed";
  same.compare_window_tasks = 5;
  same.compare_skip_tasks = 1;
  CHECK(canonical_config_hash(same) == h);

  ExperimentConfig w = base;
  w.workload.video_deadline_s *= 2.0;
  CHECK(canonical_config_hash(w) != h);

  ExperimentConfig s = base;
  s.sac.gamma = 0.5;
  CHECK(canonical_config_hash(s) != h);

  ExperimentConfig t = base;
  t.topology.links.at(0).tx_power_w *= 2.0;
  CHECK(canonical_config_hash(t) != h);

  ExperimentConfig steps = base;
  steps.steps_per_episode += 1;
  CHECK(canonical_config_hash(steps) != h);
}

TEST_CASE("effective config file parses back to the identical run") {
  const auto dir = scratch_dir();
  const auto path = dir / "effective_config.json";
  const ExperimentConfig cfg = preset_config("smoke");
  write_effective_config(path.string(), cfg);

  // The embedded config_hash key is tolerated on the way back in.
  const ExperimentConfig back = load_config_file(path.string());
  CHECK(to_json(back) == to_json(cfg));
  CHECK(canonical_config_hash(back) == canonical_config_hash(cfg));

  const Json raw = Json::parse(slurp(path));
  CHECK(raw.at("config_hash").get<std::string>() == canonical_config_hash(cfg));
}

TEST_CASE("load_config_file reports missing and malformed files") {
  REQUIRE_THROWS_WITH(load_config_file("/nonexistent/cfg.json"),
                      ContainsSubstring("cannot open"));
  const auto bad = scratch_dir() / "bad.json";
  write_text_file(bad.string(), "{ not json");
  REQUIRE_THROWS(load_config_file(bad.string()));
}

TEST_CASE("checkpoints restore parameters exactly and refuse mismatched runs") {
  ExperimentConfig cfg = preset_config("smoke");
  cfg.scheme = Scheme::CcMasac;
  Simulator sim(cfg);
  run_training(sim, 2, false);

  const auto path = scratch_dir() / "ckpt.json";
  save_checkpoint(path.string(), sim);

  SECTION("fresh simulator adopts the saved weights verbatim") {
    Simulator fresh(cfg);
    const Masac& a = *sim.masac();
    REQUIRE(fresh.masac()->agents.size() == a.agents.size());
    // Training moved the nets, so the pre-load state must differ somewhere.
    REQUIRE(fresh.masac()->agents[0].actor.params != a.agents[0].actor.params);

    load_checkpoint(path.string(), fresh);
    const Masac& b = *fresh.masac();
    for (std::size_t i = 0; i < a.agents.size(); ++i) {
      CHECK(b.agents[i].actor.params == a.agents[i].actor.params);
      CHECK(b.agents[i].q1.params == a.agents[i].q1.params);
      CHECK(b.agents[i].q2.params == a.agents[i].q2.params);
      CHECK(b.agents[i].q1_target.params == a.agents[i].q1_target.params);
      CHECK(b.agents[i].q2_target.params == a.agents[i].q2_target.params);
    }
  }

  SECTION("changed dynamics are rejected by hash") {
    ExperimentConfig other = cfg;
    other.workload.tasks_per_step += 1;
    Simulator s2(other);
    REQUIRE_THROWS_WITH(load_checkpoint(path.string(), s2),
                        ContainsSubstring("config mismatch"));
  }

  SECTION("scheme gate fires before anything else") {
    ExperimentConfig other = cfg;
    other.scheme = Scheme::Sasac;
    Simulator s2(other);
    REQUIRE_THROWS_WITH(load_checkpoint(path.string(), s2),
                        ContainsSubstring("scheme mismatch"));
  }

  SECTION("tampered dimensions are caught") {
    Json j = Json::parse(slurp(path));
    j["obs_dim"] = j["obs_dim"].get<int>() + 1;
    const auto tampered = scratch_dir() / "ckpt_dim.json";
    write_text_file(tampered.string(), j.dump() + "\n");
    Simulator s2(cfg);
    REQUIRE_THROWS_WITH(load_checkpoint(tampered.string(), s2),
                        ContainsSubstring("dimension mismatch"));
  }

  SECTION("foreign files are refused by kind") {
    const auto alien = scratch_dir() / "alien.json";
    write_text_file(alien.string(), "{\"kind\":\"something-else\"}\n");
    Simulator s2(cfg);
    REQUIRE_THROWS_WITH(load_checkpoint(alien.string(), s2),
                        ContainsSubstring("wrong file kind"));
  }

  SECTION("schemes without learned parameters cannot checkpoint") {
    ExperimentConfig rnd = cfg;
    rnd.scheme = Scheme::RndMaxbr;
    Simulator s2(rnd);
    REQUIRE_THROWS_WITH(save_checkpoint((scratch_dir() / "x.json").string(), s2),
                        ContainsSubstring("no learned parameters"));
    REQUIRE_THROWS_WITH(load_checkpoint(path.string(), s2),
                        ContainsSubstring("no learned parameters"));
  }
}

TEST_CASE("csv rows match their headers column for column") {
  ExperimentConfig cfg = preset_config("smoke");
  cfg.scheme = Scheme::RndMaxbr;
  Simulator sim(cfg);
  const EpisodeResult r = sim.run_episode(0, RunMode::Eval);
  REQUIRE(!r.records.empty());

  const int task_cols = column_count(task_csv_header());
  for (const TaskRecord& rec : r.records)
    REQUIRE(column_count(task_csv_row(rec, sim.graph())) == task_cols);

  const EpisodeStats st = episode_stats(0, r.records, r.step_rewards);
  CHECK(column_count(episode_csv_row(st)) == column_count(episode_csv_header()));

  StepLogRow row{};
  CHECK(column_count(train_log_csv_row(row)) == column_count(train_log_csv_header()));
}

TEST_CASE("task csv rows render the routed path as node names") {
  ExperimentConfig cfg = preset_config("smoke");
  cfg.scheme = Scheme::RndMaxbr;
  Simulator sim(cfg);
  const EpisodeResult r = sim.run_episode(0, RunMode::Eval);
  bool saw_path = false;
  for (const TaskRecord& rec : r.records) {
    if (rec.status != TaskStatus::Completed) continue;
    saw_path = true;
    const std::string row = task_csv_row(rec, sim.graph());
    const std::string path = row.substr(row.rfind(',') + 1);
    REQUIRE(!path.empty());
    // Every rendered hop must be a real node name.
    std::istringstream ss(path);
    std::string hop;
    while (std::getline(ss, hop, '|')) CHECK_NOTHROW(sim.graph().node_index(hop));
  }
  REQUIRE(saw_path);
}

TEST_CASE("episode csv writer emits one line per episode plus header") {
  const auto path = scratch_dir() / "episodes.csv";
  std::vector<EpisodeStats> rows(3);
  for (int i = 0; i < 3; ++i) rows[static_cast<std::size_t>(i)].episode = i;
  write_episodes_csv(path.string(), rows);
  std::istringstream in(slurp(path));
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == episode_csv_header());
  int n = 0;
  while (std::getline(in, line)) ++n;
  CHECK(n == 3);
}

TEST_CASE("compare series divides the task stream into fixed windows") {
  std::vector<TaskRecord> recs(10);
  for (int i = 0; i < 10; ++i) {
    TaskRecord& r = recs[static_cast<std::size_t>(i)];
    r.reward = 1.0;
    r.status = (i % 2 == 0) ? TaskStatus::Completed : TaskStatus::Discarded;
    r.t_total = 0.5;
    r.kind = TaskKind::Monitoring;
  }
  std::ostringstream out;
  append_compare_series(out, "demo", recs, 4, 4);
  // Windows end at 4 and 8; the first is skipped by the warm-up prefix.
  std::istringstream in(out.str());
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line.rfind("demo,8,", 0) == 0);
  CHECK(line.find("0.5") != std::string::npos);
  CHECK(!std::getline(in, line));

  REQUIRE_THROWS_WITH(append_compare_series(out, "demo", recs, 0, 0),
                      ContainsSubstring("window"));
}

TEST_CASE("tasks jsonl names endpoints rather than indices") {
  ExperimentConfig cfg = preset_config("smoke");
  Simulator sim(cfg);
  const std::vector<Task> tasks = generate_episode(
      cfg.workload, cfg.ladder, sim.graph(), cfg.steps_per_episode, cfg.seed, 0);
  const auto path = scratch_dir() / "tasks.jsonl";
  write_tasks_jsonl(path.string(), tasks, sim.graph());

  std::istringstream in(slurp(path));
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    const Json j = Json::parse(line);
    CHECK_NOTHROW(sim.graph().node_index(j.at("source_edge").get<std::string>()));
    CHECK_NOTHROW(sim.graph().node_index(j.at("destination").get<std::string>()));
    ++n;
  }
  CHECK(n == static_cast<int>(tasks.size()));
}

// Command-line front end: validate-config, build-topology, train, evaluate,
// compare, export. Exit codes: 0 success, 2 config/usage error, 1 runtime
// error, 3 training aborted on a non-finite loss.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stnsim/io.hpp"

namespace fs = std::filesystem;
using namespace stnsim;

namespace {

// Evaluation episodes index into a workload stream far away from training's.
constexpr int kEvalEpisodeBase = 1000000;

// Seed precedence: --seed flag, then an explicit seed in the config file,
// then STN_SIM_SEED, then the preset default.
ExperimentConfig resolve_config(const std::string& config_path, const std::string& preset,
                                const std::optional<std::uint64_t>& seed_flag) {
  ExperimentConfig cfg;
  bool file_has_seed = false;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    require(in.good(), "config: cannot open " + config_path);
    Json j;
    try {
      j = Json::parse(in);
    } catch (const Json::parse_error& e) {
      throw std::invalid_argument("config: " + config_path + ": " + e.what());
    }
    file_has_seed = j.contains("seed");
    cfg = config_from_json(j);
  } else {
    cfg = preset_config(preset);
  }
  if (seed_flag) {
    cfg.seed = *seed_flag;
  } else if (!file_has_seed) {
    if (const char* env = std::getenv("STN_SIM_SEED")) {
      try {
        cfg.seed = std::stoull(env);
      } catch (const std::exception&) {
        throw std::invalid_argument("STN_SIM_SEED is not a number: " + std::string(env));
      }
    }
  }
  return cfg;
}

int cmd_validate(const ExperimentConfig& cfg) {
  Simulator sim(cfg); // builds the graph; throws on any structural error
  std::cout << "config ok: " << sim.graph().nodes.size() << " nodes, "
            << sim.graph().links.size() << " links, " << sim.agents()
            << " agents, hash " << canonical_config_hash(cfg) << "\n";
  return 0;
}

int cmd_build_topology(const ExperimentConfig& cfg, const std::string& out) {
  Simulator sim(cfg);
  fs::create_directories(out);
  write_topology_report(out + "/topology_report.json", sim.graph());
  const NetworkGraph& g = sim.graph();
  double cap_min = std::numeric_limits<double>::infinity(), cap_max = 0.0;
  for (const Link& l : g.links) {
    cap_min = std::min(cap_min, l.capacity_bps);
    cap_max = std::max(cap_max, l.capacity_bps);
  }
  std::cout << "topology: " << g.nodes.size() << " nodes, " << g.links.size()
            << " links, capacity " << fmt_double(cap_min / 1e6) << ".."
            << fmt_double(cap_max / 1e6) << " Mb/s\n";
  return 0;
}

int cmd_train(const ExperimentConfig& cfg, const std::string& out, int checkpoint_every,
              bool quiet) {
  require(scheme_is_learned(cfg.scheme),
          std::string("train: scheme ") + scheme_name(cfg.scheme) +
              " has no trainable parameters");
  fs::create_directories(out);
  Simulator sim(cfg);
  write_effective_config(out + "/effective_config.json", cfg);
  std::ofstream tasks(out + "/tasks.csv", std::ios::binary);
  std::ofstream tlog(out + "/train_log.csv", std::ios::binary);
  require(tasks.good() && tlog.good(), "train: cannot open output files in " + out);
  tasks << task_csv_header() << '\n';
  tlog << train_log_csv_header() << '\n';
  std::vector<EpisodeStats> stats;
  const int tick = std::max(1, cfg.episodes / 10);
  auto on_episode = [&](int ep, const EpisodeResult& r, const EpisodeStats& st) {
    for (const TaskRecord& rec : r.records) tasks << task_csv_row(rec, sim.graph()) << '\n';
    for (const StepLogRow& row : r.step_log) tlog << train_log_csv_row(row) << '\n';
    stats.push_back(st);
    if (checkpoint_every > 0 && (ep + 1) % checkpoint_every == 0)
      save_checkpoint(out + "/checkpoint_ep" + std::to_string(ep + 1) + ".json", sim);
    if (!quiet && (ep + 1) % tick == 0)
      std::cerr << "episode " << ep + 1 << "/" << cfg.episodes
                << " completion=" << fmt_double(st.completion)
                << " step_reward=" << fmt_double(st.mean_step_reward) << "\n";
  };
  try {
    run_episodes(sim, cfg.episodes, RunMode::Train, 0, false, on_episode);
  } catch (const TrainingDiverged&) {
    save_checkpoint(out + "/checkpoint_diverged.json", sim);
    write_episodes_csv(out + "/episodes.csv", stats);
    throw;
  }
  write_episodes_csv(out + "/episodes.csv", stats);
  save_checkpoint(out + "/checkpoint.json", sim);
  std::cout << "trained " << cfg.episodes << " episodes -> " << out << "\n";
  return 0;
}

int cmd_evaluate(const ExperimentConfig& cfg, const std::string& out,
                 const std::string& checkpoint, bool trace) {
  if (scheme_is_learned(cfg.scheme))
    require(!checkpoint.empty(), std::string("evaluate: scheme ") +
                                     scheme_name(cfg.scheme) + " requires --checkpoint");
  fs::create_directories(out);
  Simulator sim(cfg);
  sim.trace_paths = trace;
  if (!checkpoint.empty()) load_checkpoint(checkpoint, sim);
  write_effective_config(out + "/effective_config.json", cfg);
  RunSummary s = run_evaluation(sim, cfg.eval_episodes, kEvalEpisodeBase, true);
  write_episodes_csv(out + "/episodes.csv", s.episodes);
  write_tasks_csv(out + "/tasks.csv", s.records, sim.graph());
  if (trace) write_paths_jsonl(out + "/paths.jsonl", s.path_traces, sim.graph());
  const CompareRow row = summarize_run(scheme_name(cfg.scheme), s, cfg.rewards);
  std::cout << "evaluated " << row.episodes << " episodes: completion="
            << fmt_double(row.completion) << " mean_reward=" << fmt_double(row.mean_reward)
            << " mean_delay=" << fmt_double(row.mean_delay_completed) << "\n";
  return 0;
}

int cmd_compare(const ExperimentConfig& cfg, const std::string& out,
                const std::vector<std::string>& schemes, const std::string& ckpt_cc,
                const std::string& ckpt_sasac) {
  fs::create_directories(out);
  write_effective_config(out + "/effective_config.json", cfg);
  std::ofstream series(out + "/compare_series.csv", std::ios::binary);
  require(series.good(), "compare: cannot open output files in " + out);
  series << "scheme,task_volume,completion,mean_reward,mean_energy_video,mean_delay\n";
  std::vector<CompareRow> rows;
  for (const std::string& name : schemes) {
    ExperimentConfig c = cfg;
    c.scheme = scheme_from_name(name);
    Simulator sim(c);
    if (c.scheme == Scheme::CcMasac) {
      require(!ckpt_cc.empty(), "compare: cc-masac requires --checkpoint");
      load_checkpoint(ckpt_cc, sim);
    } else if (c.scheme == Scheme::Sasac) {
      require(!ckpt_sasac.empty(), "compare: sasac requires --sasac-checkpoint");
      load_checkpoint(ckpt_sasac, sim);
    }
    RunSummary s = run_evaluation(sim, c.eval_episodes, kEvalEpisodeBase, true);
    rows.push_back(summarize_run(name, s, c.rewards));
    append_compare_series(series, name, s.records, c.compare_window_tasks,
                          c.compare_skip_tasks);
    const CompareRow& r = rows.back();
    std::cout << name << ": completion=" << fmt_double(r.completion)
              << " mean_reward=" << fmt_double(r.mean_reward)
              << " mean_energy=" << fmt_double(r.mean_energy_video)
              << " mean_delay=" << fmt_double(r.mean_delay_completed) << "\n";
  }
  require(series.good(), "write failed: " + out + "/compare_series.csv");
  write_compare_csv(out + "/compare.csv", rows);
  return 0;
}

std::vector<std::vector<std::string>> read_csv_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "export: cannot open " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  require(!rows.empty(), "export: empty csv " + path);
  return rows;
}

// Rolling-mean learning curves from a run directory's episodes.csv, plus an
// optional workload replay dump.
int cmd_export(const std::string& run_dir, const std::string& out, int window,
               const ExperimentConfig* cfg, int emit_task_episodes) {
  fs::create_directories(out);
  if (!run_dir.empty()) {
    const auto rows = read_csv_file(run_dir + "/episodes.csv");
    const auto& header = rows.front();
    auto col = [&](const std::string& name) {
      for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
      throw std::invalid_argument("export: column missing in episodes.csv: " + name);
    };
    const int c_ep = col("episode"), c_rw = col("mean_reward"), c_cp = col("completion");
    const int c_qoe = col("mean_qoe_video"), c_en = col("mean_energy_video");
    require(window > 0, "export: window must be > 0");
    std::ofstream curves(out + "/curves.csv", std::ios::binary);
    require(curves.good(), "export: cannot open " + out + "/curves.csv");
    curves << "episode,reward,completion,qoe,energy\n";
    std::vector<std::array<double, 4>> vals;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      vals.push_back({std::stod(rows[i][c_rw]), std::stod(rows[i][c_cp]),
                      std::stod(rows[i][c_qoe]), std::stod(rows[i][c_en])});
      const int lo = std::max(0, static_cast<int>(vals.size()) - window);
      std::array<double, 4> m{};
      for (int k = lo; k < static_cast<int>(vals.size()); ++k)
        for (int d = 0; d < 4; ++d) m[d] += vals[static_cast<std::size_t>(k)][d];
      const double n = static_cast<double>(static_cast<int>(vals.size()) - lo);
      curves << rows[i][c_ep] << ',' << fmt_double(m[0] / n) << ','
             << fmt_double(m[1] / n) << ',' << fmt_double(m[2] / n) << ','
             << fmt_double(m[3] / n) << '\n';
    }
    require(curves.good(), "write failed: " + out + "/curves.csv");
    std::cout << "curves.csv written from " << rows.size() - 1 << " episodes\n";
  }
  if (emit_task_episodes > 0) {
    require(cfg != nullptr, "export: --emit-tasks needs --config or --preset");
    Simulator sim(*cfg);
    std::vector<Task> all;
    for (int e = 0; e < emit_task_episodes; ++e) {
      auto tasks = generate_episode(cfg->workload, cfg->ladder, sim.graph(),
                                    cfg->steps_per_episode, cfg->seed,
                                    static_cast<std::uint64_t>(e),
                                    e * cfg->workload.tasks_per_step * cfg->steps_per_episode);
      all.insert(all.end(), tasks.begin(), tasks.end());
    }
    write_tasks_jsonl(out + "/tasks.jsonl", all, sim.graph());
    std::cout << "tasks.jsonl written: " << all.size() << " tasks\n";
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"satellite-terrestrial collaborative offloading simulator"};
  app.require_subcommand(1);

  std::string config_path, preset = "paper-fig4", out_dir = "out";
  std::optional<std::uint64_t> seed;
  auto add_common = [&](CLI::App* sub, bool with_out) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--preset", preset, "built-in preset when no --config is given")
        ->check(CLI::IsMember({"paper-fig4", "smoke"}));
    sub->add_option("--seed", seed, "seed override");
    if (with_out) sub->add_option("--out", out_dir, "output directory");
  };

  std::function<int()> action;

  CLI::App* validate = app.add_subcommand("validate-config", "parse and validate a config");
  add_common(validate, false);
  validate->callback([&] {
    action = [&] { return cmd_validate(resolve_config(config_path, preset, seed)); };
  });

  CLI::App* topo = app.add_subcommand("build-topology", "build the graph and report it");
  add_common(topo, true);
  topo->callback([&] {
    action = [&] {
      return cmd_build_topology(resolve_config(config_path, preset, seed), out_dir);
    };
  });

  int checkpoint_every = 0;
  bool quiet = false;
  CLI::App* train = app.add_subcommand("train", "train the configured scheme");
  add_common(train, true);
  train->add_option("--checkpoint-every", checkpoint_every,
                    "also checkpoint every K episodes");
  train->add_flag("--quiet", quiet, "suppress progress lines");
  train->callback([&] {
    action = [&] {
      return cmd_train(resolve_config(config_path, preset, seed), out_dir,
                       checkpoint_every, quiet);
    };
  });

  std::string checkpoint_path;
  bool trace_paths = false;
  CLI::App* eval = app.add_subcommand("evaluate", "greedy evaluation of one scheme");
  add_common(eval, true);
  eval->add_option("--checkpoint", checkpoint_path, "trained checkpoint (learned schemes)");
  eval->add_flag("--trace-paths", trace_paths, "write per-task path candidates as JSONL");
  eval->callback([&] {
    action = [&] {
      return cmd_evaluate(resolve_config(config_path, preset, seed), out_dir,
                          checkpoint_path, trace_paths);
    };
  });

  std::string schemes_csv = "cc-masac,sasac,rrp,rnd-maxbr";
  std::string ckpt_sasac;
  CLI::App* compare = app.add_subcommand("compare", "run all schemes on one workload");
  add_common(compare, true);
  compare->add_option("--schemes", schemes_csv, "comma list of schemes to run");
  compare->add_option("--checkpoint", checkpoint_path, "cc-masac checkpoint");
  compare->add_option("--sasac-checkpoint", ckpt_sasac, "sasac checkpoint");
  compare->callback([&] {
    action = [&] {
      std::vector<std::string> schemes;
      std::stringstream ss(schemes_csv);
      std::string item;
      while (std::getline(ss, item, ','))
        if (!item.empty()) schemes.push_back(item);
      require(!schemes.empty(), "compare: empty scheme list");
      return cmd_compare(resolve_config(config_path, preset, seed), out_dir, schemes,
                         checkpoint_path, ckpt_sasac);
    };
  });

  std::string run_dir;
  int window = 10, emit_tasks = 0;
  CLI::App* exp = app.add_subcommand("export", "plot-ready series from run artifacts");
  add_common(exp, true);
  exp->add_option("--run", run_dir, "run directory containing episodes.csv");
  exp->add_option("--window", window, "rolling mean window for curves");
  exp->add_option("--emit-tasks", emit_tasks, "also dump N episodes of tasks as JSONL");
  exp->callback([&] {
    action = [&] {
      require(!run_dir.empty() || emit_tasks > 0,
              "export: nothing to do (need --run and/or --emit-tasks)");
      ExperimentConfig cfg;
      const bool need_cfg = emit_tasks > 0;
      if (need_cfg) cfg = resolve_config(config_path, preset, seed);
      return cmd_export(run_dir, out_dir, window, need_cfg ? &cfg : nullptr, emit_tasks);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    return action();
  } catch (const TrainingDiverged& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

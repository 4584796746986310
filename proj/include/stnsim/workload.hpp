#pragma once

// Task generation: periodic monitoring jobs bound for ground stations and
// video segments bound for users, produced deterministically per
// (seed, episode) with an exact kind mix.

#include <cstdint>
#include <string>
#include <vector>

#include "stnsim/topology.hpp"

namespace stnsim {

struct BitrateLevel {
  double bitrate_bps = 0.0;
  std::string label;
  double segment_bytes = 0.0;
};

struct BitrateLadder {
  double segment_seconds = 1.0; // L_f
  std::vector<BitrateLevel> levels; // ascending bitrate
};

inline BitrateLadder default_ladder() {
  BitrateLadder l;
  l.segment_seconds = 1.0;
  l.levels = {
      {1e6, "360P", 1.28e6},
      {5e6, "720P", 3.2e6},
      {8e6, "1080P", 5.12e6},
      {16e6, "2K", 7.68e6},
  };
  return l;
}

inline double video_bytes_for_level(const BitrateLadder& ladder, int level) {
  require(level >= 0 && level < static_cast<int>(ladder.levels.size()),
          "video_bytes_for_level: level out of range");
  return ladder.levels[level].segment_bytes;
}

enum class TaskKind { Monitoring, Video };

struct Task {
  int id = -1;
  TaskKind kind = TaskKind::Monitoring;
  int arrival_step = 0;
  int source_edge = -1;  // node index
  int destination = -1;  // ground station (monitoring) or user (video)
  double data_bytes = 0.0;      // video: filled once the bitrate is chosen
  double cycles_per_byte = 0.0; // processing density
  double deadline_s = 0.0;      // T^max
  int chosen_level = -1;        // video only

  double cycles_total() const { return data_bytes * cycles_per_byte; }
};

struct WorkloadConfig {
  int tasks_per_step = 5;
  double monitoring_mix = 0.5; // monitoring share of an episode's tasks
  double monitoring_bytes_min = 0.1e6;
  double monitoring_bytes_max = 0.5e6;
  double monitoring_cycles_per_byte = 200.0;
  double video_cycles_per_byte_min = 50.0;
  double video_cycles_per_byte_max = 100.0;
  double monitoring_deadline_s = 2.0;
  double video_deadline_s = 5.0;

  // Resource asks per task kind. Monitoring reserves a flat rate; a video
  // task is admitted at the lowest level's ask and upgraded after the bitrate
  // decision to base + factor * bitrate.
  double monitoring_rate_bps = 8e6;
  double video_rate_base_bps = 16e6;
  double upload_rate_factor = 2.0;
  // Compute ask: cycles / (deadline * budget_frac); the reserve must be able
  // to finish the task in this fraction of its deadline.
  double compute_budget_frac = 0.5;
};

inline double video_rate_ask_bps(const WorkloadConfig& w, const BitrateLadder& ladder,
                                 int level) {
  return w.video_rate_base_bps +
         w.upload_rate_factor * ladder.levels.at(static_cast<std::size_t>(level)).bitrate_bps;
}

inline double task_rate_ask_bps(const WorkloadConfig& w, const BitrateLadder& ladder,
                                const Task& t) {
  if (t.kind == TaskKind::Monitoring) return w.monitoring_rate_bps;
  // Admission ask before the level is known: lowest rung.
  const int level = t.chosen_level >= 0 ? t.chosen_level : 0;
  return video_rate_ask_bps(w, ladder, level);
}

inline double task_compute_ask_cps(const WorkloadConfig& w, const Task& t,
                                   const BitrateLadder& ladder) {
  double bytes = t.data_bytes;
  if (t.kind == TaskKind::Video && bytes <= 0.0) {
    // Admission-time ask sizes the hold for a mid-ladder segment; an agent
    // that picks above it gambles on the hold stretching to the deadline.
    bytes = ladder.levels[(ladder.levels.size() - 1) / 2].segment_bytes;
  }
  return bytes * t.cycles_per_byte / (t.deadline_s * w.compute_budget_frac);
}

// One episode's tasks, arrival-step major, ids dense from id_base. The kind
// mix is exact: floor(n * (1 - monitoring_mix)) video tasks, monitoring gets
// the remainder. Sources are uniform over edges, destinations uniform over
// ground stations (monitoring) or users (video).
inline std::vector<Task> generate_episode(const WorkloadConfig& cfg,
                                          const BitrateLadder& ladder,
                                          const NetworkGraph& g, int steps,
                                          std::uint64_t seed, std::uint64_t episode,
                                          int id_base = 0) {
  require(cfg.tasks_per_step > 0, "generate_episode: tasks_per_step must be > 0");
  require(steps > 0, "generate_episode: steps must be > 0");
  require(cfg.monitoring_mix >= 0.0 && cfg.monitoring_mix <= 1.0,
          "generate_episode: monitoring_mix must be in [0,1]");
  require(cfg.monitoring_bytes_min > 0.0 &&
              cfg.monitoring_bytes_max >= cfg.monitoring_bytes_min,
          "generate_episode: bad monitoring size range");
  require(!ladder.levels.empty(), "generate_episode: empty ladder");

  std::vector<int> edges, stations, users;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    if (g.nodes[i].kind == NodeKind::Edge) edges.push_back(static_cast<int>(i));
    if (g.nodes[i].kind == NodeKind::GroundStation) stations.push_back(static_cast<int>(i));
    if (g.nodes[i].kind == NodeKind::User) users.push_back(static_cast<int>(i));
  }
  require(!edges.empty(), "generate_episode: topology has no edges");
  require(!stations.empty(), "generate_episode: topology has no ground stations");

  const int total = cfg.tasks_per_step * steps;
  const int n_video = static_cast<int>(std::floor(total * (1.0 - cfg.monitoring_mix)));
  require(n_video == 0 || !users.empty(), "generate_episode: video tasks but no users");

  Rng rng = make_rng(seed, hash_combine(0x776b6c64ULL, episode));
  std::vector<TaskKind> kinds(static_cast<std::size_t>(total), TaskKind::Monitoring);
  for (int i = 0; i < n_video; ++i) kinds[static_cast<std::size_t>(i)] = TaskKind::Video;
  std::shuffle(kinds.begin(), kinds.end(), rng);

  std::uniform_int_distribution<int> pick_edge(0, static_cast<int>(edges.size()) - 1);
  std::uniform_int_distribution<int> pick_gs(0, static_cast<int>(stations.size()) - 1);
  std::uniform_int_distribution<int> pick_user(
      0, users.empty() ? 0 : static_cast<int>(users.size()) - 1);
  std::uniform_real_distribution<double> mon_bytes(cfg.monitoring_bytes_min,
                                                   cfg.monitoring_bytes_max);
  std::uniform_real_distribution<double> video_cpb(cfg.video_cycles_per_byte_min,
                                                   cfg.video_cycles_per_byte_max);

  std::vector<Task> out;
  out.reserve(static_cast<std::size_t>(total));
  for (int i = 0; i < total; ++i) {
    Task t;
    t.id = id_base + i;
    t.kind = kinds[static_cast<std::size_t>(i)];
    t.arrival_step = i / cfg.tasks_per_step;
    t.source_edge = edges[static_cast<std::size_t>(pick_edge(rng))];
    if (t.kind == TaskKind::Monitoring) {
      t.destination = stations[static_cast<std::size_t>(pick_gs(rng))];
      t.data_bytes = mon_bytes(rng);
      t.cycles_per_byte = cfg.monitoring_cycles_per_byte;
      t.deadline_s = cfg.monitoring_deadline_s;
    } else {
      t.destination = users[static_cast<std::size_t>(pick_user(rng))];
      t.data_bytes = 0.0; // resolved by video_bytes_for_level once chosen
      t.cycles_per_byte = video_cpb(rng);
      t.deadline_s = cfg.video_deadline_s;
    }
    out.push_back(t);
  }
  return out;
}

} // namespace stnsim

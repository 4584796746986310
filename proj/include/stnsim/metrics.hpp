#pragma once

// Quality-of-experience scoring, per-task reward composition and aggregate
// episode statistics. Bitrates enter the QoE in Mb/s regardless of the bps
// plumbing everywhere else; the divisor is part of the config so the scale
// is explicit.

#include <cmath>
#include <string>
#include <vector>

#include "stnsim/common.hpp"
#include "stnsim/offload.hpp"

namespace stnsim {

struct QoEParams {
  double eta = 1.0;   // bitrate utility
  double kappa = 1.0; // switching penalty
  double nu = 3.0;    // rebuffer penalty
  double bitrate_scale = 1e6; // bps per QoE unit (Mb/s)
};

// q = eta*r_new - kappa*|r_new - r_prev| - nu*r_new/f, everything in Mb/s.
// f is the rate the stream actually gets end to end, so r/f > 1 means the
// segment cannot be delivered at playback speed.
inline double qoe(double prev_bitrate_bps, double new_bitrate_bps,
                  double link_usage_bps, const QoEParams& p) {
  require(prev_bitrate_bps >= 0.0 && new_bitrate_bps >= 0.0,
          "qoe: negative bitrate");
  require(link_usage_bps > 0.0, "qoe: zero link usage");
  const double r_prev = prev_bitrate_bps / p.bitrate_scale;
  const double r_new = new_bitrate_bps / p.bitrate_scale;
  const double f = link_usage_bps / p.bitrate_scale;
  return p.eta * r_new - p.kappa * std::abs(r_new - r_prev) - p.nu * r_new / f;
}

struct RewardWeights {
  double delta = 0.1;      // energy
  double omega = 10.0;     // batch completion ratio
  double alpha_delay = 1.0; // objective-score only
  double beta_comp = 1.0;   // objective-score only
  double gamma_comm = 1.0;  // objective-score only
};

inline double completion_ratio(int completed, int total) {
  require(total > 0, "completion_ratio: empty batch");
  require(completed >= 0 && completed <= total, "completion_ratio: bad counts");
  return static_cast<double>(completed) / static_cast<double>(total);
}

// Per-task reward: q - delta*e + omega*r_c with the batch completion shared
// across the batch's records.
inline double task_reward(double qoe_value, double energy_j, const RewardWeights& w,
                          double batch_completion) {
  require(batch_completion >= 0.0 && batch_completion <= 1.0,
          "task_reward: completion out of range");
  return qoe_value - w.delta * energy_j + w.omega * batch_completion;
}

// One row per processed task; every column the exporters write comes from
// here so logged rewards stay reconstructible from their parts.
struct TaskRecord {
  int task_id = -1;
  int episode = 0;
  int step = 0;
  TaskKind kind = TaskKind::Monitoring;
  int level = -1;            // video bitrate rung, -1 for monitoring
  TaskStatus status = TaskStatus::Discarded;
  std::string discard_reason; // empty when completed
  int agent = -1;
  double data_bytes = 0.0;
  double deadline_s = 0.0;
  double allocated_bps = 0.0;
  double t_comp_lc = 0.0;
  double t_comm_lc = 0.0;
  double t_comp_sc = 0.0;
  double t_comm_sc = 0.0;
  double t_total = 0.0;
  int delay_branch = 0;
  double e_encode = 0.0;
  double e_upload = 0.0;
  double e_transcode = 0.0;
  double e_total = 0.0;
  double u_comm = 0.0;
  double u_comp = 0.0;
  double qoe = 0.0;
  double reward = 0.0;
  double batch_completion = 0.0;
  std::vector<int> path_nodes;
};

// Multi-objective score over a set of records:
// sum(q - alpha*t - gamma*u_comm - beta*u_comp - delta*e). Analysis-side only;
// the RL reward uses task_reward above.
inline double objective_score(const std::vector<TaskRecord>& records,
                              const RewardWeights& w) {
  double s = 0.0;
  for (const auto& r : records) {
    s += r.qoe - w.alpha_delay * r.t_total - w.gamma_comm * r.u_comm -
         w.beta_comp * r.u_comp - w.delta * r.e_total;
  }
  return s;
}

struct EpisodeStats {
  int episode = 0;
  int n_tasks = 0;
  int n_completed = 0;
  double completion = 0.0;
  double mean_reward = 0.0;          // over all records
  double mean_qoe_video = 0.0;       // over video records
  double mean_energy_video = 0.0;    // over video records
  double mean_delay_completed = 0.0; // over completed records
  double mean_step_reward = 0.0;     // RL shared reward, mean over the slots
};

inline EpisodeStats episode_stats(int episode, const std::vector<TaskRecord>& records,
                                  const std::vector<double>& step_rewards) {
  EpisodeStats s;
  s.episode = episode;
  s.n_tasks = static_cast<int>(records.size());
  double qsum = 0.0, esum = 0.0, dsum = 0.0, rsum = 0.0;
  int nvideo = 0, ndelay = 0;
  for (const auto& r : records) {
    rsum += r.reward;
    if (r.status == TaskStatus::Completed) {
      ++s.n_completed;
      dsum += r.t_total;
      ++ndelay;
    }
    if (r.kind == TaskKind::Video) {
      qsum += r.qoe;
      esum += r.e_total;
      ++nvideo;
    }
  }
  if (s.n_tasks > 0) {
    s.completion = completion_ratio(s.n_completed, s.n_tasks);
    s.mean_reward = rsum / s.n_tasks;
  }
  if (nvideo > 0) {
    s.mean_qoe_video = qsum / nvideo;
    s.mean_energy_video = esum / nvideo;
  }
  if (ndelay > 0) s.mean_delay_completed = dsum / ndelay;
  if (!step_rewards.empty()) {
    double t = 0.0;
    for (double v : step_rewards) t += v;
    s.mean_step_reward = t / static_cast<double>(step_rewards.size());
  }
  return s;
}

} // namespace stnsim

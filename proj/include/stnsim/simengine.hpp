#pragma once

// Slot-driven simulation engine. Each slot: admit the arriving batch onto
// paths, observe, pick bitrates, execute the offloading plans, score rewards,
// store the joint transition, then hand every reservation back. The resource
// ledger must close at the end of every slot; that is asserted, not assumed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stnsim/masac.hpp"
#include "stnsim/metrics.hpp"
#include "stnsim/offload.hpp"
#include "stnsim/pathsel.hpp"
#include "stnsim/topology.hpp"
#include "stnsim/workload.hpp"

namespace stnsim {

enum class Scheme { CcMasac, Sasac, Rrp, RndMaxbr };

inline const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::CcMasac: return "cc-masac";
    case Scheme::Sasac: return "sasac";
    case Scheme::Rrp: return "rrp";
    case Scheme::RndMaxbr: return "rnd-maxbr";
  }
  return "?";
}

inline Scheme scheme_from_name(const std::string& s) {
  if (s == "cc-masac") return Scheme::CcMasac;
  if (s == "sasac") return Scheme::Sasac;
  if (s == "rrp") return Scheme::Rrp;
  if (s == "rnd-maxbr") return Scheme::RndMaxbr;
  throw std::invalid_argument("unknown scheme: " + s);
}

inline bool scheme_is_learned(Scheme s) {
  return s == Scheme::CcMasac || s == Scheme::Sasac;
}

enum class RunMode { Train, Eval };

struct ExperimentConfig {
  int schema_version = 1;
  std::string preset; // provenance note copied into outputs
  std::uint64_t seed = 1;
  Scheme scheme = Scheme::CcMasac;
  int episodes = 500;
  int steps_per_episode = 40;
  int eval_episodes = 10;
  double slot_seconds = 1.0;
  int compare_window_tasks = 500;  // rolling window for the comparison series
  int compare_skip_tasks = 2500;   // warm-up tasks excluded from the series
  ChannelParams channel;
  TopologyConfig topology;
  WorkloadConfig workload;
  BitrateLadder ladder = default_ladder();
  PsruConfig psru;
  QoEParams qoe;
  RewardWeights rewards;
  EnergyCoeffs energy;
  SacConfig sac;
};

// Raised when an update produces a non-finite loss; the CLI turns this into
// a dedicated exit code after writing a diagnostic checkpoint.
struct TrainingDiverged : std::runtime_error {
  int episode, step;
  TrainingDiverged(int e, int s)
      : std::runtime_error("training diverged: non-finite loss at episode " +
                           std::to_string(e) + " step " + std::to_string(s)),
        episode(e), step(s) {}
};

struct StepLogRow {
  int episode = 0;
  int step = 0;
  double loss_actor = 0.0;
  double loss_q1 = 0.0;
  double loss_q2 = 0.0;
  double entropy = 0.0; // mean policy entropy over agents at this slot
  double reward = 0.0;  // shared slot reward (unscaled)
};

struct PathTraceRow {
  int task_id = -1;
  std::vector<CandidateTrace> candidates;
};

struct EpisodeResult {
  std::vector<TaskRecord> records;
  std::vector<double> step_rewards;
  std::vector<StepLogRow> step_log;      // training runs only
  std::vector<PathTraceRow> path_traces; // only when tracing is on
};

class Simulator {
 public:
  explicit Simulator(const ExperimentConfig& cfg)
      : cfg_(cfg),
        graph_(build_graph(cfg.topology, cfg.channel)),
        update_rng_(make_rng(cfg.seed, 0x75d0a11bULL)) {
    require(cfg_.episodes > 0, "config: episodes must be > 0");
    require(cfg_.steps_per_episode > 0, "config: steps_per_episode must be > 0");
    require(cfg_.slot_seconds > 0.0, "config: slot_seconds must be > 0");
    require(!cfg_.ladder.levels.empty(), "config: empty bitrate ladder");
    for (std::size_t i = 0; i < graph_.nodes.size(); ++i)
      if (graph_.nodes[i].kind == NodeKind::GroundStation)
        gs_nodes_.push_back(static_cast<int>(i));
    require(!gs_nodes_.empty(), "config: topology has no ground stations");
    user_gs_slot_.assign(graph_.nodes.size(), -1);
    for (const Link& l : graph_.links)
      if (graph_.nodes[l.src].kind == NodeKind::GroundStation &&
          graph_.nodes[l.dst].kind == NodeKind::User && user_gs_slot_[l.dst] < 0)
        for (std::size_t s = 0; s < gs_nodes_.size(); ++s)
          if (gs_nodes_[s] == l.src) user_gs_slot_[l.dst] = static_cast<int>(s);
    for (std::size_t i = 0; i < graph_.nodes.size(); ++i)
      if (graph_.nodes[i].kind == NodeKind::User)
        require(user_gs_slot_[i] >= 0,
                "config: user " + graph_.nodes[i].name + " has no ground station");
    n_actions_ = static_cast<int>(cfg_.ladder.levels.size());
    if (scheme_is_learned(cfg_.scheme)) {
      SacConfig sc = cfg_.sac;
      int obs_dim;
      if (cfg_.scheme == Scheme::Sasac) {
        // one agent observing every stream slot, one bitrate for all of them
        sc.n_agents = 1;
        obs_dim = kSlotDim * static_cast<int>(gs_nodes_.size());
      } else {
        sc.n_agents = static_cast<int>(gs_nodes_.size());
        obs_dim = kSlotDim;
      }
      masac_.emplace(sc, obs_dim, n_actions_, cfg_.seed);
      n_agents_ = sc.n_agents;
    }
  }

  const ExperimentConfig& config() const { return cfg_; }
  const NetworkGraph& graph() const { return graph_; }
  Masac* masac() { return masac_ ? &*masac_ : nullptr; }
  const Masac* masac() const { return masac_ ? &*masac_ : nullptr; }
  const std::vector<int>& ground_stations() const { return gs_nodes_; }
  int agents() const { return n_agents_; }

  bool trace_paths = false;

  // Runs one episode. Training mode feeds the replay buffer and steps the
  // optimizers; eval mode acts greedily and touches no learner state.
  EpisodeResult run_episode(int episode, RunMode mode) {
    EpisodeResult out;
    const int steps = cfg_.steps_per_episode;
    const int per_episode = cfg_.workload.tasks_per_step * steps;
    std::vector<Task> tasks =
        generate_episode(cfg_.workload, cfg_.ladder, graph_, steps, cfg_.seed,
                         static_cast<std::uint64_t>(episode), episode * per_episode);
    Rng act_rng = make_rng(cfg_.seed, hash_combine(0xac7e9a31ULL,
                                                   static_cast<std::uint64_t>(episode)));
    std::vector<StreamState> streams(gs_nodes_.size());
    // streams start on the lowest rung so the first switch penalty is real
    for (auto& st : streams) st.last_played_bps = cfg_.ladder.levels.front().bitrate_bps;
    std::vector<int> last_actions(static_cast<std::size_t>(n_agents_), -1);
    const bool learn = masac_ && mode == RunMode::Train;

    struct Pending {
      std::vector<double> global_state;
      std::vector<std::vector<double>> obs;
      std::vector<int> actions;
      std::vector<double> rewards;
    };
    std::optional<Pending> pending;

    std::size_t next_task = 0;
    for (int step = 0; step < steps; ++step) {
      graph_.refresh_gains(static_cast<std::uint64_t>(episode) *
                               static_cast<std::uint64_t>(steps) +
                           static_cast<std::uint64_t>(step),
                           cfg_.seed);

      std::vector<TaskCtx> batch;
      while (next_task < tasks.size() && tasks[next_task].arrival_step == step) {
        TaskCtx tc;
        tc.task = tasks[next_task++];
        batch.push_back(std::move(tc));
      }

      // path admission, in task id order
      for (TaskCtx& tc : batch) route_task(tc, episode, out);

      // observations and bitrate actions
      const auto slots = observe_slots(batch, streams);
      const auto agent_obs = pack_obs(slots);
      const auto gstate = global_state(agent_obs, last_actions);
      std::vector<int> actions(static_cast<std::size_t>(n_agents_), 0);
      double mean_entropy = 0.0;
      if (masac_) {
        for (int a = 0; a < n_agents_; ++a) {
          const auto& nets = masac_->agents[static_cast<std::size_t>(a)];
          mean_entropy += entropy(policy_distribution(nets.actor, agent_obs[a]));
          actions[static_cast<std::size_t>(a)] =
              act(nets.actor, agent_obs[a], mode == RunMode::Eval, act_rng);
        }
        mean_entropy /= static_cast<double>(n_agents_);
      }

      // the previous slot's transition is complete once this state exists
      UpdateStats upd;
      bool updated = false;
      if (learn && pending) {
        Transition tr;
        tr.global_state = std::move(pending->global_state);
        tr.obs = std::move(pending->obs);
        tr.actions = std::move(pending->actions);
        tr.rewards = std::move(pending->rewards);
        tr.next_global_state = gstate;
        tr.next_obs = agent_obs;
        tr.done = 0.0;
        masac_->buffer.push(std::move(tr));
        pending.reset();
        updated = maybe_update(upd, episode, step);
      }

      // execution: bitrate choice, reservation upgrade, offloading, verdict
      for (TaskCtx& tc : batch) execute_task(tc, actions, streams);

      // rewards over the whole batch, no-path discards included
      int completed = 0;
      for (const TaskCtx& tc : batch)
        if (tc.rec.status == TaskStatus::Completed) ++completed;
      const double r_c = batch.empty()
                             ? 1.0
                             : completion_ratio(completed, static_cast<int>(batch.size()));
      std::vector<double> contrib(gs_nodes_.size(), 0.0);
      double video_sum = 0.0;
      for (TaskCtx& tc : batch) {
        tc.rec.batch_completion = r_c;
        tc.rec.reward = task_reward(tc.rec.qoe, tc.rec.e_total, cfg_.rewards, r_c);
        if (tc.task.kind == TaskKind::Video && tc.rec.agent >= 0) {
          const double v = tc.rec.qoe - cfg_.rewards.delta * tc.rec.e_total;
          contrib[static_cast<std::size_t>(tc.rec.agent)] += v;
          video_sum += v;
        }
      }
      const double shared = video_sum + cfg_.rewards.omega * r_c;
      require(std::isfinite(shared), "non-finite slot reward");
      out.step_rewards.push_back(shared);

      if (learn) {
        std::vector<double> rl(static_cast<std::size_t>(n_agents_));
        for (int a = 0; a < n_agents_; ++a) {
          const double base = (cfg_.sac.per_agent_reward && cfg_.scheme == Scheme::CcMasac)
                                  ? contrib[static_cast<std::size_t>(a)] +
                                        cfg_.rewards.omega * r_c
                                  : shared;
          rl[static_cast<std::size_t>(a)] = base * cfg_.sac.reward_scale;
        }
        pending = Pending{gstate, agent_obs, actions, std::move(rl)};
      }
      last_actions = actions;

      for (TaskCtx& tc : batch) {
        if (tc.routed && !tc.released) release_reservation(graph_, tc.reservation);
        out.records.push_back(std::move(tc.rec));
      }
      graph_.settle_ledger();

      if (learn)
        out.step_log.push_back({episode, step, updated ? upd.loss_actor : 0.0,
                                updated ? upd.loss_q1 : 0.0, updated ? upd.loss_q2 : 0.0,
                                mean_entropy, shared});
    }

    // terminal transition: zero successor observations, done = 1
    if (learn && pending) {
      std::vector<std::vector<double>> zobs(
          static_cast<std::size_t>(n_agents_),
          std::vector<double>(static_cast<std::size_t>(masac_->obs_dim()), 0.0));
      Transition tr;
      tr.global_state = std::move(pending->global_state);
      tr.obs = std::move(pending->obs);
      tr.actions = std::move(pending->actions);
      tr.rewards = std::move(pending->rewards);
      tr.next_global_state = global_state(zobs, last_actions);
      tr.next_obs = zobs;
      tr.done = 1.0;
      masac_->buffer.push(std::move(tr));
      pending.reset();
      UpdateStats upd;
      if (maybe_update(upd, episode, steps - 1) && !out.step_log.empty()) {
        StepLogRow& row = out.step_log.back();
        row.loss_actor = upd.loss_actor;
        row.loss_q1 = upd.loss_q1;
        row.loss_q2 = upd.loss_q2;
      }
    }
    return out;
  }

 private:
  static constexpr int kSlotDim = 8;

  struct StreamState {
    double last_encoded_bps = 0.0; // nothing uploaded yet at episode start
    double last_played_bps = 0.0;
  };

  struct TaskCtx {
    Task task;
    TaskRecord rec;
    bool routed = false;
    bool released = false;
    Reservation reservation;
    std::vector<int> nodes, links;
    int level = -1; // baseline pre-choice; learned schemes decide at action time
  };

  int agent_slot_for_task(const Task& t) const {
    return t.kind == TaskKind::Video ? user_gs_slot_[static_cast<std::size_t>(t.destination)]
                                     : -1;
  }

  void route_task(TaskCtx& tc, int episode, EpisodeResult& out) {
    const Task& t = tc.task;
    tc.rec.task_id = t.id;
    tc.rec.episode = episode;
    tc.rec.step = t.arrival_step;
    tc.rec.kind = t.kind;
    tc.rec.agent = agent_slot_for_task(t);
    tc.rec.deadline_s = t.deadline_s;
    tc.rec.data_bytes = t.data_bytes;
    const double rate = task_rate_ask_bps(cfg_.workload, cfg_.ladder, t);
    const double cask = task_compute_ask_cps(cfg_.workload, t, cfg_.ladder);
    switch (cfg_.scheme) {
      case Scheme::CcMasac:
      case Scheme::Sasac: {
        std::vector<CandidateTrace> tr;
        auto cand = select_path(graph_, t.source_edge, t.destination, rate, cask,
                                cfg_.psru, trace_paths ? &tr : nullptr);
        if (trace_paths) out.path_traces.push_back({t.id, std::move(tr)});
        if (cand) {
          tc.routed = true;
          tc.reservation = cand->reservation;
          tc.nodes = cand->nodes;
          tc.links = cand->links;
        }
        break;
      }
      case Scheme::Rrp: {
        auto ch = baseline_rrp(graph_, t, cfg_.workload, cfg_.ladder, cask);
        if (ch) commit_baseline(tc, *ch, rate, cask);
        break;
      }
      case Scheme::RndMaxbr: {
        Rng rng = make_rng(cfg_.seed,
                           hash_combine(0x52bd3fa7ULL, static_cast<std::uint64_t>(t.id)));
        auto ch = baseline_rnd_maxbr(graph_, t, cfg_.workload, cfg_.ladder, cask, rng);
        if (ch) commit_baseline(tc, *ch, rate, cask);
        break;
      }
    }
    if (tc.routed) {
      tc.rec.path_nodes = tc.nodes;
    } else {
      tc.rec.status = TaskStatus::Discarded;
      tc.rec.discard_reason = "no_path";
    }
  }

  void commit_baseline(TaskCtx& tc, const BaselineChoice& ch, double rate, double cask) {
    ReserveResult rr = try_reserve(graph_, ch.path, rate, cask);
    require(rr.accepted, "baseline path passed feasibility but failed to reserve");
    tc.routed = true;
    tc.reservation = rr.reservation;
    tc.nodes = ch.path.nodes;
    tc.links = ch.path.links;
    tc.level = ch.level;
  }

  // One 8-wide slot per ground station, filled from its first routed video
  // task this step: band availability/gain summaries, the stream's last
  // encoded and played rungs, pending data size and deadline. All scaled to
  // about unit range.
  std::vector<std::vector<double>> observe_slots(const std::vector<TaskCtx>& batch,
                                                 const std::vector<StreamState>& streams) const {
    std::vector<std::vector<double>> slots(gs_nodes_.size(),
                                           std::vector<double>(kSlotDim, 0.0));
    std::vector<char> filled(gs_nodes_.size(), 0);
    const double max_bps = cfg_.ladder.levels.back().bitrate_bps;
    for (const TaskCtx& tc : batch) {
      if (tc.task.kind != TaskKind::Video || !tc.routed) continue;
      const int gsl = user_gs_slot_[static_cast<std::size_t>(tc.task.destination)];
      if (filled[static_cast<std::size_t>(gsl)]) continue;
      filled[static_cast<std::size_t>(gsl)] = 1;
      double sat_min = 1.0, gnd_min = 1.0, sat_g = 0.0, gnd_g = 0.0;
      int ns = 0, ng = 0;
      for (int li : tc.links) {
        const Link& l = graph_.links[static_cast<std::size_t>(li)];
        const double ratio = graph_.link_available_bps(li) / l.capacity_bps;
        const double grel = l.gain_current / l.gain_mean;
        if (l.band == LinkBand::Satellite) {
          sat_min = std::min(sat_min, ratio);
          sat_g += grel;
          ++ns;
        } else {
          gnd_min = std::min(gnd_min, ratio);
          gnd_g += grel;
          ++ng;
        }
      }
      auto& s = slots[static_cast<std::size_t>(gsl)];
      const auto& st = streams[static_cast<std::size_t>(gsl)];
      s[0] = sat_min;
      s[1] = ns > 0 ? sat_g / ns : 0.0;
      s[2] = gnd_min;
      s[3] = ng > 0 ? gnd_g / ng : 0.0;
      s[4] = st.last_encoded_bps / max_bps;
      s[5] = st.last_played_bps / max_bps;
      s[6] = video_bytes_for_level(cfg_.ladder, n_actions_ - 1) / 1e7;
      s[7] = tc.task.deadline_s / 10.0;
    }
    return slots;
  }

  std::vector<std::vector<double>> pack_obs(
      const std::vector<std::vector<double>>& slots) const {
    if (cfg_.scheme == Scheme::Sasac) {
      std::vector<double> all;
      for (const auto& s : slots) all.insert(all.end(), s.begin(), s.end());
      return {std::move(all)};
    }
    return slots;
  }

  // Global critic input: every agent's observation followed by the one-hot
  // of every agent's previous action (all-zero before the first slot).
  std::vector<double> global_state(const std::vector<std::vector<double>>& agent_obs,
                                   const std::vector<int>& last_actions) const {
    std::vector<double> g;
    for (const auto& o : agent_obs) g.insert(g.end(), o.begin(), o.end());
    for (int a : last_actions)
      for (int k = 0; k < n_actions_; ++k) g.push_back(a == k ? 1.0 : 0.0);
    return g;
  }

  void execute_task(TaskCtx& tc, const std::vector<int>& actions,
                    std::vector<StreamState>& streams) {
    if (!tc.routed) return;
    Task& t = tc.task;
    int gsl = -1, level = -1;
    if (t.kind == TaskKind::Video) {
      gsl = user_gs_slot_[static_cast<std::size_t>(t.destination)];
      level = masac_ ? actions[cfg_.scheme == Scheme::Sasac
                                   ? 0
                                   : static_cast<std::size_t>(gsl)]
                     : tc.level;
      t.chosen_level = level;
      t.data_bytes = video_bytes_for_level(cfg_.ladder, level);
      tc.rec.level = level;
      tc.rec.data_bytes = t.data_bytes;
      // raise the admission-time reservation toward the chosen rung's ask,
      // capped by what the bottleneck can still give on top of our own hold
      const double ask = video_rate_ask_bps(cfg_.workload, cfg_.ladder, level);
      double free = std::numeric_limits<double>::infinity();
      for (int li : tc.links) free = std::min(free, graph_.link_available_bps(li));
      const double allocated = std::min(ask, free + tc.reservation.rate_bps);
      const double delta = allocated - tc.reservation.rate_bps;
      if (delta > 0.0) {
        for (int li : tc.links) graph_.reserve_link(li, delta);
        tc.reservation.rate_bps += delta;
      }
    }
    tc.rec.allocated_bps = tc.reservation.rate_bps;

    OffloadPlan plan = plan_offload(t, tc.nodes, tc.links, tc.reservation.alloc_cps,
                                    tc.reservation.rate_bps, graph_);
    if (!plan.feasible) {
      tc.rec.status = TaskStatus::Discarded;
      tc.rec.discard_reason = "compute_budget";
      release_reservation(graph_, tc.reservation);
      tc.released = true;
    } else {
      const DelayBreakdown d = total_delay(t, plan, graph_);
      tc.rec.t_comp_lc = d.t_comp_lc;
      tc.rec.t_comm_lc = d.t_comm_lc;
      tc.rec.t_comp_sc = d.t_comp_sc;
      tc.rec.t_comm_sc = d.t_comm_sc;
      tc.rec.t_total = d.t_total;
      tc.rec.delay_branch = d.branch;
      const UsageSnapshot u = usage_ratios(t, plan, graph_, cfg_.slot_seconds);
      tc.rec.u_comm = u.u_comm;
      tc.rec.u_comp = u.u_comp;
      tc.rec.status = enforce_deadline(d, t.deadline_s);
      if (tc.rec.status == TaskStatus::Discarded) {
        tc.rec.discard_reason = "deadline";
        release_reservation(graph_, tc.reservation);
        tc.released = true;
      }
    }

    if (t.kind == TaskKind::Video) {
      StreamState& st = streams[static_cast<std::size_t>(gsl)];
      const double seg = cfg_.ladder.segment_seconds;
      const double bitrate = cfg_.ladder.levels[static_cast<std::size_t>(level)].bitrate_bps;
      tc.rec.e_encode = encode_energy_j(cfg_.energy.kappa_v, bitrate, seg);
      if (plan.feasible) {
        // The previous segment goes up at the allocated rate, so the average
        // upload rate equals the allocation and the inverse-Shannon exponent
        // stays bounded by the ladder.
        const double prev_bits = st.last_encoded_bps * seg;
        const double t_u = transmission_delay_s(prev_bits / 8.0,
                                                tc.reservation.rate_bps);
        if (t_u > 0.0) {
          const double h = graph_.links[static_cast<std::size_t>(tc.links[0])].gain_current;
          tc.rec.e_upload = upload_energy_j(t_u, h, prev_bits, cfg_.energy.upload_bw_hz,
                                            noise_power_w(graph_.channel, 1.0));
        }
        for (const OffloadShare& sh : plan.shares) {
          if (sh.fraction <= 0.0 || sh.alloc_cps <= 0.0) continue;
          const double tj = computation_delay_s(sh.fraction, t.data_bytes,
                                                t.cycles_per_byte, sh.alloc_cps);
          tc.rec.e_transcode += transcode_energy_j(cfg_.energy.eta_v, sh.alloc_cps, tj);
        }
      }
      tc.rec.e_total = tc.rec.e_encode + tc.rec.e_upload + tc.rec.e_transcode;
      if (tc.rec.status == TaskStatus::Completed) {
        tc.rec.qoe = qoe(st.last_played_bps, bitrate, tc.reservation.rate_bps, cfg_.qoe);
        st.last_played_bps = bitrate;
      }
      st.last_encoded_bps = bitrate;
    }
  }

  bool maybe_update(UpdateStats& out, int episode, int step) {
    const int warm = std::max(cfg_.sac.warmup_transitions, cfg_.sac.batch);
    if (static_cast<int>(masac_->buffer.size()) < warm) return false;
    ++update_tick_;
    if (cfg_.sac.update_every > 1 && update_tick_ % cfg_.sac.update_every != 0)
      return false;
    out = masac_->update(update_rng_);
    if (!std::isfinite(out.loss_q1) || !std::isfinite(out.loss_q2) ||
        !std::isfinite(out.loss_actor))
      throw TrainingDiverged(episode, step);
    return true;
  }

  ExperimentConfig cfg_;
  NetworkGraph graph_;
  std::optional<Masac> masac_;
  std::vector<int> gs_nodes_;
  std::vector<int> user_gs_slot_;
  int n_agents_ = 0;
  int n_actions_ = 0;
  Rng update_rng_;
  std::uint64_t update_tick_ = 0;
};

// ---- run drivers -----------------------------------------------------------

struct RunSummary {
  std::vector<EpisodeStats> episodes;
  std::vector<TaskRecord> records;       // empty when keep_records is off
  std::vector<StepLogRow> step_log;
  std::vector<PathTraceRow> path_traces;
};

template <typename OnEpisode>
RunSummary run_episodes(Simulator& sim, int episodes, RunMode mode, int episode_base,
                        bool keep_records, OnEpisode&& on_episode) {
  RunSummary s;
  for (int e = 0; e < episodes; ++e) {
    const int ep = episode_base + e;
    EpisodeResult r = sim.run_episode(ep, mode);
    EpisodeStats st = episode_stats(ep, r.records, r.step_rewards);
    on_episode(ep, r, st);
    s.episodes.push_back(st);
    if (keep_records)
      s.records.insert(s.records.end(), std::make_move_iterator(r.records.begin()),
                       std::make_move_iterator(r.records.end()));
    s.step_log.insert(s.step_log.end(), r.step_log.begin(), r.step_log.end());
    s.path_traces.insert(s.path_traces.end(),
                         std::make_move_iterator(r.path_traces.begin()),
                         std::make_move_iterator(r.path_traces.end()));
  }
  return s;
}

inline RunSummary run_training(Simulator& sim, int episodes, bool keep_records = true) {
  return run_episodes(sim, episodes, RunMode::Train, 0, keep_records,
                      [](int, const EpisodeResult&, const EpisodeStats&) {});
}

// Evaluation episodes draw from a workload stream disjoint from training.
inline RunSummary run_evaluation(Simulator& sim, int episodes, int episode_base = 1000000,
                                 bool keep_records = true) {
  return run_episodes(sim, episodes, RunMode::Eval, episode_base, keep_records,
                      [](int, const EpisodeResult&, const EpisodeStats&) {});
}

struct CompareRow {
  std::string scheme;
  int episodes = 0;
  long tasks = 0;
  double completion = 0.0;
  double mean_reward = 0.0;
  double mean_qoe_video = 0.0;
  double mean_energy_video = 0.0;
  double mean_delay_completed = 0.0;
  double mean_step_reward = 0.0;
  double objective_per_episode = 0.0;
};

inline CompareRow summarize_run(const std::string& name, const RunSummary& s,
                                const RewardWeights& w) {
  CompareRow row;
  row.scheme = name;
  row.episodes = static_cast<int>(s.episodes.size());
  long completed = 0, nvideo = 0, ndone = 0;
  double rsum = 0.0, qsum = 0.0, esum = 0.0, dsum = 0.0;
  for (const TaskRecord& r : s.records) {
    ++row.tasks;
    rsum += r.reward;
    if (r.status == TaskStatus::Completed) {
      ++completed;
      dsum += r.t_total;
      ++ndone;
    }
    if (r.kind == TaskKind::Video) {
      qsum += r.qoe;
      esum += r.e_total;
      ++nvideo;
    }
  }
  if (row.tasks > 0) {
    row.completion = static_cast<double>(completed) / static_cast<double>(row.tasks);
    row.mean_reward = rsum / static_cast<double>(row.tasks);
  }
  if (nvideo > 0) {
    row.mean_qoe_video = qsum / static_cast<double>(nvideo);
    row.mean_energy_video = esum / static_cast<double>(nvideo);
  }
  if (ndone > 0) row.mean_delay_completed = dsum / static_cast<double>(ndone);
  double sr = 0.0;
  for (const EpisodeStats& st : s.episodes) sr += st.mean_step_reward;
  if (row.episodes > 0) {
    row.mean_step_reward = sr / row.episodes;
    row.objective_per_episode = objective_score(s.records, w) / row.episodes;
  }
  return row;
}

} // namespace stnsim

#pragma once

// Discrete-action soft actor-critic over a shared global state, one actor per
// ground-station agent, twin critics with target copies, closed-form
// expectations over the finite action set (no sampling estimator anywhere in
// the losses), plus the two non-learning baselines used for comparison runs.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "stnsim/mlp.hpp"
#include "stnsim/pathsel.hpp"
#include "stnsim/workload.hpp"

namespace stnsim {

struct SacConfig {
  double gamma = 0.99;
  double rho = 0.995;     // target smoothing: target <- rho*target + (1-rho)*online
  double alpha_h = 0.2;   // fixed entropy temperature
  double lr = 3e-4;
  double momentum = 0.9;
  int batch = 256;
  int buffer_capacity = 100000;
  std::vector<int> hidden = {128, 128};
  int warmup_transitions = 1000;
  int update_every = 1;
  bool per_agent_reward = false;
  double reward_scale = 1.0;
  int n_agents = 3;
};

inline std::vector<double> softmax(const std::vector<double>& logits) {
  double mx = logits[0];
  for (double v : logits) mx = std::max(mx, v);
  std::vector<double> p(logits.size());
  double s = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - mx);
    s += p[i];
  }
  for (double& v : p) v /= s;
  return p;
}

// -sum p log p with the 0*log(0) = 0 convention.
inline double entropy(const std::vector<double>& probs) {
  double h = 0.0;
  for (double p : probs) {
    require(p >= 0.0 && p <= 1.0 + 1e-12, "entropy: bad probability");
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

inline std::vector<double> policy_distribution(const Mlp& actor,
                                               const std::vector<double>& obs) {
  return softmax(actor.forward(obs));
}

// greedy = argmax (lowest index on ties); otherwise one draw from the
// categorical distribution using the supplied engine.
inline int act(const Mlp& actor, const std::vector<double>& obs, bool greedy, Rng& rng) {
  const std::vector<double> p = policy_distribution(actor, obs);
  if (greedy) {
    int best = 0;
    for (std::size_t i = 1; i < p.size(); ++i)
      if (p[i] > p[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
    return best;
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double x = u(rng), acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (x <= acc) return static_cast<int>(i);
  }
  return static_cast<int>(p.size()) - 1;
}

struct AgentNets {
  Mlp actor;
  Mlp q1, q2;
  Mlp q1_target, q2_target;
  SgdMomentum opt_actor, opt_q1, opt_q2;
  double gamma = 0.99;
  double rho = 0.995;
  double alpha_h = 0.2;

  void init(int obs_dim, int global_dim, int n_actions, const std::vector<int>& hidden,
            const SacConfig& cfg, std::uint64_t seed) {
    actor = Mlp(obs_dim, hidden, n_actions);
    q1 = Mlp(global_dim, hidden, n_actions);
    q2 = Mlp(global_dim, hidden, n_actions);
    actor.init_params(hash_combine(seed, 1));
    q1.init_params(hash_combine(seed, 2));
    q2.init_params(hash_combine(seed, 3));
    q1_target = q1; // targets start equal to the online nets
    q2_target = q2;
    gamma = cfg.gamma;
    rho = cfg.rho;
    alpha_h = cfg.alpha_h;
    opt_actor = {cfg.lr, cfg.momentum, {}};
    opt_q1 = {cfg.lr, cfg.momentum, {}};
    opt_q2 = {cfg.lr, cfg.momentum, {}};
  }
};

// Soft Bellman target, exact expectation over the action set:
// y = r + gamma*(1-done) * sum_a pi(a|s') * (min(Q1t,Q2t)(s',a) - alpha*log pi(a|s')).
inline double q_target(const AgentNets& n, const std::vector<double>& next_obs,
                       const std::vector<double>& next_global, double reward,
                       double done) {
  require(done == 0.0 || done == 1.0, "q_target: done must be 0 or 1");
  if (done == 1.0) return reward;
  const std::vector<double> p = policy_distribution(n.actor, next_obs);
  const std::vector<double> t1 = n.q1_target.forward(next_global);
  const std::vector<double> t2 = n.q2_target.forward(next_global);
  double v = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    if (p[a] <= 0.0) continue; // 0 * log 0 term
    v += p[a] * (std::min(t1[a], t2[a]) - n.alpha_h * std::log(p[a]));
  }
  return reward + n.gamma * v;
}

struct AgentBatch {
  std::vector<std::vector<double>> obs, next_obs, global_state, next_global_state;
  std::vector<int> actions;
  std::vector<double> rewards;
  std::vector<double> dones;

  std::size_t size() const { return actions.size(); }
};

// One gradient step on both critics against fixed targets. Returns the
// pre-step MSE losses (q1, q2).
inline std::pair<double, double> critic_update(AgentNets& n, const AgentBatch& b) {
  const std::size_t B = b.size();
  require(B > 0, "critic_update: empty batch");
  std::vector<double> y(B);
  for (std::size_t i = 0; i < B; ++i)
    y[i] = q_target(n, b.next_obs[i], b.next_global_state[i], b.rewards[i], b.dones[i]);

  auto step_one = [&](Mlp& q, SgdMomentum& opt) {
    std::vector<double> grad(q.params.size(), 0.0);
    std::vector<double> dout(static_cast<std::size_t>(q.output_dim()));
    Mlp::Cache cache;
    double loss = 0.0;
    for (std::size_t i = 0; i < B; ++i) {
      const std::vector<double> out = q.forward(b.global_state[i], &cache);
      const double diff = out[static_cast<std::size_t>(b.actions[i])] - y[i];
      loss += diff * diff;
      std::fill(dout.begin(), dout.end(), 0.0);
      dout[static_cast<std::size_t>(b.actions[i])] =
          2.0 * diff / static_cast<double>(B);
      q.backward(cache, dout.data(), grad.data());
    }
    opt.step(q.params, grad);
    return loss / static_cast<double>(B);
  };
  const double l1 = step_one(n.q1, n.opt_q1);
  const double l2 = step_one(n.q2, n.opt_q2);
  return {l1, l2};
}

// One gradient step on the actor. Loss (to minimize):
// E_s[ sum_a pi(a|s) * (alpha*log pi(a|s) - min(Q1,Q2)(s,a)) ],
// critics treated as constants. Returns the pre-step loss.
inline double actor_update(AgentNets& n, const AgentBatch& b) {
  const std::size_t B = b.size();
  require(B > 0, "actor_update: empty batch");
  std::vector<double> grad(n.actor.params.size(), 0.0);
  Mlp::Cache cache;
  double loss = 0.0;
  const std::size_t A = static_cast<std::size_t>(n.actor.output_dim());
  std::vector<double> dlogits(A);
  for (std::size_t i = 0; i < B; ++i) {
    const std::vector<double> logits = n.actor.forward(b.obs[i], &cache);
    const std::vector<double> p = softmax(logits);
    const std::vector<double> m1 = n.q1.forward(b.global_state[i]);
    const std::vector<double> m2 = n.q2.forward(b.global_state[i]);
    // phi_a = alpha*log pi_a - minQ_a; loss_i = sum_a pi_a * phi_a;
    // dloss/dlogit_k = pi_k * (phi_k - sum_a pi_a phi_a).
    double mean_phi = 0.0, loss_i = 0.0;
    std::vector<double> phi(A);
    for (std::size_t a = 0; a < A; ++a) {
      const double logp = std::log(std::max(p[a], 1e-300));
      phi[a] = n.alpha_h * logp - std::min(m1[a], m2[a]);
      loss_i += p[a] * phi[a];
    }
    mean_phi = loss_i;
    loss += loss_i;
    for (std::size_t a = 0; a < A; ++a)
      dlogits[a] = p[a] * (phi[a] - mean_phi) / static_cast<double>(B);
    n.actor.backward(cache, dlogits.data(), grad.data());
  }
  n.opt_actor.step(n.actor.params, grad);
  return loss / static_cast<double>(B);
}

inline void update_targets(AgentNets& n) {
  soft_update(n.q1_target.params, n.q1.params, n.rho);
  soft_update(n.q2_target.params, n.q2.params, n.rho);
}

// Joint transition: everything every agent needs for a centralized update.
struct Transition {
  std::vector<double> global_state, next_global_state;
  std::vector<std::vector<double>> obs, next_obs;
  std::vector<int> actions;
  std::vector<double> rewards; // per agent (identical under the shared scheme)
  double done = 0.0;
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(int capacity = 100000) : capacity_(capacity) {
    require(capacity > 0, "ReplayBuffer: capacity must be > 0");
  }

  void push(Transition t) {
    if (static_cast<int>(data_.size()) < capacity_) {
      data_.push_back(std::move(t));
    } else {
      data_[head_] = std::move(t);
      head_ = (head_ + 1) % static_cast<std::size_t>(capacity_);
    }
  }

  std::size_t size() const { return data_.size(); }

  std::vector<const Transition*> sample(int batch, Rng& rng) const {
    require(static_cast<int>(data_.size()) >= batch, "ReplayBuffer: not enough data");
    std::uniform_int_distribution<std::size_t> pick(0, data_.size() - 1);
    std::vector<const Transition*> out;
    out.reserve(static_cast<std::size_t>(batch));
    for (int i = 0; i < batch; ++i) out.push_back(&data_[pick(rng)]);
    return out;
  }

 private:
  int capacity_;
  std::size_t head_ = 0;
  std::vector<Transition> data_;
};

struct UpdateStats {
  double loss_q1 = 0.0;
  double loss_q2 = 0.0;
  double loss_actor = 0.0;
};

// The agent team: per-agent nets over a shared replay of joint transitions.
class Masac {
 public:
  Masac(const SacConfig& cfg, int obs_dim, int n_actions, std::uint64_t seed)
      : buffer(cfg.buffer_capacity), cfg_(cfg) {
    require(cfg.n_agents >= 1, "Masac: need at least one agent");
    obs_dim_ = obs_dim;
    n_actions_ = n_actions;
    global_dim_ = cfg.n_agents * (obs_dim + n_actions);
    agents.resize(static_cast<std::size_t>(cfg.n_agents));
    for (int i = 0; i < cfg.n_agents; ++i)
      agents[static_cast<std::size_t>(i)].init(obs_dim, global_dim_, n_actions,
                                               cfg.hidden, cfg,
                                               hash_combine(seed, 100 + i));
  }

  int obs_dim() const { return obs_dim_; }
  int global_dim() const { return global_dim_; }
  int n_actions() const { return n_actions_; }
  const SacConfig& config() const { return cfg_; }

  // One training iteration: per agent, critics then actor then targets.
  UpdateStats update(Rng& rng) {
    const auto sampled = buffer.sample(cfg_.batch, rng);
    UpdateStats st;
    for (std::size_t ai = 0; ai < agents.size(); ++ai) {
      AgentBatch b;
      b.obs.reserve(sampled.size());
      for (const Transition* t : sampled) {
        b.obs.push_back(t->obs[ai]);
        b.next_obs.push_back(t->next_obs[ai]);
        b.global_state.push_back(t->global_state);
        b.next_global_state.push_back(t->next_global_state);
        b.actions.push_back(t->actions[ai]);
        b.rewards.push_back(t->rewards[ai]);
        b.dones.push_back(t->done);
      }
      const auto [l1, l2] = critic_update(agents[ai], b);
      st.loss_q1 += l1;
      st.loss_q2 += l2;
      st.loss_actor += actor_update(agents[ai], b);
      update_targets(agents[ai]);
    }
    const double n = static_cast<double>(agents.size());
    st.loss_q1 /= n;
    st.loss_q2 /= n;
    st.loss_actor /= n;
    return st;
  }

  std::vector<AgentNets> agents;
  ReplayBuffer buffer;

 private:
  SacConfig cfg_;
  int obs_dim_ = 0, global_dim_ = 0, n_actions_ = 0;
};

// ---- Non-learning baselines ----------------------------------------------

struct BaselineChoice {
  PathHops path;
  int level = -1; // video rung; -1 for monitoring tasks
};

namespace detail {

inline std::vector<PathHops> feasible_candidates(const NetworkGraph& g, int src, int dst,
                                                 double rate_bps, double compute_ask_cps,
                                                 std::size_t cap) {
  std::vector<PathHops> out;
  for (const PathHops& p : enumerate_simple_paths(g, src, dst, cap)) {
    NetworkGraph scratch = g;
    if (try_reserve(scratch, p, rate_bps, compute_ask_cps).accepted) out.push_back(p);
  }
  return out;
}

inline double bottleneck_available_bps(const NetworkGraph& g, const PathHops& p) {
  double b = std::numeric_limits<double>::infinity();
  for (int li : p.links) b = std::min(b, g.link_available_bps(li));
  return b;
}

inline int highest_fitting_level(const NetworkGraph& g, const PathHops& p,
                                 const WorkloadConfig& w, const BitrateLadder& ladder) {
  const double avail = bottleneck_available_bps(g, p);
  int best = 0; // admission guaranteed the lowest rung fits
  for (int l = 1; l < static_cast<int>(ladder.levels.size()); ++l)
    if (video_rate_ask_bps(w, ladder, l) <= avail + 1e-9) best = l;
  return best;
}

} // namespace detail

// Random feasible path, then the highest bitrate whose reservation fits it.
inline std::optional<BaselineChoice> baseline_rnd_maxbr(
    const NetworkGraph& g, const Task& task, const WorkloadConfig& w,
    const BitrateLadder& ladder, double compute_ask_cps, Rng& rng,
    std::size_t cap = 256) {
  const double rate = task_rate_ask_bps(w, ladder, task);
  const auto cands =
      detail::feasible_candidates(g, task.source_edge, task.destination, rate,
                                  compute_ask_cps, cap);
  if (cands.empty()) return std::nullopt;
  std::uniform_int_distribution<std::size_t> pick(0, cands.size() - 1);
  BaselineChoice c;
  c.path = cands[pick(rng)];
  if (task.kind == TaskKind::Video)
    c.level = detail::highest_fitting_level(g, c.path, w, ladder);
  return c;
}

// Residual-ratio path: maximize summed (link + compute) availability ratios
// over the candidate's elements, lexicographic node sequence on ties; then the
// highest bitrate that fits.
inline std::optional<BaselineChoice> baseline_rrp(const NetworkGraph& g, const Task& task,
                                                  const WorkloadConfig& w,
                                                  const BitrateLadder& ladder,
                                                  double compute_ask_cps,
                                                  std::size_t cap = 256) {
  const double rate = task_rate_ask_bps(w, ladder, task);
  const auto cands =
      detail::feasible_candidates(g, task.source_edge, task.destination, rate,
                                  compute_ask_cps, cap);
  if (cands.empty()) return std::nullopt;
  double best_score = -1.0;
  const PathHops* best = nullptr;
  for (const PathHops& p : cands) {
    double s = 0.0;
    for (int li : p.links)
      s += g.link_available_bps(li) / g.links[li].capacity_bps;
    for (int ni : p.nodes) {
      const double cap_cps = g.nodes[ni].compute_capacity_cps;
      if (cap_cps > 0.0) s += g.node_available_cps(ni) / cap_cps;
    }
    if (s > best_score || (s == best_score && p.nodes < best->nodes)) {
      best_score = s;
      best = &p;
    }
  }
  BaselineChoice c;
  c.path = *best;
  if (task.kind == TaskKind::Video)
    c.level = detail::highest_fitting_level(g, c.path, w, ladder);
  return c;
}

} // namespace stnsim

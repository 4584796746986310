#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "stnsim/masac.hpp"

using namespace stnsim;
using namespace testutil;
using Catch::Approx;

namespace {

AgentNets zeroed_nets(int obs_dim, int global_dim, int n_actions) {
  SacConfig cfg;
  cfg.hidden = {};
  AgentNets n;
  n.init(obs_dim, global_dim, n_actions, cfg.hidden, cfg, 1);
  std::fill(n.actor.params.begin(), n.actor.params.end(), 0.0);
  std::fill(n.q1.params.begin(), n.q1.params.end(), 0.0);
  std::fill(n.q2.params.begin(), n.q2.params.end(), 0.0);
  std::fill(n.q1_target.params.begin(), n.q1_target.params.end(), 0.0);
  std::fill(n.q2_target.params.begin(), n.q2_target.params.end(), 0.0);
  return n;
}

AgentBatch tiny_batch(int obs_dim, int global_dim, int n_actions, int B,
                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  AgentBatch b;
  for (int i = 0; i < B; ++i) {
    std::vector<double> o(static_cast<std::size_t>(obs_dim));
    std::vector<double> no(static_cast<std::size_t>(obs_dim));
    std::vector<double> gl(static_cast<std::size_t>(global_dim));
    std::vector<double> ngl(static_cast<std::size_t>(global_dim));
    for (auto& v : o) v = u(rng);
    for (auto& v : no) v = u(rng);
    for (auto& v : gl) v = u(rng);
    for (auto& v : ngl) v = u(rng);
    b.obs.push_back(o);
    b.next_obs.push_back(no);
    b.global_state.push_back(gl);
    b.next_global_state.push_back(ngl);
    b.actions.push_back(static_cast<int>(rng() % static_cast<std::uint64_t>(n_actions)));
    b.rewards.push_back(u(rng));
    b.dones.push_back(i % 4 == 0 ? 1.0 : 0.0);
  }
  return b;
}

} // namespace

TEST_CASE("softmax and entropy behave at the edges") {
  const auto p = softmax({0.0, 0.0, 0.0, 0.0});
  for (double v : p) CHECK(v == Approx(0.25));
  CHECK(entropy(p) == Approx(std::log(4.0)).epsilon(1e-12));
  // Shift invariance.
  const auto q = softmax({1000.0, 1001.0});
  const auto q2 = softmax({0.0, 1.0});
  CHECK(q[0] == Approx(q2[0]).epsilon(1e-12));
  // A spike carries no entropy; the zero terms drop out cleanly.
  CHECK(entropy({1.0, 0.0, 0.0}) == 0.0);
}

TEST_CASE("greedy action is the argmax with lowest-index ties") {
  Mlp actor(2, {}, 3);
  actor.params = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 2.0, 2.0};
  Rng rng = make_rng(1, 2);
  // Logits (1, 2, 2): ties resolve to action 1.
  CHECK(act(actor, {0.0, 0.0}, true, rng) == 1);
}

TEST_CASE("sampled actions follow the policy distribution") {
  Mlp actor(1, {}, 3);
  // Logits (0, log2, log3) -> probabilities (1/6, 2/6, 3/6).
  actor.params = {0.0, 0.0, 0.0, 0.0, std::log(2.0), std::log(3.0)};
  Rng rng = make_rng(3, 4);
  int counts[3] = {0, 0, 0};
  const int n = 30000;
  for (int i = 0; i < n; ++i) ++counts[act(actor, {0.0}, false, rng)];
  CHECK(counts[0] / static_cast<double>(n) == Approx(1.0 / 6.0).margin(0.02));
  CHECK(counts[1] / static_cast<double>(n) == Approx(2.0 / 6.0).margin(0.02));
  CHECK(counts[2] / static_cast<double>(n) == Approx(0.5).margin(0.02));
}

TEST_CASE("soft Bellman target reduces to known closed forms") {
  AgentNets n = zeroed_nets(2, 4, 4);
  n.gamma = 0.99;
  n.alpha_h = 0.2;
  // Terminal: the reward passes through untouched.
  CHECK(q_target(n, {0.0, 0.0}, {0.0, 0.0, 0.0, 0.0}, 3.5, 1.0) == 3.5);
  // Zeroed nets: uniform policy over 4 actions, zero Q, so the value term is
  // exactly the entropy bonus alpha * ln 4.
  const double want = 1.0 + 0.99 * 0.2 * std::log(4.0);
  CHECK(q_target(n, {0.0, 0.0}, {0.0, 0.0, 0.0, 0.0}, 1.0, 0.0) ==
        Approx(want).epsilon(1e-12));
  // gamma = 0 collapses to the immediate reward.
  n.gamma = 0.0;
  CHECK(q_target(n, {0.5, -0.5}, {0.1, 0.2, 0.3, 0.4}, -2.0, 0.0) == Approx(-2.0));
  CHECK_THROWS_AS(q_target(n, {0.0, 0.0}, {0.0, 0.0, 0.0, 0.0}, 0.0, 0.5),
                  std::invalid_argument);
}

TEST_CASE("critic steps descend on a frozen batch") {
  SacConfig cfg;
  cfg.hidden = {8};
  cfg.lr = 1e-2;
  cfg.momentum = 0.0;
  AgentNets n;
  n.init(3, 6, 4, cfg.hidden, cfg, 5);
  n.gamma = 0.9;
  const AgentBatch b = tiny_batch(3, 6, 4, 16, 21);
  // Targets depend only on the actor and target nets, which critic_update
  // leaves untouched, so the regression surface is fixed.
  const auto [l1a, l2a] = critic_update(n, b);
  const auto [l1b, l2b] = critic_update(n, b);
  CHECK(l1b < l1a);
  CHECK(l2b < l2a);
}

TEST_CASE("critic gradient matches finite differences") {
  SacConfig cfg;
  cfg.hidden = {4};
  cfg.lr = 1.0; // recover the raw gradient from a single step
  cfg.momentum = 0.0;
  AgentNets n;
  n.init(2, 4, 3, cfg.hidden, cfg, 11);
  const AgentBatch b = tiny_batch(2, 4, 3, 8, 31);

  // Independent loss: mean squared TD error against the same targets.
  std::vector<double> y(b.size());
  for (std::size_t i = 0; i < b.size(); ++i)
    y[i] = q_target(n, b.next_obs[i], b.next_global_state[i], b.rewards[i], b.dones[i]);
  auto loss_of = [&](const Mlp& q) {
    double s = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      const auto out = q.forward(b.global_state[i]);
      const double d = out[static_cast<std::size_t>(b.actions[i])] - y[i];
      s += d * d;
    }
    return s / static_cast<double>(b.size());
  };

  const Mlp before = n.q1;
  critic_update(n, b);
  const double h = 1e-6;
  double worst = 0.0;
  for (std::size_t i = 0; i < before.params.size(); ++i) {
    const double g = before.params[i] - n.q1.params[i]; // lr = 1, momentum = 0
    Mlp plus = before, minus = before;
    plus.params[i] += h;
    minus.params[i] -= h;
    const double fd = (loss_of(plus) - loss_of(minus)) / (2.0 * h);
    const double denom = std::max({std::fabs(fd), std::fabs(g), 1e-8});
    worst = std::max(worst, std::fabs(fd - g) / denom);
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("actor gradient matches finite differences") {
  SacConfig cfg;
  cfg.hidden = {4};
  cfg.lr = 1.0;
  cfg.momentum = 0.0;
  AgentNets n;
  n.init(2, 4, 3, cfg.hidden, cfg, 13);
  const AgentBatch b = tiny_batch(2, 4, 3, 8, 41);

  // Independent loss: E[pi * (alpha log pi - min Q)], critics constant.
  auto loss_of = [&](const Mlp& actor) {
    double s = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      const auto p = softmax(actor.forward(b.obs[i]));
      const auto m1 = n.q1.forward(b.global_state[i]);
      const auto m2 = n.q2.forward(b.global_state[i]);
      for (std::size_t a = 0; a < p.size(); ++a)
        s += p[a] * (n.alpha_h * std::log(p[a]) - std::min(m1[a], m2[a]));
    }
    return s / static_cast<double>(b.size());
  };

  const Mlp before = n.actor;
  actor_update(n, b);
  const double h = 1e-6;
  double worst = 0.0;
  for (std::size_t i = 0; i < before.params.size(); ++i) {
    const double g = before.params[i] - n.actor.params[i];
    Mlp plus = before, minus = before;
    plus.params[i] += h;
    minus.params[i] -= h;
    const double fd = (loss_of(plus) - loss_of(minus)) / (2.0 * h);
    const double denom = std::max({std::fabs(fd), std::fabs(g), 1e-8});
    worst = std::max(worst, std::fabs(fd - g) / denom);
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("target refresh copies under rho = 0 and crawls otherwise") {
  SacConfig cfg;
  cfg.hidden = {4};
  AgentNets n;
  n.init(2, 4, 3, cfg.hidden, cfg, 17);
  n.rho = 0.0;
  update_targets(n);
  CHECK(n.q1_target.params == n.q1.params);
  CHECK(n.q2_target.params == n.q2.params);
  n.rho = 0.995;
  const auto frozen = n.q1.params;
  const auto prev = n.q1_target.params;
  n.q1.params[0] += 1.0;
  update_targets(n);
  CHECK(n.q1_target.params[0] ==
        Approx(0.995 * prev[0] + 0.005 * n.q1.params[0]).epsilon(1e-12));
}

TEST_CASE("replay evicts oldest first and samples uniformly") {
  ReplayBuffer buf(3);
  auto tr = [](double r) {
    Transition t;
    t.rewards = {r};
    return t;
  };
  buf.push(tr(0.0));
  buf.push(tr(1.0));
  buf.push(tr(2.0));
  CHECK(buf.size() == 3);
  buf.push(tr(3.0)); // evicts the oldest (reward 0)
  CHECK(buf.size() == 3);
  Rng rng = make_rng(5, 6);
  int seen[4] = {0, 0, 0, 0};
  for (int i = 0; i < 3000; ++i) {
    for (const Transition* t : buf.sample(1, rng))
      ++seen[static_cast<int>(t->rewards[0])];
  }
  CHECK(seen[0] == 0);
  for (int r = 1; r <= 3; ++r)
    CHECK(seen[r] / 3000.0 == Approx(1.0 / 3.0).margin(0.03));
  CHECK_THROWS_AS(buf.sample(4, rng), std::invalid_argument);
}

TEST_CASE("the team updates every agent and averages the losses") {
  SacConfig cfg;
  cfg.hidden = {4};
  cfg.n_agents = 2;
  cfg.batch = 8;
  Masac m(cfg, 3, 4, 77);
  CHECK(m.obs_dim() == 3);
  CHECK(m.n_actions() == 4);
  CHECK(m.global_dim() == 2 * (3 + 4));
  REQUIRE(m.agents.size() == 2);
  // Agents start distinct (different init streams).
  CHECK(m.agents[0].actor.params != m.agents[1].actor.params);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 16; ++i) {
    Transition t;
    for (int a = 0; a < 2; ++a) {
      t.obs.push_back({u(rng), u(rng), u(rng)});
      t.next_obs.push_back({u(rng), u(rng), u(rng)});
      t.actions.push_back(static_cast<int>(rng() % 4));
      t.rewards.push_back(u(rng));
    }
    t.global_state.assign(14, 0.5);
    t.next_global_state.assign(14, -0.5);
    t.done = i % 5 == 0 ? 1.0 : 0.0;
    m.buffer.push(std::move(t));
  }
  const auto a0 = m.agents[0].actor.params;
  const auto a1 = m.agents[1].actor.params;
  Rng urng = make_rng(9, 9);
  const UpdateStats st = m.update(urng);
  CHECK(std::isfinite(st.loss_q1));
  CHECK(std::isfinite(st.loss_q2));
  CHECK(std::isfinite(st.loss_actor));
  CHECK(m.agents[0].actor.params != a0);
  CHECK(m.agents[1].actor.params != a1);
}

TEST_CASE("random baseline spreads uniformly over feasible routes") {
  NetworkGraph g = build_graph(parallel_topology(3), ChannelParams{});
  WorkloadConfig w;
  const BitrateLadder ladder = default_ladder();
  Task t;
  t.kind = TaskKind::Monitoring;
  t.source_edge = g.node_index("edge_a");
  t.destination = g.node_index("gs_a");
  t.data_bytes = 0.3e6;
  t.cycles_per_byte = 200.0;
  t.deadline_s = 2.0;

  int counts[3] = {0, 0, 0};
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    t.id = i;
    Rng rng = make_rng(1, hash_combine(0x52bd3fa7ULL, static_cast<std::uint64_t>(i)));
    const auto c = baseline_rnd_maxbr(g, t, w, ladder, 1e7, rng);
    REQUIRE(c.has_value());
    REQUIRE(c->path.nodes.size() == 4);
    for (int s = 0; s < 3; ++s)
      if (c->path.nodes[2] == g.node_index("sat_" + std::to_string(s))) ++counts[s];
    CHECK(c->level == -1); // monitoring tasks carry no rung
  }
  for (int s = 0; s < 3; ++s)
    CHECK(counts[s] / static_cast<double>(n) == Approx(1.0 / 3.0).margin(0.02));
}

TEST_CASE("random baseline maxes the bitrate that still fits") {
  NetworkGraph g = build_graph(parallel_topology(1), ChannelParams{});
  WorkloadConfig w;
  const BitrateLadder ladder = default_ladder();
  Task t;
  t.kind = TaskKind::Video;
  t.id = 4;
  t.source_edge = g.node_index("edge_a");
  t.destination = g.node_index("user_a");
  t.data_bytes = 0.0;
  t.cycles_per_byte = 60.0;
  t.deadline_s = 5.0;
  Rng rng = make_rng(2, 2);
  const auto c = baseline_rnd_maxbr(g, t, w, ladder, 1e8, rng);
  REQUIRE(c.has_value());
  // The ~100 Mb/s feeder fits 16 + 2*16 = 48 Mb/s: the top rung holds.
  CHECK(c->level == 3);

  // Choke the feeder so only the lowest rung fits.
  const int feeder = g.find_link(g.node_index("gw_a"), g.node_index("sat_0"));
  g.reserve_link(feeder, g.links[feeder].capacity_bps - 20e6);
  Rng rng2 = make_rng(2, 3);
  const auto c2 = baseline_rnd_maxbr(g, t, w, ladder, 1e8, rng2);
  REQUIRE(c2.has_value());
  CHECK(c2->level == 0);
}

TEST_CASE("residual baseline picks the emptiest route") {
  NetworkGraph g = build_graph(parallel_topology(2), ChannelParams{});
  WorkloadConfig w;
  const BitrateLadder ladder = default_ladder();
  // Congest the sat_0 branch.
  const int feeder0 = g.find_link(g.node_index("gw_a"), g.node_index("sat_0"));
  g.reserve_link(feeder0, g.links[feeder0].capacity_bps * 0.9);
  Task t;
  t.kind = TaskKind::Monitoring;
  t.id = 1;
  t.source_edge = g.node_index("edge_a");
  t.destination = g.node_index("gs_a");
  t.data_bytes = 0.2e6;
  t.cycles_per_byte = 200.0;
  t.deadline_s = 2.0;
  const auto c = baseline_rrp(g, t, w, ladder, 1e7);
  REQUIRE(c.has_value());
  CHECK(c->path.nodes[2] == g.node_index("sat_1"));

  // With no load the tie breaks lexicographically: sat_0 wins.
  NetworkGraph fresh = build_graph(parallel_topology(2), ChannelParams{});
  const auto c2 = baseline_rrp(fresh, t, w, ladder, 1e7);
  REQUIRE(c2.has_value());
  CHECK(c2->path.nodes[2] == fresh.node_index("sat_0"));
}

TEST_CASE("baselines admit nothing when every route is saturated") {
  NetworkGraph g = build_graph(parallel_topology(2), ChannelParams{});
  for (auto& l : g.links) l.reserved_bps = l.capacity_bps;
  WorkloadConfig w;
  const BitrateLadder ladder = default_ladder();
  Task t;
  t.kind = TaskKind::Monitoring;
  t.id = 2;
  t.source_edge = g.node_index("edge_a");
  t.destination = g.node_index("gs_a");
  t.data_bytes = 0.2e6;
  t.cycles_per_byte = 200.0;
  t.deadline_s = 2.0;
  Rng rng = make_rng(4, 4);
  CHECK_FALSE(baseline_rnd_maxbr(g, t, w, ladder, 1e7, rng).has_value());
  CHECK_FALSE(baseline_rrp(g, t, w, ladder, 1e7).has_value());
}

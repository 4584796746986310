#pragma once

// Path selection with resource utilization: candidate paths are found by
// shortest path on the entry satellite's topology view, reserved atomically,
// scored on resource vacancy, and the best-scoring candidate keeps its
// reservation. Rejections prune the congested link from a selection-local
// view and retry, up to count_max attempts.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <queue>
#include <vector>

#include "stnsim/offload.hpp"
#include "stnsim/topology.hpp"

namespace stnsim {

enum class PathWeight { PropagationDelay, HopCount };

struct PsruConfig {
  double alpha_mix = 0.5; // link-vs-compute blend in the score
  int count_max = 5;      // candidate attempts per selection
  PathWeight weight = PathWeight::PropagationDelay;
};

struct PathHops {
  std::vector<int> nodes;
  std::vector<int> links;
};

// Dijkstra with a lexicographic node-sequence tie-break: among minimum-weight
// paths the lexicographically smallest node id sequence wins, so selection is
// reproducible across runs and platforms.
inline std::optional<PathHops> shortest_path(const NetworkGraph& g,
                                             const std::vector<char>& removed_links,
                                             int src, int dst, PathWeight w) {
  require(src >= 0 && src < static_cast<int>(g.nodes.size()), "shortest_path: bad src");
  require(dst >= 0 && dst < static_cast<int>(g.nodes.size()), "shortest_path: bad dst");
  struct Entry {
    double dist;
    std::vector<int> nodes;
    std::vector<int> links;
  };
  auto worse = [](const Entry& a, const Entry& b) {
    if (a.dist != b.dist) return a.dist > b.dist;
    return a.nodes > b.nodes;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> pq(worse);
  pq.push({0.0, {src}, {}});
  std::vector<char> settled(g.nodes.size(), 0);
  while (!pq.empty()) {
    Entry e = pq.top();
    pq.pop();
    const int n = e.nodes.back();
    if (settled[n]) continue;
    settled[n] = 1;
    if (n == dst) return PathHops{std::move(e.nodes), std::move(e.links)};
    for (int li : g.out_links[n]) {
      if (!removed_links.empty() && removed_links[li]) continue;
      const Link& l = g.links[li];
      if (settled[l.dst]) continue;
      Entry next = e;
      next.dist += (w == PathWeight::HopCount) ? 1.0 : propagation_delay_s(l.distance_m);
      next.nodes.push_back(l.dst);
      next.links.push_back(li);
      pq.push(std::move(next));
    }
  }
  return std::nullopt;
}

struct Reservation {
  double rate_bps = 0.0;
  std::vector<int> links;
  std::vector<int> nodes;              // path nodes, aligned with alloc_cps
  std::vector<double> alloc_cps;
};

inline void release_reservation(NetworkGraph& g, const Reservation& r) {
  for (int li : r.links) g.release_link(li, r.rate_bps);
  for (std::size_t i = 0; i < r.nodes.size(); ++i)
    if (r.alloc_cps[i] > 0.0) g.release_compute(r.nodes[i], r.alloc_cps[i]);
}

struct ReserveResult {
  bool accepted = false;
  int congested_link = -1; // set on rejection
  Reservation reservation;
};

// Atomically reserves rate_bps on every path link and spreads compute_ask_cps
// greedily over the path's compute-capable nodes in path order. On rejection
// nothing is committed and the congested link is named: the first link whose
// free bandwidth is short, or, for a compute shortfall, the link entering the
// last compute-capable node (rerouting around it is the only productive move).
inline ReserveResult try_reserve(NetworkGraph& g, const PathHops& path, double rate_bps,
                                 double compute_ask_cps) {
  require(!path.nodes.empty(), "try_reserve: empty path");
  require(path.links.size() + 1 == path.nodes.size(), "try_reserve: malformed path");
  require(rate_bps >= 0.0 && compute_ask_cps >= 0.0, "try_reserve: negative ask");
  ReserveResult rr;
  for (int li : path.links) {
    if (g.link_available_bps(li) + 1e-9 < rate_bps) {
      rr.congested_link = li;
      return rr;
    }
  }
  Reservation res;
  res.rate_bps = rate_bps;
  res.links = path.links;
  res.nodes = path.nodes;
  res.alloc_cps.assign(path.nodes.size(), 0.0);
  double remaining = compute_ask_cps;
  int last_compute_pos = -1;
  for (std::size_t i = 0; i < path.nodes.size(); ++i) {
    if (g.nodes[path.nodes[i]].compute_capacity_cps <= 0.0) continue;
    last_compute_pos = static_cast<int>(i);
    if (remaining <= 0.0) continue;
    const double take = std::min(remaining, g.node_available_cps(path.nodes[i]));
    res.alloc_cps[i] = take;
    remaining -= take;
  }
  if (remaining > 1e-9 * std::max(1.0, compute_ask_cps)) {
    rr.congested_link = last_compute_pos > 0 ? path.links[last_compute_pos - 1]
                                             : path.links.empty() ? -1 : path.links[0];
    return rr;
  }
  for (int li : res.links) g.reserve_link(li, rate_bps);
  for (std::size_t i = 0; i < res.nodes.size(); ++i)
    if (res.alloc_cps[i] > 0.0) g.reserve_compute(res.nodes[i], res.alloc_cps[i]);
  rr.accepted = true;
  rr.reservation = std::move(res);
  return rr;
}

struct PathCandidate {
  std::vector<int> nodes;
  std::vector<int> links;
  double score = 0.0;
  std::vector<double> avail_link_ratios; // per link, vs the pre-selection state
  std::vector<double> avail_comp_ratios; // per compute-capable node on the path
  Reservation reservation;               // held by the committed candidate
};

// s = alpha * mean link availability + (1-alpha) * sum of compute availability
// over len(p) link slots. Both terms are clamped into [0,1] so the score is a
// proper blend even on degenerate all-compute paths.
inline double psru_score(const std::vector<double>& link_ratios,
                         const std::vector<double>& comp_ratios, double alpha_mix) {
  require(alpha_mix >= 0.0 && alpha_mix <= 1.0, "psru_score: alpha out of range");
  require(!link_ratios.empty(), "psru_score: no links");
  const double len = static_cast<double>(link_ratios.size());
  double ls = 0.0, cs = 0.0;
  for (double r : link_ratios) {
    require(r >= 0.0 && r <= 1.0, "psru_score: link ratio out of range");
    ls += r;
  }
  for (double r : comp_ratios) {
    require(r >= 0.0 && r <= 1.0, "psru_score: compute ratio out of range");
    cs += r;
  }
  return alpha_mix * std::min(1.0, ls / len) + (1.0 - alpha_mix) * std::min(1.0, cs / len);
}

inline double psru_score(const PathCandidate& c, double alpha_mix) {
  return psru_score(c.avail_link_ratios, c.avail_comp_ratios, alpha_mix);
}

namespace detail {

// Availability ratios against explicit baseline reservation vectors, so
// concurrent candidate holds do not distort scoring.
inline void candidate_ratios(const NetworkGraph& g, const PathHops& path,
                             const std::vector<double>& base_link_reserved,
                             const std::vector<double>& base_node_reserved,
                             PathCandidate& c) {
  c.avail_link_ratios.clear();
  c.avail_comp_ratios.clear();
  for (int li : path.links) {
    const Link& l = g.links[li];
    const double avail = std::max(0.0, l.capacity_bps - base_link_reserved[li]);
    c.avail_link_ratios.push_back(std::clamp(avail / l.capacity_bps, 0.0, 1.0));
  }
  for (int ni : path.nodes) {
    const Node& n = g.nodes[ni];
    if (n.compute_capacity_cps <= 0.0) continue;
    const double avail = std::max(0.0, n.compute_capacity_cps - base_node_reserved[ni]);
    c.avail_comp_ratios.push_back(std::clamp(avail / n.compute_capacity_cps, 0.0, 1.0));
  }
}

inline bool lex_less(const std::vector<int>& a, const std::vector<int>& b) {
  return a < b;
}

} // namespace detail

// Entry satellite for a source edge: the satellite its gateway uplinks to
// (first in adjacency order). The selection seeds its local pruning state
// from this satellite's persistent view.
inline std::optional<int> entry_satellite_for_edge(const NetworkGraph& g, int edge) {
  for (int li : g.out_links[edge]) {
    const int gw = g.links[li].dst;
    if (g.nodes[gw].kind != NodeKind::Gateway) continue;
    for (int li2 : g.out_links[gw]) {
      const int sat = g.links[li2].dst;
      if (g.nodes[sat].kind == NodeKind::Satellite) return sat;
    }
  }
  return std::nullopt;
}

// Candidate search loop. Up to count_max attempts: shortest path on the
// current view, atomic reservation, vacancy score on accept. A reject prunes
// the congested link; an accept prunes the candidate's own bottleneck link so
// the next attempt explores a different route. Every candidate is probed and
// scored against the same pre-selection state (its hold is released right
// after scoring), so candidates never contend with each other; the winner
// (best score, lexicographic node sequence on ties) is re-committed before
// returning.
struct CandidateTrace {
  std::vector<int> nodes;
  double score = 0.0;
  bool chosen = false;
};

inline std::optional<PathCandidate> select_path(NetworkGraph& g, int src, int dst,
                                                double rate_bps, double compute_ask_cps,
                                                const PsruConfig& cfg,
                                                std::vector<CandidateTrace>* trace = nullptr) {
  require(cfg.count_max >= 1, "select_path: count_max must be >= 1");
  std::vector<char> removed(g.links.size(), 0);
  if (auto entry = entry_satellite_for_edge(g, src)) {
    const TopologyView& v = g.view_of(*entry);
    for (std::size_t i = 0; i < v.removed.size(); ++i)
      if (v.removed[i]) removed[i] = 1;
  }

  std::vector<double> base_link_reserved(g.links.size());
  std::vector<double> base_node_reserved(g.nodes.size());
  for (std::size_t i = 0; i < g.links.size(); ++i)
    base_link_reserved[i] = g.links[i].reserved_bps;
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    base_node_reserved[i] = g.nodes[i].reserved_cps;

  std::vector<PathCandidate> candidates;
  for (int attempt = 0; attempt < cfg.count_max; ++attempt) {
    auto sp = shortest_path(g, removed, src, dst, cfg.weight);
    if (!sp) break;
    ReserveResult rr = try_reserve(g, *sp, rate_bps, compute_ask_cps);
    if (!rr.accepted) {
      if (rr.congested_link < 0) break; // nothing to prune, no route will differ
      removed[rr.congested_link] = 1;
      continue;
    }
    PathCandidate c;
    c.nodes = sp->nodes;
    c.links = sp->links;
    c.reservation = std::move(rr.reservation);
    detail::candidate_ratios(g, *sp, base_link_reserved, base_node_reserved, c);
    c.score = psru_score(c, cfg.alpha_mix);
    // Probe done: drop the hold so the next candidate sees the base state.
    release_reservation(g, c.reservation);
    // Bottleneck link: lowest availability ratio, earliest on ties.
    int bottleneck = c.links[0];
    double worst = c.avail_link_ratios[0];
    for (std::size_t i = 1; i < c.links.size(); ++i)
      if (c.avail_link_ratios[i] < worst) {
        worst = c.avail_link_ratios[i];
        bottleneck = c.links[i];
      }
    removed[bottleneck] = 1;
    candidates.push_back(std::move(c));
  }
  if (candidates.empty()) return std::nullopt;

  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (candidates[i].score > candidates[best].score ||
        (candidates[i].score == candidates[best].score &&
         detail::lex_less(candidates[i].nodes, candidates[best].nodes)))
      best = i;
  }
  if (trace)
    for (std::size_t i = 0; i < candidates.size(); ++i)
      trace->push_back({candidates[i].nodes, candidates[i].score, i == best});

  // The graph is back at the base state, so the winner's probe reservation
  // re-applies verbatim.
  const Reservation& win = candidates[best].reservation;
  for (int li : win.links) g.reserve_link(li, win.rate_bps);
  for (std::size_t i = 0; i < win.nodes.size(); ++i)
    if (win.alloc_cps[i] > 0.0) g.reserve_compute(win.nodes[i], win.alloc_cps[i]);
  return std::move(candidates[best]);
}

// All simple src->dst paths in deterministic DFS (adjacency) order, capped.
inline std::vector<PathHops> enumerate_simple_paths(const NetworkGraph& g, int src,
                                                    int dst, std::size_t cap = 4096) {
  std::vector<PathHops> out;
  std::vector<char> on_path(g.nodes.size(), 0);
  PathHops cur;
  cur.nodes.push_back(src);
  on_path[src] = 1;
  auto dfs = [&](auto&& self, int n) -> void {
    if (out.size() >= cap) return;
    if (n == dst) {
      out.push_back(cur);
      return;
    }
    for (int li : g.out_links[n]) {
      const int m = g.links[li].dst;
      if (on_path[m]) continue;
      on_path[m] = 1;
      cur.nodes.push_back(m);
      cur.links.push_back(li);
      self(self, m);
      cur.nodes.pop_back();
      cur.links.pop_back();
      on_path[m] = 0;
    }
  };
  dfs(dfs, src);
  return out;
}

// Exhaustive reference: enumerate every simple path, keep those whose
// reservation would be accepted on the current state, score them on the same
// availability basis, and return the maximum (lexicographic tie-break).
// Pure: works on a scratch copy, holds nothing.
inline std::optional<PathCandidate> oracle_select(const NetworkGraph& g, int src, int dst,
                                                  double rate_bps, double compute_ask_cps,
                                                  const PsruConfig& cfg,
                                                  std::size_t cap = 4096) {
  std::vector<double> base_link_reserved(g.links.size());
  std::vector<double> base_node_reserved(g.nodes.size());
  for (std::size_t i = 0; i < g.links.size(); ++i)
    base_link_reserved[i] = g.links[i].reserved_bps;
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    base_node_reserved[i] = g.nodes[i].reserved_cps;

  std::optional<PathCandidate> best;
  for (const PathHops& p : enumerate_simple_paths(g, src, dst, cap)) {
    NetworkGraph scratch = g;
    ReserveResult rr = try_reserve(scratch, p, rate_bps, compute_ask_cps);
    if (!rr.accepted) continue;
    PathCandidate c;
    c.nodes = p.nodes;
    c.links = p.links;
    detail::candidate_ratios(g, p, base_link_reserved, base_node_reserved, c);
    c.score = psru_score(c, cfg.alpha_mix);
    if (!best || c.score > best->score ||
        (c.score == best->score && detail::lex_less(c.nodes, best->nodes)))
      best = std::move(c);
  }
  return best;
}

} // namespace stnsim

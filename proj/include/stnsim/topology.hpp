#pragma once

// Network graph for the satellite-terrestrial topology: devices and edges on
// the ground, gateways uplinking to a LEO constellation, ground stations and
// their users downstream. Links are directed in the data-flow direction and
// carry both a computed Shannon capacity and a reservation ledger.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "stnsim/channel.hpp"
#include "stnsim/common.hpp"

namespace stnsim {

enum class NodeKind { Device, Edge, Gateway, Satellite, GroundStation, User };

inline const char* node_kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Device: return "device";
    case NodeKind::Edge: return "edge";
    case NodeKind::Gateway: return "gateway";
    case NodeKind::Satellite: return "satellite";
    case NodeKind::GroundStation: return "ground_station";
    case NodeKind::User: return "user";
  }
  return "?";
}

enum class LinkBand { Ground, Satellite };

struct NodeConfig {
  std::string name;
  NodeKind kind = NodeKind::Edge;
  std::array<double, 3> position_m{0.0, 0.0, 0.0};
  double compute_capacity_cps = 0.0; // CPU cycles per second, 0 for relays
};

struct LinkConfig {
  std::string src;
  std::string dst;
  double bandwidth_hz = 0.0;  // 0 = band default
  double tx_power_w = 1.0;
  double gain_mean = 1.0;     // linear channel power gain (non-ISL links)
  double gain_sigma = 0.0;    // log-normal sigma; 0 = static channel
  double antenna_gain_tx = 1.0; // linear, ISL links only
  double antenna_gain_rx = 1.0;
};

struct TopologyConfig {
  std::vector<NodeConfig> nodes;
  std::vector<LinkConfig> links;
  // satellite name -> user name coverage pairs; destination satellites for
  // user-bound traffic are resolved from this table.
  std::vector<std::pair<std::string, std::string>> sat_user_pairs;
  double default_bandwidth_ground_hz = 100e6; // B_g
  double default_bandwidth_sat_hz = 500e6;    // B_s
  double carrier_ground_hz = 4e9;
  double carrier_sat_hz = 27e9;
};

struct Node {
  std::string name;
  NodeKind kind;
  std::array<double, 3> position_m;
  double compute_capacity_cps = 0.0;
  double reserved_cps = 0.0;
};

struct Link {
  int src = -1;
  int dst = -1;
  LinkBand band = LinkBand::Ground;
  bool is_isl = false;
  double bandwidth_hz = 0.0;
  double tx_power_w = 0.0;
  double gain_mean = 1.0;
  double gain_sigma = 0.0;
  double antenna_gain_tx = 1.0;
  double antenna_gain_rx = 1.0;
  double distance_m = 0.0;
  double gain_current = 1.0;   // last sampled channel gain (non-ISL)
  double capacity_bps = 0.0;   // refreshed alongside gain_current
  double reserved_bps = 0.0;
};

inline double euclidean_distance_m(const std::array<double, 3>& a,
                                   const std::array<double, 3>& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// Per-satellite local topology knowledge: the set of links a satellite has
// pruned from its own view. Views only ever shrink via remove_link_from_view.
struct TopologyView {
  std::vector<char> removed; // indexed by link id
};

class NetworkGraph {
 public:
  std::vector<Node> nodes;
  std::vector<Link> links;
  std::vector<std::vector<int>> out_links; // node -> outgoing link ids
  std::vector<std::pair<int, int>> sat_user_pairs; // (satellite, user)
  ChannelParams channel;
  double carrier_ground_hz = 4e9;
  double carrier_sat_hz = 27e9;

  int node_index(const std::string& name) const {
    auto it = index_.find(name);
    require(it != index_.end(), "unknown node: " + name);
    return it->second;
  }

  int find_link(int src, int dst) const {
    for (int li : out_links[src])
      if (links[li].dst == dst) return li;
    return -1;
  }

  double link_available_bps(int li) const {
    return std::max(0.0, links[li].capacity_bps - links[li].reserved_bps);
  }
  double node_available_cps(int ni) const {
    return std::max(0.0, nodes[ni].compute_capacity_cps - nodes[ni].reserved_cps);
  }

  // Interleaved holds leave addition-order dust of a few ulps of the running
  // sum, which scales with capacity; real double-releases are whole asks.
  static double ledger_slack(double capacity, double floor_abs) {
    return std::max(floor_abs, 1e-9 * capacity);
  }

  void reserve_link(int li, double bps) {
    const double slack = ledger_slack(links[li].capacity_bps, 1e-9);
    require(bps >= 0.0 && links[li].reserved_bps + bps <= links[li].capacity_bps + slack,
            "reserve_link: over capacity on " + link_name(li));
    links[li].reserved_bps += bps;
    cum_reserved_bps += bps;
  }
  void release_link(int li, double bps) {
    const double slack = ledger_slack(links[li].capacity_bps, 1e-9);
    require(bps >= 0.0 && links[li].reserved_bps + slack >= bps,
            "release_link: releasing more than reserved on " + link_name(li));
    links[li].reserved_bps = std::max(0.0, links[li].reserved_bps - bps);
    cum_released_bps += bps;
  }
  void reserve_compute(int ni, double cps) {
    const double slack = ledger_slack(nodes[ni].compute_capacity_cps, 1e-6);
    require(cps >= 0.0 && nodes[ni].reserved_cps + cps <= nodes[ni].compute_capacity_cps + slack,
            "reserve_compute: over capacity on " + nodes[ni].name);
    nodes[ni].reserved_cps += cps;
    cum_reserved_cps += cps;
  }
  void release_compute(int ni, double cps) {
    const double slack = ledger_slack(nodes[ni].compute_capacity_cps, 1e-6);
    require(cps >= 0.0 && nodes[ni].reserved_cps + slack >= cps,
            "release_compute: releasing more than reserved on " + nodes[ni].name);
    nodes[ni].reserved_cps = std::max(0.0, nodes[ni].reserved_cps - cps);
    cum_released_cps += cps;
  }

  // Running totals of every reserve/release event, for ledger-close checks.
  double cum_reserved_bps = 0.0, cum_released_bps = 0.0;
  double cum_reserved_cps = 0.0, cum_released_cps = 0.0;

  // Ledger totals; both must return to zero when a slot's batch is resolved.
  double total_reserved_bps() const {
    double s = 0.0;
    for (const auto& l : links) s += l.reserved_bps;
    return s;
  }
  double total_reserved_cps() const {
    double s = 0.0;
    for (const auto& n : nodes) s += n.reserved_cps;
    return s;
  }

  // Verifies every reservation was handed back, then clears the rounding dust
  // so residue cannot accumulate across slots.
  void settle_ledger() {
    require(std::fabs(total_reserved_bps()) < 1e-3, "ledger: link reservations not released");
    require(std::fabs(total_reserved_cps()) < 1e-3, "ledger: compute reservations not released");
    for (auto& l : links) l.reserved_bps = 0.0;
    for (auto& n : nodes) n.reserved_cps = 0.0;
  }

  std::string link_name(int li) const {
    return nodes[links[li].src].name + "->" + nodes[links[li].dst].name;
  }

  TopologyView& view_of(int satellite) {
    require(nodes[satellite].kind == NodeKind::Satellite,
            "view_of: not a satellite: " + nodes[satellite].name);
    auto& v = views_[satellite];
    if (v.removed.size() != links.size()) v.removed.assign(links.size(), 0);
    return v;
  }

  // Resamples channel gains and recomputes capacities for all faded links.
  // Must only run while no reservations are held; capacities are frozen for
  // the duration of a slot so reserved <= capacity stays invariant.
  void refresh_gains(std::uint64_t step, std::uint64_t seed) {
    require(total_reserved_bps() == 0.0 && total_reserved_cps() == 0.0,
            "refresh_gains: reservations still held");
    for (std::size_t i = 0; i < links.size(); ++i) {
      Link& l = links[i];
      if (l.is_isl) continue; // deterministic line-of-sight
      l.gain_current = sample_gain(l.gain_mean, l.gain_sigma,
                                   static_cast<std::uint64_t>(i), step, seed);
      const double noise = noise_power_w(channel, l.bandwidth_hz);
      l.capacity_bps =
          ground_uplink_rate_bps(l.bandwidth_hz, l.gain_current, l.tx_power_w, noise);
    }
  }

  std::map<std::string, int> index_;
  std::map<int, TopologyView> views_;
};

inline void remove_link_from_view(NetworkGraph& g, int satellite, int link) {
  require(link >= 0 && link < static_cast<int>(g.links.size()),
          "remove_link_from_view: bad link id");
  g.view_of(satellite).removed[link] = 1;
}

// Destination satellite for a user: the lowest-indexed satellite paired with
// it in the coverage table, or nullopt when the user is uncovered.
inline std::optional<int> reachable_satellite_for_user(const NetworkGraph& g, int user) {
  std::optional<int> best;
  for (const auto& [sat, usr] : g.sat_user_pairs)
    if (usr == user && (!best || sat < *best)) best = sat;
  return best;
}

namespace detail {

inline bool kind_pair_allowed(NodeKind a, NodeKind b) {
  using K = NodeKind;
  switch (a) {
    case K::Device: return b == K::Edge;
    case K::Edge: return b == K::Edge || b == K::Gateway;
    case K::Gateway: return b == K::Satellite;
    case K::Satellite: return b == K::Satellite || b == K::GroundStation;
    case K::GroundStation: return b == K::User;
    case K::User: return false;
  }
  return false;
}

inline LinkBand band_for(NodeKind a, NodeKind b) {
  // Gateway uplinks, ISLs and satellite downlinks ride the satellite band;
  // everything terrestrial (and the last-hop user link) rides the ground band.
  if (a == NodeKind::Gateway || a == NodeKind::Satellite) return LinkBand::Satellite;
  (void)b;
  return LinkBand::Ground;
}

} // namespace detail

// Validates and materializes a topology. Throws std::invalid_argument naming
// the offending element on any structural error. Identical configs build
// identical graphs (iteration order is the config order everywhere).
inline NetworkGraph build_graph(const TopologyConfig& cfg, const ChannelParams& ch) {
  NetworkGraph g;
  g.channel = ch;
  g.carrier_ground_hz = cfg.carrier_ground_hz;
  g.carrier_sat_hz = cfg.carrier_sat_hz;

  for (const auto& nc : cfg.nodes) {
    require(!nc.name.empty(), "node with empty name");
    require(g.index_.find(nc.name) == g.index_.end(), "duplicate node: " + nc.name);
    require(nc.compute_capacity_cps >= 0.0,
            "negative compute capacity on node: " + nc.name);
    if (nc.compute_capacity_cps > 0.0)
      require(nc.kind == NodeKind::Edge || nc.kind == NodeKind::Satellite,
              "compute capacity on non-computing node: " + nc.name);
    g.index_[nc.name] = static_cast<int>(g.nodes.size());
    g.nodes.push_back(Node{nc.name, nc.kind, nc.position_m, nc.compute_capacity_cps, 0.0});
  }
  g.out_links.assign(g.nodes.size(), {});

  for (const auto& lc : cfg.links) {
    const int s = g.node_index(lc.src);
    const int d = g.node_index(lc.dst);
    require(s != d, "self-loop link on node: " + lc.src);
    require(g.find_link(s, d) < 0, "duplicate link: " + lc.src + "->" + lc.dst);
    const NodeKind ks = g.nodes[s].kind, kd = g.nodes[d].kind;
    require(detail::kind_pair_allowed(ks, kd),
            "link between incompatible kinds: " + lc.src + "->" + lc.dst + " (" +
                node_kind_name(ks) + "->" + node_kind_name(kd) + ")");

    Link l;
    l.src = s;
    l.dst = d;
    l.band = detail::band_for(ks, kd);
    l.is_isl = (ks == NodeKind::Satellite && kd == NodeKind::Satellite);
    l.bandwidth_hz = lc.bandwidth_hz > 0.0
                         ? lc.bandwidth_hz
                         : (l.band == LinkBand::Satellite ? cfg.default_bandwidth_sat_hz
                                                          : cfg.default_bandwidth_ground_hz);
    l.tx_power_w = lc.tx_power_w;
    l.gain_mean = lc.gain_mean;
    l.gain_sigma = lc.gain_sigma;
    l.antenna_gain_tx = lc.antenna_gain_tx;
    l.antenna_gain_rx = lc.antenna_gain_rx;
    l.distance_m = euclidean_distance_m(g.nodes[s].position_m, g.nodes[d].position_m);
    require(l.distance_m > 0.0,
            "coincident endpoints on link: " + lc.src + "->" + lc.dst);

    const double noise = noise_power_w(ch, l.bandwidth_hz);
    if (l.is_isl) {
      const double loss = fspl(l.distance_m, cfg.carrier_sat_hz);
      const double snr = isl_snr(l.tx_power_w, l.antenna_gain_tx, l.antenna_gain_rx,
                                 loss, noise);
      l.gain_current = 1.0;
      l.capacity_bps = isl_rate_bps(l.bandwidth_hz, snr);
    } else {
      l.gain_current = l.gain_mean;
      l.capacity_bps =
          ground_uplink_rate_bps(l.bandwidth_hz, l.gain_current, l.tx_power_w, noise);
    }
    require(l.capacity_bps > 0.0, "zero-capacity link: " + lc.src + "->" + lc.dst);

    const int li = static_cast<int>(g.links.size());
    g.links.push_back(l);
    g.out_links[s].push_back(li);
  }

  for (const auto& [sat_name, user_name] : cfg.sat_user_pairs) {
    const int sat = g.node_index(sat_name);
    const int usr = g.node_index(user_name);
    require(g.nodes[sat].kind == NodeKind::Satellite,
            "sat_user_pairs: not a satellite: " + sat_name);
    require(g.nodes[usr].kind == NodeKind::User,
            "sat_user_pairs: not a user: " + user_name);
    g.sat_user_pairs.emplace_back(sat, usr);
  }
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    if (g.nodes[i].kind == NodeKind::User)
      require(reachable_satellite_for_user(g, static_cast<int>(i)).has_value(),
              "user not covered by any satellite: " + g.nodes[i].name);
  }

  // Every edge must reach every ground station through the directed graph;
  // a cut here would silently strand traffic, so it is a construction error.
  std::vector<int> ground_stations;
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    if (g.nodes[i].kind == NodeKind::GroundStation) ground_stations.push_back(static_cast<int>(i));
  for (std::size_t e = 0; e < g.nodes.size(); ++e) {
    if (g.nodes[e].kind != NodeKind::Edge) continue;
    std::vector<char> seen(g.nodes.size(), 0);
    std::queue<int> q;
    q.push(static_cast<int>(e));
    seen[e] = 1;
    while (!q.empty()) {
      const int n = q.front();
      q.pop();
      for (int li : g.out_links[n])
        if (!seen[g.links[li].dst]) {
          seen[g.links[li].dst] = 1;
          q.push(g.links[li].dst);
        }
    }
    for (int gs : ground_stations)
      require(seen[gs], "edge cannot reach ground station: " + g.nodes[e].name + " -> " +
                            g.nodes[gs].name);
  }
  return g;
}

} // namespace stnsim

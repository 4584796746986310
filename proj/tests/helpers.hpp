#pragma once

// Small hand-sized topologies shared across the test suite. Gains are static
// (sigma 0) unless a test opts in, so capacities are predictable.

#include <string>
#include <vector>

#include "stnsim/channel.hpp"
#include "stnsim/topology.hpp"

namespace testutil {

using namespace stnsim;

inline NodeConfig node(const std::string& name, NodeKind kind, double x, double y,
                       double z, double cps = 0.0) {
  NodeConfig n;
  n.name = name;
  n.kind = kind;
  n.position_m = {x, y, z};
  n.compute_capacity_cps = cps;
  return n;
}

inline LinkConfig ground_link(const std::string& src, const std::string& dst,
                              double power_w, double gain_mean, double sigma = 0.0,
                              double bandwidth_hz = 0.0) {
  LinkConfig l;
  l.src = src;
  l.dst = dst;
  l.tx_power_w = power_w;
  l.gain_mean = gain_mean;
  l.gain_sigma = sigma;
  l.bandwidth_hz = bandwidth_hz;
  return l;
}

inline LinkConfig isl_link(const std::string& src, const std::string& dst,
                           double power_w, double antenna_gain) {
  LinkConfig l;
  l.src = src;
  l.dst = dst;
  l.tx_power_w = power_w;
  l.antenna_gain_tx = antenna_gain;
  l.antenna_gain_rx = antenna_gain;
  return l;
}

// edge_a -> gw_a -> sat_a -> gs_a -> user_a, compute at the edge and the
// satellite. Capacities land near 120/100/190/346 Mbps with these gains.
inline TopologyConfig line_topology() {
  TopologyConfig t;
  t.nodes = {
      node("edge_a", NodeKind::Edge, 0.0, 0.0, 0.0, 1e8),
      node("gw_a", NodeKind::Gateway, 30e3, 0.0, 0.0),
      node("sat_a", NodeKind::Satellite, 30e3, 0.0, 550e3, 6e8),
      node("gs_a", NodeKind::GroundStation, 60e3, 0.0, 0.0),
      node("user_a", NodeKind::User, 70e3, 0.0, 0.0),
  };
  t.links = {
      ground_link("edge_a", "gw_a", 2.0, 5.2e-13),
      ground_link("gw_a", "sat_a", 40.0, 7.4e-15),
      ground_link("sat_a", "gs_a", 50.0, 1.2e-14),
      ground_link("gs_a", "user_a", 1.0, 4e-12),
  };
  t.sat_user_pairs = {{"sat_a", "user_a"}};
  return t;
}

// One gateway fanning out to `k` parallel satellites, all reconverging on a
// single ground station: exactly k simple paths edge->gs.
inline TopologyConfig parallel_topology(int k) {
  TopologyConfig t;
  t.nodes.push_back(node("edge_a", NodeKind::Edge, 0.0, 0.0, 0.0, 1e8));
  t.nodes.push_back(node("gw_a", NodeKind::Gateway, 30e3, 0.0, 0.0));
  t.nodes.push_back(node("gs_a", NodeKind::GroundStation, 60e3, 0.0, 0.0));
  t.nodes.push_back(node("user_a", NodeKind::User, 70e3, 0.0, 0.0));
  t.links.push_back(ground_link("edge_a", "gw_a", 2.0, 5.2e-13));
  for (int i = 0; i < k; ++i) {
    const std::string sat = "sat_" + std::to_string(i);
    t.nodes.push_back(node(sat, NodeKind::Satellite, 30e3, i * 10e3, 550e3, 6e8));
    t.links.push_back(ground_link("gw_a", sat, 40.0, 7.4e-15));
    t.links.push_back(ground_link(sat, "gs_a", 50.0, 1.2e-14));
    t.sat_user_pairs.emplace_back(sat, "user_a");
  }
  t.links.push_back(ground_link("gs_a", "user_a", 1.0, 4e-12));
  return t;
}

// Two edges wired back to back for terrestrial-split delay tests.
inline TopologyConfig edge_pair_topology() {
  TopologyConfig t;
  t.nodes = {
      node("edge_a", NodeKind::Edge, 0.0, 0.0, 0.0, 1e8),
      node("edge_b", NodeKind::Edge, 40e3, 0.0, 0.0, 2e8),
      node("gw_a", NodeKind::Gateway, 60e3, 0.0, 0.0),
      node("sat_a", NodeKind::Satellite, 60e3, 0.0, 550e3, 6e8),
      node("gs_a", NodeKind::GroundStation, 90e3, 0.0, 0.0),
      node("user_a", NodeKind::User, 100e3, 0.0, 0.0),
  };
  t.links = {
      ground_link("edge_a", "edge_b", 2.0, 5.2e-13),
      ground_link("edge_b", "gw_a", 2.0, 5.2e-13),
      ground_link("gw_a", "sat_a", 40.0, 7.4e-15),
      ground_link("sat_a", "gs_a", 50.0, 1.2e-14),
      ground_link("gs_a", "user_a", 1.0, 4e-12),
  };
  t.sat_user_pairs = {{"sat_a", "user_a"}};
  return t;
}

} // namespace testutil

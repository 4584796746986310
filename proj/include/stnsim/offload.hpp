#pragma once

// Partial offloading arithmetic: split fractions across terrestrial and
// satellite computing, hop-by-hop communication delay, the piecewise total
// delay, streaming energy, and per-element usage ratios.
//
// Conventions fixed here: transmission is 8*bytes/rate on each hop with the
// bytes that actually cross it, propagation is round-trip 2*d/c, and the
// deadline check is non-strict (t_total <= T^max counts as completed).

#include <cmath>
#include <optional>
#include <vector>

#include "stnsim/common.hpp"
#include "stnsim/topology.hpp"
#include "stnsim/workload.hpp"

namespace stnsim {

inline double transmission_delay_s(double bytes, double rate_bps) {
  require(bytes >= 0.0, "transmission_delay_s: negative bytes");
  if (bytes == 0.0) return 0.0;
  require(rate_bps > 0.0, "transmission_delay_s: rate must be > 0");
  return 8.0 * bytes / rate_bps;
}

inline double propagation_delay_s(double distance_m) {
  require(distance_m >= 0.0, "propagation_delay_s: negative distance");
  return 2.0 * distance_m / kLightSpeed;
}

inline double computation_delay_s(double fraction, double bytes, double cycles_per_byte,
                                  double alloc_cps) {
  require(fraction >= 0.0 && fraction <= 1.0 + 1e-12,
          "computation_delay_s: fraction out of range");
  require(bytes >= 0.0 && cycles_per_byte >= 0.0, "computation_delay_s: negative work");
  if (fraction == 0.0 || bytes == 0.0 || cycles_per_byte == 0.0) return 0.0;
  require(alloc_cps > 0.0, "computation_delay_s: zero allocation for nonzero work");
  return fraction * bytes * cycles_per_byte / alloc_cps;
}

// Data and cycles left after the terrestrial split: d_re = D - sum(alpha)*D,
// c_re = d_re * density.
inline std::pair<double, double> remaining_after_lc(double data_bytes,
                                                    double cycles_per_byte,
                                                    const std::vector<double>& alphas) {
  double s = 0.0;
  for (double a : alphas) {
    require(a >= 0.0 && a <= 1.0 + 1e-12, "remaining_after_lc: fraction out of range");
    s += a;
  }
  require(s <= 1.0 + 1e-12, "remaining_after_lc: fractions exceed 1");
  const double d_re = data_bytes * std::max(0.0, 1.0 - s);
  return {d_re, d_re * cycles_per_byte};
}

// Same contraction over the satellite split, applied to the LC remainder.
inline std::pair<double, double> remaining_after_sc(double d_re_bytes,
                                                    double cycles_per_byte,
                                                    double lc_fraction_sum,
                                                    const std::vector<double>& betas) {
  double s = lc_fraction_sum;
  for (double b : betas) {
    require(b >= 0.0 && b <= 1.0 + 1e-12, "remaining_after_sc: fraction out of range");
    s += b;
  }
  require(s <= 1.0 + 1e-12, "remaining_after_sc: fractions exceed 1");
  require(lc_fraction_sum >= 0.0 && lc_fraction_sum <= 1.0 + 1e-12,
          "remaining_after_sc: bad lc fraction sum");
  const double denom = std::max(1e-300, 1.0 - lc_fraction_sum);
  double rem_frac = std::max(0.0, 1.0 - s) / denom;
  const double left = d_re_bytes * std::min(1.0, rem_frac);
  return {left, left * cycles_per_byte};
}

struct OffloadShare {
  int node = -1;        // node index in the graph
  double fraction = 0.0; // share of the task's bytes processed here
  double alloc_cps = 0.0;
};

struct OffloadPlan {
  std::vector<int> path_nodes;
  std::vector<int> path_links;
  double rate_bps = 0.0;               // uniform end-to-end allocated rate
  std::vector<OffloadShare> shares;    // one entry per path node, in order
  bool feasible = false;               // all work placed within the deadline

  double fraction_sum() const {
    double s = 0.0;
    for (const auto& sh : shares) s += sh.fraction;
    return s;
  }
};

// Greedy deadline-aware fill in path order. Each compute-capable node with an
// allocation takes min(remaining, alloc * T_budget / (D * density)) where
// T_budget is the deadline minus the communication time accumulated to reach
// it. Returns a plan flagged infeasible when work remains after the last node.
inline OffloadPlan plan_offload(const Task& task, const std::vector<int>& path_nodes,
                                const std::vector<int>& path_links,
                                const std::vector<double>& alloc_cps, double rate_bps,
                                const NetworkGraph& g) {
  require(!path_nodes.empty(), "plan_offload: empty path");
  require(path_links.size() + 1 == path_nodes.size(),
          "plan_offload: node/link count mismatch");
  require(alloc_cps.size() == path_nodes.size(),
          "plan_offload: allocation per path node required");
  require(task.data_bytes > 0.0, "plan_offload: task has no data");
  require(rate_bps > 0.0 || path_links.empty(), "plan_offload: rate must be > 0");

  OffloadPlan plan;
  plan.path_nodes = path_nodes;
  plan.path_links = path_links;
  plan.rate_bps = rate_bps;
  plan.shares.resize(path_nodes.size());

  const double total_cycles = task.cycles_total();
  double remaining = 1.0;
  double acc_comm_s = 0.0;
  for (std::size_t i = 0; i < path_nodes.size(); ++i) {
    const int n = path_nodes[i];
    require(alloc_cps[i] <= g.nodes[n].compute_capacity_cps + 1e-6,
            "plan_offload: allocation beyond capacity on " + g.nodes[n].name);
    if (i > 0) {
      // Hop entering node i carries whatever was not consumed upstream.
      const double hop_bytes = task.data_bytes * remaining;
      const Link& l = g.links[path_links[i - 1]];
      acc_comm_s += transmission_delay_s(hop_bytes, rate_bps) +
                    propagation_delay_s(l.distance_m);
    }
    OffloadShare& sh = plan.shares[i];
    sh.node = n;
    sh.alloc_cps = alloc_cps[i];
    if (alloc_cps[i] > 0.0 && remaining > 0.0) {
      const double budget = task.deadline_s - acc_comm_s;
      if (budget > 0.0) {
        sh.fraction = std::min(remaining, alloc_cps[i] * budget / total_cycles);
        remaining -= sh.fraction;
      }
    }
  }
  plan.feasible = remaining <= 1e-12;
  return plan;
}

enum class TaskStatus { Completed, Discarded };

struct DelayBreakdown {
  double t_comp_lc = 0.0; // source edge computation
  double t_comm_lc = 0.0; // edge-to-edge legs
  double t_comp_sc = 0.0; // satellite computation
  double t_comm_sc = 0.0; // edge-gateway, gateway-satellite and ISL legs
  double t_total = 0.0;
  int branch = 0; // 1 = all at source, 2 = terrestrial split, 3 = satellite
};

// Piecewise total delay:
//   branch 1 (source edge takes everything): t_total = source compute.
//   branch 2 (terrestrial split covers the task): max(source compute, LC comm).
//   branch 3 (satellites involved): max(source compute, LC comm + SC compute,
//                                       LC comm + SC comm).
// Hops after the last satellite (downlink to the ground station, last-hop
// user link) do not enter the delay, matching the offloading model's scope.
inline DelayBreakdown total_delay(const Task& task, const OffloadPlan& plan,
                                  const NetworkGraph& g) {
  DelayBreakdown d;
  require(!plan.path_nodes.empty(), "total_delay: empty plan");
  const double D = task.data_bytes;
  require(D > 0.0, "total_delay: task has no data");

  double edge_fraction_sum = 0.0;
  double src_fraction = plan.shares[0].fraction;
  d.t_comp_lc = computation_delay_s(src_fraction, D, task.cycles_per_byte,
                                    plan.shares[0].alloc_cps);

  int last_sat = -1;
  for (std::size_t i = 0; i < plan.path_nodes.size(); ++i) {
    const NodeKind k = g.nodes[plan.path_nodes[i]].kind;
    if (k == NodeKind::Edge) edge_fraction_sum += plan.shares[i].fraction;
    if (k == NodeKind::Satellite) {
      last_sat = static_cast<int>(i);
      d.t_comp_sc += computation_delay_s(plan.shares[i].fraction, D,
                                         task.cycles_per_byte, plan.shares[i].alloc_cps);
    }
  }

  double remaining = 1.0;
  for (std::size_t i = 0; i + 1 < plan.path_nodes.size(); ++i) {
    remaining -= plan.shares[i].fraction;
    const double hop_bytes = D * std::max(0.0, remaining);
    const Link& l = g.links[plan.path_links[i]];
    const NodeKind ks = g.nodes[l.src].kind;
    const NodeKind kd = g.nodes[l.dst].kind;
    const double leg = transmission_delay_s(hop_bytes, plan.rate_bps) +
                       propagation_delay_s(l.distance_m);
    if (ks == NodeKind::Edge && kd == NodeKind::Edge) {
      d.t_comm_lc += leg;
    } else if (last_sat >= 0 && static_cast<int>(i) < last_sat) {
      // edge->gateway, gateway->satellite and ISL legs up to the last
      // satellite position on the path.
      d.t_comm_sc += leg;
    }
  }

  const double fsum = plan.fraction_sum();
  if (src_fraction >= 1.0 - 1e-12) {
    d.branch = 1;
    d.t_total = d.t_comp_lc;
  } else if (edge_fraction_sum >= 1.0 - 1e-12 && fsum >= 1.0 - 1e-12) {
    d.branch = 2;
    d.t_total = std::max(d.t_comp_lc, d.t_comm_lc);
  } else {
    d.branch = 3;
    d.t_total = std::max({d.t_comp_lc, d.t_comm_lc + d.t_comp_sc,
                          d.t_comm_lc + d.t_comm_sc});
  }
  return d;
}

inline TaskStatus enforce_deadline(const DelayBreakdown& d, double deadline_s) {
  require(deadline_s > 0.0, "enforce_deadline: deadline must be > 0");
  return d.t_total <= deadline_s ? TaskStatus::Completed : TaskStatus::Discarded;
}

struct EnergyCoeffs {
  double kappa_v = 5e-7;    // J per encoded bit over one segment second
  double eta_v = 1e-28;     // transcode energy scale (J / (cycles/s)^3 / s)
  double upload_bw_hz = 10e6; // W in the upload power model
};

struct EnergyBreakdown {
  double e_encode = 0.0;
  double e_upload = 0.0;
  double e_transcode = 0.0;
  double e_total = 0.0;
};

inline double encode_energy_j(double kappa_v, double bitrate_bps, double segment_s) {
  require(kappa_v >= 0.0 && bitrate_bps >= 0.0 && segment_s >= 0.0,
          "encode_energy_j: negative input");
  return kappa_v * bitrate_bps * segment_s;
}

// Inverse-Shannon upload power: g(x) = N0 * W * (2^(x/W) - 1) evaluated at the
// average upload rate x = prev_bits / t_u, scaled by airtime over channel gain.
inline double upload_energy_j(double upload_time_s, double channel_gain,
                              double prev_segment_bits, double bw_hz, double noise_psd_w) {
  require(upload_time_s > 0.0, "upload_energy_j: upload time must be > 0");
  require(channel_gain > 0.0, "upload_energy_j: gain must be > 0");
  require(bw_hz > 0.0, "upload_energy_j: bandwidth must be > 0");
  require(noise_psd_w >= 0.0 && prev_segment_bits >= 0.0,
          "upload_energy_j: negative input");
  const double x = prev_segment_bits / upload_time_s;
  const double p = noise_psd_w * bw_hz * (std::pow(2.0, x / bw_hz) - 1.0);
  return upload_time_s / channel_gain * p;
}

inline double transcode_energy_j(double eta_v, double cpu_cps, double transcode_time_s) {
  require(eta_v >= 0.0 && cpu_cps >= 0.0 && transcode_time_s >= 0.0,
          "transcode_energy_j: negative input");
  return eta_v * cpu_cps * cpu_cps * cpu_cps * transcode_time_s;
}

// Combined per-segment streaming energy. The three parts are exactly additive.
inline EnergyBreakdown streaming_energy(double bitrate_bps, double segment_s,
                                        double upload_time_s, double uplink_gain,
                                        double prev_segment_bits, double cpu_cps,
                                        double transcode_time_s, double noise_psd_w,
                                        const EnergyCoeffs& c) {
  EnergyBreakdown e;
  e.e_encode = encode_energy_j(c.kappa_v, bitrate_bps, segment_s);
  e.e_upload = upload_time_s > 0.0
                   ? upload_energy_j(upload_time_s, uplink_gain, prev_segment_bits,
                                     c.upload_bw_hz, noise_psd_w)
                   : 0.0;
  e.e_transcode = transcode_energy_j(c.eta_v, cpu_cps, transcode_time_s);
  e.e_total = e.e_encode + e.e_upload + e.e_transcode;
  return e;
}

struct UsageSnapshot {
  double u_comm = 0.0; // max per-link ratio over the path
  double u_comp = 0.0; // max per-node ratio over the path
  std::vector<double> per_link;
  std::vector<double> per_node;
};

// Per-link ratio: bits the task pushed across the link over what the link
// could carry in one slot, clipped to [0,1]. Per-node ratio: the task's
// compute allocation over node capacity. Both aggregate by max over the path.
inline UsageSnapshot usage_ratios(const Task& task, const OffloadPlan& plan,
                                  const NetworkGraph& g, double slot_s) {
  require(slot_s > 0.0, "usage_ratios: slot must be > 0");
  UsageSnapshot u;
  double remaining = 1.0;
  for (std::size_t i = 0; i < plan.path_links.size(); ++i) {
    remaining -= plan.shares[i].fraction;
    const double hop_bits = 8.0 * task.data_bytes * std::max(0.0, remaining);
    const Link& l = g.links[plan.path_links[i]];
    const double r = std::clamp(hop_bits / (l.capacity_bps * slot_s), 0.0, 1.0);
    u.per_link.push_back(r);
    u.u_comm = std::max(u.u_comm, r);
  }
  for (const auto& sh : plan.shares) {
    const double cap = g.nodes[sh.node].compute_capacity_cps;
    const double r = cap > 0.0 ? std::clamp(sh.alloc_cps / cap, 0.0, 1.0) : 0.0;
    u.per_node.push_back(r);
    u.u_comp = std::max(u.u_comp, r);
  }
  return u;
}

} // namespace stnsim

#pragma once

// Config (de)serialization, checkpoints and all file exporters. The JSON
// schema is versioned; unknown fields are rejected so typos fail loudly.
// Every double that lands in a CSV goes through fmt_double, which is what
// makes reruns byte-identical.

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stnsim/presets.hpp"
#include "stnsim/simengine.hpp"

namespace stnsim {

using Json = nlohmann::json;

inline NodeKind node_kind_from_name(const std::string& s) {
  if (s == "device") return NodeKind::Device;
  if (s == "edge") return NodeKind::Edge;
  if (s == "gateway") return NodeKind::Gateway;
  if (s == "satellite") return NodeKind::Satellite;
  if (s == "ground_station") return NodeKind::GroundStation;
  if (s == "user") return NodeKind::User;
  throw std::invalid_argument("config: unknown node kind: " + s);
}

inline const char* path_weight_name(PathWeight w) {
  return w == PathWeight::PropagationDelay ? "propagation_delay" : "hop_count";
}

inline PathWeight path_weight_from_name(const std::string& s) {
  if (s == "propagation_delay") return PathWeight::PropagationDelay;
  if (s == "hop_count") return PathWeight::HopCount;
  throw std::invalid_argument("config: unknown path weight: " + s);
}

// ---- ExperimentConfig -> JSON ----------------------------------------------

inline Json to_json(const TopologyConfig& t) {
  Json j;
  j["default_bandwidth_ground_hz"] = t.default_bandwidth_ground_hz;
  j["default_bandwidth_sat_hz"] = t.default_bandwidth_sat_hz;
  j["carrier_ground_hz"] = t.carrier_ground_hz;
  j["carrier_sat_hz"] = t.carrier_sat_hz;
  j["nodes"] = Json::array();
  for (const NodeConfig& n : t.nodes) {
    Json jn;
    jn["name"] = n.name;
    jn["kind"] = node_kind_name(n.kind);
    jn["position_m"] = {n.position_m[0], n.position_m[1], n.position_m[2]};
    jn["compute_cps"] = n.compute_capacity_cps;
    j["nodes"].push_back(std::move(jn));
  }
  j["links"] = Json::array();
  for (const LinkConfig& l : t.links) {
    Json jl;
    jl["src"] = l.src;
    jl["dst"] = l.dst;
    jl["bandwidth_hz"] = l.bandwidth_hz;
    jl["tx_power_w"] = l.tx_power_w;
    jl["gain_mean"] = l.gain_mean;
    jl["gain_sigma"] = l.gain_sigma;
    jl["antenna_gain_tx"] = l.antenna_gain_tx;
    jl["antenna_gain_rx"] = l.antenna_gain_rx;
    j["links"].push_back(std::move(jl));
  }
  j["sat_user_pairs"] = Json::array();
  for (const auto& [s, u] : t.sat_user_pairs) j["sat_user_pairs"].push_back({s, u});
  return j;
}

inline Json to_json(const ExperimentConfig& c) {
  Json j;
  j["schema_version"] = c.schema_version;
  j["preset"] = c.preset;
  j["seed"] = c.seed;
  j["scheme"] = scheme_name(c.scheme);
  j["episodes"] = c.episodes;
  j["steps_per_episode"] = c.steps_per_episode;
  j["eval_episodes"] = c.eval_episodes;
  j["slot_seconds"] = c.slot_seconds;
  j["compare_window_tasks"] = c.compare_window_tasks;
  j["compare_skip_tasks"] = c.compare_skip_tasks;
  j["channel"]["noise_temperature_k"] = c.channel.noise_temperature_k;
  if (c.channel.noise_psd_dbm_per_hz)
    j["channel"]["noise_psd_dbm_per_hz"] = *c.channel.noise_psd_dbm_per_hz;
  else
    j["channel"]["noise_psd_dbm_per_hz"] = nullptr;
  j["topology"] = to_json(c.topology);
  Json& w = j["workload"];
  w["tasks_per_step"] = c.workload.tasks_per_step;
  w["monitoring_mix"] = c.workload.monitoring_mix;
  w["monitoring_bytes_min"] = c.workload.monitoring_bytes_min;
  w["monitoring_bytes_max"] = c.workload.monitoring_bytes_max;
  w["monitoring_cycles_per_byte"] = c.workload.monitoring_cycles_per_byte;
  w["video_cycles_per_byte_min"] = c.workload.video_cycles_per_byte_min;
  w["video_cycles_per_byte_max"] = c.workload.video_cycles_per_byte_max;
  w["monitoring_deadline_s"] = c.workload.monitoring_deadline_s;
  w["video_deadline_s"] = c.workload.video_deadline_s;
  w["monitoring_rate_bps"] = c.workload.monitoring_rate_bps;
  w["video_rate_base_bps"] = c.workload.video_rate_base_bps;
  w["upload_rate_factor"] = c.workload.upload_rate_factor;
  w["compute_budget_frac"] = c.workload.compute_budget_frac;
  Json& lad = j["ladder"];
  lad["segment_seconds"] = c.ladder.segment_seconds;
  lad["levels"] = Json::array();
  for (const BitrateLevel& l : c.ladder.levels)
    lad["levels"].push_back(
        {{"bitrate_bps", l.bitrate_bps}, {"label", l.label}, {"segment_bytes", l.segment_bytes}});
  Json& p = j["psru"];
  p["alpha_mix"] = c.psru.alpha_mix;
  p["count_max"] = c.psru.count_max;
  p["weight"] = path_weight_name(c.psru.weight);
  Json& q = j["qoe"];
  q["eta"] = c.qoe.eta;
  q["kappa"] = c.qoe.kappa;
  q["nu"] = c.qoe.nu;
  q["bitrate_scale"] = c.qoe.bitrate_scale;
  Json& r = j["rewards"];
  r["delta"] = c.rewards.delta;
  r["omega"] = c.rewards.omega;
  r["alpha_delay"] = c.rewards.alpha_delay;
  r["beta_comp"] = c.rewards.beta_comp;
  r["gamma_comm"] = c.rewards.gamma_comm;
  Json& e = j["energy"];
  e["kappa_v"] = c.energy.kappa_v;
  e["eta_v"] = c.energy.eta_v;
  e["upload_bw_hz"] = c.energy.upload_bw_hz;
  Json& s = j["sac"];
  s["gamma"] = c.sac.gamma;
  s["rho"] = c.sac.rho;
  s["alpha_h"] = c.sac.alpha_h;
  s["lr"] = c.sac.lr;
  s["momentum"] = c.sac.momentum;
  s["batch"] = c.sac.batch;
  s["buffer_capacity"] = c.sac.buffer_capacity;
  s["hidden"] = c.sac.hidden;
  s["warmup_transitions"] = c.sac.warmup_transitions;
  s["update_every"] = c.sac.update_every;
  s["per_agent_reward"] = c.sac.per_agent_reward;
  s["reward_scale"] = c.sac.reward_scale;
  return j;
}

// ---- JSON -> ExperimentConfig ----------------------------------------------

namespace detail {

inline const Json* find(const Json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? nullptr : &*it;
}

template <typename T>
void read(const Json& j, const char* where, const char* key, T& out) {
  if (const Json* v = find(j, key)) {
    try {
      out = v->get<T>();
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("config: bad value at ") + where + "." + key);
    }
  }
}

inline void check_keys(const Json& j, const char* where,
                       std::initializer_list<const char*> allowed) {
  require(j.is_object(), std::string("config: ") + where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed)
      if (it.key() == a) {
        ok = true;
        break;
      }
    require(ok, std::string("config: unknown field ") + where + "." + it.key());
  }
}

} // namespace detail

inline TopologyConfig topology_from_json(const Json& j) {
  TopologyConfig t;
  detail::check_keys(j, "topology",
                     {"default_bandwidth_ground_hz", "default_bandwidth_sat_hz",
                      "carrier_ground_hz", "carrier_sat_hz", "nodes", "links",
                      "sat_user_pairs"});
  detail::read(j, "topology", "default_bandwidth_ground_hz", t.default_bandwidth_ground_hz);
  detail::read(j, "topology", "default_bandwidth_sat_hz", t.default_bandwidth_sat_hz);
  detail::read(j, "topology", "carrier_ground_hz", t.carrier_ground_hz);
  detail::read(j, "topology", "carrier_sat_hz", t.carrier_sat_hz);
  require(j.contains("nodes") && j.contains("links"),
          "config: topology needs nodes and links");
  for (const Json& jn : j.at("nodes")) {
    detail::check_keys(jn, "topology.nodes[]", {"name", "kind", "position_m", "compute_cps"});
    NodeConfig n;
    detail::read(jn, "topology.nodes[]", "name", n.name);
    std::string kind;
    detail::read(jn, "topology.nodes[]", "kind", kind);
    n.kind = node_kind_from_name(kind);
    std::vector<double> pos;
    detail::read(jn, "topology.nodes[]", "position_m", pos);
    require(pos.size() == 3, "config: node " + n.name + ": position_m needs 3 entries");
    n.position_m = {pos[0], pos[1], pos[2]};
    detail::read(jn, "topology.nodes[]", "compute_cps", n.compute_capacity_cps);
    t.nodes.push_back(std::move(n));
  }
  for (const Json& jl : j.at("links")) {
    detail::check_keys(jl, "topology.links[]",
                       {"src", "dst", "bandwidth_hz", "tx_power_w", "gain_mean",
                        "gain_sigma", "antenna_gain_tx", "antenna_gain_rx"});
    LinkConfig l;
    detail::read(jl, "topology.links[]", "src", l.src);
    detail::read(jl, "topology.links[]", "dst", l.dst);
    detail::read(jl, "topology.links[]", "bandwidth_hz", l.bandwidth_hz);
    detail::read(jl, "topology.links[]", "tx_power_w", l.tx_power_w);
    detail::read(jl, "topology.links[]", "gain_mean", l.gain_mean);
    detail::read(jl, "topology.links[]", "gain_sigma", l.gain_sigma);
    detail::read(jl, "topology.links[]", "antenna_gain_tx", l.antenna_gain_tx);
    detail::read(jl, "topology.links[]", "antenna_gain_rx", l.antenna_gain_rx);
    t.links.push_back(std::move(l));
  }
  if (const Json* pairs = detail::find(j, "sat_user_pairs"))
    for (const Json& jp : *pairs) {
      require(jp.is_array() && jp.size() == 2,
              "config: sat_user_pairs entries must be [satellite, user]");
      t.sat_user_pairs.push_back({jp.at(0).get<std::string>(), jp.at(1).get<std::string>()});
    }
  return t;
}

// Builds a config from a JSON document. Fields start from the named preset
// ("paper-fig4" when absent) and every present field overrides it.
inline ExperimentConfig config_from_json(const Json& j) {
  detail::check_keys(j, "<root>",
                     {"schema_version", "preset", "seed", "scheme", "episodes",
                      "steps_per_episode", "eval_episodes", "slot_seconds",
                      "compare_window_tasks", "compare_skip_tasks", "channel",
                      "topology", "workload", "ladder", "psru", "qoe", "rewards",
                      "energy", "sac", "config_hash"});
  int schema = 1;
  detail::read(j, "<root>", "schema_version", schema);
  require(schema == 1, "config: unsupported schema_version");
  std::string preset = "paper-fig4";
  detail::read(j, "<root>", "preset", preset);
  ExperimentConfig c = preset.empty() ? ExperimentConfig{} : preset_config(preset);
  c.preset = preset;
  c.schema_version = schema;
  detail::read(j, "<root>", "seed", c.seed);
  if (const Json* s = detail::find(j, "scheme"))
    c.scheme = scheme_from_name(s->get<std::string>());
  detail::read(j, "<root>", "episodes", c.episodes);
  detail::read(j, "<root>", "steps_per_episode", c.steps_per_episode);
  detail::read(j, "<root>", "eval_episodes", c.eval_episodes);
  detail::read(j, "<root>", "slot_seconds", c.slot_seconds);
  detail::read(j, "<root>", "compare_window_tasks", c.compare_window_tasks);
  detail::read(j, "<root>", "compare_skip_tasks", c.compare_skip_tasks);
  if (const Json* ch = detail::find(j, "channel")) {
    detail::check_keys(*ch, "channel", {"noise_temperature_k", "noise_psd_dbm_per_hz"});
    detail::read(*ch, "channel", "noise_temperature_k", c.channel.noise_temperature_k);
    if (ch->contains("noise_psd_dbm_per_hz")) {
      if (ch->at("noise_psd_dbm_per_hz").is_null())
        c.channel.noise_psd_dbm_per_hz.reset();
      else
        c.channel.noise_psd_dbm_per_hz = ch->at("noise_psd_dbm_per_hz").get<double>();
    }
  }
  if (const Json* t = detail::find(j, "topology")) c.topology = topology_from_json(*t);
  if (const Json* w = detail::find(j, "workload")) {
    detail::check_keys(*w, "workload",
                       {"tasks_per_step", "monitoring_mix", "monitoring_bytes_min",
                        "monitoring_bytes_max", "monitoring_cycles_per_byte",
                        "video_cycles_per_byte_min", "video_cycles_per_byte_max",
                        "monitoring_deadline_s", "video_deadline_s", "monitoring_rate_bps",
                        "video_rate_base_bps", "upload_rate_factor", "compute_budget_frac"});
    detail::read(*w, "workload", "tasks_per_step", c.workload.tasks_per_step);
    detail::read(*w, "workload", "monitoring_mix", c.workload.monitoring_mix);
    detail::read(*w, "workload", "monitoring_bytes_min", c.workload.monitoring_bytes_min);
    detail::read(*w, "workload", "monitoring_bytes_max", c.workload.monitoring_bytes_max);
    detail::read(*w, "workload", "monitoring_cycles_per_byte",
                 c.workload.monitoring_cycles_per_byte);
    detail::read(*w, "workload", "video_cycles_per_byte_min",
                 c.workload.video_cycles_per_byte_min);
    detail::read(*w, "workload", "video_cycles_per_byte_max",
                 c.workload.video_cycles_per_byte_max);
    detail::read(*w, "workload", "monitoring_deadline_s", c.workload.monitoring_deadline_s);
    detail::read(*w, "workload", "video_deadline_s", c.workload.video_deadline_s);
    detail::read(*w, "workload", "monitoring_rate_bps", c.workload.monitoring_rate_bps);
    detail::read(*w, "workload", "video_rate_base_bps", c.workload.video_rate_base_bps);
    detail::read(*w, "workload", "upload_rate_factor", c.workload.upload_rate_factor);
    detail::read(*w, "workload", "compute_budget_frac", c.workload.compute_budget_frac);
  }
  if (const Json* lad = detail::find(j, "ladder")) {
    detail::check_keys(*lad, "ladder", {"segment_seconds", "levels"});
    detail::read(*lad, "ladder", "segment_seconds", c.ladder.segment_seconds);
    if (const Json* lv = detail::find(*lad, "levels")) {
      c.ladder.levels.clear();
      for (const Json& je : *lv) {
        detail::check_keys(je, "ladder.levels[]", {"bitrate_bps", "label", "segment_bytes"});
        BitrateLevel b;
        detail::read(je, "ladder.levels[]", "bitrate_bps", b.bitrate_bps);
        detail::read(je, "ladder.levels[]", "label", b.label);
        detail::read(je, "ladder.levels[]", "segment_bytes", b.segment_bytes);
        c.ladder.levels.push_back(std::move(b));
      }
    }
  }
  if (const Json* p = detail::find(j, "psru")) {
    detail::check_keys(*p, "psru", {"alpha_mix", "count_max", "weight"});
    detail::read(*p, "psru", "alpha_mix", c.psru.alpha_mix);
    detail::read(*p, "psru", "count_max", c.psru.count_max);
    if (const Json* w = detail::find(*p, "weight"))
      c.psru.weight = path_weight_from_name(w->get<std::string>());
  }
  if (const Json* q = detail::find(j, "qoe")) {
    detail::check_keys(*q, "qoe", {"eta", "kappa", "nu", "bitrate_scale"});
    detail::read(*q, "qoe", "eta", c.qoe.eta);
    detail::read(*q, "qoe", "kappa", c.qoe.kappa);
    detail::read(*q, "qoe", "nu", c.qoe.nu);
    detail::read(*q, "qoe", "bitrate_scale", c.qoe.bitrate_scale);
  }
  if (const Json* r = detail::find(j, "rewards")) {
    detail::check_keys(*r, "rewards",
                       {"delta", "omega", "alpha_delay", "beta_comp", "gamma_comm"});
    detail::read(*r, "rewards", "delta", c.rewards.delta);
    detail::read(*r, "rewards", "omega", c.rewards.omega);
    detail::read(*r, "rewards", "alpha_delay", c.rewards.alpha_delay);
    detail::read(*r, "rewards", "beta_comp", c.rewards.beta_comp);
    detail::read(*r, "rewards", "gamma_comm", c.rewards.gamma_comm);
  }
  if (const Json* e = detail::find(j, "energy")) {
    detail::check_keys(*e, "energy", {"kappa_v", "eta_v", "upload_bw_hz"});
    detail::read(*e, "energy", "kappa_v", c.energy.kappa_v);
    detail::read(*e, "energy", "eta_v", c.energy.eta_v);
    detail::read(*e, "energy", "upload_bw_hz", c.energy.upload_bw_hz);
  }
  if (const Json* s = detail::find(j, "sac")) {
    detail::check_keys(*s, "sac",
                       {"gamma", "rho", "alpha_h", "lr", "momentum", "batch",
                        "buffer_capacity", "hidden", "warmup_transitions", "update_every",
                        "per_agent_reward", "reward_scale"});
    detail::read(*s, "sac", "gamma", c.sac.gamma);
    detail::read(*s, "sac", "rho", c.sac.rho);
    detail::read(*s, "sac", "alpha_h", c.sac.alpha_h);
    detail::read(*s, "sac", "lr", c.sac.lr);
    detail::read(*s, "sac", "momentum", c.sac.momentum);
    detail::read(*s, "sac", "batch", c.sac.batch);
    detail::read(*s, "sac", "buffer_capacity", c.sac.buffer_capacity);
    detail::read(*s, "sac", "hidden", c.sac.hidden);
    detail::read(*s, "sac", "warmup_transitions", c.sac.warmup_transitions);
    detail::read(*s, "sac", "update_every", c.sac.update_every);
    detail::read(*s, "sac", "per_agent_reward", c.sac.per_agent_reward);
    detail::read(*s, "sac", "reward_scale", c.sac.reward_scale);
  }
  return c;
}

inline ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "config: cannot open " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument("config: " + path + ": " + e.what());
  }
  return config_from_json(j);
}

// Hash over the dynamics-relevant sections only: run lengths, the preset tag
// and the seed may change between training and evaluation of one model.
inline std::string canonical_config_hash(const ExperimentConfig& c) {
  Json j = to_json(c);
  for (const char* k : {"preset", "seed", "scheme", "episodes", "eval_episodes",
                        "compare_window_tasks", "compare_skip_tasks"})
    j.erase(k);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(j.dump())));
  return std::string(buf);
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open for writing: " + path);
  out << text;
  require(out.good(), "write failed: " + path);
}

inline void write_effective_config(const std::string& path, const ExperimentConfig& c) {
  Json j = to_json(c);
  j["config_hash"] = canonical_config_hash(c);
  write_text_file(path, j.dump(2) + "\n");
}

// ---- checkpoints ------------------------------------------------------------

inline void save_checkpoint(const std::string& path, const Simulator& sim) {
  const Masac* m = sim.masac();
  require(m != nullptr, "checkpoint: scheme has no learned parameters");
  Json j;
  j["schema_version"] = 1;
  j["kind"] = "masac-checkpoint";
  j["scheme"] = scheme_name(sim.config().scheme);
  j["config_hash"] = canonical_config_hash(sim.config());
  j["obs_dim"] = m->obs_dim();
  j["global_dim"] = m->global_dim();
  j["n_actions"] = m->n_actions();
  j["n_agents"] = static_cast<int>(m->agents.size());
  j["hidden"] = m->config().hidden;
  j["agents"] = Json::array();
  for (const AgentNets& a : m->agents) {
    Json ja;
    ja["actor"] = a.actor.params;
    ja["q1"] = a.q1.params;
    ja["q2"] = a.q2.params;
    ja["q1_target"] = a.q1_target.params;
    ja["q2_target"] = a.q2_target.params;
    j["agents"].push_back(std::move(ja));
  }
  write_text_file(path, j.dump() + "\n");
}

inline void load_checkpoint(const std::string& path, Simulator& sim) {
  Masac* m = sim.masac();
  require(m != nullptr, "checkpoint: scheme has no learned parameters");
  std::ifstream in(path);
  require(in.good(), "checkpoint: cannot open " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument("checkpoint: " + path + ": " + e.what());
  }
  require(j.value("kind", "") == "masac-checkpoint", "checkpoint: wrong file kind");
  require(j.value("schema_version", 0) == 1, "checkpoint: unsupported schema_version");
  require(j.value("scheme", "") == scheme_name(sim.config().scheme),
          "checkpoint: scheme mismatch");
  require(j.value("config_hash", "") == canonical_config_hash(sim.config()),
          "checkpoint: config mismatch (hash differs)");
  require(j.value("obs_dim", -1) == m->obs_dim() &&
              j.value("global_dim", -1) == m->global_dim() &&
              j.value("n_actions", -1) == m->n_actions() &&
              j.value("n_agents", -1) == static_cast<int>(m->agents.size()),
          "checkpoint: dimension mismatch");
  require(j.value("hidden", std::vector<int>{}) == m->config().hidden,
          "checkpoint: hidden layout mismatch");
  const Json& agents = j.at("agents");
  require(agents.size() == m->agents.size(), "checkpoint: agent count mismatch");
  auto restore = [&](const Json& src, const char* key, Mlp& net) {
    std::vector<double> v = src.at(key).get<std::vector<double>>();
    require(v.size() == net.params.size(),
            std::string("checkpoint: parameter size mismatch in ") + key);
    net.params = std::move(v);
  };
  for (std::size_t i = 0; i < m->agents.size(); ++i) {
    restore(agents[i], "actor", m->agents[i].actor);
    restore(agents[i], "q1", m->agents[i].q1);
    restore(agents[i], "q2", m->agents[i].q2);
    restore(agents[i], "q1_target", m->agents[i].q1_target);
    restore(agents[i], "q2_target", m->agents[i].q2_target);
  }
}

// ---- CSV / JSONL exporters ---------------------------------------------------

inline const char* task_kind_name(TaskKind k) {
  return k == TaskKind::Video ? "video" : "monitoring";
}

inline const char* task_status_name(TaskStatus s) {
  return s == TaskStatus::Completed ? "completed" : "discarded";
}

inline std::string task_csv_header() {
  return "task_id,episode,step,kind,level,status,discard_reason,agent,data_bytes,"
         "deadline_s,allocated_bps,t_comp_lc,t_comm_lc,t_comp_sc,t_comm_sc,t_total,"
         "delay_branch,e_encode,e_upload,e_transcode,e_total,u_comm,u_comp,qoe,"
         "reward,batch_completion,path";
}

inline std::string task_csv_row(const TaskRecord& r, const NetworkGraph& g) {
  std::ostringstream o;
  o << r.task_id << ',' << r.episode << ',' << r.step << ',' << task_kind_name(r.kind)
    << ',' << r.level << ',' << task_status_name(r.status) << ',' << r.discard_reason
    << ',' << r.agent << ',' << fmt_double(r.data_bytes) << ',' << fmt_double(r.deadline_s)
    << ',' << fmt_double(r.allocated_bps) << ',' << fmt_double(r.t_comp_lc) << ','
    << fmt_double(r.t_comm_lc) << ',' << fmt_double(r.t_comp_sc) << ','
    << fmt_double(r.t_comm_sc) << ',' << fmt_double(r.t_total) << ',' << r.delay_branch
    << ',' << fmt_double(r.e_encode) << ',' << fmt_double(r.e_upload) << ','
    << fmt_double(r.e_transcode) << ',' << fmt_double(r.e_total) << ','
    << fmt_double(r.u_comm) << ',' << fmt_double(r.u_comp) << ',' << fmt_double(r.qoe)
    << ',' << fmt_double(r.reward) << ',' << fmt_double(r.batch_completion) << ',';
  for (std::size_t i = 0; i < r.path_nodes.size(); ++i) {
    if (i) o << '|';
    o << g.nodes[static_cast<std::size_t>(r.path_nodes[i])].name;
  }
  return o.str();
}

inline void write_tasks_csv(const std::string& path, const std::vector<TaskRecord>& rows,
                            const NetworkGraph& g) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open for writing: " + path);
  out << task_csv_header() << '\n';
  for (const TaskRecord& r : rows) out << task_csv_row(r, g) << '\n';
  require(out.good(), "write failed: " + path);
}

inline std::string episode_csv_header() {
  return "episode,n_tasks,n_completed,completion,mean_reward,mean_qoe_video,"
         "mean_energy_video,mean_delay_completed,mean_step_reward";
}

inline std::string episode_csv_row(const EpisodeStats& s) {
  std::ostringstream o;
  o << s.episode << ',' << s.n_tasks << ',' << s.n_completed << ','
    << fmt_double(s.completion) << ',' << fmt_double(s.mean_reward) << ','
    << fmt_double(s.mean_qoe_video) << ',' << fmt_double(s.mean_energy_video) << ','
    << fmt_double(s.mean_delay_completed) << ',' << fmt_double(s.mean_step_reward);
  return o.str();
}

inline void write_episodes_csv(const std::string& path,
                               const std::vector<EpisodeStats>& rows) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open for writing: " + path);
  out << episode_csv_header() << '\n';
  for (const EpisodeStats& s : rows) out << episode_csv_row(s) << '\n';
  require(out.good(), "write failed: " + path);
}

inline std::string train_log_csv_header() {
  return "step,episode,loss_actor,loss_q1,loss_q2,entropy,mean_reward";
}

inline std::string train_log_csv_row(const StepLogRow& r) {
  std::ostringstream o;
  o << r.step << ',' << r.episode << ',' << fmt_double(r.loss_actor) << ','
    << fmt_double(r.loss_q1) << ',' << fmt_double(r.loss_q2) << ','
    << fmt_double(r.entropy) << ',' << fmt_double(r.reward);
  return o.str();
}

inline void write_train_log_csv(const std::string& path,
                                const std::vector<StepLogRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open for writing: " + path);
  out << train_log_csv_header() << '\n';
  for (const StepLogRow& r : rows) out << train_log_csv_row(r) << '\n';
  require(out.good(), "write failed: " + path);
}

inline void write_compare_csv(const std::string& path, const std::vector<CompareRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open for writing: " + path);
  out << "scheme,episodes,tasks,completion,mean_reward,mean_qoe_video,"
         "mean_energy_video,mean_delay_completed,mean_step_reward,objective_per_episode\n";
  for (const CompareRow& r : rows)
    out << r.scheme << ',' << r.episodes << ',' << r.tasks << ','
        << fmt_double(r.completion) << ',' << fmt_double(r.mean_reward) << ','
        << fmt_double(r.mean_qoe_video) << ',' << fmt_double(r.mean_energy_video) << ','
        << fmt_double(r.mean_delay_completed) << ',' << fmt_double(r.mean_step_reward)
        << ',' << fmt_double(r.objective_per_episode) << '\n';
  require(out.good(), "write failed: " + path);
}

// Rolling-window series over a scheme's task stream, one row every full
// window past the warm-up prefix; mirrors a task-volume sweep.
inline void append_compare_series(std::ostream& out, const std::string& scheme,
                                  const std::vector<TaskRecord>& records, int window,
                                  int skip) {
  require(window > 0, "compare series: window must be > 0");
  const int n = static_cast<int>(records.size());
  for (int end = window; end <= n; end += window) {
    if (end <= skip) continue;
    int completed = 0, nvideo = 0, ndone = 0;
    double rsum = 0.0, esum = 0.0, dsum = 0.0;
    for (int i = end - window; i < end; ++i) {
      const TaskRecord& r = records[static_cast<std::size_t>(i)];
      rsum += r.reward;
      if (r.status == TaskStatus::Completed) {
        ++completed;
        dsum += r.t_total;
        ++ndone;
      }
      if (r.kind == TaskKind::Video) {
        esum += r.e_total;
        ++nvideo;
      }
    }
    out << scheme << ',' << end << ','
        << fmt_double(static_cast<double>(completed) / window) << ','
        << fmt_double(rsum / window) << ','
        << fmt_double(nvideo > 0 ? esum / nvideo : 0.0) << ','
        << fmt_double(ndone > 0 ? dsum / ndone : 0.0) << '\n';
  }
}

inline void write_paths_jsonl(const std::string& path,
                              const std::vector<PathTraceRow>& rows,
                              const NetworkGraph& g) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open for writing: " + path);
  for (const PathTraceRow& r : rows) {
    Json j;
    j["task_id"] = r.task_id;
    j["candidates"] = Json::array();
    for (const CandidateTrace& c : r.candidates) {
      Json jc;
      jc["path"] = Json::array();
      for (int ni : c.nodes) jc["path"].push_back(g.nodes[static_cast<std::size_t>(ni)].name);
      jc["score"] = c.score;
      jc["chosen"] = c.chosen;
      j["candidates"].push_back(std::move(jc));
    }
    out << j.dump() << '\n';
  }
  require(out.good(), "write failed: " + path);
}

// Task list export for replay: everything needed to rebuild the episode's
// arrivals without this implementation's RNG.
inline void write_tasks_jsonl(const std::string& path, const std::vector<Task>& tasks,
                              const NetworkGraph& g) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open for writing: " + path);
  for (const Task& t : tasks) {
    Json j;
    j["id"] = t.id;
    j["kind"] = task_kind_name(t.kind);
    j["arrival_step"] = t.arrival_step;
    j["source_edge"] = g.nodes[static_cast<std::size_t>(t.source_edge)].name;
    j["destination"] = g.nodes[static_cast<std::size_t>(t.destination)].name;
    j["data_bytes"] = t.data_bytes;
    j["cycles_per_byte"] = t.cycles_per_byte;
    j["deadline_s"] = t.deadline_s;
    out << j.dump() << '\n';
  }
  require(out.good(), "write failed: " + path);
}

inline void write_topology_report(const std::string& path, const NetworkGraph& g) {
  Json j;
  j["nodes"] = Json::array();
  for (const Node& n : g.nodes)
    j["nodes"].push_back({{"name", n.name},
                          {"kind", node_kind_name(n.kind)},
                          {"compute_cps", n.compute_capacity_cps}});
  j["links"] = Json::array();
  for (std::size_t i = 0; i < g.links.size(); ++i) {
    const Link& l = g.links[i];
    j["links"].push_back({{"src", g.nodes[static_cast<std::size_t>(l.src)].name},
                          {"dst", g.nodes[static_cast<std::size_t>(l.dst)].name},
                          {"band", l.band == LinkBand::Satellite ? "satellite" : "ground"},
                          {"is_isl", l.is_isl},
                          {"distance_m", l.distance_m},
                          {"capacity_bps", l.capacity_bps}});
  }
  write_text_file(path, j.dump(2) + "\n");
}

} // namespace stnsim

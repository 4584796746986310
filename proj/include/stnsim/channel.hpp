#pragma once

// Physical-layer link model: thermal noise, Shannon rates for ground and
// feeder links, free-space path loss and SNR for inter-satellite links, and
// the per-step stochastic channel gain.
//
// Unit discipline: all inputs/outputs are linear SI (Hz, W, m, bps). dB and
// dBm exist only at the config boundary.

#include <cmath>
#include <cstdint>
#include <optional>

#include "stnsim/common.hpp"

namespace stnsim {

struct ChannelParams {
  double noise_temperature_k = 290.0;
  // When set, overrides kT as the one-sided noise power spectral density.
  // Stored in dBm/Hz, the unit link budgets usually quote; converted here.
  std::optional<double> noise_psd_dbm_per_hz = -174.0;
};

// Thermal noise power over a bandwidth. With the PSD override active this is
// 10^((psd_dbm-30)/10) * B, otherwise k_B * T * B.
inline double noise_power_w(const ChannelParams& p, double bandwidth_hz) {
  require(bandwidth_hz > 0.0, "noise_power_w: bandwidth must be > 0");
  if (p.noise_psd_dbm_per_hz) {
    return dbm_to_watts(*p.noise_psd_dbm_per_hz) * bandwidth_hz;
  }
  require(p.noise_temperature_k > 0.0, "noise_power_w: temperature must be > 0");
  return kBoltzmann * p.noise_temperature_k * bandwidth_hz;
}

// Shannon rate of a ground or feeder link: B * log2(1 + g*p / N), where N is
// the noise power over the same bandwidth B. Used for edge-edge, edge-gateway,
// gateway-satellite and satellite-ground-station links; only the bandwidth
// and the configured gain differ per band.
inline double ground_uplink_rate_bps(double bandwidth_hz, double channel_gain,
                                     double tx_power_w, double noise_w) {
  require(bandwidth_hz > 0.0, "ground_uplink_rate_bps: bandwidth must be > 0");
  require(channel_gain >= 0.0, "ground_uplink_rate_bps: gain must be >= 0");
  require(tx_power_w >= 0.0, "ground_uplink_rate_bps: power must be >= 0");
  require(noise_w > 0.0, "ground_uplink_rate_bps: noise must be > 0");
  return bandwidth_hz * std::log2(1.0 + channel_gain * tx_power_w / noise_w);
}

// Free-space path loss, linear: (4*pi*f*d/c)^2.
inline double fspl(double distance_m, double carrier_hz) {
  require(distance_m > 0.0, "fspl: distance must be > 0");
  require(carrier_hz > 0.0, "fspl: carrier must be > 0");
  const double x = 4.0 * M_PI * carrier_hz * distance_m / kLightSpeed;
  return x * x;
}

// Inter-satellite SNR: P_t * G_tx * G_rx / (N * L). Gains linear, L = fspl.
inline double isl_snr(double tx_power_w, double gain_tx, double gain_rx,
                      double path_loss, double noise_w) {
  require(tx_power_w >= 0.0, "isl_snr: power must be >= 0");
  require(gain_tx >= 0.0 && gain_rx >= 0.0, "isl_snr: gains must be >= 0");
  require(path_loss > 0.0, "isl_snr: path loss must be > 0");
  require(noise_w > 0.0, "isl_snr: noise must be > 0");
  return tx_power_w * gain_tx * gain_rx / (noise_w * path_loss);
}

inline double isl_rate_bps(double bandwidth_hz, double snr) {
  require(bandwidth_hz > 0.0, "isl_rate_bps: bandwidth must be > 0");
  require(snr >= 0.0, "isl_rate_bps: snr must be >= 0");
  return bandwidth_hz * std::log2(1.0 + snr);
}

// Per-step channel gain: log-normal with E[gain] = mean (so mu is shifted by
// -sigma^2/2), drawn from an engine keyed on (seed, link key, step). The same
// tuple always yields the same gain; sigma = 0 returns the mean exactly.
inline double sample_gain(double mean, double sigma, std::uint64_t link_key,
                          std::uint64_t step, std::uint64_t seed) {
  require(mean > 0.0, "sample_gain: mean must be > 0");
  require(sigma >= 0.0, "sample_gain: sigma must be >= 0");
  if (sigma == 0.0) return mean;
  Rng rng(hash_combine(hash_combine(splitmix64(seed), link_key), step));
  std::normal_distribution<double> n(0.0, 1.0);
  const double mu = std::log(mean) - 0.5 * sigma * sigma;
  return std::exp(mu + sigma * n(rng));
}

} // namespace stnsim

#pragma once

// Shared constants, deterministic hashing and formatting helpers used across
// the simulator. Everything here is header-only and allocation-free.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>

namespace stnsim {

// Physical constants (SI).
inline constexpr double kBoltzmann = 1.380649e-23; // J/K
inline constexpr double kLightSpeed = 299792458.0; // m/s

// dB <-> linear. Conversions happen at config parse time only; everything
// downstream of a config is linear SI.
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
// dBm is referenced to 1 mW.
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

// splitmix64, used to derive independent deterministic seeds from
// (seed, stream identifiers) tuples without sharing engine state.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ (0x9e3779b97f4a7c15ULL + (b << 6) + (b >> 2) + splitmix64(b)));
}

// FNV-1a over a byte string; used for config hashes in checkpoints.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Fixed formatting for CSV/JSONL payloads: identical doubles must serialize to
// identical bytes so reruns of a seeded experiment diff clean.
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::string(buf);
}

inline void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

// One RNG engine per logical stream, all derived from the experiment seed.
using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  return Rng(hash_combine(splitmix64(seed), stream));
}

} // namespace stnsim

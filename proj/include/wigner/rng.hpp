#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace wigner {

using Rng = std::mt19937_64;

// Finalizer of the splitmix64 generator; bijective 64-bit mixer.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based splittable seeding: one independent stream per
// (master_seed, replica_index, stream_label) triple.  Replicas can run in
// any order or in parallel and still draw identical streams.
inline std::uint64_t derive_seed(std::uint64_t master_seed,
                                 std::uint64_t replica_index,
                                 std::string_view stream_label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the label
  for (unsigned char c : stream_label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t s = mix64(master_seed);
  s = mix64(s ^ mix64(replica_index + 0x632be59bd9b4e019ULL));
  s = mix64(s ^ h);
  return s;
}

struct SeedDerivation {
  std::uint64_t master_seed = 0;
  std::uint64_t replica_index = 0;
  std::string_view stream_label = "";

  std::uint64_t value() const {
    return derive_seed(master_seed, replica_index, stream_label);
  }
  Rng rng() const { return Rng(value()); }
};

// Uniform double in [0,1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform double in (0,1]; safe as a log() argument.
inline double uniform01_open(Rng& rng) {
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

// One standard normal per call (Box-Muller, cosine branch).  Stateless, so
// a sampler interrupted and restarted at a replica boundary stays
// reproducible.
inline double gaussian01(Rng& rng) {
  const double u = uniform01_open(rng);
  const double v = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925287 * v);
}

}  // namespace wigner

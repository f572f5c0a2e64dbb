#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "samplebench/sampling/nucleus.hpp"
#include "samplebench/sampling/types.hpp"

namespace samplebench {

/// Seeded PRNG state threaded explicitly through sampling calls.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard, and doubles are built from the top 53 bits by hand instead of
/// through std::uniform_real_distribution (whose algorithm is left to the
/// library). Together that keeps draws identical across toolchains.
class SamplerRng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64";

  explicit SamplerRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1).
  double next_unit() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  std::uint64_t next_u64() { return engine_(); }

  friend bool operator==(const SamplerRng&, const SamplerRng&) = default;

 private:
  std::mt19937_64 engine_;
};

/// Draws one token from `pool` with probability proportional to its mass in
/// `dist`. Consumes exactly one value from `rng`.
inline Token sample_token(const NucleusSet& pool, const TokenDistribution& dist, SamplerRng& rng) {
  if (pool.empty()) throw SamplingError(SamplingErrc::kEmptyPool, "nucleus pool is empty");

  double pool_mass = 0.0;
  for (const auto& token : pool.tokens) {
    if (!dist.contains(token)) {
      throw SamplingError(SamplingErrc::kPoolNotInSupport,
                          "pool token '" + token + "' is not in the distribution");
    }
    pool_mass += dist.at(token);
  }

  const double target = rng.next_unit() * pool_mass;
  double cumulative = 0.0;
  for (const auto& token : pool.tokens) {
    const double p = dist.at(token);
    cumulative += p;
    if (target < cumulative && p > 0.0) return token;
  }
  // target can land on pool_mass only through rounding; fall back to the last
  // token that carries mass.
  for (auto it = pool.tokens.rbegin(); it != pool.tokens.rend(); ++it) {
    if (dist.at(*it) > 0.0) return *it;
  }
  return pool.tokens.back();
}

}  // namespace samplebench

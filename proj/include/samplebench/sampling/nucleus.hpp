#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "samplebench/sampling/types.hpp"

namespace samplebench {

/// Tokens of `dist` with positive probability, ordered by descending
/// probability and then ascending token. This is the order in which the
/// nucleus is grown and in which the sampler walks the pool.
inline std::vector<std::pair<Token, double>> ranked_support(const TokenDistribution& dist) {
  std::vector<std::pair<Token, double>> ranked;
  ranked.reserve(dist.size());
  for (const auto& [token, p] : dist.entries()) {
    if (p > 0.0) ranked.emplace_back(token, p);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return ranked;
}

/// Smallest set of tokens, taken greedily by probability, whose cumulative
/// mass reaches `top_p`. If rounding keeps the total just short of `top_p`
/// (possible only for top_p close to 1) the whole support is returned.
inline NucleusSet nucleus_filter(const TokenDistribution& dist, double top_p) {
  if (!SamplingParams::top_p_in_range(top_p)) {
    throw SamplingError(SamplingErrc::kInvalidParams, "top_p out of range (0,1]");
  }
  NucleusSet nucleus;
  for (auto& [token, p] : ranked_support(dist)) {
    nucleus.tokens.push_back(std::move(token));
    nucleus.cumulative_mass += p;
    if (nucleus.cumulative_mass >= top_p) break;
  }
  return nucleus;
}

}  // namespace samplebench

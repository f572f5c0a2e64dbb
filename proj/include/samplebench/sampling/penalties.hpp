#pragma once

#include <map>
#include <string>

#include "samplebench/sampling/types.hpp"

namespace samplebench {

/// Divides each token's probability by (1 + a*f(t)) * (1 + b*[f(t) > 0]),
/// where f(t) is the token's count in `history`, a the frequency penalty and
/// b the presence penalty. The result is deliberately left unnormalized.
///
/// Both penalties must lie in [0, 2], which keeps every divisor >= 1. With
/// a = b = 0 the output equals the input bit-for-bit.
inline TokenWeights apply_penalties(const TokenDistribution& dist, const TokenHistory& history,
                                    double frequency_penalty, double presence_penalty) {
  if (!SamplingParams::penalty_in_range(frequency_penalty)) {
    throw SamplingError(SamplingErrc::kInvalidParams, "frequency_penalty out of range [0,2]");
  }
  if (!SamplingParams::penalty_in_range(presence_penalty)) {
    throw SamplingError(SamplingErrc::kInvalidParams, "presence_penalty out of range [0,2]");
  }

  std::map<Token, double> out;
  for (const auto& [token, p] : dist.entries()) {
    const auto f = history.count(token);
    if (f == 0) {
      out.emplace(token, p);
      continue;
    }
    const double freq_divisor = 1.0 + frequency_penalty * static_cast<double>(f);
    const double presence_divisor = 1.0 + presence_penalty;
    out.emplace(token, p / (freq_divisor * presence_divisor));
  }
  return TokenWeights(std::move(out));
}

/// Scales weights to sum to one. Throws kAllZeroWeights when nothing is left.
inline TokenDistribution renormalize(const TokenWeights& weights) {
  const double total = weights.total();
  if (weights.empty() || !(total > 0.0)) {
    throw SamplingError(SamplingErrc::kAllZeroWeights,
                        "all token weights are zero; nothing can be sampled");
  }
  std::map<Token, double> out;
  for (const auto& [token, w] : weights.entries()) out.emplace(token, w / total);
  return TokenDistribution(std::move(out));
}

}  // namespace samplebench

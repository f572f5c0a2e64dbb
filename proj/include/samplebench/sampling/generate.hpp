#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "samplebench/sampling/nucleus.hpp"
#include "samplebench/sampling/penalties.hpp"
#include "samplebench/sampling/sampler.hpp"
#include "samplebench/sampling/types.hpp"

namespace samplebench {

/// A model that can report its full next-token distribution. Implementations
/// must be deterministic and safe to call concurrently.
class DistributionSource {
 public:
  virtual ~DistributionSource() = default;

  virtual std::vector<Token> tokenize(std::string_view text) const = 0;
  virtual std::string detokenize(const std::vector<Token>& tokens) const = 0;
  virtual TokenDistribution next_distribution(const std::vector<Token>& context) const = 0;
  virtual const Token& end_of_text() const = 0;
};

struct GenerationResult {
  std::vector<Token> tokens;  // generated tokens only, end-of-text excluded
  std::string text;
  bool stopped_on_end_of_text = false;
  std::string_view prng = SamplerRng::kAlgorithm;
};

/// Runs the token loop: distribution -> penalties (history of generated
/// tokens only) -> renormalize -> nucleus filter -> sample.
inline GenerationResult generate_sequence(const DistributionSource& source,
                                          std::string_view prompt, const SamplingParams& params,
                                          std::size_t max_tokens) {
  params.validate();
  if (max_tokens == 0) {
    throw SamplingError(SamplingErrc::kInvalidParams, "max_tokens must be >= 1");
  }

  std::vector<Token> context = source.tokenize(prompt);
  TokenHistory history;
  SamplerRng rng(params.seed);
  GenerationResult result;

  for (std::size_t step = 0; step < max_tokens; ++step) {
    const TokenDistribution dist = source.next_distribution(context);
    const TokenDistribution adjusted = renormalize(
        apply_penalties(dist, history, params.frequency_penalty, params.presence_penalty));
    const NucleusSet pool = nucleus_filter(adjusted, params.top_p);
    Token next = sample_token(pool, adjusted, rng);

    if (next == source.end_of_text()) {
      result.stopped_on_end_of_text = true;
      break;
    }
    history.append(next);
    context.push_back(next);
    result.tokens.push_back(std::move(next));
  }

  result.text = source.detokenize(result.tokens);
  return result;
}

}  // namespace samplebench

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace samplebench {

using Token = std::string;

enum class SamplingErrc {
  kInvalidDistribution,
  kInvalidParams,
  kAllZeroWeights,
  kEmptyPool,
  kPoolNotInSupport,
};

inline std::string_view to_string(SamplingErrc code) {
  switch (code) {
    case SamplingErrc::kInvalidDistribution: return "invalid_distribution";
    case SamplingErrc::kInvalidParams: return "invalid_params";
    case SamplingErrc::kAllZeroWeights: return "all_zero_weights";
    case SamplingErrc::kEmptyPool: return "empty_pool";
    case SamplingErrc::kPoolNotInSupport: return "pool_not_in_support";
  }
  return "unknown";
}

class SamplingError : public std::runtime_error {
 public:
  SamplingError(SamplingErrc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  SamplingErrc code() const noexcept { return code_; }

 private:
  SamplingErrc code_;
};

/// Absolute tolerance on the total mass of a valid distribution.
inline constexpr double kMassTolerance = 1e-9;

/// Non-negative per-token weights that need not sum to one. This is what the
/// penalty transform produces; `renormalize` turns it back into a pmf.
class TokenWeights {
 public:
  TokenWeights() = default;

  explicit TokenWeights(std::map<Token, double> entries) : entries_(std::move(entries)) {
    for (const auto& [token, w] : entries_) {
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw SamplingError(SamplingErrc::kInvalidDistribution,
                            "weight for token '" + token + "' must be finite and >= 0");
      }
    }
  }

  const std::map<Token, double>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  double at(const Token& token) const {
    auto it = entries_.find(token);
    return it == entries_.end() ? 0.0 : it->second;
  }

  double total() const noexcept {
    double sum = 0.0;
    for (const auto& [_, w] : entries_) sum += w;
    return sum;
  }

  friend bool operator==(const TokenWeights&, const TokenWeights&) = default;

 private:
  std::map<Token, double> entries_;
};

/// A probability mass function over a finite, non-empty vocabulary.
class TokenDistribution {
 public:
  explicit TokenDistribution(std::map<Token, double> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) {
      throw SamplingError(SamplingErrc::kInvalidDistribution, "vocabulary must be non-empty");
    }
    double sum = 0.0;
    for (const auto& [token, p] : entries_) {
      if (!(p >= 0.0) || !std::isfinite(p)) {
        throw SamplingError(SamplingErrc::kInvalidDistribution,
                            "probability for token '" + token + "' must be finite and >= 0");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kMassTolerance) {
      throw SamplingError(SamplingErrc::kInvalidDistribution,
                          "probabilities sum to " + std::to_string(sum) + ", expected 1");
    }
  }

  const std::map<Token, double>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  double at(const Token& token) const {
    auto it = entries_.find(token);
    return it == entries_.end() ? 0.0 : it->second;
  }

  bool contains(const Token& token) const { return entries_.count(token) != 0; }

  TokenWeights as_weights() const { return TokenWeights(entries_); }

  friend bool operator==(const TokenDistribution&, const TokenDistribution&) = default;

 private:
  std::map<Token, double> entries_;
};

/// The three exposed hyperparameters plus the PRNG seed.
struct SamplingParams {
  static constexpr double kPenaltyMin = 0.0;
  static constexpr double kPenaltyMax = 2.0;

  double top_p = 0.9;
  double frequency_penalty = 0.0;
  double presence_penalty = 0.0;
  std::uint64_t seed = 0;

  static bool top_p_in_range(double v) { return v > 0.0 && v <= 1.0; }
  static bool penalty_in_range(double v) { return v >= kPenaltyMin && v <= kPenaltyMax; }

  /// Name of the first out-of-range field, or empty when all are valid.
  std::string first_invalid_field() const {
    if (!top_p_in_range(top_p)) return "top_p";
    if (!penalty_in_range(frequency_penalty)) return "frequency_penalty";
    if (!penalty_in_range(presence_penalty)) return "presence_penalty";
    return {};
  }

  void validate() const {
    if (auto field = first_invalid_field(); !field.empty()) {
      throw SamplingError(SamplingErrc::kInvalidParams, field + " out of range");
    }
  }

  friend bool operator==(const SamplingParams&, const SamplingParams&) = default;
};

/// Occurrence counts of previously emitted tokens. Absent means zero.
class TokenHistory {
 public:
  TokenHistory() = default;

  template <typename Range>
  static TokenHistory from(const Range& tokens) {
    TokenHistory h;
    for (const auto& t : tokens) h.append(t);
    return h;
  }

  void append(const Token& token) { ++counts_[token]; }

  std::uint64_t count(const Token& token) const {
    auto it = counts_.find(token);
    return it == counts_.end() ? 0 : it->second;
  }

  const std::map<Token, std::uint64_t>& counts() const noexcept { return counts_; }

 private:
  std::map<Token, std::uint64_t> counts_;
};

/// Tokens kept by nucleus filtering, in selection order (descending
/// probability, ties by ascending token).
struct NucleusSet {
  std::vector<Token> tokens;
  double cumulative_mass = 0.0;

  bool contains(const Token& token) const {
    for (const auto& t : tokens) {
      if (t == token) return true;
    }
    return false;
  }
  bool empty() const noexcept { return tokens.empty(); }
  std::size_t size() const noexcept { return tokens.size(); }
};

}  // namespace samplebench

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "samplebench/sampling/generate.hpp"
#include "samplebench/sampling/types.hpp"

namespace samplebench {

enum class ProviderMode { kDistribution, kCompletionOnly };

inline std::string_view to_string(ProviderMode mode) {
  return mode == ProviderMode::kDistribution ? "distribution" : "completion-only";
}

enum class ProviderErrc { kTimeout, kHttpError, kMalformedResponse, kTransport, kInvalidConfig };

inline std::string_view to_string(ProviderErrc code) {
  switch (code) {
    case ProviderErrc::kTimeout: return "timeout";
    case ProviderErrc::kHttpError: return "http_error";
    case ProviderErrc::kMalformedResponse: return "malformed_response";
    case ProviderErrc::kTransport: return "transport_error";
    case ProviderErrc::kInvalidConfig: return "invalid_config";
  }
  return "unknown";
}

class ProviderError : public std::runtime_error {
 public:
  ProviderError(ProviderErrc code, std::string provider_id, const std::string& what,
                std::optional<int> status = std::nullopt, std::string body = {})
      : std::runtime_error(what),
        code_(code),
        provider_id_(std::move(provider_id)),
        status_(status),
        body_(std::move(body)) {}

  ProviderErrc code() const noexcept { return code_; }
  const std::string& provider_id() const noexcept { return provider_id_; }
  /// HTTP status for kHttpError.
  std::optional<int> status() const noexcept { return status_; }
  const std::string& body() const noexcept { return body_; }

 private:
  ProviderErrc code_;
  std::string provider_id_;
  std::optional<int> status_;
  std::string body_;
};

struct Completion {
  std::string text;
  std::string raw_response;
};

/// Anything that can turn a prompt and sampling parameters into text.
///
/// Distribution-capable providers also expose their per-token distributions
/// through `distributions()`, in which case sampling happens locally.
/// Completion-only providers forward the parameters and let the remote side
/// sample.
class GenerationProvider {
 public:
  virtual ~GenerationProvider() = default;

  virtual const std::string& id() const = 0;
  virtual ProviderMode mode() const = 0;

  /// Non-null exactly when mode() is kDistribution.
  virtual const DistributionSource* distributions() const { return nullptr; }

  virtual Completion complete(std::string_view prompt, const SamplingParams& params,
                              std::size_t max_tokens) const = 0;
};

}  // namespace samplebench

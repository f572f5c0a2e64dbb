#pragma once

#include <chrono>
#include <cstddef>
#include <cstdlib>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <utility>

#include <httplib.h>
#include <json.hpp>

#include "samplebench/providers/provider.hpp"

namespace samplebench {

/// Environment variable holding the remote API key.
inline constexpr const char* kApiKeyEnv = "SAMPLEBENCH_API_KEY";

struct RemoteProviderConfig {
  std::string base_url;  // e.g. "https://api.example.com/v1"
  std::string api_key;
  std::string model_name;
  double timeout_seconds = 30.0;
};

/// Pieces of a base URL as httplib wants them.
struct ParsedUrl {
  std::string origin;       // scheme://host[:port]
  std::string path_prefix;  // without trailing slash, possibly empty
  bool https = false;
};

inline std::optional<ParsedUrl> parse_base_url(const std::string& url) {
  static const std::regex re(R"(^(https?)://([A-Za-z0-9.\-]+|\[[0-9A-Fa-f:.]+\])(:([0-9]{1,5}))?(/[^?#\s]*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) return std::nullopt;
  if (m[4].matched && std::stoul(m[4].str()) > 65535) return std::nullopt;
  ParsedUrl out;
  out.https = m[1].str() == "https";
  out.origin = m[1].str() + "://" + m[2].str() + (m[3].matched ? m[3].str() : std::string{});
  out.path_prefix = m[5].matched ? m[5].str() : std::string{};
  while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
  return out;
}

/// Request body for an OpenAI-compatible completions call.
inline nlohmann::json build_completion_request(const RemoteProviderConfig& config,
                                               std::string_view prompt,
                                               const SamplingParams& params,
                                               std::size_t max_tokens) {
  return nlohmann::json{
      {"model", config.model_name},
      {"prompt", std::string(prompt)},
      {"max_tokens", max_tokens},
      {"top_p", params.top_p},
      {"frequency_penalty", params.frequency_penalty},
      {"presence_penalty", params.presence_penalty},
  };
}

/// One blocking completion request. Parameters are forwarded untouched; the
/// remote side does all sampling. Failures are never retried.
inline Completion remote_complete(const RemoteProviderConfig& config, std::string_view prompt,
                                  const SamplingParams& params, std::size_t max_tokens,
                                  const std::string& provider_id = "remote") {
  const auto url = parse_base_url(config.base_url);
  if (!url) {
    throw ProviderError(ProviderErrc::kInvalidConfig, provider_id,
                        "malformed base_url '" + config.base_url + "'");
  }
  if (!(config.timeout_seconds > 0.0)) {
    throw ProviderError(ProviderErrc::kInvalidConfig, provider_id, "timeout must be > 0");
  }

  httplib::Client client(url->origin);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(config.timeout_seconds));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  httplib::Headers headers;
  if (!config.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config.api_key);
  }

  const auto body = build_completion_request(config, prompt, params, max_tokens).dump();
  const auto started = std::chrono::steady_clock::now();
  auto res = client.Post(url->path_prefix + "/completions", headers, body, "application/json");

  if (!res) {
    const auto err = res.error();
    const auto elapsed = std::chrono::steady_clock::now() - started;
    const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                           ((err == httplib::Error::Read || err == httplib::Error::Write) &&
                            elapsed >= timeout * 9 / 10);
    if (timed_out) {
      throw ProviderError(ProviderErrc::kTimeout, provider_id,
                          "remote request timed out after " +
                              std::to_string(config.timeout_seconds) + "s");
    }
    throw ProviderError(ProviderErrc::kTransport, provider_id,
                        "remote request failed: " + httplib::to_string(err));
  }
  if (res->status < 200 || res->status >= 300) {
    throw ProviderError(ProviderErrc::kHttpError, provider_id,
                        "remote returned HTTP " + std::to_string(res->status), res->status,
                        res->body);
  }

  const auto parsed = nlohmann::json::parse(res->body, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object() || !parsed.contains("choices") ||
      !parsed["choices"].is_array() || parsed["choices"].empty() ||
      !parsed["choices"][0].is_object() || !parsed["choices"][0].contains("text") ||
      !parsed["choices"][0]["text"].is_string()) {
    throw ProviderError(ProviderErrc::kMalformedResponse, provider_id,
                        "remote response lacks choices[0].text", res->status, res->body);
  }
  return {parsed["choices"][0]["text"].get<std::string>(), res->body};
}

/// Completion-only provider backed by an OpenAI-compatible endpoint.
class RemoteProvider final : public GenerationProvider {
 public:
  RemoteProvider(std::string id, RemoteProviderConfig config)
      : id_(std::move(id)), config_(std::move(config)) {
    if (!parse_base_url(config_.base_url)) {
      throw ProviderError(ProviderErrc::kInvalidConfig, id_,
                          "malformed base_url '" + config_.base_url + "'");
    }
    if (!(config_.timeout_seconds > 0.0)) {
      throw ProviderError(ProviderErrc::kInvalidConfig, id_, "timeout must be > 0");
    }
  }

  const std::string& id() const override { return id_; }
  ProviderMode mode() const override { return ProviderMode::kCompletionOnly; }

  Completion complete(std::string_view prompt, const SamplingParams& params,
                      std::size_t max_tokens) const override {
    return remote_complete(config_, prompt, params, max_tokens, id_);
  }

  const RemoteProviderConfig& config() const noexcept { return config_; }

 private:
  std::string id_;
  RemoteProviderConfig config_;
};

}  // namespace samplebench

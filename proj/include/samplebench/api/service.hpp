#pragma once

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include <httplib.h>
#include <json.hpp>

#include "samplebench/api/hyperparameters.hpp"
#include "samplebench/providers/provider.hpp"
#include "samplebench/providers/registry.hpp"
#include "samplebench/sampling/generate.hpp"
#include "samplebench/store/session_store.hpp"
#include "samplebench/store/text.hpp"

namespace samplebench {

struct ServiceOptions {
  std::size_t default_max_tokens = 128;
  std::size_t max_tokens_limit = 4096;
  std::size_t default_page_size = 50;
  /// Directory served under "/" when set and present.
  std::optional<std::filesystem::path> static_dir;
};

/// A failed request: HTTP status plus the machine-readable error body.
struct ApiError {
  int status;
  std::string code;
  std::string message;
  nlohmann::json details = nlohmann::json::object();

  nlohmann::json body() const {
    nlohmann::json err = {{"code", code}, {"message", message}};
    for (auto it = details.begin(); it != details.end(); ++it) err[it.key()] = it.value();
    return {{"error", err}};
  }
};

/// Validated body of POST /api/generate.
struct GenerateRequest {
  std::string prompt;
  SamplingParams params;  // seed filled in when the request gave one
  bool has_seed = false;
  std::optional<std::string> provider_id;
  std::size_t max_tokens = 0;
};

namespace detail {

inline ApiError invalid_field(const std::string& field, const std::string& range,
                              const std::string& message) {
  return {400, "invalid_params", message, {{"field", field}, {"range", range}}};
}

inline std::optional<long long> parse_integer(std::string_view text) {
  long long value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) return std::nullopt;
  return value;
}

}  // namespace detail

/// Parses and range-checks a generate request. Returns the first problem
/// found as an ApiError naming the field.
inline std::variant<GenerateRequest, ApiError> parse_generate_request(std::string_view body,
                                                                      const ServiceOptions& opts) {
  const auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return ApiError{400, "invalid_json", "request body must be a JSON object"};
  }

  GenerateRequest req;
  if (!j.contains("prompt") || !j["prompt"].is_string() ||
      is_blank(j["prompt"].get_ref<const std::string&>())) {
    return detail::invalid_field("prompt", "non-empty string", "prompt must be a non-empty string");
  }
  req.prompt = j["prompt"].get<std::string>();

  struct Field {
    const char* name;
    double* target;
    bool (*in_range)(double);
    const char* range;
  };
  const Field fields[] = {
      {"top_p", &req.params.top_p, &SamplingParams::top_p_in_range, "(0,1]"},
      {"frequency_penalty", &req.params.frequency_penalty, &SamplingParams::penalty_in_range,
       "[0,2]"},
      {"presence_penalty", &req.params.presence_penalty, &SamplingParams::penalty_in_range,
       "[0,2]"},
  };
  for (const auto& f : fields) {
    if (!j.contains(f.name) || !j[f.name].is_number()) {
      return detail::invalid_field(f.name, f.range,
                                   std::string(f.name) + " must be a number in " + f.range);
    }
    const double v = j[f.name].get<double>();
    if (!f.in_range(v)) {
      return detail::invalid_field(f.name, f.range,
                                   std::string(f.name) + " must be in " + f.range);
    }
    *f.target = v;
  }

  if (j.contains("seed") && !j["seed"].is_null()) {
    const auto& s = j["seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      return detail::invalid_field("seed", "[0,18446744073709551615]",
                                   "seed must be a non-negative 64-bit integer");
    }
    req.params.seed = s.get<std::uint64_t>();
    req.has_seed = true;
  }

  if (j.contains("provider_id") && !j["provider_id"].is_null()) {
    if (!j["provider_id"].is_string()) {
      return detail::invalid_field("provider_id", "string", "provider_id must be a string");
    }
    req.provider_id = j["provider_id"].get<std::string>();
  }

  req.max_tokens = opts.default_max_tokens;
  if (j.contains("max_tokens") && !j["max_tokens"].is_null()) {
    const auto& m = j["max_tokens"];
    const std::string range = "[1," + std::to_string(opts.max_tokens_limit) + "]";
    if (!m.is_number_integer() || m.get<long long>() < 1 ||
        static_cast<unsigned long long>(m.get<long long>()) > opts.max_tokens_limit) {
      return detail::invalid_field("max_tokens", range, "max_tokens must be an integer in " + range);
    }
    req.max_tokens = static_cast<std::size_t>(m.get<long long>());
  }
  return req;
}

/// HTTP front end for the exploration loop. Stateless apart from the store
/// and the provider registry it is given.
class Service {
 public:
  Service(std::shared_ptr<SessionStore> store, std::shared_ptr<const ProviderRegistry> providers,
          ServiceOptions options = {})
      : store_(std::move(store)), providers_(std::move(providers)), options_(std::move(options)) {}

  struct GenerateOutcome {
    InteractionRecord record;
    nlohmann::json generation;
  };

  /// POST /api/generate without the HTTP wrapping.
  std::variant<GenerateOutcome, ApiError> generate(std::string_view body) const {
    auto parsed = parse_generate_request(body, options_);
    if (auto* err = std::get_if<ApiError>(&parsed)) return *err;
    auto& req = std::get<GenerateRequest>(parsed);

    const GenerationProvider* provider =
        req.provider_id ? providers_->find(*req.provider_id) : providers_->default_provider();
    if (!provider) {
      return detail::invalid_field("provider_id", "registered provider id",
                                   "unknown provider '" + req.provider_id.value_or("") + "'");
    }
    if (!req.has_seed) req.params.seed = draw_seed();

    InteractionRecord record;
    record.prompt = req.prompt;
    record.params = req.params;
    record.provider_id = provider->id();
    nlohmann::json generation = {{"provider_mode", to_string(provider->mode())}};

    try {
      if (const auto* source = provider->distributions()) {
        auto result = generate_sequence(*source, req.prompt, req.params, req.max_tokens);
        record.output = std::move(result.text);
        record.sampled_locally = true;
        generation["prng"] = result.prng;
        generation["token_count"] = result.tokens.size();
        generation["stopped_on_end_of_text"] = result.stopped_on_end_of_text;
      } else {
        record.output = provider->complete(req.prompt, req.params, req.max_tokens).text;
        record.sampled_locally = false;
      }
    } catch (const ProviderError& e) {
      nlohmann::json details = {{"provider_id", e.provider_id()},
                                {"provider_error", to_string(e.code())}};
      if (e.status()) details["upstream_status"] = *e.status();
      if (!e.body().empty()) details["upstream_body"] = e.body();
      return ApiError{502, "provider_error", e.what(), std::move(details)};
    } catch (const SamplingError& e) {
      return ApiError{502, "provider_error", e.what(),
                      {{"provider_id", provider->id()}, {"provider_error", to_string(e.code())}}};
    }

    try {
      record.created_at = now_utc();
      record.id = store_->append(record);
    } catch (const StoreError& e) {
      if (e.is_storage_failure()) {
        return ApiError{507, "storage_error", e.what(), {{"store_error", to_string(e.code())}}};
      }
      return ApiError{500, "internal_error", e.what()};
    }
    return GenerateOutcome{std::move(record), std::move(generation)};
  }

  std::variant<InteractionRecord, ApiError> rate(const std::string& id,
                                                 std::string_view body) const {
    const auto j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      return ApiError{400, "invalid_json", "request body must be a JSON object"};
    }
    if (!store_->get(id)) return ApiError{404, "not_found", "no interaction '" + id + "'"};
    if (!j.contains("score") || !j["score"].is_number_integer()) {
      return ApiError{400, "out_of_range", "score must be an integer in [1,5]",
                      {{"field", "score"}, {"range", "[1,5]"}}};
    }
    const long long score = j["score"].get<long long>();
    try {
      if (!rating_in_range(score)) throw StoreError(StoreErrc::kOutOfRange, "score must be in [1,5]");
      return store_->set_rating(id, static_cast<int>(score));
    } catch (const StoreError& e) {
      switch (e.code()) {
        case StoreErrc::kNotFound: return ApiError{404, "not_found", e.what()};
        case StoreErrc::kAlreadyRated: return ApiError{409, "already_rated", e.what()};
        case StoreErrc::kOutOfRange:
          return ApiError{400, "out_of_range", e.what(), {{"field", "score"}, {"range", "[1,5]"}}};
        default:
          if (e.is_storage_failure()) {
            return ApiError{507, "storage_error", e.what(), {{"store_error", to_string(e.code())}}};
          }
          return ApiError{500, "internal_error", e.what()};
      }
    }
  }

  std::variant<nlohmann::json, ApiError> list(const httplib::Params& query) const {
    auto number = [&](const char* key, std::size_t fallback) -> std::optional<long long> {
      auto it = query.find(key);
      if (it == query.end()) return static_cast<long long>(fallback);
      return detail::parse_integer(it->second);
    };
    const auto limit = number("limit", options_.default_page_size);
    const auto offset = number("offset", 0);
    if (!limit || *limit < 1 || *limit > static_cast<long long>(kMaxPageSize)) {
      return ApiError{400, "bad_pagination", "limit must be an integer in [1,1000]",
                      {{"field", "limit"}, {"range", "[1,1000]"}}};
    }
    if (!offset || *offset < 0) {
      return ApiError{400, "bad_pagination", "offset must be a non-negative integer",
                      {{"field", "offset"}, {"range", "[0,inf)"}}};
    }
    const auto lim = static_cast<std::size_t>(*limit);
    const auto off = static_cast<std::size_t>(*offset);

    nlohmann::json out = {{"limit", lim}, {"offset", off}, {"records", nlohmann::json::array()}};
    if (auto it = query.find("prompt"); it != query.end()) {
      const auto matches = store_->query_by_prompt(it->second);
      for (std::size_t i = off; i < matches.size() && i < off + lim; ++i) {
        out["records"].push_back(to_json(matches[i]));
      }
      out["total"] = matches.size();
      out["order"] = "created_at_asc";
    } else {
      for (const auto& r : store_->list_all(lim, off)) out["records"].push_back(to_json(r));
      out["total"] = store_->size();
      out["order"] = "created_at_desc";
    }
    return out;
  }

  std::variant<nlohmann::json, ApiError> score_graph(const std::string& id) const {
    const auto record = store_->get(id);
    if (!record) return ApiError{404, "not_found", "no interaction '" + id + "'"};
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : store_->score_graph_points(record->prompt)) {
      nlohmann::json point = {{"presence", p.presence},
                              {"frequency", p.frequency},
                              {"record_id", p.record_id},
                              {"current", p.record_id == id}};
      if (p.rating) point["rating"] = *p.rating;
      points.push_back(std::move(point));
    }
    return nlohmann::json{{"record_id", id}, {"prompt", record->prompt}, {"points", points}};
  }

  static nlohmann::json hyperparameters() {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& d : hyperparameter_descriptions()) list.push_back(to_json(d));
    return {{"hyperparameters", list}};
  }

  /// Registers every route on `server`.
  void mount(httplib::Server& server) const {
    server.Post("/api/generate", [this](const httplib::Request& req, httplib::Response& res) {
      auto out = generate(req.body);
      if (auto* err = std::get_if<ApiError>(&out)) return reply(res, *err);
      auto& ok = std::get<GenerateOutcome>(out);
      reply(res, 200, {{"record", to_json(ok.record)}, {"generation", ok.generation}});
    });

    server.Post(R"(/api/interactions/([^/]+)/rating)",
                [this](const httplib::Request& req, httplib::Response& res) {
                  auto out = rate(req.matches[1], req.body);
                  if (auto* err = std::get_if<ApiError>(&out)) return reply(res, *err);
                  reply(res, 200, {{"record", to_json(std::get<InteractionRecord>(out))}});
                });

    server.Get("/api/interactions", [this](const httplib::Request& req, httplib::Response& res) {
      auto out = list(req.params);
      if (auto* err = std::get_if<ApiError>(&out)) return reply(res, *err);
      reply(res, 200, std::get<nlohmann::json>(out));
    });

    server.Get(R"(/api/interactions/([^/]+)/score-graph)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 auto out = score_graph(req.matches[1]);
                 if (auto* err = std::get_if<ApiError>(&out)) return reply(res, *err);
                 reply(res, 200, std::get<nlohmann::json>(out));
               });

    server.Get("/api/hyperparameters", [](const httplib::Request&, httplib::Response& res) {
      reply(res, 200, hyperparameters());
    });

    if (options_.static_dir && std::filesystem::is_directory(*options_.static_dir)) {
      server.set_mount_point("/", options_.static_dir->string());
    }

    server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
      if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
      const std::string code = res.status == 404 ? "not_found" : "http_error";
      reply(res, ApiError{res.status, code, "no route for " + req.method + " " + req.path});
      return httplib::Server::HandlerResponse::Handled;
    });

    server.set_exception_handler(
        [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
          std::string what = "unexpected error";
          try {
            if (ep) std::rethrow_exception(ep);
          } catch (const std::exception& e) {
            what = e.what();
          } catch (...) {
          }
          reply(res, ApiError{500, "internal_error", what});
        });
  }

 private:
  static void reply(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json; charset=utf-8");
  }
  static void reply(httplib::Response& res, const ApiError& err) {
    reply(res, err.status, err.body());
  }

  static std::uint64_t draw_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }

  std::shared_ptr<SessionStore> store_;
  std::shared_ptr<const ProviderRegistry> providers_;
  ServiceOptions options_;
};

}  // namespace samplebench

#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <mutex>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "samplebench/sampling/types.hpp"

namespace samplebench {

using Timestamp = std::chrono::sys_time<std::chrono::microseconds>;

inline Timestamp now_utc() {
  return std::chrono::floor<std::chrono::microseconds>(std::chrono::system_clock::now());
}

/// RFC 3339 in UTC with microsecond precision, e.g. 2026-10-19T08:15:02.000417Z.
/// The fixed width makes lexicographic order agree with time order.
inline std::string format_rfc3339(Timestamp ts) {
  using namespace std::chrono;
  const auto secs = floor<seconds>(ts);
  const auto micros = (ts - secs).count();
  const std::time_t t = system_clock::to_time_t(secs);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::array<char, 96> buf{};
  std::snprintf(buf.data(), buf.size(), "%04d-%02d-%02dT%02d:%02d:%02d.%06lldZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<long long>(micros));
  return buf.data();
}

/// Accepts RFC 3339 timestamps with an optional fraction (up to microseconds
/// are kept) and a `Z` or numeric offset.
inline std::optional<Timestamp> parse_rfc3339(std::string_view text) {
  using namespace std::chrono;
  int year, month, day, hour, minute, second;
  int consumed = 0;
  const std::string s(text);
  if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &year, &month, &day, &hour, &minute,
                  &second, &consumed) != 6 ||
      consumed != 19) {
    return std::nullopt;
  }
  std::size_t pos = 19;
  long long micros = 0;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    int digits = 0;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
      if (digits < 6) micros = micros * 10 + (s[pos] - '0');
      ++digits;
      ++pos;
    }
    if (digits == 0) return std::nullopt;
    for (; digits < 6; ++digits) micros *= 10;
  }
  int offset_minutes = 0;
  if (pos < s.size() && (s[pos] == 'Z' || s[pos] == 'z')) {
    ++pos;
  } else if (pos + 6 == s.size() && (s[pos] == '+' || s[pos] == '-') && s[pos + 3] == ':') {
    const int oh = std::stoi(s.substr(pos + 1, 2));
    const int om = std::stoi(s.substr(pos + 4, 2));
    offset_minutes = (s[pos] == '-' ? -1 : 1) * (oh * 60 + om);
    pos += 6;
  } else {
    return std::nullopt;
  }
  if (pos != s.size()) return std::nullopt;

  const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                           std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok() || hour > 23 || minute > 59 || second > 60) return std::nullopt;
  const auto tp = sys_days{ymd} + hours{hour} + minutes{minute} + seconds{second} +
                  microseconds{micros} - minutes{offset_minutes};
  return time_point_cast<microseconds>(tp);
}

/// Random (version 4) UUID in canonical lowercase form.
inline std::string make_uuid_v4() {
  static std::mutex mu;
  static std::mt19937_64 engine{[] {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }()};
  std::uint64_t hi, lo;
  {
    std::lock_guard lock(mu);
    hi = engine();
    lo = engine();
  }
  hi = (hi & 0xFFFFFFFFFFFF0FFFULL) | 0x0000000000004000ULL;
  lo = (lo & 0x3FFFFFFFFFFFFFFFULL) | 0x8000000000000000ULL;
  std::array<char, 37> buf{};
  std::snprintf(buf.data(), buf.size(), "%08x-%04x-%04x-%04x-%012llx",
                static_cast<unsigned>(hi >> 32), static_cast<unsigned>((hi >> 16) & 0xFFFF),
                static_cast<unsigned>(hi & 0xFFFF), static_cast<unsigned>(lo >> 48),
                static_cast<unsigned long long>(lo & 0xFFFFFFFFFFFFULL));
  return buf.data();
}

inline constexpr int kRatingMin = 1;
inline constexpr int kRatingMax = 5;

inline bool rating_in_range(long long score) { return score >= kRatingMin && score <= kRatingMax; }

/// One generation event. Only `rating` changes after creation, and only once.
struct InteractionRecord {
  std::string id;
  std::string prompt;
  SamplingParams params;
  std::string output;
  std::optional<int> rating;
  std::string provider_id;
  bool sampled_locally = false;
  Timestamp created_at{};

  friend bool operator==(const InteractionRecord&, const InteractionRecord&) = default;
};

inline nlohmann::json params_to_json(const SamplingParams& p) {
  return {{"top_p", p.top_p},
          {"frequency_penalty", p.frequency_penalty},
          {"presence_penalty", p.presence_penalty},
          {"seed", p.seed}};
}

inline nlohmann::json to_json(const InteractionRecord& r) {
  return {{"id", r.id},
          {"prompt", r.prompt},
          {"params", params_to_json(r.params)},
          {"output", r.output},
          {"rating", r.rating ? nlohmann::json(*r.rating) : nlohmann::json(nullptr)},
          {"provider_id", r.provider_id},
          {"sampled_locally", r.sampled_locally},
          {"created_at", format_rfc3339(r.created_at)}};
}

/// Inverse of to_json; throws std::invalid_argument on any shape mismatch.
inline InteractionRecord record_from_json(const nlohmann::json& j) {
  auto fail = [](const std::string& what) -> std::invalid_argument {
    return std::invalid_argument("bad interaction record: " + what);
  };
  if (!j.is_object()) throw fail("not an object");
  auto str = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_string()) throw fail(std::string("missing string '") + key + "'");
    return j[key].get<std::string>();
  };

  InteractionRecord r;
  r.id = str("id");
  r.prompt = str("prompt");
  r.output = str("output");
  r.provider_id = str("provider_id");

  if (!j.contains("sampled_locally") || !j["sampled_locally"].is_boolean()) {
    throw fail("missing boolean 'sampled_locally'");
  }
  r.sampled_locally = j["sampled_locally"].get<bool>();

  const auto ts = parse_rfc3339(str("created_at"));
  if (!ts) throw fail("created_at is not RFC 3339");
  r.created_at = *ts;

  if (!j.contains("params") || !j["params"].is_object()) throw fail("missing object 'params'");
  const auto& p = j["params"];
  for (const char* key : {"top_p", "frequency_penalty", "presence_penalty"}) {
    if (!p.contains(key) || !p[key].is_number()) throw fail(std::string("missing number params.") + key);
  }
  if (!p.contains("seed") || !p["seed"].is_number_unsigned()) {
    // non-negative integers that fit in int64 parse as unsigned as well
    if (!p.contains("seed") || !p["seed"].is_number_integer() || p["seed"].get<long long>() < 0) {
      throw fail("missing unsigned params.seed");
    }
  }
  r.params.top_p = p["top_p"].get<double>();
  r.params.frequency_penalty = p["frequency_penalty"].get<double>();
  r.params.presence_penalty = p["presence_penalty"].get<double>();
  r.params.seed = p["seed"].get<std::uint64_t>();

  if (j.contains("rating") && !j["rating"].is_null()) {
    if (!j["rating"].is_number_integer()) throw fail("rating must be an integer or null");
    r.rating = j["rating"].get<int>();
  }
  return r;
}

}  // namespace samplebench

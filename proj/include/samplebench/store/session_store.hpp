#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "samplebench/store/record.hpp"

namespace samplebench {

enum class StoreErrc {
  kNotFound,
  kAlreadyRated,
  kOutOfRange,
  kInvalidRecord,
  kInvalidArgument,
  kStorageFull,
  kSerializationFailure,
  kIo,
  kCorrupt,
};

inline std::string_view to_string(StoreErrc code) {
  switch (code) {
    case StoreErrc::kNotFound: return "not_found";
    case StoreErrc::kAlreadyRated: return "already_rated";
    case StoreErrc::kOutOfRange: return "out_of_range";
    case StoreErrc::kInvalidRecord: return "invalid_record";
    case StoreErrc::kInvalidArgument: return "invalid_argument";
    case StoreErrc::kStorageFull: return "storage_full";
    case StoreErrc::kSerializationFailure: return "serialization_failure";
    case StoreErrc::kIo: return "io_error";
    case StoreErrc::kCorrupt: return "corrupt_store";
  }
  return "unknown";
}

class StoreError : public std::runtime_error {
 public:
  StoreError(StoreErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  StoreErrc code() const noexcept { return code_; }

  /// Failures of the storage medium itself, as opposed to bad requests.
  bool is_storage_failure() const noexcept {
    return code_ == StoreErrc::kStorageFull || code_ == StoreErrc::kSerializationFailure ||
           code_ == StoreErrc::kIo;
  }

 private:
  StoreErrc code_;
};

/// One marker on the score graph: x = presence penalty, y = frequency penalty.
struct ScoreGraphPoint {
  double presence = 0.0;
  double frequency = 0.0;
  std::optional<int> rating;
  std::string record_id;

  friend bool operator==(const ScoreGraphPoint&, const ScoreGraphPoint&) = default;
};

inline constexpr std::size_t kMaxPageSize = 1000;

/// Persistent log of interactions. Implementations serialize mutations
/// through a single writer and let reads run concurrently.
class SessionStore {
 public:
  virtual ~SessionStore() = default;

  /// Persists `record` and returns its id. An empty id is replaced by a fresh
  /// UUID and an unset created_at by the current time. Records that already
  /// carry a rating are rejected with kInvalidRecord.
  virtual std::string append(InteractionRecord record) = 0;

  /// Write-once rating. kNotFound, kOutOfRange or kAlreadyRated on failure.
  virtual InteractionRecord set_rating(const std::string& id, int score) = 0;

  virtual std::optional<InteractionRecord> get(const std::string& id) const = 0;

  /// Records whose prompt matches after NFC normalization and trailing
  /// whitespace trim, oldest first.
  virtual std::vector<InteractionRecord> query_by_prompt(std::string_view prompt) const = 0;

  /// Newest first. `limit` must be in [1, 1000].
  virtual std::vector<InteractionRecord> list_all(std::size_t limit, std::size_t offset) const = 0;

  virtual std::size_t size() const = 0;

  std::vector<ScoreGraphPoint> score_graph_points(std::string_view prompt) const {
    std::vector<ScoreGraphPoint> points;
    for (const auto& r : query_by_prompt(prompt)) {
      points.push_back({r.params.presence_penalty, r.params.frequency_penalty, r.rating, r.id});
    }
    return points;
  }
};

}  // namespace samplebench

#pragma once

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "samplebench/store/record.hpp"
#include "samplebench/store/session_store.hpp"
#include "samplebench/store/text.hpp"

namespace samplebench {

inline constexpr int kStoreSchemaVersion = 1;

/// Append-only JSON Lines store.
///
/// Each line is either an interaction (`"kind":"interaction"`, the full
/// record) or a rating event (`"kind":"rating"`) referencing an earlier
/// interaction by id. Every line carries `"v":1`. The in-memory index is
/// rebuilt by replaying the file when the store is opened. A trailing line
/// without a newline that fails to parse is treated as a torn write and cut
/// off; any other bad line makes the open fail with kCorrupt.
///
/// Writers are serialized by `write_mu_` and hold it across the write and
/// fsync; the index lock is only taken to publish, so readers always see a
/// prefix of the log.
class JsonlSessionStore final : public SessionStore {
 public:
  explicit JsonlSessionStore(std::filesystem::path path) : path_(std::move(path)) {
    std::error_code ec;
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path(), ec);
    replay();
    fd_ = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) {
      throw StoreError(StoreErrc::kIo,
                       "cannot open '" + path_.string() + "': " + std::strerror(errno));
    }
  }

  JsonlSessionStore(const JsonlSessionStore&) = delete;
  JsonlSessionStore& operator=(const JsonlSessionStore&) = delete;

  ~JsonlSessionStore() override {
    if (fd_ >= 0) ::close(fd_);
  }

  const std::filesystem::path& path() const noexcept { return path_; }

  std::string append(InteractionRecord record) override {
    if (record.rating) {
      throw StoreError(StoreErrc::kInvalidRecord, "a new record must not carry a rating");
    }
    if (auto field = record.params.first_invalid_field(); !field.empty()) {
      throw StoreError(StoreErrc::kInvalidRecord, field + " out of range");
    }

    std::lock_guard writer(write_mu_);
    if (record.id.empty()) {
      do {
        record.id = make_uuid_v4();
      } while (by_id_.count(record.id));
    } else if (by_id_.count(record.id)) {
      throw StoreError(StoreErrc::kInvalidRecord, "duplicate record id '" + record.id + "'");
    }
    if (record.created_at == Timestamp{}) record.created_at = now_utc();

    auto line = to_json(record);
    line["v"] = kStoreSchemaVersion;
    line["kind"] = "interaction";
    write_line(serialize(line));

    std::unique_lock index(index_mu_);
    insert(std::move(record));
    return records_.back().id;
  }

  InteractionRecord set_rating(const std::string& id, int score) override {
    std::lock_guard writer(write_mu_);
    auto it = by_id_.find(id);
    if (it == by_id_.end()) throw StoreError(StoreErrc::kNotFound, "no record '" + id + "'");
    if (!rating_in_range(score)) {
      throw StoreError(StoreErrc::kOutOfRange, "rating must be an integer in [1,5]");
    }
    if (records_[it->second].rating) {
      throw StoreError(StoreErrc::kAlreadyRated, "record '" + id + "' is already rated");
    }

    const nlohmann::json line = {{"v", kStoreSchemaVersion},
                                 {"kind", "rating"},
                                 {"id", id},
                                 {"rating", score},
                                 {"rated_at", format_rfc3339(now_utc())}};
    write_line(serialize(line));

    std::unique_lock index(index_mu_);
    records_[it->second].rating = score;
    return records_[it->second];
  }

  std::optional<InteractionRecord> get(const std::string& id) const override {
    std::shared_lock index(index_mu_);
    auto it = by_id_.find(id);
    if (it == by_id_.end()) return std::nullopt;
    return records_[it->second];
  }

  std::vector<InteractionRecord> query_by_prompt(std::string_view prompt) const override {
    const auto key = normalize_prompt(prompt);
    std::shared_lock index(index_mu_);
    std::vector<std::size_t> slots;
    if (auto it = by_prompt_.find(key); it != by_prompt_.end()) slots = it->second;
    std::stable_sort(slots.begin(), slots.end(), [&](std::size_t a, std::size_t b) {
      return records_[a].created_at < records_[b].created_at;
    });
    std::vector<InteractionRecord> out;
    out.reserve(slots.size());
    for (auto s : slots) out.push_back(records_[s]);
    return out;
  }

  std::vector<InteractionRecord> list_all(std::size_t limit, std::size_t offset) const override {
    if (limit == 0 || limit > kMaxPageSize) {
      throw StoreError(StoreErrc::kInvalidArgument, "limit must be in [1,1000]");
    }
    std::shared_lock index(index_mu_);
    std::vector<std::size_t> slots(records_.size());
    for (std::size_t i = 0; i < slots.size(); ++i) slots[i] = slots.size() - 1 - i;
    // Newest first; equal timestamps keep reverse log order.
    std::stable_sort(slots.begin(), slots.end(), [&](std::size_t a, std::size_t b) {
      return records_[a].created_at > records_[b].created_at;
    });
    std::vector<InteractionRecord> out;
    for (std::size_t i = offset; i < slots.size() && out.size() < limit; ++i) {
      out.push_back(records_[slots[i]]);
    }
    return out;
  }

  std::size_t size() const override {
    std::shared_lock index(index_mu_);
    return records_.size();
  }

 private:
  static std::string serialize(const nlohmann::json& line) {
    try {
      return line.dump() + '\n';
    } catch (const nlohmann::json::exception& e) {
      throw StoreError(StoreErrc::kSerializationFailure, e.what());
    }
  }

  void write_line(const std::string& data) {
    const off_t before = ::lseek(fd_, 0, SEEK_END);
    std::size_t written = 0;
    while (written < data.size()) {
      const ssize_t n = ::write(fd_, data.data() + written, data.size() - written);
      if (n < 0) {
        if (errno == EINTR) continue;
        fail_write(errno, before);
      }
      written += static_cast<std::size_t>(n);
    }
    if (::fsync(fd_) != 0 && errno != EINVAL && errno != EROFS) fail_write(errno, before);
  }

  [[noreturn]] void fail_write(int err, off_t rollback_to) {
    // Cut any partial line so the log stays replayable.
    if (rollback_to >= 0) {
      [[maybe_unused]] const int rc = ::ftruncate(fd_, rollback_to);
    }
    const std::string msg = "write to '" + path_.string() + "' failed: " + std::strerror(err);
    if (err == ENOSPC || err == EDQUOT || err == EFBIG) throw StoreError(StoreErrc::kStorageFull, msg);
    throw StoreError(StoreErrc::kIo, msg);
  }

  void insert(InteractionRecord record) {
    const std::size_t slot = records_.size();
    by_id_.emplace(record.id, slot);
    by_prompt_[normalize_prompt(record.prompt)].push_back(slot);
    records_.push_back(std::move(record));
  }

  // Only regular files carry history; devices and fifos start empty.
  void replay() {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path_, ec)) return;

    std::ifstream in(path_, std::ios::binary);
    if (!in) throw StoreError(StoreErrc::kIo, "cannot read '" + path_.string() + "'");
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < content.size()) {
      const std::size_t nl = content.find('\n', pos);
      const bool terminated = nl != std::string::npos;
      const std::string_view line(content.data() + pos, (terminated ? nl : content.size()) - pos);
      ++line_no;
      if (!line.empty()) {
        try {
          apply_line(line);
        } catch (const std::exception& e) {
          if (!terminated) {
            std::filesystem::resize_file(path_, pos);
            return;
          }
          throw StoreError(StoreErrc::kCorrupt, path_.string() + ":" + std::to_string(line_no) +
                                                    ": " + e.what());
        }
      }
      if (!terminated) {
        // Complete but unterminated final line: terminate it so the next
        // append starts on a fresh line.
        std::ofstream(path_, std::ios::binary | std::ios::app) << '\n';
        return;
      }
      pos = nl + 1;
    }
  }

  void apply_line(std::string_view text) {
    const auto line = nlohmann::json::parse(text);
    if (!line.is_object() || !line.contains("v") || line["v"] != kStoreSchemaVersion) {
      throw std::invalid_argument("unsupported schema version");
    }
    const auto kind = line.value("kind", std::string{});
    if (kind == "interaction") {
      auto record = record_from_json(line);
      if (by_id_.count(record.id)) throw std::invalid_argument("duplicate id " + record.id);
      if (record.rating) throw std::invalid_argument("interaction line carries a rating");
      insert(std::move(record));
    } else if (kind == "rating") {
      const auto id = line.at("id").get<std::string>();
      const auto score = line.at("rating").get<int>();
      auto it = by_id_.find(id);
      if (it == by_id_.end()) throw std::invalid_argument("rating for unknown id " + id);
      if (records_[it->second].rating) throw std::invalid_argument("second rating for " + id);
      if (!rating_in_range(score)) throw std::invalid_argument("rating out of range");
      records_[it->second].rating = score;
    } else {
      throw std::invalid_argument("unknown line kind '" + kind + "'");
    }
  }

  std::filesystem::path path_;
  int fd_ = -1;

  std::mutex write_mu_;
  mutable std::shared_mutex index_mu_;
  std::vector<InteractionRecord> records_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_prompt_;
};

}  // namespace samplebench

#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>

namespace selectkit {

// Write-once response cache. Entries live in memory and, when a directory
// is configured, as one JSON file per key:
//
//   <dir>/<key>.json  {"checksum": sha256(value), "created_at": ..., "key": ..., "value": ...}
//
// Reads take a shared lock; writes are serialized.
class ResponseCache {
 public:
  explicit ResponseCache(std::optional<std::filesystem::path> dir = std::nullopt);

  // sha256 of backend id and request payload.
  static std::string make_key(std::string_view backend_id, std::string_view payload);

  // Side-effect free apart from hit/miss counters. Throws CorruptCacheEntry
  // when the stored checksum does not match.
  std::optional<std::string> get(const std::string& key) const;

  // No-op for an identical value; throws CacheConflict for a different one.
  void put(const std::string& key, const std::string& value);

  std::size_t hits() const noexcept { return hits_.load(); }
  std::size_t misses() const noexcept { return misses_.load(); }
  const std::optional<std::filesystem::path>& directory() const noexcept { return dir_; }

 private:
  std::optional<std::string> read_disk(const std::string& key) const;
  std::filesystem::path entry_path(const std::string& key) const;

  std::optional<std::filesystem::path> dir_;
  mutable std::shared_mutex mu_;
  mutable std::map<std::string, std::string> memory_;
  mutable std::atomic<std::size_t> hits_{0};
  mutable std::atomic<std::size_t> misses_{0};
};

}  // namespace selectkit

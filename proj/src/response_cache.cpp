#include "selectkit/response_cache.hpp"

#include <chrono>
#include <mutex>

#include <json.hpp>

#include "selectkit/errors.hpp"
#include "selectkit/hashing.hpp"
#include "selectkit/io.hpp"

namespace selectkit {

namespace {

void check_key(const std::string& key) {
  const bool ok = key.size() == 64 && key.find_first_not_of("0123456789abcdef") == std::string::npos;
  if (!ok) throw PreconditionError("malformed cache key: " + key);
}

}  // namespace

ResponseCache::ResponseCache(std::optional<std::filesystem::path> dir) : dir_(std::move(dir)) {
  if (dir_) std::filesystem::create_directories(*dir_);
}

std::string ResponseCache::make_key(std::string_view backend_id, std::string_view payload) {
  std::string buf(backend_id);
  buf.push_back('\n');
  buf.append(payload);
  return sha256_hex(buf);
}

std::filesystem::path ResponseCache::entry_path(const std::string& key) const {
  return *dir_ / (key + ".json");
}

std::optional<std::string> ResponseCache::read_disk(const std::string& key) const {
  if (!dir_) return std::nullopt;
  const auto path = entry_path(key);
  if (!std::filesystem::exists(path)) return std::nullopt;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception&) {
    throw CorruptCacheEntry("unreadable cache entry", path.string());
  }
  if (!doc.is_object() || !doc.contains("value") || !doc.contains("checksum") ||
      !doc["value"].is_string() || doc.value("key", "") != key) {
    throw CorruptCacheEntry("malformed cache entry", path.string());
  }
  auto value = doc["value"].get<std::string>();
  if (sha256_hex(value) != doc["checksum"].get<std::string>()) {
    throw CorruptCacheEntry("cache checksum mismatch", path.string());
  }
  return value;
}

std::optional<std::string> ResponseCache::get(const std::string& key) const {
  check_key(key);
  {
    std::shared_lock lock(mu_);
    if (const auto it = memory_.find(key); it != memory_.end()) {
      ++hits_;
      return it->second;
    }
  }
  auto v = read_disk(key);
  if (!v) {
    ++misses_;
    return std::nullopt;
  }
  std::unique_lock lock(mu_);
  memory_.emplace(key, *v);
  ++hits_;
  return v;
}

void ResponseCache::put(const std::string& key, const std::string& value) {
  check_key(key);
  std::unique_lock lock(mu_);
  auto existing = memory_.find(key);
  std::optional<std::string> prior;
  if (existing != memory_.end()) {
    prior = existing->second;
  } else {
    prior = read_disk(key);
  }
  if (prior) {
    if (*prior != value) throw CacheConflict("cache key already holds a different value: " + key);
    memory_.emplace(key, value);
    return;
  }
  memory_.emplace(key, value);
  if (dir_) {
    const auto now = std::chrono::duration_cast<std::chrono::seconds>(
                         std::chrono::system_clock::now().time_since_epoch())
                         .count();
    nlohmann::json doc{{"key", key}, {"value", value}, {"checksum", sha256_hex(value)},
                       {"created_at", now}};
    write_file_atomic(entry_path(key), doc.dump(2));
  }
}

}  // namespace selectkit

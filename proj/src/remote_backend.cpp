#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "selectkit/remote_backend.hpp"

#include <cstdlib>
#include <thread>

#include <json.hpp>

#include "selectkit/errors.hpp"

namespace selectkit {

namespace {

std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw PreconditionError("URL needs a scheme: " + url);
  const auto path = url.find('/', scheme + 3);
  if (path == std::string::npos) return {url, "/"};
  return {url.substr(0, path), url.substr(path)};
}

std::string excerpt(const std::string& s) { return s.size() > 200 ? s.substr(0, 200) + "..." : s; }

}  // namespace

RemoteBackendConfig RemoteBackendConfig::from_env() {
  RemoteBackendConfig c;
  if (const char* url = std::getenv("SELECT_BACKEND_URL")) c.base_url = url;
  if (const char* key = std::getenv("SELECT_API_KEY")) c.api_key = key;
  if (c.base_url.empty()) throw PreconditionError("SELECT_BACKEND_URL is not set");
  return c;
}

void RemoteBackendConfig::validate() const {
  if (base_url.empty()) throw PreconditionError("remote backend base_url is empty");
  if (timeout_ms <= 0) throw PreconditionError("remote backend timeout must be > 0");
  if (max_retries < 0) throw PreconditionError("remote backend max_retries must be >= 0");
  if (backoff_ms < 0) throw PreconditionError("remote backend backoff must be >= 0");
}

HttpResponse HttpTransport::post(const std::string& url, const std::string& body,
                                 const Headers& headers, int timeout_ms) {
  const auto [origin, path] = split_url(url);
  httplib::Client client(origin);
  const auto secs = timeout_ms / 1000;
  const auto usecs = (timeout_ms % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);
  auto res = client.Post(path, h, body, "application/json");
  if (!res) throw TransportError("HTTP request failed: " + httplib::to_string(res.error()));
  return {res->status, res->body};
}

RemoteBackend::RemoteBackend(RemoteBackendConfig config, std::shared_ptr<Transport> transport,
                             std::shared_ptr<ResponseCache> cache)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      cache_(cache ? std::move(cache) : std::make_shared<ResponseCache>()),
      cache_namespace_("http:" + config_.model_id) {
  config_.validate();
  if (!transport_) throw PreconditionError("remote backend needs a transport");
}

std::string RemoteBackend::identity() const {
  return "http:" + config_.model_id + "@" + config_.base_url;
}

std::string RemoteBackend::make_payload(std::string_view mode, std::string_view model,
                                        std::string_view text,
                                        std::optional<std::string_view> word) {
  nlohmann::json j{{"mode", mode}, {"model", model}, {"text", text}};
  if (word) j["word"] = *word;
  return j.dump();
}

std::string RemoteBackend::fetch(const std::string& payload) const {
  std::string url = config_.base_url;
  while (!url.empty() && url.back() == '/') url.pop_back();
  url += "/v1/score";
  const Transport::Headers headers{{"Authorization", "Bearer " + config_.api_key}};
  std::string last_error;
  const int attempts = config_.max_retries + 1;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0 && config_.backoff_ms > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(config_.backoff_ms << (attempt - 1)));
    }
    ++network_calls_;
    try {
      const auto res = transport_->post(url, payload, headers, config_.timeout_ms);
      if (res.status >= 200 && res.status < 300) {
        last_retries_ = attempt;
        return res.body;
      }
      last_error = "HTTP " + std::to_string(res.status) + ": " + excerpt(res.body);
    } catch (const TransportError& e) {
      last_error = e.what();
    }
  }
  last_retries_ = config_.max_retries;
  throw BackendError(last_error, attempts);
}

std::string RemoteBackend::request(const std::string& payload) const {
  const auto key = ResponseCache::make_key(cache_namespace_, payload);
  if (auto hit = cache_->get(key)) return *hit;

  std::shared_future<std::string> fut;
  std::promise<std::string> promise;
  bool owner = false;
  {
    std::lock_guard lock(inflight_mu_);
    if (const auto it = inflight_.find(key); it != inflight_.end()) {
      fut = it->second;
    } else {
      fut = promise.get_future().share();
      inflight_.emplace(key, fut);
      owner = true;
    }
  }
  if (owner) {
    try {
      auto body = fetch(payload);
      const auto doc = nlohmann::json::parse(body, nullptr, false);
      if (doc.is_discarded() || !doc.is_object() || !doc.contains("ok")) {
        throw BackendError("malformed response: " + excerpt(body), 1);
      }
      if (!doc["ok"].get<bool>()) {
        throw BackendError("backend error: " + doc.value("error", std::string("unknown")), 1);
      }
      cache_->put(key, body);
      promise.set_value(std::move(body));
    } catch (...) {
      promise.set_exception(std::current_exception());
    }
    std::lock_guard lock(inflight_mu_);
    inflight_.erase(key);
  }
  return fut.get();
}

double RemoteBackend::mask_fill(std::string_view masked_text, std::string_view word) const {
  const auto body = request(make_payload("fill", config_.model_id, masked_text, word));
  const auto doc = nlohmann::json::parse(body);
  if (!doc.contains("value") || !doc["value"].is_number()) {
    throw BackendError("fill response has no numeric value", 1);
  }
  return doc["value"].get<double>();
}

double RemoteBackend::sequence_perplexity(std::string_view text) const {
  const auto body = request(make_payload("ppl", config_.model_id, text));
  const auto doc = nlohmann::json::parse(body);
  if (!doc.contains("value") || !doc["value"].is_number()) {
    throw BackendError("ppl response has no numeric value", 1);
  }
  return doc["value"].get<double>();
}

std::string RemoteBackend::complete(std::string_view prompt) const {
  const auto body = request(make_payload("complete", config_.model_id, prompt));
  const auto doc = nlohmann::json::parse(body);
  if (!doc.contains("text") || !doc["text"].is_string()) {
    throw BackendError("complete response has no text", 1);
  }
  return doc["text"].get<std::string>();
}

}  // namespace selectkit

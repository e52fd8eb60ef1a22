#pragma once

#include <atomic>
#include <chrono>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "selectkit/lm_backend.hpp"
#include "selectkit/response_cache.hpp"

namespace selectkit {

struct RemoteBackendConfig {
  std::string base_url;
  std::string api_key;
  int timeout_ms = 30000;
  int max_retries = 3;
  std::string model_id = "default";
  // First retry waits this long; each further retry doubles it.
  int backoff_ms = 200;

  // SELECT_BACKEND_URL / SELECT_API_KEY; throws if the URL is unset.
  static RemoteBackendConfig from_env();
  void validate() const;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Thrown by transports for connection-level failures (retryable).
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Transport {
 public:
  using Headers = std::vector<std::pair<std::string, std::string>>;
  virtual ~Transport() = default;
  virtual HttpResponse post(const std::string& url, const std::string& body,
                            const Headers& headers, int timeout_ms) = 0;
};

// cpp-httplib transport; http:// and https:// URLs.
class HttpTransport final : public Transport {
 public:
  HttpResponse post(const std::string& url, const std::string& body, const Headers& headers,
                    int timeout_ms) override;
};

// Wire protocol:
//   POST {base_url}/v1/score
//   Authorization: Bearer {api_key}
//   {"mode":"fill"|"ppl"|"complete","model":...,"text":...[,"word":...]}
// Response: {"ok":true,"value":n} | {"ok":true,"text":s} | {"ok":false,"error":s}
//
// Successful responses are cached by (model id, payload); concurrent
// identical requests share one network call.
class RemoteBackend final : public ScoringBackend {
 public:
  RemoteBackend(RemoteBackendConfig config, std::shared_ptr<Transport> transport,
                std::shared_ptr<ResponseCache> cache);

  std::string identity() const override;
  double mask_fill(std::string_view masked_text, std::string_view word) const override;
  double sequence_perplexity(std::string_view text) const override;
  std::string complete(std::string_view prompt) const override;

  static std::string make_payload(std::string_view mode, std::string_view model,
                                  std::string_view text,
                                  std::optional<std::string_view> word = std::nullopt);

  std::size_t network_calls() const noexcept { return network_calls_.load(); }
  // Retries used by the most recent request that reached the network.
  int last_retry_count() const noexcept { return last_retries_.load(); }
  const ResponseCache& cache() const noexcept { return *cache_; }

 private:
  std::string request(const std::string& payload) const;
  std::string fetch(const std::string& payload) const;

  RemoteBackendConfig config_;
  std::shared_ptr<Transport> transport_;
  std::shared_ptr<ResponseCache> cache_;
  std::string cache_namespace_;
  mutable std::mutex inflight_mu_;
  mutable std::map<std::string, std::shared_future<std::string>> inflight_;
  mutable std::atomic<std::size_t> network_calls_{0};
  mutable std::atomic<int> last_retries_{0};
};

}  // namespace selectkit

#pragma once

#include <atomic>
#include <deque>
#include <filesystem>
#include <mutex>
#include <string>

#include <unistd.h>

#include <json.hpp>

#include "selectkit/errors.hpp"
#include "selectkit/hashing.hpp"
#include "selectkit/lm_backend.hpp"
#include "selectkit/remote_backend.hpp"

namespace selectkit::testkit {

inline std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(SELECTKIT_TEST_DATA) / name;
}

// Every vocabulary item equally likely: fill 1/|V|, perplexity |V|.
class UniformMock final : public ScoringBackend {
 public:
  explicit UniformMock(int vocab = 10) : vocab_(vocab) {}
  std::string identity() const override { return "uniform:" + std::to_string(vocab_); }
  double mask_fill(std::string_view, std::string_view) const override { return 1.0 / vocab_; }
  double sequence_perplexity(std::string_view) const override { return vocab_; }
  std::string complete(std::string_view) const override {
    throw BackendError("uniform mock cannot complete", 1);
  }

 private:
  int vocab_;
};

// Replays scripted responses, then answers every request with `steady`.
class CountingTransport final : public Transport {
 public:
  HttpResponse steady{200, R"({"ok":true,"value":0.25})"};

  void script(HttpResponse r) {
    std::lock_guard lock(mu_);
    queue_.push_back(std::move(r));
  }

  HttpResponse post(const std::string&, const std::string& body, const Headers&, int) override {
    ++calls;
    std::lock_guard lock(mu_);
    last_body = body;
    if (queue_.empty()) return steady;
    auto r = queue_.front();
    queue_.pop_front();
    return r;
  }

  std::atomic<int> calls{0};
  std::string last_body;

 private:
  std::mutex mu_;
  std::deque<HttpResponse> queue_;
};

// Counting transport that answers the scoring protocol itself: canned
// lists for completions, hash-derived values for fill and perplexity.
class ScriptedScorer final : public Transport {
 public:
  HttpResponse post(const std::string&, const std::string& body, const Headers&, int) override {
    ++calls;
    const auto req = nlohmann::json::parse(body);
    const std::string mode = req.at("mode");
    const std::string text = req.at("text");
    nlohmann::json res{{"ok", true}};
    if (mode == "complete") {
      if (text.find("Task: sibling-candidates") != std::string::npos) {
        res["text"] = "dog, wolf, raccoon, hamster";
      } else if (text.find("Task: related-words") != std::string::npos) {
        res["text"] = "fur, claws, whiskers, tail";
      } else {
        res["text"] = "A cat is known for [MASK].\nThe cat usually [MASK].";
      }
    } else {
      const auto h = fnv1a64(text + "|" + req.value("word", std::string()));
      res["value"] = mode == "fill" ? 0.001 + static_cast<double>(h % 1000) / 20000.0
                                    : 5.0 + static_cast<double>(h % 500) / 50.0;
    }
    return {200, res.dump()};
  }

  std::atomic<int> calls{0};
};

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("selectkit-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace selectkit::testkit

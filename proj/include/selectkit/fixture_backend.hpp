#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "selectkit/lm_backend.hpp"

namespace selectkit {

// Canned-response backend for offline tests and reproducible demos.
//
// Rules are checked in order and the first match wins. A rule matches when
// every `contains` needle occurs in the request text (case-insensitive)
// and, for fill rules, the word matches after normalization.
//
//   {
//     "completions": [{"contains": ["task: related-words", "blood"], "text": "..."}],
//     "fill":        [{"contains": "sap", "word": "taste", "p": 0.011}],
//     "ppl":         [{"contains": "the cat", "value": 12.5}],
//     "default_fill": 0.0001, "default_ppl": 10.0, "default_completion": "..."
//   }
class FixtureBackend final : public ScoringBackend {
 public:
  struct FillRule {
    std::vector<std::string> contains;
    std::string word;
    double probability = 0.0;
  };
  struct ValueRule {
    std::vector<std::string> contains;
    double value = 0.0;
  };
  struct CompletionRule {
    std::vector<std::string> contains;
    std::string text;
  };

  FixtureBackend() = default;

  static FixtureBackend from_json(const nlohmann::json& doc);
  static FixtureBackend load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  FixtureBackend& add_fill(std::vector<std::string> contains, std::string word, double p);
  FixtureBackend& add_ppl(std::vector<std::string> contains, double value);
  FixtureBackend& add_completion(std::vector<std::string> contains, std::string text);
  FixtureBackend& set_default_fill(double p);
  FixtureBackend& set_default_ppl(double v);
  FixtureBackend& set_default_completion(std::string text);

  std::string identity() const override;
  double mask_fill(std::string_view masked_text, std::string_view word) const override;
  double sequence_perplexity(std::string_view text) const override;
  // Throws when no rule matches and there is no default completion.
  std::string complete(std::string_view prompt) const override;

 private:
  std::vector<FillRule> fills_;
  std::vector<ValueRule> ppls_;
  std::vector<CompletionRule> completions_;
  double default_fill_ = 1e-4;
  double default_ppl_ = 10.0;
  std::optional<std::string> default_completion_;
};

}  // namespace selectkit

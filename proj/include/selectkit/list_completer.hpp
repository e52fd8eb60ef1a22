#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "selectkit/lm_backend.hpp"
#include "selectkit/ngram.hpp"

namespace selectkit {

// Answers the candidate and related-word prompts from fixed lists, or from
// an n-gram model when a list is missing:
//   sibling-candidates  distributional neighbours of the target's last token
//   related-words       top single-token fills of the seed sentence
// Model-derived answers hold at most `max_items` entries.
// The task is read from the prompt's "Task:" line. Anything else goes to
// `fallback` when one is given.
class ListCompleter final : public ScoringBackend {
 public:
  ListCompleter(std::optional<std::vector<std::string>> candidates,
                std::optional<std::vector<std::string>> related_words,
                std::shared_ptr<const NGramModel> model = nullptr, std::size_t max_items = 8,
                std::shared_ptr<const ScoringBackend> fallback = nullptr);

  std::string identity() const override;
  double mask_fill(std::string_view masked_text, std::string_view word) const override;
  double sequence_perplexity(std::string_view text) const override;
  std::string complete(std::string_view prompt) const override;

 private:
  std::optional<std::vector<std::string>> candidates_;
  std::optional<std::vector<std::string>> related_;
  std::shared_ptr<const NGramModel> model_;
  std::size_t max_items_;
  std::shared_ptr<const ScoringBackend> fallback_;
  std::string identity_;
};

// Reads one item per non-empty line; '#' starts a comment line.
std::vector<std::string> read_list_file(const std::string& path);

}  // namespace selectkit

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "selectkit/lm_backend.hpp"

namespace selectkit {

// Add-one smoothed bigram model over the shared tokenizer. Read-only after
// training, so one instance can serve any number of threads.
//
//   p(w | h) = (c(h, w) + 1) / (c(h, .) + |V|)
//   p(w)     = (c(w) + 1) / (N + |V|)
//
// c(h, .) counts bigrams whose history is h, so every conditional row sums
// to one over the vocabulary. Out-of-vocabulary tokens get count zero,
// which is the smoothing floor.
class NGramModel {
 public:
  using Index = std::uint32_t;

  const std::vector<std::string>& vocabulary() const noexcept { return vocab_; }
  std::size_t vocab_size() const noexcept { return vocab_.size(); }
  std::uint64_t token_count() const noexcept { return total_tokens_; }

  std::optional<Index> index_of(std::string_view token) const;
  std::uint64_t unigram_count(std::string_view token) const;
  std::uint64_t bigram_count(std::string_view history, std::string_view next) const;
  std::uint64_t history_count(std::string_view history) const;

  double unigram_probability(std::string_view token) const;
  double conditional_probability(std::string_view token, std::string_view history) const;

  // P(token | left, right) ∝ p(token | left) * p(right | token), normalized
  // over the vocabulary plus `token` itself when it is out of vocabulary.
  // An absent side drops its factor (the left side falls back to p(token)).
  double masked_token_probability(std::string_view token, const std::string* left,
                                  const std::string* right) const;

  // Geometric mean of masked_token_probability over the word's tokens, each
  // conditioned on its neighbours inside the filled sentence.
  double fill_probability(std::string_view masked_text, std::string_view word) const;

  // exp(-(1/N) Σ log p(t_i | t_{i-1})), first token scored by p(t_1).
  double perplexity(std::string_view text) const;

  // Vocabulary words ranked by single-token fill probability for the mask,
  // highest first, ties by token order.
  std::vector<std::pair<std::string, double>> rank_fills(std::string_view masked_text) const;

  // Vocabulary words whose left/right neighbour-count vectors have the
  // highest cosine similarity to `word`'s; excludes `word`, zero-similarity
  // words are dropped.
  std::vector<std::pair<std::string, double>> distributional_neighbours(std::string_view word,
                                                                        std::size_t k) const;

  // Canonical JSON bytes; identical corpora give identical bytes.
  std::string serialize() const;
  static NGramModel deserialize(std::string_view json_text);

  friend NGramModel train_ngram(std::string_view corpus);

 private:
  double score_candidate(Index v, const std::string* left, const std::string* right) const;

  std::vector<std::string> vocab_;
  std::map<std::string, Index, std::less<>> index_;
  std::vector<std::uint64_t> unigrams_;
  std::vector<std::uint64_t> histories_;
  std::map<std::pair<Index, Index>, std::uint64_t> bigrams_;
  std::uint64_t total_tokens_ = 0;
};

// Throws PreconditionError when the corpus has fewer than two tokens.
NGramModel train_ngram(std::string_view corpus);

class NGramBackend final : public ScoringBackend {
 public:
  explicit NGramBackend(std::shared_ptr<const NGramModel> model);

  std::string identity() const override;
  double mask_fill(std::string_view masked_text, std::string_view word) const override;
  double sequence_perplexity(std::string_view text) const override;
  // Not supported; throws.
  std::string complete(std::string_view prompt) const override;

  const NGramModel& model() const noexcept { return *model_; }

 private:
  std::shared_ptr<const NGramModel> model_;
  std::string identity_;
};

}  // namespace selectkit

#pragma once

#include <string>
#include <string_view>

#include "selectkit/concept.hpp"

namespace selectkit {

inline constexpr std::string_view kConceptSlot = "{C}";
inline constexpr std::string_view kMaskToken = "[MASK]";

// Template text with exactly one `{C}` and exactly one `[MASK]`.
class MaskTemplate {
 public:
  explicit MaskTemplate(std::string text);

  const std::string& text() const noexcept { return text_; }

  // Substitutes the concept name; the mask stays in place.
  std::string instantiate(const Concept& subject) const;
  std::string instantiate(std::string_view concept_name) const;

  friend bool operator==(const MaskTemplate&, const MaskTemplate&) = default;

 private:
  std::string text_;
};

bool is_valid_mask_template(std::string_view text);

// Language-model scoring surface. Implementations must be callable from
// several threads at once.
class ScoringBackend {
 public:
  virtual ~ScoringBackend() = default;

  // Stable identity string used in run ids and cache keys.
  virtual std::string identity() const = 0;

  // Probability in [0, 1] that `word` fills the single `[MASK]` in
  // `masked_text`. Multi-token words score as the geometric mean of
  // per-token probabilities.
  virtual double mask_fill(std::string_view masked_text, std::string_view word) const = 0;

  virtual double sequence_perplexity(std::string_view text) const = 0;

  virtual std::string complete(std::string_view prompt) const = 0;
};

// Checked entry points. These enforce preconditions before delegating.
double fill_probability(const ScoringBackend& backend, const MaskTemplate& tmpl,
                        const Concept& subject, std::string_view word);
double fill_masked(const ScoringBackend& backend, std::string_view masked_text,
                   std::string_view word);
double perplexity(const ScoringBackend& backend, std::string_view text);
std::string complete(const ScoringBackend& backend, std::string_view prompt);

}  // namespace selectkit

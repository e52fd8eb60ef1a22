#include "selectkit/lm_backend.hpp"

#include <cmath>

#include "selectkit/errors.hpp"
#include "selectkit/text.hpp"

namespace selectkit {

bool is_valid_mask_template(std::string_view text) {
  return count_occurrences(text, kConceptSlot) == 1 && count_occurrences(text, kMaskToken) == 1;
}

MaskTemplate::MaskTemplate(std::string text) : text_(std::move(text)) {
  if (!is_valid_mask_template(text_)) {
    throw PreconditionError("template needs exactly one {C} and one [MASK]: " + text_);
  }
}

std::string MaskTemplate::instantiate(const Concept& subject) const {
  return instantiate(subject.name());
}

std::string MaskTemplate::instantiate(std::string_view concept_name) const {
  return replace_all(text_, kConceptSlot, concept_name);
}

double fill_masked(const ScoringBackend& backend, std::string_view masked_text,
                   std::string_view word) {
  if (tokenize(word).empty()) throw PreconditionError("fill word is empty");
  if (count_occurrences(masked_text, kMaskToken) != 1) {
    throw PreconditionError("masked text needs exactly one [MASK]");
  }
  const double p = backend.mask_fill(masked_text, word);
  if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
    throw BackendError("fill probability out of [0,1]: " + std::to_string(p), 1);
  }
  return p;
}

double fill_probability(const ScoringBackend& backend, const MaskTemplate& tmpl,
                        const Concept& subject, std::string_view word) {
  return fill_masked(backend, tmpl.instantiate(subject), word);
}

double perplexity(const ScoringBackend& backend, std::string_view text) {
  if (tokenize(text).empty()) throw PreconditionError("empty text");
  const double v = backend.sequence_perplexity(text);
  if (!std::isfinite(v) || v <= 0.0) {
    throw BackendError("perplexity must be positive and finite", 1);
  }
  return v;
}

std::string complete(const ScoringBackend& backend, std::string_view prompt) {
  if (trim(prompt).empty()) throw PreconditionError("prompt is empty");
  return backend.complete(prompt);
}

}  // namespace selectkit

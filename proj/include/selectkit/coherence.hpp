#pragma once

#include <string>
#include <vector>

#include "selectkit/concept.hpp"
#include "selectkit/lm_backend.hpp"

namespace selectkit {

struct PromptRatio {
  std::string original;
  std::string substituted;
  double ppl_original = 0.0;
  double ppl_substituted = 0.0;
  double ratio = 0.0;  // ppl_original / ppl_substituted
};

struct CoherenceReport {
  Concept anchor;
  std::vector<PromptRatio> per_prompt;
  double cos = 0.0;  // mean ratio; higher means a smoother substitution
};

// Replaces every word-bounded, case-insensitive occurrence of the target
// name with the anchor name. Other bytes are kept as they are.
std::string substitute(std::string_view prompt, const Concept& target, const Concept& anchor);

// Builds coherence prompts by instantiating {C} templates with the target.
std::vector<std::string> coherence_prompts(const std::vector<std::string>& templates,
                                           const Concept& target);

CoherenceReport cos_score(const Concept& target, const Concept& anchor,
                          const std::vector<std::string>& prompts, const ScoringBackend& backend);

}  // namespace selectkit

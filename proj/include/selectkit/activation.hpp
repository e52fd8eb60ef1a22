#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "selectkit/candidate_gen.hpp"
#include "selectkit/concept.hpp"
#include "selectkit/lm_backend.hpp"

namespace selectkit {

// Floor for every ratio denominator.
inline constexpr double kRatioEpsilon = 1e-12;

// Tables print activations multiplied by this factor; stored values are raw.
inline constexpr double kActivationDisplayScale = 1e4;

struct ClampedRatio {
  double value = 0.0;
  bool degenerate = false;  // denominator hit the epsilon floor
};

ClampedRatio clamped_ratio(double numerator, double denominator);

struct WordActivation {
  RelatedWord word;
  std::string best_template;
  double probability = 0.0;
};

struct ContextRaise {
  double related = 0.0;  // RC: mean concept activation over related prompts
  double neutral = 0.0;  // NC: concept activation in the neutral prompt
  double ratio = 0.0;    // CRR = RC / max(NC, eps)
  bool degenerate = false;
};

struct ActivationReport {
  Concept subject;
  std::vector<WordActivation> per_word;
  double ws = 0.0;
  // Filled for the target only; candidates skip the extra backend calls.
  std::optional<ContextRaise> context;
};

struct UcScore {
  Concept anchor;
  Concept target;
  double value = 0.0;
  std::vector<std::pair<std::string, double>> per_word_ratios;
};

// W(C, w): probability that `word` fills the mask of `tmpl` instantiated
// with `concept`.
double word_activation(const Concept& subject, const RelatedWord& word, const MaskTemplate& tmpl,
                       const ScoringBackend& backend);

// Per word, the maximum activation over templates (first template wins ties).
std::vector<WordActivation> word_activations(const Concept& subject,
                                             const std::vector<RelatedWord>& words,
                                             const std::vector<MaskTemplate>& templates,
                                             const ScoringBackend& backend);

// Mean of the two largest values (the single value for one element).
double top2_mean(std::vector<double> values);

double ws_score(const Concept& subject, const std::vector<RelatedWord>& words,
                const std::vector<MaskTemplate>& templates, const ScoringBackend& backend);
double ws_from_activations(const std::vector<WordActivation>& activations);

// U_c over the target's two strongest related words:
// mean of W(anchor, w) / max(W(target, w), eps).
UcScore uc_ratio(const Concept& anchor, const Concept& target,
                 const std::vector<RelatedWord>& words, const std::vector<MaskTemplate>& templates,
                 const ScoringBackend& backend);
UcScore uc_from_activations(const Concept& anchor, const Concept& target,
                            const std::vector<WordActivation>& anchor_acts,
                            const std::vector<WordActivation>& target_acts);

// Related prompts with the concept slot masked: each template's [MASK] is
// filled with a related word and its {C} becomes [MASK].
std::vector<std::string> concept_masked_prompts(const std::vector<MaskTemplate>& templates,
                                                const std::vector<RelatedWord>& words);

ContextRaise crr_from_scores(double related, double neutral);

ContextRaise context_raise_ratio(const Concept& subject,
                                 const std::vector<std::string>& related_prompts,
                                 std::string_view neutral_prompt, const ScoringBackend& backend);

ActivationReport activation_report(const Concept& subject, const std::vector<RelatedWord>& words,
                                   const std::vector<MaskTemplate>& templates,
                                   const std::vector<std::string>& related_prompts,
                                   std::string_view neutral_prompt, const ScoringBackend& backend);

}  // namespace selectkit

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "selectkit/activation.hpp"
#include "selectkit/candidate_gen.hpp"
#include "selectkit/coherence.hpp"
#include "selectkit/concept.hpp"

namespace selectkit {

struct SelectionPolicy {
  double uc_threshold = 1.0;
  int stage1_top_k = 3;

  void validate() const;
};

struct ScoredCandidate {
  SiblingCandidate candidate;
  ActivationReport activation;
  UcScore uc;
  std::optional<CoherenceReport> coherence;  // set iff the candidate survived Stage I

  const std::string& key() const noexcept { return candidate.subject.key(); }
};

struct PhaseTiming {
  std::string phase;
  double ms = 0.0;
};

struct MiningResult {
  Concept target;
  Concept optimal_anchor;
  std::vector<Concept> retain_set;
  ActivationReport target_activation;
  std::vector<RelatedWord> related_words;
  std::vector<std::string> templates;
  std::vector<ScoredCandidate> all_scores;
  std::vector<SiblingCandidate> rejected;
  std::vector<PhaseTiming> timing;
};

// Keeps uc < threshold, ascending by uc (then W_s ascending, then name),
// truncated to top_k. When nothing passes, returns the top_k smallest uc.
std::vector<ScoredCandidate> stage1_filter(const std::vector<ScoredCandidate>& scored,
                                           const SelectionPolicy& policy);

// Highest CoS; ties go to the lexicographically smaller name.
const ScoredCandidate& stage2_select(const std::vector<ScoredCandidate>& survivors);

// Every valid candidate except the anchor, sorted by normalized name.
std::vector<Concept> build_retain_set(const std::vector<SiblingCandidate>& candidates,
                                      const Concept& anchor);

// Completion, mask-fill and perplexity sources. One object may fill
// several roles.
struct Backends {
  const ScoringBackend* completer = nullptr;
  const ScoringBackend* fill = nullptr;
  const ScoringBackend* ppl = nullptr;

  static Backends uniform(const ScoringBackend& b) { return {&b, &b, &b}; }
  void validate() const;
};

struct MiningConfig {
  GenerationConfig generation;
  SelectionPolicy policy;
  // Coherence templates with a {C} slot; empty uses the category defaults.
  std::vector<std::string> coherence_templates;
  int threads = 1;

  void validate() const;
};

// Full pipeline: candidates, related words, context templates, activation
// scores, Stage I, coherence for survivors, Stage II, retain set. Errors
// are rethrown as PhaseError naming the failing phase.
MiningResult mine_anchor(const Concept& target, const MiningConfig& cfg, const Backends& backends,
                         const CandidateContext& ctx = {});

}  // namespace selectkit

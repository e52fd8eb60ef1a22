#include "selectkit/coherence.hpp"

#include <algorithm>

#include "selectkit/errors.hpp"
#include "selectkit/text.hpp"

namespace selectkit {

std::string substitute(std::string_view prompt, const Concept& target, const Concept& anchor) {
  const auto hits = find_word_occurrences(prompt, target.name());
  if (hits.empty()) {
    throw PreconditionError("target not found: \"" + target.name() + "\" in \"" +
                            std::string(prompt) + "\"");
  }
  std::string out;
  std::size_t pos = 0;
  for (auto h : hits) {
    out.append(prompt.substr(pos, h - pos));
    out.append(anchor.name());
    pos = h + target.name().size();
  }
  out.append(prompt.substr(pos));
  return out;
}

std::vector<std::string> coherence_prompts(const std::vector<std::string>& templates,
                                           const Concept& target) {
  std::vector<std::string> out;
  out.reserve(templates.size());
  for (const auto& t : templates) out.push_back(replace_all(t, kConceptSlot, target.name()));
  return out;
}

CoherenceReport cos_score(const Concept& target, const Concept& anchor,
                          const std::vector<std::string>& prompts, const ScoringBackend& backend) {
  if (prompts.empty()) throw PreconditionError("coherence needs at least one prompt");
  CoherenceReport report{anchor, {}, 0.0};
  const bool identity = anchor.same_as(target);
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    PromptRatio r;
    r.original = prompts[i];
    try {
      r.substituted = substitute(prompts[i], target, anchor);
    } catch (const PreconditionError& e) {
      throw PreconditionError("prompt " + std::to_string(i) + ": " + e.what());
    }
    r.ppl_original = perplexity(backend, r.original);
    if (identity) {
      r.ppl_substituted = r.ppl_original;
      r.ratio = 1.0;
    } else {
      r.ppl_substituted = perplexity(backend, r.substituted);
      r.ratio = r.ppl_original / r.ppl_substituted;
    }
    report.per_prompt.push_back(std::move(r));
  }
  // Summing in sorted order keeps the mean independent of prompt order.
  std::vector<double> ratios;
  for (const auto& r : report.per_prompt) ratios.push_back(r.ratio);
  std::sort(ratios.begin(), ratios.end());
  double sum = 0.0;
  for (double v : ratios) sum += v;
  report.cos = sum / static_cast<double>(prompts.size());
  return report;
}

}  // namespace selectkit

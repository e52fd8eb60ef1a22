#include "selectkit/activation.hpp"

#include <algorithm>
#include <numeric>

#include "selectkit/errors.hpp"
#include "selectkit/text.hpp"

namespace selectkit {

ClampedRatio clamped_ratio(double numerator, double denominator) {
  if (denominator < kRatioEpsilon) return {numerator / kRatioEpsilon, true};
  return {numerator / denominator, false};
}

double word_activation(const Concept& subject, const RelatedWord& word, const MaskTemplate& tmpl,
                       const ScoringBackend& backend) {
  return fill_probability(backend, tmpl, subject, word.word);
}

std::vector<WordActivation> word_activations(const Concept& subject,
                                             const std::vector<RelatedWord>& words,
                                             const std::vector<MaskTemplate>& templates,
                                             const ScoringBackend& backend) {
  if (words.empty()) throw PreconditionError("activation needs at least one related word");
  if (templates.empty()) throw PreconditionError("activation needs at least one template");
  std::vector<WordActivation> out;
  out.reserve(words.size());
  for (const auto& w : words) {
    WordActivation best{w, templates.front().text(), -1.0};
    for (const auto& t : templates) {
      const double p = word_activation(subject, w, t, backend);
      if (p > best.probability) {
        best.probability = p;
        best.best_template = t.text();
      }
    }
    out.push_back(std::move(best));
  }
  return out;
}

double top2_mean(std::vector<double> values) {
  if (values.empty()) throw PreconditionError("top-2 mean of an empty list");
  if (values.size() == 1) return values.front();
  std::partial_sort(values.begin(), values.begin() + 2, values.end(), std::greater<>());
  return 0.5 * (values[0] + values[1]);
}

double ws_from_activations(const std::vector<WordActivation>& activations) {
  std::vector<double> v;
  v.reserve(activations.size());
  for (const auto& a : activations) v.push_back(a.probability);
  return top2_mean(std::move(v));
}

double ws_score(const Concept& subject, const std::vector<RelatedWord>& words,
                const std::vector<MaskTemplate>& templates, const ScoringBackend& backend) {
  return ws_from_activations(word_activations(subject, words, templates, backend));
}

UcScore uc_from_activations(const Concept& anchor, const Concept& target,
                            const std::vector<WordActivation>& anchor_acts,
                            const std::vector<WordActivation>& target_acts) {
  if (target_acts.empty() || anchor_acts.size() != target_acts.size()) {
    throw PreconditionError("U_c needs the same non-empty word set for anchor and target");
  }
  std::vector<std::size_t> order(target_acts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return target_acts[a].probability > target_acts[b].probability;
  });
  order.resize(std::min<std::size_t>(2, order.size()));

  UcScore out{anchor, target, 0.0, {}};
  if (anchor.same_as(target)) {
    for (auto i : order) out.per_word_ratios.emplace_back(target_acts[i].word.word, 1.0);
    out.value = 1.0;
    return out;
  }
  double sum = 0.0;
  for (auto i : order) {
    if (normalize_name(anchor_acts[i].word.word) != normalize_name(target_acts[i].word.word)) {
      throw PreconditionError("U_c word lists differ between anchor and target");
    }
    const double r = clamped_ratio(anchor_acts[i].probability, target_acts[i].probability).value;
    out.per_word_ratios.emplace_back(target_acts[i].word.word, r);
    sum += r;
  }
  out.value = sum / static_cast<double>(order.size());
  return out;
}

UcScore uc_ratio(const Concept& anchor, const Concept& target,
                 const std::vector<RelatedWord>& words, const std::vector<MaskTemplate>& templates,
                 const ScoringBackend& backend) {
  const auto target_acts = word_activations(target, words, templates, backend);
  if (anchor.same_as(target)) return uc_from_activations(anchor, target, target_acts, target_acts);
  const auto anchor_acts = word_activations(anchor, words, templates, backend);
  return uc_from_activations(anchor, target, anchor_acts, target_acts);
}

std::vector<std::string> concept_masked_prompts(const std::vector<MaskTemplate>& templates,
                                                const std::vector<RelatedWord>& words) {
  std::vector<std::string> out;
  for (const auto& t : templates) {
    for (const auto& w : words) {
      auto s = replace_all(t.text(), kMaskToken, w.word);
      out.push_back(replace_all(std::move(s), kConceptSlot, kMaskToken));
    }
  }
  return out;
}

ContextRaise crr_from_scores(double related, double neutral) {
  if (related < 0.0 || neutral < 0.0) throw PreconditionError("activation scores must be >= 0");
  const auto r = clamped_ratio(related, neutral);
  return {related, neutral, r.value, r.degenerate};
}

ContextRaise context_raise_ratio(const Concept& subject,
                                 const std::vector<std::string>& related_prompts,
                                 std::string_view neutral_prompt, const ScoringBackend& backend) {
  if (related_prompts.empty()) throw PreconditionError("CRR needs at least one related prompt");
  double sum = 0.0;
  for (const auto& p : related_prompts) sum += fill_masked(backend, p, subject.name());
  const double rc = sum / static_cast<double>(related_prompts.size());
  const double nc = fill_masked(backend, neutral_prompt, subject.name());
  return crr_from_scores(rc, nc);
}

ActivationReport activation_report(const Concept& subject, const std::vector<RelatedWord>& words,
                                   const std::vector<MaskTemplate>& templates,
                                   const std::vector<std::string>& related_prompts,
                                   std::string_view neutral_prompt, const ScoringBackend& backend) {
  ActivationReport r{subject, word_activations(subject, words, templates, backend), 0.0, {}};
  r.ws = ws_from_activations(r.per_word);
  r.context = context_raise_ratio(subject, related_prompts, neutral_prompt, backend);
  return r;
}

}  // namespace selectkit

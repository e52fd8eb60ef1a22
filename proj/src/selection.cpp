#include "selectkit/selection.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <functional>
#include <thread>

#include "selectkit/errors.hpp"
#include "selectkit/prompts.hpp"

namespace selectkit {

namespace {

bool stage1_less(const ScoredCandidate& a, const ScoredCandidate& b) {
  if (a.uc.value != b.uc.value) return a.uc.value < b.uc.value;
  if (a.activation.ws != b.activation.ws) return a.activation.ws < b.activation.ws;
  return a.key() < b.key();
}

template <typename F>
auto run_phase(const std::string& name, std::vector<PhaseTiming>& timing, F&& fn) {
  const auto start = std::chrono::steady_clock::now();
  auto finish = [&] {
    const std::chrono::duration<double, std::milli> d = std::chrono::steady_clock::now() - start;
    timing.push_back({name, d.count()});
  };
  try {
    auto out = fn();
    finish();
    return out;
  } catch (const PhaseError&) {
    throw;
  } catch (const std::exception& e) {
    throw PhaseError(name, e.what());
  }
}

// Runs fn(i) for i in [0, n) on up to `threads` workers. Results land in
// per-index slots, so completion order never matters.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const auto workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (auto i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  // Report the lowest failing index so the error is deterministic too.
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

void SelectionPolicy::validate() const {
  if (stage1_top_k < 1) throw PreconditionError("stage1_top_k must be >= 1");
}

void Backends::validate() const {
  if (!completer || !fill || !ppl) throw PreconditionError("mining needs all three backends");
}

void MiningConfig::validate() const {
  generation.validate();
  policy.validate();
  if (threads < 1) throw PreconditionError("threads must be >= 1");
  for (const auto& t : coherence_templates) {
    if (t.find(kConceptSlot) == std::string::npos) {
      throw PreconditionError("coherence template lacks {C}: " + t);
    }
  }
}

std::vector<ScoredCandidate> stage1_filter(const std::vector<ScoredCandidate>& scored,
                                           const SelectionPolicy& policy) {
  policy.validate();
  if (scored.empty()) throw PreconditionError("stage I needs at least one candidate");
  std::vector<ScoredCandidate> pass;
  for (const auto& s : scored) {
    if (s.uc.value < policy.uc_threshold) pass.push_back(s);
  }
  if (pass.empty()) pass = scored;
  std::sort(pass.begin(), pass.end(), stage1_less);
  if (pass.size() > static_cast<std::size_t>(policy.stage1_top_k)) {
    pass.erase(pass.begin() + policy.stage1_top_k, pass.end());
  }
  return pass;
}

const ScoredCandidate& stage2_select(const std::vector<ScoredCandidate>& survivors) {
  if (survivors.empty()) throw PreconditionError("stage II needs at least one survivor");
  const ScoredCandidate* best = nullptr;
  for (const auto& s : survivors) {
    if (!s.coherence) throw PreconditionError("survivor without coherence: " + s.key());
    if (!best || s.coherence->cos > best->coherence->cos ||
        (s.coherence->cos == best->coherence->cos && s.key() < best->key())) {
      best = &s;
    }
  }
  return *best;
}

std::vector<Concept> build_retain_set(const std::vector<SiblingCandidate>& candidates,
                                      const Concept& anchor) {
  const bool present = std::any_of(candidates.begin(), candidates.end(),
                                   [&](const SiblingCandidate& c) { return c.subject.same_as(anchor); });
  if (!present) throw PreconditionError("anchor not among candidates: " + anchor.name());
  std::vector<Concept> out;
  for (const auto& c : candidates) {
    if (!c.subject.same_as(anchor)) out.push_back(c.subject);
  }
  std::sort(out.begin(), out.end(),
            [](const Concept& a, const Concept& b) { return a.key() < b.key(); });
  return out;
}

MiningResult mine_anchor(const Concept& target, const MiningConfig& cfg, const Backends& backends,
                         const CandidateContext& ctx) {
  cfg.validate();
  backends.validate();
  std::vector<PhaseTiming> timing;
  std::vector<SiblingCandidate> rejected;

  auto candidates = run_phase("generate_candidates", timing, [&] {
    return generate_candidates(target, cfg.generation, *backends.completer, ctx, &rejected);
  });
  auto words = run_phase("generate_related_words", timing, [&] {
    return generate_related_words(target, cfg.generation, *backends.completer, ctx.prompts);
  });
  auto templates = run_phase("generate_context_templates", timing, [&] {
    std::vector<MaskTemplate> out;
    for (const auto& s : seed_templates()) out.emplace_back(s);
    for (auto& t : generate_context_templates(target, cfg.generation, *backends.completer,
                                              ctx.prompts)) {
      const bool dup = std::any_of(out.begin(), out.end(),
                                   [&](const MaskTemplate& m) { return m.text() == t.text(); });
      if (!dup) out.push_back(std::move(t));
    }
    return out;
  });

  auto target_report = run_phase("activation", timing, [&] {
    return activation_report(target, words, templates, concept_masked_prompts(templates, words),
                             kNeutralTemplate, *backends.fill);
  });
  std::vector<std::optional<ScoredCandidate>> slots(candidates.size());
  run_phase("candidate_activation", timing, [&] {
    parallel_for(candidates.size(), cfg.threads, [&](std::size_t i) {
      const auto& c = candidates[i];
      ActivationReport rep{c.subject, word_activations(c.subject, words, templates, *backends.fill),
                           0.0, std::nullopt};
      rep.ws = ws_from_activations(rep.per_word);
      auto uc = uc_from_activations(c.subject, target, rep.per_word, target_report.per_word);
      slots[i] = ScoredCandidate{c, std::move(rep), std::move(uc), std::nullopt};
    });
    return 0;
  });
  std::vector<ScoredCandidate> scored;
  for (auto& s : slots) scored.push_back(std::move(*s));

  auto survivors =
      run_phase("stage1", timing, [&] { return stage1_filter(scored, cfg.policy); });

  run_phase("coherence", timing, [&] {
    const auto& tmpl = cfg.coherence_templates.empty()
                           ? coherence_templates(cfg.generation.category)
                           : cfg.coherence_templates;
    const auto prompts = coherence_prompts(tmpl, target);
    parallel_for(survivors.size(), cfg.threads, [&](std::size_t i) {
      survivors[i].coherence =
          cos_score(target, survivors[i].candidate.subject, prompts, *backends.ppl);
    });
    return 0;
  });

  const auto anchor = run_phase("stage2", timing, [&] { return stage2_select(survivors); });

  auto retain = run_phase("retain_set", timing, [&] {
    return build_retain_set(candidates, anchor.candidate.subject);
  });

  for (auto& s : scored) {
    for (const auto& sv : survivors) {
      if (sv.key() == s.key()) s.coherence = sv.coherence;
    }
  }

  return MiningResult{target,
                      anchor.candidate.subject,
                      std::move(retain),
                      std::move(target_report),
                      std::move(words),
                      [&] {
                        std::vector<std::string> t;
                        for (const auto& m : templates) t.push_back(m.text());
                        return t;
                      }(),
                      std::move(scored),
                      std::move(rejected),
                      std::move(timing)};
}

}  // namespace selectkit

#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "selectkit/concept.hpp"
#include "selectkit/lm_backend.hpp"
#include "selectkit/prompts.hpp"

namespace selectkit {

struct RelatedWord {
  std::string word;
  std::string source_template;

  friend bool operator==(const RelatedWord&, const RelatedWord&) = default;
};

struct GenerationConfig {
  int num_candidates = 8;
  int num_related_words = 8;
  // 0 disables generated context templates; the seed templates remain.
  int num_related_templates = 6;
  Category category = Category::general;
  // Reject candidates whose siblinghood rests only on LLM assertion.
  bool require_hierarchy_siblings = false;

  void validate() const;
};

// Extracts list items from comma/semicolon-separated text, newline lists,
// and numbered or bulleted lists (inline numbering such as "1. a 2. b"
// included). Strips enumeration markers, quotes and trailing punctuation,
// drops preamble before a colon, preserves order, and deduplicates
// case-insensitively. Throws UnparseableCompletion when nothing is found.
std::vector<std::string> parse_llm_list(std::string_view text);

// One item per line (templates keep their commas).
std::vector<std::string> parse_llm_lines(std::string_view text);

struct CandidateContext {
  const ConceptHierarchy* hierarchy = nullptr;
  std::set<std::string> synonyms;
  Provenance provenance = Provenance::llm_generated;
  const PromptLibrary* prompts = nullptr;
};

// Prompts the backend with the category's candidate asset, parses up to
// cfg.num_candidates names, and keeps the eligible ones in completion order.
// `rejected`, when given, receives the candidates that failed validation.
std::vector<SiblingCandidate> generate_candidates(const Concept& target,
                                                  const GenerationConfig& cfg,
                                                  const ScoringBackend& backend,
                                                  const CandidateContext& ctx = {},
                                                  std::vector<SiblingCandidate>* rejected = nullptr);

// One completion per seed template; words are interleaved across templates,
// deduplicated, and capped at cfg.num_related_words.
std::vector<RelatedWord> generate_related_words(const Concept& target, const GenerationConfig& cfg,
                                                const ScoringBackend& backend,
                                                const PromptLibrary* prompts = nullptr);

// LLM-written context templates. Lines that do not reduce to exactly one
// concept slot and one [MASK] are dropped.
std::vector<MaskTemplate> generate_context_templates(const Concept& target,
                                                     const GenerationConfig& cfg,
                                                     const ScoringBackend& backend,
                                                     const PromptLibrary* prompts = nullptr);

// Rewrites a concrete sentence about `target` into a MaskTemplate by
// replacing the word-bounded target name with {C}.
std::optional<MaskTemplate> templatize(std::string_view sentence, const Concept& target);

}  // namespace selectkit

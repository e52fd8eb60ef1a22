#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "selectkit/concept.hpp"

namespace selectkit {

// Seed templates for related-word generation; always used.
inline const std::vector<std::string>& seed_templates() {
  static const std::vector<std::string> kSeeds{
      "When people think of {C}, they think of [MASK].",
      "The most distinctive feature of a {C} is its [MASK].",
  };
  return kSeeds;
}

// Neutral prompt with the concept slot masked.
inline constexpr std::string_view kNeutralTemplate = "A photo of [MASK].";

// Ten contextual prompts per category family for coherence scoring.
const std::vector<std::string>& coherence_templates(Category category);

// Versioned prompt assets. Built-ins are compiled in from assets/prompts;
// a directory override replaces any asset whose file is present.
//
//   general.txt instance.txt celebrity.txt artist_style.txt nsfw.txt
//   related_words.txt context_templates.txt
//
// Placeholders: {C} concept name, {N} requested count, {T} seed template.
class PromptLibrary {
 public:
  static PromptLibrary builtin();
  static PromptLibrary with_overrides(const std::filesystem::path& dir);

  const std::string& asset(std::string_view name) const;
  const std::string& candidates(Category category) const;

  std::string render_candidates(Category category, std::string_view target, int count) const;
  std::string render_related_words(std::string_view target, std::string_view seed_template,
                                   int count) const;
  std::string render_context_templates(std::string_view target, int count) const;

 private:
  std::map<std::string, std::string, std::less<>> assets_;
};

}  // namespace selectkit

#include "selectkit/prompts.hpp"

#include "selectkit/errors.hpp"
#include "selectkit/io.hpp"
#include "selectkit/text.hpp"

namespace selectkit {

// Generated from assets/prompts by CMake.
std::string_view builtin_prompt_asset(std::string_view name);
const std::vector<std::string_view>& builtin_prompt_asset_names();

const std::vector<std::string>& coherence_templates(Category category) {
  static const std::vector<std::string> kObject{
      "a photo of a {C}",
      "a photo of a {C} in a park",
      "a close-up photo of a {C}",
      "a {C} on a wooden table",
      "a painting of a {C}",
      "a {C} in the city street",
      "a black and white photo of a {C}",
      "a {C} next to a window",
      "a drawing of a {C} in a garden",
      "a blurry photo of a {C} at night",
  };
  static const std::vector<std::string> kCelebrity{
      "a portrait of {C}",
      "a sketch of {C}",
      "an oil painting of {C}",
      "{C} in an official photo",
      "an image capturing {C} at a public event",
      "a candid photo of {C} on the street",
      "{C} giving a speech",
      "a magazine cover featuring {C}",
      "a close-up photo of {C} smiling",
      "{C} sitting in a cafe",
  };
  static const std::vector<std::string> kArtist{
      "a landscape painting by {C}",
      "a portrait in the style of {C}",
      "a city street painted by {C}",
      "a still life by {C}",
      "a seascape in the style of {C}",
      "an abstract composition by {C}",
      "a forest scene painted by {C}",
      "a self-portrait in the style of {C}",
      "a night sky painted by {C}",
      "a village market in the style of {C}",
  };
  static const std::vector<std::string> kNsfw{
      "a photo of {C} in a bedroom",
      "a painting of {C} on a beach",
      "a photo of {C} at a party",
      "an illustration of {C} in a studio",
      "a photo of {C} by a pool",
      "a film still of {C} in a hotel room",
      "a drawing of {C} in a garden",
      "a magazine photo of {C}",
      "a photo of {C} at night",
      "a portrait of {C} in soft light",
  };
  switch (category) {
    case Category::general:
    case Category::instance: return kObject;
    case Category::celebrity: return kCelebrity;
    case Category::artist_style: return kArtist;
    case Category::nsfw: return kNsfw;
  }
  return kObject;
}

PromptLibrary PromptLibrary::builtin() {
  PromptLibrary lib;
  for (auto name : builtin_prompt_asset_names()) {
    lib.assets_.emplace(std::string(name), std::string(builtin_prompt_asset(name)));
  }
  return lib;
}

PromptLibrary PromptLibrary::with_overrides(const std::filesystem::path& dir) {
  auto lib = builtin();
  if (!std::filesystem::is_directory(dir)) {
    throw PreconditionError("prompt directory not found: " + dir.string());
  }
  for (auto& [name, text] : lib.assets_) {
    const auto path = dir / (name + ".txt");
    if (std::filesystem::exists(path)) text = read_file(path);
  }
  return lib;
}

const std::string& PromptLibrary::asset(std::string_view name) const {
  const auto it = assets_.find(name);
  if (it == assets_.end()) throw PreconditionError("unknown prompt asset: " + std::string(name));
  return it->second;
}

const std::string& PromptLibrary::candidates(Category category) const {
  return asset(to_string(category));
}

std::string PromptLibrary::render_candidates(Category category, std::string_view target,
                                             int count) const {
  auto s = replace_all(candidates(category), "{N}", std::to_string(count));
  return replace_all(std::move(s), "{C}", target);
}

std::string PromptLibrary::render_related_words(std::string_view target,
                                                std::string_view seed_template, int count) const {
  auto s = replace_all(asset("related_words"), "{T}", seed_template);
  s = replace_all(std::move(s), "{N}", std::to_string(count));
  return replace_all(std::move(s), "{C}", target);
}

std::string PromptLibrary::render_context_templates(std::string_view target, int count) const {
  auto s = replace_all(asset("context_templates"), "{N}", std::to_string(count));
  return replace_all(std::move(s), "{C}", target);
}

}  // namespace selectkit

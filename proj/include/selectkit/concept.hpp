#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace selectkit {

enum class Category { general, instance, celebrity, artist_style, nsfw };

std::string_view to_string(Category c);
Category parse_category(std::string_view s);

// A named concept. The display name is kept as given; identity is the
// normalized form (lowercased, whitespace-collapsed).
class Concept {
 public:
  explicit Concept(std::string_view name, Category category = Category::general,
                   std::optional<std::string> parent = std::nullopt);

  const std::string& name() const noexcept { return name_; }
  const std::string& key() const noexcept { return key_; }
  Category category() const noexcept { return category_; }
  const std::optional<std::string>& parent() const noexcept { return parent_; }

  bool same_as(const Concept& other) const noexcept { return key_ == other.key_; }

 private:
  std::string name_;
  std::string key_;
  Category category_;
  std::optional<std::string> parent_;
};

// Child -> parent edges over normalized names; acyclic by construction.
class ConceptHierarchy {
 public:
  ConceptHierarchy() = default;

  // Throws CycleError naming the chain if the edges contain a cycle.
  static ConceptHierarchy from_edges(const std::map<std::string, std::string>& edges);

  // nullopt means "unknown parent"; never fabricated.
  std::optional<std::string> parent(std::string_view child) const;
  bool empty() const noexcept { return edges_.empty(); }
  std::size_t size() const noexcept { return edges_.size(); }
  const std::map<std::string, std::string>& edges() const noexcept { return edges_; }

 private:
  std::map<std::string, std::string> edges_;
};

// Reads a UTF-8 JSON object mapping child name -> parent name. An empty or
// whitespace-only file yields an empty hierarchy.
ConceptHierarchy load_hierarchy(const std::filesystem::path& path);
ConceptHierarchy parse_hierarchy(std::string_view json_text);

enum class Provenance { llm_generated, user_supplied, fixture };

std::string_view to_string(Provenance p);

struct SiblingCandidate {
  Concept subject;
  bool sibling_ok = false;
  bool exclusive_ok = false;
  // True when siblinghood was accepted only because the hierarchy knows
  // neither concept.
  bool sibling_by_assertion = false;
  Provenance provenance = Provenance::llm_generated;

  bool eligible() const noexcept { return sibling_ok && exclusive_ok; }
};

// Exclusivity floor: different normalized names, neither contained in the
// other at word boundaries, candidate not a listed synonym.
bool is_exclusive(const Concept& target, const Concept& candidate,
                  const std::set<std::string>& synonyms);

SiblingCandidate validate_candidate(const Concept& target, const Concept& candidate,
                                    const ConceptHierarchy& hierarchy,
                                    const std::set<std::string>& synonyms = {},
                                    Provenance provenance = Provenance::llm_generated);

}  // namespace selectkit

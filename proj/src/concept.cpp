#include "selectkit/concept.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "selectkit/errors.hpp"
#include "selectkit/text.hpp"

namespace selectkit {

namespace {

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + offset, '\n'));
}

std::size_t line_of_key(std::string_view text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  return pos == std::string_view::npos ? 1 : line_of_offset(text, pos);
}

}  // namespace

std::string_view to_string(Category c) {
  switch (c) {
    case Category::general: return "general";
    case Category::instance: return "instance";
    case Category::celebrity: return "celebrity";
    case Category::artist_style: return "artist_style";
    case Category::nsfw: return "nsfw";
  }
  return "general";
}

Category parse_category(std::string_view s) {
  const std::string n = normalize_name(s);
  if (n == "general" || n == "object") return Category::general;
  if (n == "instance") return Category::instance;
  if (n == "celebrity") return Category::celebrity;
  if (n == "artist_style" || n == "artist") return Category::artist_style;
  if (n == "nsfw") return Category::nsfw;
  throw PreconditionError("unknown category '" + std::string(s) + "'");
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::llm_generated: return "llm_generated";
    case Provenance::user_supplied: return "user_supplied";
    case Provenance::fixture: return "fixture";
  }
  return "llm_generated";
}

Concept::Concept(std::string_view name, Category category, std::optional<std::string> parent)
    : name_(trim(name)), key_(normalize_name(name)), category_(category) {
  if (key_.empty()) throw PreconditionError("concept name is empty");
  if (parent && !normalize_name(*parent).empty()) parent_ = normalize_name(*parent);
}

ConceptHierarchy ConceptHierarchy::from_edges(const std::map<std::string, std::string>& edges) {
  ConceptHierarchy h;
  for (const auto& [child, parent] : edges) {
    h.edges_[normalize_name(child)] = normalize_name(parent);
  }
  for (const auto& [start, unused] : h.edges_) {
    std::vector<std::string> chain{start};
    std::string cur = start;
    for (auto it = h.edges_.find(cur); it != h.edges_.end(); it = h.edges_.find(cur)) {
      cur = it->second;
      chain.push_back(cur);
      if (std::find(chain.begin(), chain.end() - 1, cur) != chain.end() - 1) {
        throw CycleError(join(chain, " -> "));
      }
    }
  }
  return h;
}

std::optional<std::string> ConceptHierarchy::parent(std::string_view child) const {
  const auto it = edges_.find(normalize_name(child));
  if (it == edges_.end()) return std::nullopt;
  return it->second;
}

ConceptHierarchy parse_hierarchy(std::string_view text) {
  if (trim(text).empty()) return {};
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("hierarchy is not valid JSON: ") + e.what(),
                     line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1));
  }
  if (!doc.is_object()) throw ParseError("hierarchy must be a JSON object", 1);
  std::map<std::string, std::string> edges;
  for (const auto& [child, parent] : doc.items()) {
    if (!parent.is_string()) {
      throw ParseError("parent of '" + child + "' must be a string", line_of_key(text, child));
    }
    if (normalize_name(child).empty() || normalize_name(parent.get<std::string>()).empty()) {
      throw ParseError("empty concept name in hierarchy", line_of_key(text, child));
    }
    edges[child] = parent.get<std::string>();
  }
  return ConceptHierarchy::from_edges(edges);
}

ConceptHierarchy load_hierarchy(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open hierarchy file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_hierarchy(ss.str());
}

bool is_exclusive(const Concept& target, const Concept& candidate,
                  const std::set<std::string>& synonyms) {
  const auto& a = target.key();
  const auto& b = candidate.key();
  if (a == b) return false;
  if (contains_word(a, b) || contains_word(b, a)) return false;
  for (const auto& s : synonyms) {
    if (normalize_name(s) == b) return false;
  }
  return true;
}

SiblingCandidate validate_candidate(const Concept& target, const Concept& candidate,
                                    const ConceptHierarchy& hierarchy,
                                    const std::set<std::string>& synonyms,
                                    Provenance provenance) {
  SiblingCandidate out{candidate};
  out.provenance = provenance;
  auto resolve = [&](const Concept& c) -> std::optional<std::string> {
    if (auto p = hierarchy.parent(c.key())) return p;
    return c.parent();
  };
  const auto pt = resolve(target);
  const auto pc = resolve(candidate);
  if (pt && pc) {
    out.sibling_ok = *pt == *pc;
  } else if (!pt && !pc) {
    out.sibling_ok = true;
    out.sibling_by_assertion = true;
    out.provenance = Provenance::llm_generated;
  }
  out.exclusive_ok = is_exclusive(target, candidate, synonyms);
  return out;
}

}  // namespace selectkit

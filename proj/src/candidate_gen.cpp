#include "selectkit/candidate_gen.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <sstream>

#include "selectkit/errors.hpp"
#include "selectkit/text.hpp"

namespace selectkit {

namespace {

constexpr std::size_t kMaxItemWords = 12;

const std::regex& numbered_marker() {
  static const std::regex re(R"((^|\s)\d{1,3}[.)]\s+)");
  return re;
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  lines.push_back(cur);
  return lines;
}

bool is_bullet_line(std::string_view line) {
  const auto t = trim(line);
  if (t.size() < 2) return false;
  if ((t[0] == '-' || t[0] == '*') && t[1] == ' ') return true;
  return t.rfind("\xE2\x80\xA2", 0) == 0;  // U+2022 bullet
}

std::string strip_leading_marker(std::string s) {
  s = trim(s);
  if (s.rfind("\xE2\x80\xA2", 0) == 0) return trim(s.substr(3));
  if (s.size() >= 2 && (s[0] == '-' || s[0] == '*') && s[1] == ' ') return trim(s.substr(2));
  std::size_t i = 0;
  while (i < s.size() && i < 3 && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i > 0 && i + 1 < s.size() && (s[i] == '.' || s[i] == ')') && s[i + 1] == ' ') {
    return trim(s.substr(i + 2));
  }
  return s;
}

bool is_quote_or_punct_edge(std::string_view s, bool front) {
  static const std::vector<std::string_view> kMulti{"\xE2\x80\x9C", "\xE2\x80\x9D", "\xE2\x80\x98",
                                                    "\xE2\x80\x99"};
  for (auto q : kMulti) {
    if (s.size() >= q.size() &&
        (front ? s.substr(0, q.size()) == q : s.substr(s.size() - q.size()) == q)) {
      return true;
    }
  }
  return false;
}

std::string strip_decorations(std::string s) {
  static const std::string_view kEdge = "\"'`*_";
  static const std::string_view kTrail = ".!?;:";
  bool changed = true;
  while (changed && !s.empty()) {
    changed = false;
    s = trim(s);
    if (s.empty()) break;
    if (kEdge.find(s.front()) != std::string_view::npos) {
      s.erase(0, 1);
      changed = true;
    } else if (is_quote_or_punct_edge(s, true)) {
      s.erase(0, 3);
      changed = true;
    }
    if (s.empty()) break;
    if (kEdge.find(s.back()) != std::string_view::npos ||
        kTrail.find(s.back()) != std::string_view::npos) {
      s.pop_back();
      changed = true;
    } else if (is_quote_or_punct_edge(s, false)) {
      s.erase(s.size() - 3);
      changed = true;
    }
  }
  return s;
}

// Cuts trailing prose: "orange. Hope this helps" -> "orange".
std::string cut_sentence(std::string s) {
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if ((s[i] == '.' || s[i] == '!' || s[i] == '?') && s[i + 1] == ' ') return s.substr(0, i);
  }
  return s;
}

std::string after_colon(const std::string& s) {
  const auto pos = s.rfind(':');
  return pos == std::string::npos ? s : s.substr(pos + 1);
}

std::string clean_item(std::string s) {
  s = strip_leading_marker(std::move(s));
  s = after_colon(s);
  s = cut_sentence(trim(s));
  s = strip_decorations(std::move(s));
  s = strip_leading_marker(std::move(s));
  s = strip_decorations(std::move(s));
  // Collapse internal whitespace runs but keep the original case.
  std::string out;
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
      continue;
    }
    if (space) out.push_back(' ');
    space = false;
    out.push_back(c);
  }
  return out;
}

void split_items(const std::string& segment, std::vector<std::string>& out) {
  std::string cur;
  for (char c : segment) {
    if (c == ',' || c == ';') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
}

std::vector<std::string> numbered_segments(const std::string& line) {
  std::vector<std::string> segs;
  const auto& re = numbered_marker();
  std::vector<std::pair<std::size_t, std::size_t>> marks;
  for (auto it = std::sregex_iterator(line.begin(), line.end(), re); it != std::sregex_iterator();
       ++it) {
    marks.emplace_back(static_cast<std::size_t>(it->position()),
                       static_cast<std::size_t>(it->position() + it->length()));
  }
  for (std::size_t i = 0; i < marks.size(); ++i) {
    const auto end = i + 1 < marks.size() ? marks[i + 1].first : line.size();
    segs.push_back(line.substr(marks[i].second, end - marks[i].second));
  }
  return segs;
}

std::vector<std::string> dedupe(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (auto item : raw) {
    item = clean_item(std::move(item));
    if (item.empty()) continue;
    const auto words = tokenize(item).size();
    if (words == 0 || words > kMaxItemWords) continue;
    if (seen.insert(normalize_name(item)).second) out.push_back(item);
  }
  return out;
}

}  // namespace

void GenerationConfig::validate() const {
  if (num_candidates < 1 || num_related_words < 1 || num_related_templates < 0) {
    throw PreconditionError("generation counts must be >= 1");
  }
}

std::vector<std::string> parse_llm_list(std::string_view text) {
  const auto lines = split_lines(text);
  std::vector<std::string> segments;

  const bool has_bullets = std::any_of(lines.begin(), lines.end(), is_bullet_line);
  bool has_numbers = false;
  if (!has_bullets) {
    for (const auto& l : lines) {
      if (std::regex_search(l, numbered_marker())) {
        has_numbers = true;
        break;
      }
    }
  }

  if (has_bullets) {
    for (const auto& l : lines) {
      if (is_bullet_line(l)) segments.push_back(strip_leading_marker(l));
    }
  } else if (has_numbers) {
    for (const auto& l : lines) {
      for (auto& s : numbered_segments(l)) segments.push_back(std::move(s));
    }
  } else {
    for (const auto& l : lines) {
      const auto t = trim(l);
      if (t.empty() || t.back() == ':') continue;
      segments.push_back(after_colon(t));
    }
  }

  std::vector<std::string> raw;
  for (const auto& s : segments) split_items(s, raw);
  auto items = dedupe(raw);
  if (items.empty()) throw UnparseableCompletion(std::string(text));
  return items;
}

std::vector<std::string> parse_llm_lines(std::string_view text) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& l : split_lines(text)) {
    auto s = strip_leading_marker(l);
    // Only surrounding quotes; trailing periods are part of the sentence.
    while (!s.empty() && (s.front() == '"' || s.front() == '\'')) s.erase(0, 1);
    while (!s.empty() && (s.back() == '"' || s.back() == '\'')) s.pop_back();
    s = trim(s);
    if (s.empty()) continue;
    if (seen.insert(normalize_name(s)).second) out.push_back(s);
  }
  if (out.empty()) throw UnparseableCompletion(std::string(text));
  return out;
}

std::vector<SiblingCandidate> generate_candidates(const Concept& target,
                                                  const GenerationConfig& cfg,
                                                  const ScoringBackend& backend,
                                                  const CandidateContext& ctx,
                                                  std::vector<SiblingCandidate>* rejected) {
  cfg.validate();
  const auto builtin = PromptLibrary::builtin();
  const PromptLibrary& prompts = ctx.prompts ? *ctx.prompts : builtin;
  const auto prompt = prompts.render_candidates(cfg.category, target.name(), cfg.num_candidates);
  const auto text = complete(backend, prompt);
  auto names = parse_llm_list(text);
  if (names.size() > static_cast<std::size_t>(cfg.num_candidates)) {
    names.resize(static_cast<std::size_t>(cfg.num_candidates));
  }
  static const ConceptHierarchy kEmpty;
  const ConceptHierarchy& hierarchy = ctx.hierarchy ? *ctx.hierarchy : kEmpty;

  std::vector<SiblingCandidate> out;
  for (const auto& name : names) {
    auto c = validate_candidate(target, Concept(name, cfg.category), hierarchy, ctx.synonyms,
                                ctx.provenance);
    const bool ok = c.eligible() && !(cfg.require_hierarchy_siblings && c.sibling_by_assertion);
    if (ok) {
      out.push_back(std::move(c));
    } else if (rejected) {
      rejected->push_back(std::move(c));
    }
  }
  if (out.empty()) throw NoValidCandidates();
  return out;
}

std::vector<RelatedWord> generate_related_words(const Concept& target, const GenerationConfig& cfg,
                                                const ScoringBackend& backend,
                                                const PromptLibrary* prompts) {
  cfg.validate();
  const auto builtin = PromptLibrary::builtin();
  const PromptLibrary& lib = prompts ? *prompts : builtin;

  std::vector<std::vector<RelatedWord>> per_template;
  for (const auto& seed : seed_templates()) {
    const MaskTemplate tmpl(seed);
    const auto prompt =
        lib.render_related_words(target.name(), tmpl.instantiate(target), cfg.num_related_words);
    const auto text = complete(backend, prompt);
    std::vector<RelatedWord> words;
    for (auto& w : parse_llm_list(text)) words.push_back({std::move(w), seed});
    per_template.push_back(std::move(words));
  }

  std::vector<RelatedWord> out;
  std::set<std::string> seen{target.key()};
  const auto cap = static_cast<std::size_t>(cfg.num_related_words);
  for (std::size_t i = 0; out.size() < cap; ++i) {
    bool any = false;
    for (const auto& words : per_template) {
      if (i >= words.size()) continue;
      any = true;
      if (out.size() < cap && seen.insert(normalize_name(words[i].word)).second) {
        out.push_back(words[i]);
      }
    }
    if (!any) break;
  }
  if (out.empty()) throw UnparseableCompletion("no related words besides the target");
  return out;
}

std::optional<MaskTemplate> templatize(std::string_view sentence, const Concept& target) {
  std::string s(sentence);
  if (count_occurrences(s, kMaskToken) != 1) return std::nullopt;
  if (count_occurrences(s, kConceptSlot) == 1) return MaskTemplate(s);
  const auto hits = find_word_occurrences(s, target.name());
  if (hits.size() != 1) return std::nullopt;
  s.replace(hits.front(), target.name().size(), kConceptSlot);
  if (!is_valid_mask_template(s)) return std::nullopt;
  return MaskTemplate(s);
}

std::vector<MaskTemplate> generate_context_templates(const Concept& target,
                                                     const GenerationConfig& cfg,
                                                     const ScoringBackend& backend,
                                                     const PromptLibrary* prompts) {
  cfg.validate();
  if (cfg.num_related_templates == 0) return {};
  const auto builtin = PromptLibrary::builtin();
  const PromptLibrary& lib = prompts ? *prompts : builtin;
  const auto text =
      complete(backend, lib.render_context_templates(target.name(), cfg.num_related_templates));
  std::vector<MaskTemplate> out;
  for (const auto& line : parse_llm_lines(text)) {
    auto t = templatize(line, target);
    if (!t) continue;
    const bool dup = std::any_of(out.begin(), out.end(), [&](const MaskTemplate& m) {
      return normalize_name(m.text()) == normalize_name(t->text());
    });
    if (!dup) out.push_back(std::move(*t));
    if (out.size() == static_cast<std::size_t>(cfg.num_related_templates)) break;
  }
  return out;
}

}  // namespace selectkit

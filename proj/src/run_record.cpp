#include "selectkit/run_record.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>

#include "selectkit/errors.hpp"
#include "selectkit/hashing.hpp"
#include "selectkit/io.hpp"

namespace selectkit {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

Provenance parse_provenance(const std::string& s) {
  for (auto p : {Provenance::llm_generated, Provenance::user_supplied, Provenance::fixture}) {
    if (to_string(p) == s) return p;
  }
  throw PreconditionError("unknown provenance: " + s);
}

json candidate_to_json(const SiblingCandidate& c) {
  return {{"concept", concept_to_json(c.subject)},
          {"sibling_ok", c.sibling_ok},
          {"exclusive_ok", c.exclusive_ok},
          {"sibling_by_assertion", c.sibling_by_assertion},
          {"provenance", to_string(c.provenance)}};
}

SiblingCandidate candidate_from_json(const json& j) {
  SiblingCandidate c{concept_from_json(j.at("concept"))};
  c.sibling_ok = j.at("sibling_ok").get<bool>();
  c.exclusive_ok = j.at("exclusive_ok").get<bool>();
  c.sibling_by_assertion = j.at("sibling_by_assertion").get<bool>();
  c.provenance = parse_provenance(j.at("provenance").get<std::string>());
  return c;
}

json word_to_json(const RelatedWord& w) {
  return {{"word", w.word}, {"source_template", w.source_template}};
}

RelatedWord word_from_json(const json& j) {
  return {j.at("word").get<std::string>(), j.at("source_template").get<std::string>()};
}

}  // namespace

json activation_to_json(const ActivationReport& a) {
  json per = json::array();
  for (const auto& w : a.per_word) {
    per.push_back({{"word", word_to_json(w.word)}, {"template", w.best_template}, {"p", w.probability}});
  }
  json j{{"concept", concept_to_json(a.subject)}, {"per_word", per}, {"ws", a.ws}};
  if (a.context) {
    j["context"] = {{"related", a.context->related},
                    {"neutral", a.context->neutral},
                    {"crr", a.context->ratio},
                    {"degenerate", a.context->degenerate}};
  }
  return j;
}

namespace {

ActivationReport activation_from_json(const json& j) {
  ActivationReport a{concept_from_json(j.at("concept")), {}, j.at("ws").get<double>(), std::nullopt};
  for (const auto& w : j.at("per_word")) {
    a.per_word.push_back({word_from_json(w.at("word")), w.at("template").get<std::string>(),
                          w.at("p").get<double>()});
  }
  if (j.contains("context")) {
    const auto& c = j.at("context");
    a.context = ContextRaise{c.at("related").get<double>(), c.at("neutral").get<double>(),
                             c.at("crr").get<double>(), c.at("degenerate").get<bool>()};
  }
  return a;
}

}  // namespace

json uc_to_json(const UcScore& u) {
  json per = json::array();
  for (const auto& [w, r] : u.per_word_ratios) per.push_back({{"word", w}, {"ratio", r}});
  return {{"anchor", concept_to_json(u.anchor)},
          {"target", concept_to_json(u.target)},
          {"value", u.value},
          {"per_word", per}};
}

namespace {

UcScore uc_from_json(const json& j) {
  UcScore u{concept_from_json(j.at("anchor")), concept_from_json(j.at("target")),
            j.at("value").get<double>(), {}};
  for (const auto& p : j.at("per_word")) {
    u.per_word_ratios.emplace_back(p.at("word").get<std::string>(), p.at("ratio").get<double>());
  }
  return u;
}

}  // namespace

json coherence_to_json(const CoherenceReport& c) {
  json per = json::array();
  for (const auto& p : c.per_prompt) {
    per.push_back({{"original", p.original},
                   {"substituted", p.substituted},
                   {"ppl_original", p.ppl_original},
                   {"ppl_substituted", p.ppl_substituted},
                   {"ratio", p.ratio}});
  }
  return {{"anchor", concept_to_json(c.anchor)}, {"per_prompt", per}, {"cos", c.cos}};
}

namespace {

CoherenceReport coherence_from_json(const json& j) {
  CoherenceReport c{concept_from_json(j.at("anchor")), {}, j.at("cos").get<double>()};
  for (const auto& p : j.at("per_prompt")) {
    c.per_prompt.push_back({p.at("original").get<std::string>(),
                            p.at("substituted").get<std::string>(),
                            p.at("ppl_original").get<double>(),
                            p.at("ppl_substituted").get<double>(), p.at("ratio").get<double>()});
  }
  return c;
}

json scored_to_json(const ScoredCandidate& s) {
  return {{"candidate", candidate_to_json(s.candidate)},
          {"activation", activation_to_json(s.activation)},
          {"uc", uc_to_json(s.uc)},
          {"coherence", s.coherence ? coherence_to_json(*s.coherence) : json(nullptr)}};
}

ScoredCandidate scored_from_json(const json& j) {
  ScoredCandidate s{candidate_from_json(j.at("candidate")), activation_from_json(j.at("activation")),
                    uc_from_json(j.at("uc")), std::nullopt};
  if (!j.at("coherence").is_null()) s.coherence = coherence_from_json(j.at("coherence"));
  return s;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

json concept_to_json(const Concept& c) {
  json j{{"name", c.name()}, {"category", to_string(c.category())}};
  if (c.parent()) j["parent"] = *c.parent();
  return j;
}

Concept concept_from_json(const json& j) {
  std::optional<std::string> parent;
  if (j.contains("parent")) parent = j.at("parent").get<std::string>();
  return Concept(j.at("name").get<std::string>(),
                 parse_category(j.at("category").get<std::string>()), parent);
}

json mining_result_to_json(const MiningResult& r) {
  json retain = json::array();
  for (const auto& c : r.retain_set) retain.push_back(concept_to_json(c));
  json words = json::array();
  for (const auto& w : r.related_words) words.push_back(word_to_json(w));
  json scores = json::array();
  for (const auto& s : r.all_scores) scores.push_back(scored_to_json(s));
  json rejected = json::array();
  for (const auto& c : r.rejected) rejected.push_back(candidate_to_json(c));
  return {{"target", concept_to_json(r.target)},
          {"optimal_anchor", concept_to_json(r.optimal_anchor)},
          {"retain_set", retain},
          {"target_activation", activation_to_json(r.target_activation)},
          {"related_words", words},
          {"templates", r.templates},
          {"all_scores", scores},
          {"rejected", rejected}};
}

MiningResult mining_result_from_json(const json& j) {
  MiningResult r{concept_from_json(j.at("target")),
                 concept_from_json(j.at("optimal_anchor")),
                 {},
                 activation_from_json(j.at("target_activation")),
                 {},
                 j.at("templates").get<std::vector<std::string>>(),
                 {},
                 {},
                 {}};
  for (const auto& c : j.at("retain_set")) r.retain_set.push_back(concept_from_json(c));
  for (const auto& w : j.at("related_words")) r.related_words.push_back(word_from_json(w));
  for (const auto& s : j.at("all_scores")) r.all_scores.push_back(scored_from_json(s));
  for (const auto& c : j.at("rejected")) r.rejected.push_back(candidate_from_json(c));
  return r;
}

std::string compute_run_id(const json& config, std::string_view backend_identity,
                           const Concept& target) {
  return sha256_hex(config.dump() + "\n" + std::string(backend_identity) + "\n" + target.key());
}

RunRecord make_run_record(json config, std::string backend_identity, MiningResult result,
                          CacheStats cache) {
  auto id = compute_run_id(config, backend_identity, result.target);
  return {std::move(id), std::move(config), std::move(backend_identity), std::move(result), cache};
}

std::string serialize_run_record(const RunRecord& r) {
  const json j{{"format_version", kFormatVersion},
               {"run_id", r.run_id},
               {"config", r.config},
               {"backend", r.backend_identity},
               {"result", mining_result_to_json(r.result)},
               {"cache", {{"hits", r.cache.hits}, {"misses", r.cache.misses}}}};
  return j.dump(2) + "\n";
}

RunRecord parse_run_record(std::string_view text) {
  try {
    const auto j = json::parse(text);
    if (j.at("format_version").get<int>() != kFormatVersion) {
      throw ParseError("unsupported run record version", 1);
    }
    return {j.at("run_id").get<std::string>(), j.at("config"), j.at("backend").get<std::string>(),
            mining_result_from_json(j.at("result")),
            {j.at("cache").at("hits").get<std::size_t>(), j.at("cache").at("misses").get<std::size_t>()}};
  } catch (const json::parse_error& e) {
    const auto upto = text.substr(0, std::min(e.byte, text.size()));
    const auto line = 1 + static_cast<std::size_t>(std::count(upto.begin(), upto.end(), '\n'));
    throw ParseError(std::string("invalid run record: ") + e.what(), line);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid run record: ") + e.what(), 1);
  }
}

void write_run_record_file(const RunRecord& r, const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  write_file_atomic(path, serialize_run_record(r));
}

std::filesystem::path write_run_record(const RunRecord& r, const std::filesystem::path& dir) {
  const auto path = dir / ("run-" + r.run_id.substr(0, 16) + ".json");
  write_run_record_file(r, path);
  return path;
}

std::filesystem::path write_run_meta(const std::filesystem::path& record_path,
                                     const std::vector<PhaseTiming>& timing) {
  json t = json::object();
  double total = 0.0;
  for (const auto& p : timing) {
    t[p.phase] = p.ms;
    total += p.ms;
  }
  auto path = record_path;
  path += ".meta.json";
  write_file_atomic(path, json{{"timestamp", utc_timestamp()}, {"timing_ms", t}, {"total_ms", total}}
                              .dump(2) + "\n");
  return path;
}

}  // namespace selectkit

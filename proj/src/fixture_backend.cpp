#include "selectkit/fixture_backend.hpp"

#include <fstream>

#include "selectkit/errors.hpp"
#include "selectkit/hashing.hpp"
#include "selectkit/text.hpp"

namespace selectkit {

namespace {

std::vector<std::string> needles(const nlohmann::json& j) {
  if (!j.contains("contains")) return {};
  const auto& c = j.at("contains");
  if (c.is_string()) return {c.get<std::string>()};
  return c.get<std::vector<std::string>>();
}

bool matches(std::string_view text, const std::vector<std::string>& contains) {
  const std::string lower = to_lower(text);
  for (const auto& n : contains) {
    if (lower.find(to_lower(n)) == std::string::npos) return false;
  }
  return true;
}

}  // namespace

FixtureBackend FixtureBackend::from_json(const nlohmann::json& doc) {
  FixtureBackend b;
  if (doc.contains("fill")) {
    for (const auto& r : doc.at("fill")) {
      b.add_fill(needles(r), r.at("word").get<std::string>(), r.at("p").get<double>());
    }
  }
  if (doc.contains("ppl")) {
    for (const auto& r : doc.at("ppl")) b.add_ppl(needles(r), r.at("value").get<double>());
  }
  if (doc.contains("completions")) {
    for (const auto& r : doc.at("completions")) {
      b.add_completion(needles(r), r.at("text").get<std::string>());
    }
  }
  if (doc.contains("default_fill")) b.set_default_fill(doc.at("default_fill").get<double>());
  if (doc.contains("default_ppl")) b.set_default_ppl(doc.at("default_ppl").get<double>());
  if (doc.contains("default_completion")) {
    b.set_default_completion(doc.at("default_completion").get<std::string>());
  }
  return b;
}

FixtureBackend FixtureBackend::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open fixture file: " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid fixture file " + path.string() + ": " + e.what());
  }
}

nlohmann::json FixtureBackend::to_json() const {
  nlohmann::json j;
  auto& fills = j["fill"] = nlohmann::json::array();
  for (const auto& r : fills_) fills.push_back({{"contains", r.contains}, {"word", r.word}, {"p", r.probability}});
  auto& ppls = j["ppl"] = nlohmann::json::array();
  for (const auto& r : ppls_) ppls.push_back({{"contains", r.contains}, {"value", r.value}});
  auto& comps = j["completions"] = nlohmann::json::array();
  for (const auto& r : completions_) comps.push_back({{"contains", r.contains}, {"text", r.text}});
  j["default_fill"] = default_fill_;
  j["default_ppl"] = default_ppl_;
  if (default_completion_) j["default_completion"] = *default_completion_;
  return j;
}

FixtureBackend& FixtureBackend::add_fill(std::vector<std::string> contains, std::string word,
                                         double p) {
  if (p < 0.0 || p > 1.0) throw PreconditionError("fixture fill probability outside [0,1]");
  fills_.push_back({std::move(contains), normalize_name(word), p});
  return *this;
}

FixtureBackend& FixtureBackend::add_ppl(std::vector<std::string> contains, double value) {
  if (value <= 0.0) throw PreconditionError("fixture perplexity must be positive");
  ppls_.push_back({std::move(contains), value});
  return *this;
}

FixtureBackend& FixtureBackend::add_completion(std::vector<std::string> contains,
                                               std::string text) {
  completions_.push_back({std::move(contains), std::move(text)});
  return *this;
}

FixtureBackend& FixtureBackend::set_default_fill(double p) {
  if (p < 0.0 || p > 1.0) throw PreconditionError("fixture fill probability outside [0,1]");
  default_fill_ = p;
  return *this;
}

FixtureBackend& FixtureBackend::set_default_ppl(double v) {
  if (v <= 0.0) throw PreconditionError("fixture perplexity must be positive");
  default_ppl_ = v;
  return *this;
}

FixtureBackend& FixtureBackend::set_default_completion(std::string text) {
  default_completion_ = std::move(text);
  return *this;
}

std::string FixtureBackend::identity() const {
  return "fixture:" + sha256_hex(to_json().dump()).substr(0, 16);
}

double FixtureBackend::mask_fill(std::string_view masked_text, std::string_view word) const {
  const std::string w = normalize_name(word);
  for (const auto& r : fills_) {
    if (r.word == w && matches(masked_text, r.contains)) return r.probability;
  }
  return default_fill_;
}

double FixtureBackend::sequence_perplexity(std::string_view text) const {
  for (const auto& r : ppls_) {
    if (matches(text, r.contains)) return r.value;
  }
  return default_ppl_;
}

std::string FixtureBackend::complete(std::string_view prompt) const {
  for (const auto& r : completions_) {
    if (matches(prompt, r.contains)) return r.text;
  }
  if (default_completion_) return *default_completion_;
  throw BackendError("fixture has no completion for prompt: " + std::string(prompt.substr(0, 80)), 1);
}

}  // namespace selectkit

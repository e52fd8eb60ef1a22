#include "selectkit/list_completer.hpp"

#include <cctype>
#include <set>
#include <sstream>

#include "selectkit/errors.hpp"
#include "selectkit/hashing.hpp"
#include "selectkit/io.hpp"
#include "selectkit/text.hpp"

namespace selectkit {

namespace {

const std::set<std::string, std::less<>>& stopwords() {
  static const std::set<std::string, std::less<>> kWords{
      "a",    "an",   "and",  "are", "as",   "at",   "be",   "by",   "for",  "from", "has",
      "have", "in",   "is",   "it",  "its",  "of",   "on",   "or",   "that", "the",  "their",
      "they", "this", "to",   "was", "were", "with", "when", "its",  "his",  "her",  "think",
      "people"};
  return kWords;
}

// Value of "<key>" lines such as `Target concept: "cat"`.
std::string field(std::string_view prompt, std::string_view key) {
  std::istringstream in{std::string(prompt)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(key, 0) == 0) {
      auto v = trim(std::string_view(line).substr(key.size()));
      if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
      return v;
    }
  }
  return {};
}

}  // namespace

ListCompleter::ListCompleter(std::optional<std::vector<std::string>> candidates,
                             std::optional<std::vector<std::string>> related_words,
                             std::shared_ptr<const NGramModel> model, std::size_t max_items,
                             std::shared_ptr<const ScoringBackend> fallback)
    : candidates_(std::move(candidates)),
      related_(std::move(related_words)),
      model_(std::move(model)),
      max_items_(max_items),
      fallback_(std::move(fallback)) {
  std::string id;
  if (candidates_) id += "c:" + join(*candidates_, "\n") + "\n";
  if (related_) id += "r:" + join(*related_, "\n") + "\n";
  if (model_) id += "m:" + model_->serialize();
  if (fallback_) id += "f:" + fallback_->identity();
  identity_ = "list:" + sha256_hex(id).substr(0, 16);
}

std::string ListCompleter::identity() const { return identity_; }

double ListCompleter::mask_fill(std::string_view, std::string_view) const {
  throw Error("list completer does not score mask fills");
}

double ListCompleter::sequence_perplexity(std::string_view) const {
  throw Error("list completer does not score perplexity");
}

std::string ListCompleter::complete(std::string_view prompt) const {
  const auto task = field(prompt, "Task:");
  const auto target = normalize_name(field(prompt, "Target concept:"));
  const auto n = max_items_;

  if (task == "sibling-candidates") {
    if (candidates_) return join(*candidates_, ", ");
    if (!model_ && fallback_) return fallback_->complete(prompt);
    if (!model_) throw BackendError("no candidate source", 1);
    const auto toks = tokenize(target);
    if (toks.empty()) throw BackendError("prompt has no target concept", 1);
    std::vector<std::string> out;
    for (const auto& [w, sim] : model_->distributional_neighbours(toks.back(), n + 4)) {
      if (stopwords().count(w) || w == toks.back()) continue;
      out.push_back(w);
      if (out.size() == n) break;
    }
    if (out.empty()) throw BackendError("corpus has no neighbours for \"" + target + "\"", 1);
    return join(out, ", ");
  }
  if (task == "related-words") {
    if (related_) return join(*related_, ", ");
    if (!model_ && fallback_) return fallback_->complete(prompt);
    if (!model_) throw BackendError("no related-word source", 1);
    const auto sentence = field(prompt, "Sentence:");
    if (sentence.empty()) throw BackendError("related-word prompt has no sentence", 1);
    const auto target_toks = tokenize(target);
    const std::set<std::string> skip(target_toks.begin(), target_toks.end());
    std::vector<std::string> out;
    for (const auto& [w, p] : model_->rank_fills(sentence)) {
      if (stopwords().count(w) || skip.count(w)) continue;
      out.push_back(w);
      if (out.size() == n) break;
    }
    if (out.empty()) throw BackendError("corpus gives no related words", 1);
    return join(out, ", ");
  }
  if (fallback_) return fallback_->complete(prompt);
  throw BackendError("list completer cannot answer task \"" + task + "\"", 1);
}

std::vector<std::string> read_list_file(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::vector<std::string> out;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    out.push_back(std::move(t));
  }
  if (out.empty()) throw PreconditionError("list file is empty: " + path);
  return out;
}

}  // namespace selectkit

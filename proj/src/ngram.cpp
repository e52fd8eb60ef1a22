#include "selectkit/ngram.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "selectkit/errors.hpp"
#include "selectkit/hashing.hpp"
#include "selectkit/text.hpp"

namespace selectkit {

namespace {

struct MaskSplit {
  std::vector<std::string> left;
  std::vector<std::string> right;
};

MaskSplit split_at_mask(std::string_view masked_text) {
  const auto pos = masked_text.find(kMaskToken);
  if (pos == std::string_view::npos) throw PreconditionError("masked text has no [MASK]");
  return {tokenize(masked_text.substr(0, pos)),
          tokenize(masked_text.substr(pos + kMaskToken.size()))};
}

}  // namespace

std::optional<NGramModel::Index> NGramModel::index_of(std::string_view token) const {
  const auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t NGramModel::unigram_count(std::string_view token) const {
  const auto i = index_of(token);
  return i ? unigrams_[*i] : 0;
}

std::uint64_t NGramModel::history_count(std::string_view history) const {
  const auto i = index_of(history);
  return i ? histories_[*i] : 0;
}

std::uint64_t NGramModel::bigram_count(std::string_view history, std::string_view next) const {
  const auto h = index_of(history);
  const auto n = index_of(next);
  if (!h || !n) return 0;
  const auto it = bigrams_.find({*h, *n});
  return it == bigrams_.end() ? 0 : it->second;
}

double NGramModel::unigram_probability(std::string_view token) const {
  return (static_cast<double>(unigram_count(token)) + 1.0) /
         (static_cast<double>(total_tokens_) + static_cast<double>(vocab_size()));
}

double NGramModel::conditional_probability(std::string_view token,
                                           std::string_view history) const {
  return (static_cast<double>(bigram_count(history, token)) + 1.0) /
         (static_cast<double>(history_count(history)) + static_cast<double>(vocab_size()));
}

double NGramModel::score_candidate(Index v, const std::string* left,
                                   const std::string* right) const {
  const auto& tok = vocab_[v];
  double s = left ? conditional_probability(tok, *left) : unigram_probability(tok);
  if (right) s *= conditional_probability(*right, tok);
  return s;
}

double NGramModel::masked_token_probability(std::string_view token, const std::string* left,
                                            const std::string* right) const {
  double z = 0.0;
  for (Index v = 0; v < vocab_.size(); ++v) z += score_candidate(v, left, right);
  double numer = 0.0;
  if (const auto i = index_of(token)) {
    numer = score_candidate(*i, left, right);
  } else {
    numer = left ? conditional_probability(token, *left) : unigram_probability(token);
    if (right) numer *= conditional_probability(*right, token);
    z += numer;
  }
  return numer / z;
}

double NGramModel::fill_probability(std::string_view masked_text, std::string_view word) const {
  const auto ctx = split_at_mask(masked_text);
  const auto tokens = tokenize(word);
  if (tokens.empty()) throw PreconditionError("fill word is empty");
  double log_sum = 0.0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string* left = i > 0 ? &tokens[i - 1] : (ctx.left.empty() ? nullptr : &ctx.left.back());
    const std::string* right =
        i + 1 < tokens.size() ? &tokens[i + 1] : (ctx.right.empty() ? nullptr : &ctx.right.front());
    log_sum += std::log(masked_token_probability(tokens[i], left, right));
  }
  return std::exp(log_sum / static_cast<double>(tokens.size()));
}

double NGramModel::perplexity(std::string_view text) const {
  const auto tokens = tokenize(text);
  if (tokens.empty()) throw PreconditionError("empty text");
  double log_sum = std::log(unigram_probability(tokens.front()));
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    log_sum += std::log(conditional_probability(tokens[i], tokens[i - 1]));
  }
  return std::exp(-log_sum / static_cast<double>(tokens.size()));
}

std::vector<std::pair<std::string, double>> NGramModel::rank_fills(
    std::string_view masked_text) const {
  const auto ctx = split_at_mask(masked_text);
  const std::string* left = ctx.left.empty() ? nullptr : &ctx.left.back();
  const std::string* right = ctx.right.empty() ? nullptr : &ctx.right.front();
  std::vector<double> scores(vocab_.size());
  double z = 0.0;
  for (Index v = 0; v < vocab_.size(); ++v) {
    scores[v] = score_candidate(v, left, right);
    z += scores[v];
  }
  std::vector<std::pair<std::string, double>> out;
  out.reserve(vocab_.size());
  for (Index v = 0; v < vocab_.size(); ++v) out.emplace_back(vocab_[v], scores[v] / z);
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

std::vector<std::pair<std::string, double>> NGramModel::distributional_neighbours(
    std::string_view word, std::size_t k) const {
  const auto target = index_of(word);
  if (!target) return {};
  // Feature j < |V|: left neighbour j; feature |V| + j: right neighbour j.
  std::vector<std::map<std::size_t, double>> features(vocab_.size());
  const std::size_t n = vocab_.size();
  for (const auto& [pair, count] : bigrams_) {
    features[pair.second][pair.first] += static_cast<double>(count);
    features[pair.first][n + pair.second] += static_cast<double>(count);
  }
  auto norm = [](const std::map<std::size_t, double>& f) {
    double s = 0.0;
    for (const auto& [unused, v] : f) s += v * v;
    return std::sqrt(s);
  };
  const auto& tf = features[*target];
  const double tn = norm(tf);
  std::vector<std::pair<std::string, double>> out;
  if (tn == 0.0) return out;
  for (Index v = 0; v < n; ++v) {
    if (v == *target) continue;
    double dot = 0.0;
    for (const auto& [j, x] : features[v]) {
      const auto it = tf.find(j);
      if (it != tf.end()) dot += x * it->second;
    }
    const double vn = norm(features[v]);
    if (dot > 0.0 && vn > 0.0) out.emplace_back(vocab_[v], dot / (tn * vn));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (out.size() > k) out.resize(k);
  return out;
}

std::string NGramModel::serialize() const {
  nlohmann::json j;
  j["vocabulary"] = vocab_;
  j["unigrams"] = unigrams_;
  j["tokens"] = total_tokens_;
  auto& bg = j["bigrams"] = nlohmann::json::array();
  for (const auto& [pair, count] : bigrams_) bg.push_back({pair.first, pair.second, count});
  return j.dump();
}

NGramModel NGramModel::deserialize(std::string_view json_text) {
  const auto j = nlohmann::json::parse(json_text);
  NGramModel m;
  m.vocab_ = j.at("vocabulary").get<std::vector<std::string>>();
  m.unigrams_ = j.at("unigrams").get<std::vector<std::uint64_t>>();
  m.total_tokens_ = j.at("tokens").get<std::uint64_t>();
  if (m.unigrams_.size() != m.vocab_.size()) throw ParseError("unigram/vocabulary size mismatch", 1);
  m.histories_.assign(m.vocab_.size(), 0);
  for (Index i = 0; i < m.vocab_.size(); ++i) m.index_[m.vocab_[i]] = i;
  for (const auto& e : j.at("bigrams")) {
    const auto h = e.at(0).get<Index>();
    const auto n = e.at(1).get<Index>();
    const auto c = e.at(2).get<std::uint64_t>();
    if (h >= m.vocab_.size() || n >= m.vocab_.size()) throw ParseError("bigram index out of range", 1);
    m.bigrams_[{h, n}] = c;
    m.histories_[h] += c;
  }
  return m;
}

NGramModel train_ngram(std::string_view corpus) {
  const auto tokens = tokenize(corpus);
  if (tokens.size() < 2) throw PreconditionError("corpus needs at least 2 tokens");
  NGramModel m;
  std::vector<std::string> sorted = tokens;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  m.vocab_ = std::move(sorted);
  for (NGramModel::Index i = 0; i < m.vocab_.size(); ++i) m.index_[m.vocab_[i]] = i;
  m.unigrams_.assign(m.vocab_.size(), 0);
  m.histories_.assign(m.vocab_.size(), 0);
  m.total_tokens_ = tokens.size();
  NGramModel::Index prev = 0;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const auto cur = m.index_.find(tokens[t])->second;
    ++m.unigrams_[cur];
    if (t > 0) {
      ++m.bigrams_[{prev, cur}];
      ++m.histories_[prev];
    }
    prev = cur;
  }
  return m;
}

NGramBackend::NGramBackend(std::shared_ptr<const NGramModel> model)
    : model_(std::move(model)),
      identity_("ngram:" + sha256_hex(model_->serialize()).substr(0, 16)) {}

std::string NGramBackend::identity() const { return identity_; }

double NGramBackend::mask_fill(std::string_view masked_text, std::string_view word) const {
  return model_->fill_probability(masked_text, word);
}

double NGramBackend::sequence_perplexity(std::string_view text) const {
  return model_->perplexity(text);
}

std::string NGramBackend::complete(std::string_view) const {
  throw Error("n-gram backend cannot complete prompts");
}

}  // namespace selectkit

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <thread>

#include "selectkit/errors.hpp"
#include "selectkit/fixture_backend.hpp"
#include "selectkit/io.hpp"
#include "selectkit/ngram.hpp"
#include "selectkit/remote_backend.hpp"
#include "selectkit/response_cache.hpp"
#include "support.hpp"

using namespace selectkit;
using selectkit::testkit::CountingTransport;
using selectkit::testkit::TempDir;
using selectkit::testkit::UniformMock;

namespace {

std::shared_ptr<const NGramModel> model_of(std::string_view corpus) {
  return std::make_shared<const NGramModel>(train_ngram(corpus));
}

RemoteBackendConfig test_config() {
  RemoteBackendConfig c;
  c.base_url = "http://scorer.invalid";
  c.api_key = "k";
  c.backoff_ms = 0;
  c.max_retries = 3;
  return c;
}

}  // namespace

// Corpus "the cat chases the mouse": history "the" is followed by cat and
// mouse, so p(w | the) = (c + 1) / (2 + 4). mouse: 2/6, piano (OOV): 1/6.
// Normalized over the vocabulary (plus the OOV word when scoring it):
// mouse 1/3, piano (1/6) / (7/6) = 1/7.
TEST(NGram, FillPrefersCorpusCollocation) {
  NGramBackend b(model_of("the cat chases the mouse"));
  MaskTemplate t("the {C} chases the [MASK].");
  const double mouse = fill_probability(b, t, Concept("cat"), "mouse");
  const double piano = fill_probability(b, t, Concept("cat"), "piano");
  EXPECT_NEAR(mouse, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(piano, 1.0 / 7.0, 1e-12);
  EXPECT_GT(mouse, piano);
}

TEST(NGram, EmptyWordRejected) {
  NGramBackend b(model_of("the cat chases the mouse"));
  MaskTemplate t("the {C} chases the [MASK].");
  EXPECT_THROW(fill_probability(b, t, Concept("cat"), ""), PreconditionError);
  EXPECT_THROW(fill_probability(b, t, Concept("cat"), " ,. "), PreconditionError);
}

// "a b a b a b": N = 6, |V| = 2. p(a) = 4/8, p(b | a) = (3 + 1) / (3 + 2).
TEST(NGram, PerplexityMatchesHandValue) {
  NGramBackend b(model_of("a b a b a b"));
  const double hand = std::exp(-(std::log(0.5) + std::log(0.8)) / 2.0);
  EXPECT_NEAR(hand, 1.58113883, 1e-8);
  EXPECT_NEAR(perplexity(b, "a b"), hand, 1e-9);
}

TEST(NGram, SelfLoopCorpus) {
  auto m = train_ngram("cat cat");
  EXPECT_EQ(m.vocab_size(), 1u);
  EXPECT_DOUBLE_EQ(m.conditional_probability("cat", "cat"), 1.0);
}

TEST(NGram, MinimalCorpusCounts) {
  auto m = train_ngram("a b");
  EXPECT_EQ(m.vocabulary(), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(m.bigram_count("a", "b"), 1u);
  EXPECT_EQ(m.bigram_count("b", "a"), 0u);
}

TEST(NGram, TooShortCorpusRejected) {
  EXPECT_THROW(train_ngram("word"), PreconditionError);
  EXPECT_THROW(train_ngram(""), PreconditionError);
}

TEST(NGram, SerializationIsDeterministicAndRoundTrips) {
  const std::string corpus = read_file(testkit::fixture_path("toy_corpus.txt"));
  const auto a = train_ngram(corpus).serialize();
  const auto b = train_ngram(corpus).serialize();
  EXPECT_EQ(a, b);
  EXPECT_EQ(NGramModel::deserialize(a).serialize(), a);
}

TEST(NGram, ConditionalRowsSumToOne) {
  auto m = train_ngram(read_file(testkit::fixture_path("toy_corpus.txt")));
  for (const auto& h : m.vocabulary()) {
    double s = 0.0;
    for (const auto& w : m.vocabulary()) s += m.conditional_probability(w, h);
    EXPECT_NEAR(s, 1.0, 1e-9) << h;
  }
}

TEST(NGram, CaseAndWhitespaceInvariance) {
  NGramBackend b(model_of(read_file(testkit::fixture_path("toy_corpus.txt"))));
  EXPECT_DOUBLE_EQ(perplexity(b, "the cat chases the mouse"),
                   perplexity(b, "  The   CAT chases\tthe Mouse "));
  EXPECT_DOUBLE_EQ(fill_masked(b, "the cat chases the [MASK]", "mouse"),
                   fill_masked(b, "The  Cat chases THE [MASK]", "Mouse"));
}

TEST(NGram, OutOfVocabularyGetsFloorNotError) {
  NGramBackend b(model_of("the cat chases the mouse"));
  const double p = fill_masked(b, "the cat chases the [MASK]", "xylophone");
  EXPECT_GT(p, 0.0);
  EXPECT_LT(p, 1.0);
  EXPECT_GT(perplexity(b, "zebra quartz"), 0.0);
}

TEST(NGram, EmptyTextPerplexityIsError) {
  NGramBackend b(model_of("a b a b"));
  EXPECT_THROW(perplexity(b, " . "), PreconditionError);
}

TEST(NGram, CompleteIsUnsupported) {
  NGramBackend b(model_of("a b a b"));
  EXPECT_THROW(b.complete("hello"), Error);
}

TEST(UniformBackend, FillIsOneTenth) {
  UniformMock b(10);
  EXPECT_DOUBLE_EQ(fill_probability(b, MaskTemplate("a {C} has [MASK]"), Concept("cat"), "fur"), 0.1);
  EXPECT_DOUBLE_EQ(perplexity(b, "one two three four five"), 10.0);
}

TEST(FixtureBackend, CannedReadback) {
  FixtureBackend b;
  b.add_completion({"task: related-words", "blood"}, "taste, food");
  b.add_fill({"sap"}, "taste", 0.011);
  b.add_ppl({"the cat"}, 12.5);
  EXPECT_EQ(complete(b, "Task: related-words\nTarget: Blood"), "taste, food");
  EXPECT_DOUBLE_EQ(fill_masked(b, "A sap is [MASK].", "Taste"), 0.011);
  EXPECT_DOUBLE_EQ(fill_masked(b, "A sap is [MASK].", "color"), 1e-4);
  EXPECT_DOUBLE_EQ(perplexity(b, "The cat sat"), 12.5);
  EXPECT_DOUBLE_EQ(perplexity(b, "a dog sat"), 10.0);
  EXPECT_THROW(complete(b, "unmatched"), Error);
}

TEST(FixtureBackend, JsonRoundTripKeepsIdentity) {
  auto b = FixtureBackend::load(testkit::fixture_path("blood_fixture.json"));
  auto again = FixtureBackend::from_json(b.to_json());
  EXPECT_EQ(b.identity(), again.identity());
  EXPECT_EQ(b.identity().rfind("fixture:", 0), 0u);
}

TEST(RemoteBackend, RetriesAfterServerError) {
  auto t = std::make_shared<CountingTransport>();
  t->script({500, "busy"});
  t->script({200, R"({"ok":true,"value":0.4})"});
  RemoteBackend b(test_config(), t, std::make_shared<ResponseCache>());
  EXPECT_DOUBLE_EQ(b.mask_fill("a [MASK]", "cat"), 0.4);
  EXPECT_EQ(b.last_retry_count(), 1);
  EXPECT_EQ(t->calls.load(), 2);
}

TEST(RemoteBackend, ExhaustionCarriesAttemptCount) {
  auto t = std::make_shared<CountingTransport>();
  t->steady = {503, "down"};
  RemoteBackend b(test_config(), t, std::make_shared<ResponseCache>());
  try {
    b.sequence_perplexity("a b");
    FAIL() << "expected BackendError";
  } catch (const BackendError& e) {
    EXPECT_EQ(e.attempts(), 4);
    EXPECT_NE(std::string(e.what()).find("4 attempt"), std::string::npos);
  }
  EXPECT_EQ(t->calls.load(), 4);
}

TEST(RemoteBackend, SecondRunServedFromCache) {
  TempDir dir("remote-cache");
  auto t = std::make_shared<CountingTransport>();
  {
    RemoteBackend b(test_config(), t, std::make_shared<ResponseCache>(dir.path()));
    b.mask_fill("a [MASK]", "cat");
    b.mask_fill("a [MASK]", "cat");
    EXPECT_EQ(b.network_calls(), 1u);
  }
  const int before = t->calls.load();
  RemoteBackend again(test_config(), t, std::make_shared<ResponseCache>(dir.path()));
  EXPECT_DOUBLE_EQ(again.mask_fill("a [MASK]", "cat"), 0.25);
  EXPECT_EQ(again.network_calls(), 0u);
  EXPECT_EQ(t->calls.load(), before);
}

TEST(RemoteBackend, ConcurrentIdenticalRequestsShareOneCall) {
  auto t = std::make_shared<CountingTransport>();
  RemoteBackend b(test_config(), t, std::make_shared<ResponseCache>());
  std::vector<std::thread> pool;
  for (int i = 0; i < 8; ++i) pool.emplace_back([&] { b.sequence_perplexity("x y z"); });
  for (auto& th : pool) th.join();
  EXPECT_EQ(t->calls.load(), 1);
}

TEST(RemoteBackend, ErrorPayloadIsNotCached) {
  auto t = std::make_shared<CountingTransport>();
  t->script({200, R"({"ok":false,"error":"overloaded"})"});
  RemoteBackend b(test_config(), t, std::make_shared<ResponseCache>());
  EXPECT_THROW(b.mask_fill("a [MASK]", "cat"), BackendError);
  EXPECT_DOUBLE_EQ(b.mask_fill("a [MASK]", "cat"), 0.25);
}

TEST(RemoteBackend, PayloadIsCanonicalJson) {
  const auto p = RemoteBackend::make_payload("fill", "m", "a [MASK]", std::string_view("cat"));
  const auto j = nlohmann::json::parse(p);
  EXPECT_EQ(j.at("mode"), "fill");
  EXPECT_EQ(j.at("word"), "cat");
  EXPECT_EQ(p, RemoteBackend::make_payload("fill", "m", "a [MASK]", std::string_view("cat")));
}

TEST(ResponseCache, PutThenGet) {
  ResponseCache c;
  const auto k = ResponseCache::make_key("b", "payload");
  EXPECT_FALSE(c.get(k).has_value());
  c.put(k, "v1");
  EXPECT_EQ(c.get(k).value(), "v1");
  EXPECT_EQ(c.hits(), 1u);
  EXPECT_EQ(c.misses(), 1u);
}

TEST(ResponseCache, WriteOnceConflict) {
  ResponseCache c;
  const auto k = ResponseCache::make_key("b", "payload");
  c.put(k, "v1");
  EXPECT_NO_THROW(c.put(k, "v1"));
  EXPECT_THROW(c.put(k, "v2"), CacheConflict);
}

TEST(ResponseCache, PersistsAcrossInstances) {
  TempDir dir("cache");
  const auto k = ResponseCache::make_key("b", "p");
  ResponseCache(dir.path()).put(k, "stored");
  ResponseCache fresh(dir.path());
  EXPECT_EQ(fresh.get(k).value(), "stored");
  EXPECT_THROW(fresh.put(k, "other"), CacheConflict);
}

TEST(ResponseCache, CorruptEntryIsReported) {
  TempDir dir("cache-corrupt");
  const auto k = ResponseCache::make_key("b", "p");
  ResponseCache(dir.path()).put(k, "stored");
  const auto file = dir.path() / (k + ".json");
  ASSERT_TRUE(std::filesystem::exists(file));
  auto doc = nlohmann::json::parse(read_file(file));
  doc["value"] = "tampered";
  std::ofstream(file, std::ios::trunc) << doc.dump();
  EXPECT_THROW(ResponseCache(dir.path()).get(k), CorruptCacheEntry);
}

TEST(ResponseCache, MalformedKeyRejected) {
  ResponseCache c;
  EXPECT_THROW(c.put("../escape", "v"), PreconditionError);
}

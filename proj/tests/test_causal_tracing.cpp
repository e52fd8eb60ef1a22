#include <gtest/gtest.h>

#include <set>

#include "selectkit/causal_tracing.hpp"
#include "selectkit/errors.hpp"

using namespace selectkit;

namespace {

const std::vector<std::string> kPrompts{"a photo of a cat", "a cat on a sofa", "the cat sleeps"};

ContributionVector trace_planted(int layers, const std::set<int>& planted, std::uint64_t seed,
                                 int threads = 1) {
  auto m = make_planted_model(layers, planted, seed);
  return trace_layers(m.base, m.edited, m.scorer, Concept("cat"), kPrompts, threads);
}

}  // namespace

TEST(Normalize, LinearScaling) {
  EXPECT_EQ(normalize_contributions({1, 3, 5}), (std::vector<double>{0, 0.5, 1}));
  EXPECT_EQ(normalize_contributions({-1, 0, 1}), (std::vector<double>{0, 0.5, 1}));
}

TEST(Normalize, ConstantIsZero) {
  EXPECT_EQ(normalize_contributions({2, 2, 2}), (std::vector<double>{0, 0, 0}));
  EXPECT_THROW(normalize_contributions({}), PreconditionError);
}

TEST(Trace, IdenticalModelsGiveZeroDeltas) {
  auto m = make_planted_model(6, {}, 3);
  auto c = trace_layers(m.base, m.base, m.scorer, Concept("cat"), kPrompts);
  for (const auto& l : c.per_layer) EXPECT_EQ(l.raw, 0.0);
}

TEST(Trace, PlantedLayerThreeIsArgmax) {
  auto c = trace_planted(8, {3}, 7);
  ASSERT_EQ(c.per_layer.size(), 8u);
  EXPECT_EQ(c.argmax(), 3u);
  EXPECT_DOUBLE_EQ(c.per_layer[3].normalized, 1.0);
}

TEST(Trace, NothingPlantedGivesZeros) {
  auto c = trace_planted(8, {}, 7);
  for (const auto& l : c.per_layer) {
    EXPECT_EQ(l.raw, 0.0);
    EXPECT_EQ(l.normalized, 0.0);
  }
}

TEST(Trace, TwoPlantedLayersAreTopTwo) {
  auto c = trace_planted(8, {2, 5}, 7);
  auto top = c.top_k(2);
  EXPECT_EQ(std::set<std::size_t>(top.begin(), top.end()), (std::set<std::size_t>{2, 5}));
}

TEST(Trace, SingleLayerModel) {
  auto c = trace_planted(1, {0}, 2);
  ASSERT_EQ(c.per_layer.size(), 1u);
  EXPECT_GT(c.per_layer[0].raw, 0.0);
  EXPECT_EQ(c.per_layer[0].normalized, 0.0);
}

TEST(Trace, ThreadedMatchesSerial) {
  auto a = trace_planted(12, {4, 9}, 5, 1);
  auto b = trace_planted(12, {4, 9}, 5, 4);
  for (std::size_t i = 0; i < a.per_layer.size(); ++i) {
    EXPECT_EQ(a.per_layer[i].raw, b.per_layer[i].raw);
  }
}

TEST(Trace, IncompatibleModelsNameTheLayer) {
  auto a = make_planted_model(4, {1}, 1);
  auto b = make_planted_model(4, {1}, 1);
  b.edited.layers[2].params.conservativeResize(3);
  try {
    check_compatible(a.base, b.edited);
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find(a.base.layers[2].name), std::string::npos);
  }
  b.edited.layers.pop_back();
  EXPECT_THROW(trace_layers(a.base, b.edited, a.scorer, Concept("cat"), kPrompts),
               PreconditionError);
}

TEST(Trace, EmptyPromptsRejected) {
  auto m = make_planted_model(3, {1}, 1);
  EXPECT_THROW(trace_layers(m.base, m.edited, m.scorer, Concept("cat"), {}), PreconditionError);
}

TEST(Trace, BadPlantIndexRejected) {
  EXPECT_THROW(make_planted_model(4, {4}, 1), PreconditionError);
  EXPECT_THROW(make_planted_model(0, {}, 1), PreconditionError);
}

TEST(Trace, LayersJsonRoundTrip) {
  auto m = make_planted_model(3, {1}, 9, 4);
  auto back = layers_from_json(layers_to_json(m.edited.layers));
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].name, m.edited.layers[i].name);
    EXPECT_EQ(back[i].params, m.edited.layers[i].params);
  }
  EXPECT_EQ(residual_linear_dim(back), 4);
}

TEST(Trace, HeatmapCsv) {
  auto c = trace_planted(3, {1}, 9);
  auto csv = heatmap_csv({{"cat", c}});
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "concept," + c.per_layer[0].layer + "," +
                                               c.per_layer[1].layer + "," + c.per_layer[2].layer);
  EXPECT_NE(csv.find("\ncat,0"), std::string::npos);
}

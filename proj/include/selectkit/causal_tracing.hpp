#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "selectkit/concept.hpp"

namespace selectkit {

struct LayerBlock {
  std::string name;
  Eigen::VectorXd params;
};

// Named parameter blocks plus a deterministic forward pass.
struct LayeredModel {
  using Forward =
      std::function<Eigen::VectorXd(const std::vector<LayerBlock>&, std::string_view prompt)>;

  std::vector<LayerBlock> layers;
  Forward forward;

  Eigen::VectorXd run(std::string_view prompt) const { return forward(layers, prompt); }
};

using ConceptScorer = std::function<double(const Eigen::VectorXd& features, const Concept&)>;

struct LayerContribution {
  std::string layer;
  double raw = 0.0;
  double normalized = 0.0;
};

struct ContributionVector {
  std::vector<LayerContribution> per_layer;

  std::size_t argmax() const;
  // Indices of the k largest raw deltas (ties go to the lower index).
  std::vector<std::size_t> top_k(std::size_t k) const;
};

// Throws PreconditionError naming the first layer whose name or shape differs.
void check_compatible(const LayeredModel& a, const LayeredModel& b);

// For each layer k, swaps layer k of `edited` into `base` and records the
// mean over prompts of score(base) - score(hybrid).
ContributionVector trace_layers(const LayeredModel& base, const LayeredModel& edited,
                                const ConceptScorer& scorer, const Concept& subject,
                                const std::vector<std::string>& prompts, int threads = 1);

// Min-max scaling to [0, 1]; constant input maps to all zeros.
std::vector<double> normalize_contributions(const std::vector<double>& raw);

// Residual linear stack over `dim` features: x <- x + A_k x + b_k, where each
// block holds A_k (row-major, dim*dim) followed by b_k (dim). The input is
// hash_unit_vector(prompt, dim, seed).
LayeredModel::Forward residual_linear_forward(int dim, std::uint64_t seed);

// Infers dim from the first block size (dim*dim + dim).
int residual_linear_dim(const std::vector<LayerBlock>& layers);

// Scores features by their dot product with a fixed direction.
ConceptScorer direction_scorer(const Eigen::VectorXd& direction);

struct PlantedModel {
  LayeredModel base;
  LayeredModel edited;
  ConceptScorer scorer;
  Eigen::VectorXd direction;
};

// Residual linear model where only the planted layers differ between base
// and edited: their bias moves against the concept direction. Layer matrices
// have spectral norm at most 0.02, so every planted layer keeps a strictly
// positive delta and every other layer has delta exactly 0.
PlantedModel make_planted_model(int num_layers, const std::set<int>& planted, std::uint64_t seed,
                                int dim = 16);

// {"layers": [{"name": ..., "params": [...]}, ...]}
std::vector<LayerBlock> layers_from_json(const nlohmann::json& j);
nlohmann::json layers_to_json(const std::vector<LayerBlock>& layers);
std::vector<LayerBlock> read_layers(const std::filesystem::path& path);

struct HeatmapRow {
  std::string subject;
  ContributionVector contributions;
};

// Concept rows, layer columns, normalized values.
std::string heatmap_csv(const std::vector<HeatmapRow>& rows);

}  // namespace selectkit

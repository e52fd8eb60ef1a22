#include "selectkit/causal_tracing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "selectkit/embeddings.hpp"
#include "selectkit/errors.hpp"
#include "selectkit/io.hpp"

namespace selectkit {

std::size_t ContributionVector::argmax() const {
  if (per_layer.empty()) throw PreconditionError("empty contribution vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < per_layer.size(); ++i) {
    if (per_layer[i].raw > per_layer[best].raw) best = i;
  }
  return best;
}

std::vector<std::size_t> ContributionVector::top_k(std::size_t k) const {
  std::vector<std::size_t> idx(per_layer.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return per_layer[a].raw > per_layer[b].raw; });
  idx.resize(std::min(k, idx.size()));
  return idx;
}

void check_compatible(const LayeredModel& a, const LayeredModel& b) {
  if (a.layers.size() != b.layers.size()) {
    throw PreconditionError("models have " + std::to_string(a.layers.size()) + " and " +
                            std::to_string(b.layers.size()) + " layers");
  }
  for (std::size_t i = 0; i < a.layers.size(); ++i) {
    const auto& x = a.layers[i];
    const auto& y = b.layers[i];
    if (x.name != y.name) {
      throw PreconditionError("layer " + std::to_string(i) + " name mismatch: " + x.name + " vs " +
                              y.name);
    }
    if (x.params.size() != y.params.size()) {
      throw PreconditionError("layer " + x.name + " shape mismatch: " +
                              std::to_string(x.params.size()) + " vs " +
                              std::to_string(y.params.size()));
    }
  }
}

std::vector<double> normalize_contributions(const std::vector<double>& raw) {
  if (raw.empty()) throw PreconditionError("cannot normalize an empty list");
  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  const double span = *hi - *lo;
  std::vector<double> out(raw.size(), 0.0);
  if (span <= 0.0) return out;
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = (raw[i] - *lo) / span;
  return out;
}

ContributionVector trace_layers(const LayeredModel& base, const LayeredModel& edited,
                                const ConceptScorer& scorer, const Concept& subject,
                                const std::vector<std::string>& prompts, int threads) {
  check_compatible(base, edited);
  if (prompts.empty()) throw PreconditionError("tracing needs at least one prompt");
  if (base.layers.empty()) throw PreconditionError("model has no layers");
  if (!base.forward || !scorer) throw PreconditionError("model forward and scorer are required");

  std::vector<double> base_scores;
  for (const auto& p : prompts) base_scores.push_back(scorer(base.run(p), subject));

  const std::size_t n = base.layers.size();
  std::vector<double> raw(n, 0.0);
  auto trace_one = [&](std::size_t k) {
    if (base.layers[k].params == edited.layers[k].params) return;  // hybrid == base
    auto hybrid = base.layers;
    hybrid[k].params = edited.layers[k].params;
    std::vector<double> diffs;
    for (std::size_t i = 0; i < prompts.size(); ++i) {
      diffs.push_back(base_scores[i] - scorer(base.forward(hybrid, prompts[i]), subject));
    }
    // Sorted summation keeps the mean independent of prompt order.
    std::sort(diffs.begin(), diffs.end());
    raw[k] = std::accumulate(diffs.begin(), diffs.end(), 0.0) / static_cast<double>(diffs.size());
  };
  const auto workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t k = 0; k < n; ++k) trace_one(k);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < n; k += workers) trace_one(k);
      });
    }
    for (auto& t : pool) t.join();
  }

  const auto norm = normalize_contributions(raw);
  ContributionVector out;
  for (std::size_t k = 0; k < n; ++k) out.per_layer.push_back({base.layers[k].name, raw[k], norm[k]});
  return out;
}

int residual_linear_dim(const std::vector<LayerBlock>& layers) {
  if (layers.empty()) throw PreconditionError("model has no layers");
  const auto size = layers.front().params.size();
  const int d = static_cast<int>(std::lround((-1.0 + std::sqrt(1.0 + 4.0 * static_cast<double>(size))) / 2.0));
  if (d < 1 || static_cast<Eigen::Index>(d) * d + d != size) {
    throw PreconditionError("layer " + layers.front().name + " has " + std::to_string(size) +
                            " parameters, not dim*dim + dim");
  }
  for (const auto& l : layers) {
    if (l.params.size() != size) {
      throw PreconditionError("layer " + l.name + " shape differs from the first layer");
    }
  }
  return d;
}

LayeredModel::Forward residual_linear_forward(int dim, std::uint64_t seed) {
  if (dim < 1) throw PreconditionError("dim must be >= 1");
  return [dim, seed](const std::vector<LayerBlock>& layers, std::string_view prompt) {
    Eigen::VectorXd x = hash_unit_vector(prompt, dim, seed);
    const Eigen::Index dd = static_cast<Eigen::Index>(dim) * dim;
    for (const auto& l : layers) {
      if (l.params.size() != dd + dim) {
        throw PreconditionError("layer " + l.name + " does not fit dim " + std::to_string(dim));
      }
      const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
          A(l.params.data(), dim, dim);
      const Eigen::VectorXd step = A * x + l.params.segment(dd, dim);
      x += step;
    }
    return x;
  };
}

ConceptScorer direction_scorer(const Eigen::VectorXd& direction) {
  return [direction](const Eigen::VectorXd& features, const Concept&) {
    if (features.size() != direction.size()) {
      throw PreconditionError("feature size does not match the concept direction");
    }
    return features.dot(direction);
  };
}

PlantedModel make_planted_model(int num_layers, const std::set<int>& planted, std::uint64_t seed,
                                int dim) {
  if (num_layers < 1) throw PreconditionError("num_layers must be >= 1");
  if (dim < 1) throw PreconditionError("dim must be >= 1");
  for (int k : planted) {
    if (k < 0 || k >= num_layers) {
      throw PreconditionError("planted layer " + std::to_string(k) + " outside [0, " +
                              std::to_string(num_layers) + ")");
    }
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::uniform_real_distribution<double> strength(1.0, 2.0);

  PlantedModel m;
  m.direction = hash_unit_vector("planted-concept", dim, seed);
  const Eigen::Index dd = static_cast<Eigen::Index>(dim) * dim;
  for (int k = 0; k < num_layers; ++k) {
    Eigen::VectorXd p(dd + dim);
    for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = unif(rng);
    // Frobenius norm bounds the spectral norm.
    const double fro = p.head(dd).norm();
    if (fro > 0.0) p.head(dd) *= 0.02 / fro;
    m.base.layers.push_back({"layer" + std::to_string(k), p});
  }
  m.edited.layers = m.base.layers;
  for (int k : planted) {
    m.edited.layers[static_cast<std::size_t>(k)].params.segment(dd, dim) -= strength(rng) * m.direction;
  }
  m.base.forward = residual_linear_forward(dim, seed);
  m.edited.forward = m.base.forward;
  m.scorer = direction_scorer(m.direction);
  return m;
}

std::vector<LayerBlock> layers_from_json(const nlohmann::json& j) {
  std::vector<LayerBlock> out;
  for (const auto& l : j.at("layers")) {
    const auto vals = l.at("params").get<std::vector<double>>();
    out.push_back({l.at("name").get<std::string>(),
                   Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()))});
  }
  return out;
}

nlohmann::json layers_to_json(const std::vector<LayerBlock>& layers) {
  auto arr = nlohmann::json::array();
  for (const auto& l : layers) {
    arr.push_back({{"name", l.name},
                   {"params", std::vector<double>(l.params.data(), l.params.data() + l.params.size())}});
  }
  return {{"layers", arr}};
}

std::vector<LayerBlock> read_layers(const std::filesystem::path& path) {
  try {
    return layers_from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid model file " + path.string() + ": " + e.what());
  }
}

std::string heatmap_csv(const std::vector<HeatmapRow>& rows) {
  std::ostringstream out;
  out.precision(6);
  out << "concept";
  if (!rows.empty()) {
    for (const auto& l : rows.front().contributions.per_layer) out << ',' << l.layer;
  }
  out << '\n';
  for (const auto& r : rows) {
    out << r.subject;
    for (const auto& l : r.contributions.per_layer) out << ',' << std::fixed << l.normalized;
    out << '\n';
  }
  return out.str();
}

}  // namespace selectkit

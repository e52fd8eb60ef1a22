#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "selectkit/concept.hpp"

namespace selectkit {

// Unit-norm standard-normal vector seeded from fnv1a64(text) ^ seed.
Eigen::VectorXd hash_unit_vector(std::string_view text, int dim, std::uint64_t seed);

// rows x cols of independent standard normals from a fixed seed; same
// generator as hash_unit_vector.
Eigen::MatrixXd random_normal_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed);

// Concept embeddings, either read from a file or synthesized from a hash of
// the normalized concept name.
class EmbeddingProvider {
 public:
  enum class Mode { file, hash_synthetic };

  static EmbeddingProvider hash_synthetic(int dim, std::uint64_t seed = 0);
  // JSON object: concept name -> array of d_in numbers.
  static EmbeddingProvider from_file(const std::filesystem::path& path);
  static EmbeddingProvider from_json(const nlohmann::json& doc);

  Mode mode() const noexcept { return mode_; }
  int dimension() const noexcept { return dim_; }

  Eigen::VectorXd embed(const Concept& c) const;
  // d_in x n, one column per concept.
  Eigen::MatrixXd stack(const std::vector<Concept>& concepts) const;

 private:
  Mode mode_ = Mode::hash_synthetic;
  int dim_ = 0;
  std::uint64_t seed_ = 0;
  std::map<std::string, Eigen::VectorXd> table_;
};

// Matrix files: {"rows": r, "cols": c, "data": [row-major numbers]}.
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m);

}  // namespace selectkit

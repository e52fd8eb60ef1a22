#include "selectkit/embeddings.hpp"

#include <cmath>
#include <random>

#include "selectkit/errors.hpp"
#include "selectkit/hashing.hpp"
#include "selectkit/io.hpp"
#include "selectkit/text.hpp"

namespace selectkit {

namespace {

// Box-Muller by hand: std::normal_distribution output differs across
// standard libraries and these values must be portable.
Eigen::VectorXd normals(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  constexpr double kTwoPi = 6.283185307179586476925;
  auto uniform = [&rng] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; i += 2) {
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double t = kTwoPi * uniform();
    v(i) = r * std::cos(t);
    if (i + 1 < n) v(i + 1) = r * std::sin(t);
  }
  return v;
}

}  // namespace

Eigen::VectorXd hash_unit_vector(std::string_view text, int dim, std::uint64_t seed) {
  if (dim < 1) throw PreconditionError("embedding dimension must be >= 1");
  const Eigen::VectorXd v = normals(dim, fnv1a64(text) ^ seed);
  return v / v.norm();
}

Eigen::MatrixXd random_normal_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  if (rows < 0 || cols < 0) throw PreconditionError("negative matrix size");
  const Eigen::VectorXd v = normals(rows * cols, seed);
  return Eigen::Map<const Eigen::MatrixXd>(v.data(), rows, cols);
}

EmbeddingProvider EmbeddingProvider::hash_synthetic(int dim, std::uint64_t seed) {
  if (dim < 1) throw PreconditionError("embedding dimension must be >= 1");
  EmbeddingProvider p;
  p.mode_ = Mode::hash_synthetic;
  p.dim_ = dim;
  p.seed_ = seed;
  return p;
}

EmbeddingProvider EmbeddingProvider::from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || doc.empty()) {
    throw PreconditionError("embedding file must be a non-empty object of name -> vector");
  }
  EmbeddingProvider p;
  p.mode_ = Mode::file;
  for (const auto& [name, arr] : doc.items()) {
    const auto vals = arr.get<std::vector<double>>();
    if (p.dim_ == 0) p.dim_ = static_cast<int>(vals.size());
    if (vals.empty() || static_cast<int>(vals.size()) != p.dim_) {
      throw PreconditionError("embedding for \"" + name + "\" has length " +
                              std::to_string(vals.size()) + ", expected " + std::to_string(p.dim_));
    }
    p.table_[normalize_name(name)] = Eigen::Map<const Eigen::VectorXd>(vals.data(), p.dim_);
  }
  return p;
}

EmbeddingProvider EmbeddingProvider::from_file(const std::filesystem::path& path) {
  try {
    return from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid embedding file " + path.string() + ": " + e.what());
  }
}

Eigen::VectorXd EmbeddingProvider::embed(const Concept& c) const {
  if (mode_ == Mode::hash_synthetic) return hash_unit_vector(c.key(), dim_, seed_);
  const auto it = table_.find(c.key());
  if (it == table_.end()) throw PreconditionError("no embedding for concept: " + c.name());
  return it->second;
}

Eigen::MatrixXd EmbeddingProvider::stack(const std::vector<Concept>& concepts) const {
  Eigen::MatrixXd m(dim_, static_cast<Eigen::Index>(concepts.size()));
  for (std::size_t i = 0; i < concepts.size(); ++i) {
    m.col(static_cast<Eigen::Index>(i)) = embed(concepts[i]);
  }
  return m;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const auto rows = j.at("rows").get<long>();
  const auto cols = j.at("cols").get<long>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (rows < 0 || cols < 0 || static_cast<std::size_t>(rows * cols) != data.size()) {
    throw PreconditionError("matrix data has " + std::to_string(data.size()) + " entries, expected " +
                            std::to_string(rows) + "x" + std::to_string(cols));
  }
  Eigen::MatrixXd m(rows, cols);
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) m(r, c) = data[static_cast<std::size_t>(r * cols + c)];
  }
  return m;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& path) {
  try {
    return matrix_from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid matrix file " + path.string() + ": " + e.what());
  }
}

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  write_file_atomic(path, matrix_to_json(m).dump() + "\n");
}

}  // namespace selectkit

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "selectkit/selection.hpp"

namespace selectkit {

struct CacheStats {
  std::size_t hits = 0;
  std::size_t misses = 0;
};

// Everything needed to reproduce or diff a mining run. Timing and the
// wall-clock timestamp live in a sidecar file so that identical runs give
// byte-identical records.
struct RunRecord {
  std::string run_id;
  nlohmann::json config;
  std::string backend_identity;
  MiningResult result;
  CacheStats cache;
};

// sha256 over the canonical config, backend identity and target key.
std::string compute_run_id(const nlohmann::json& config, std::string_view backend_identity,
                           const Concept& target);

RunRecord make_run_record(nlohmann::json config, std::string backend_identity, MiningResult result,
                          CacheStats cache = {});

nlohmann::json concept_to_json(const Concept& c);
Concept concept_from_json(const nlohmann::json& j);
nlohmann::json activation_to_json(const ActivationReport& a);
nlohmann::json uc_to_json(const UcScore& u);
nlohmann::json coherence_to_json(const CoherenceReport& c);
nlohmann::json mining_result_to_json(const MiningResult& r);
MiningResult mining_result_from_json(const nlohmann::json& j);

// Sorted keys, two-space indent, shortest round-trip numbers, trailing newline.
std::string serialize_run_record(const RunRecord& r);
RunRecord parse_run_record(std::string_view text);

// Writes <dir>/run-<first 16 hex of run_id>.json atomically; returns the path.
std::filesystem::path write_run_record(const RunRecord& r, const std::filesystem::path& dir);
void write_run_record_file(const RunRecord& r, const std::filesystem::path& path);

// <path>.meta.json with a UTC timestamp and per-phase timing.
std::filesystem::path write_run_meta(const std::filesystem::path& record_path,
                                     const std::vector<PhaseTiming>& timing);

}  // namespace selectkit

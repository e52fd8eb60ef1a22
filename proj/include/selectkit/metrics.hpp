#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace selectkit {

// Accuracies are fractions in [0, 1]. `extra` carries pass-through columns
// such as CLIP-style scores.
struct ConceptRecord {
  std::string subject;
  double acc_e = 0.0;  // erased concept still recognized
  double acc_g = 0.0;  // synonyms still recognized
  double acc_s = 0.0;  // unrelated concepts preserved
  double acc_b = 0.0;  // boundary concepts preserved
  std::map<std::string, double> extra;

  void validate() const;
};

// Harmonic mean of (1 - acc_e, acc_s, 1 - acc_g); 0 when any term is 0.
double harmonic_mean_ho(double acc_e, double acc_s, double acc_g);

struct ReportRow {
  ConceptRecord record;
  double ho = 0.0;
};

struct Report {
  std::vector<ReportRow> rows;
  ReportRow mean;  // column means; mean.ho is the mean of per-row H_o
};

Report summarize_run(const std::vector<ConceptRecord>& records);

enum class Scale { detect, fraction, percent };

// CSV with a header row. Required columns: concept, acc_e, acc_g, acc_s,
// acc_b (case-insensitive). Other numeric columns go to `extra`. With
// Scale::detect, any accuracy above 1 marks the whole file as percent.
std::vector<ConceptRecord> parse_records_csv(std::string_view text, Scale scale = Scale::detect);
// JSON array of objects with the same field names.
std::vector<ConceptRecord> parse_records_json(const nlohmann::json& j, Scale scale = Scale::detect);
std::vector<ConceptRecord> load_records(const std::string& path, Scale scale = Scale::detect);

// Output in percent when `percent` is set; the header or field says which.
nlohmann::json report_to_json(const Report& r, bool percent);
std::string report_to_csv(const Report& r, bool percent);

}  // namespace selectkit

#include "selectkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "selectkit/errors.hpp"
#include "selectkit/io.hpp"
#include "selectkit/text.hpp"

namespace selectkit {

namespace {

void check_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw PreconditionError(std::string(name) + " outside [0, 1]: " + std::to_string(v));
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

double parse_number(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("not a number: \"" + s + "\"", line);
  }
}

void apply_scale(std::vector<ConceptRecord>& recs, Scale scale) {
  bool percent = scale == Scale::percent;
  if (scale == Scale::detect) {
    for (const auto& r : recs) {
      if (r.acc_e > 1.0 || r.acc_g > 1.0 || r.acc_s > 1.0 || r.acc_b > 1.0) percent = true;
    }
  }
  for (auto& r : recs) {
    if (percent) {
      r.acc_e /= 100.0;
      r.acc_g /= 100.0;
      r.acc_s /= 100.0;
      r.acc_b /= 100.0;
    }
    r.validate();
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  return "\"" + replace_all(s, "\"", "\"\"") + "\"";
}

std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

void ConceptRecord::validate() const {
  check_unit(acc_e, "acc_e");
  check_unit(acc_g, "acc_g");
  check_unit(acc_s, "acc_s");
  check_unit(acc_b, "acc_b");
}

double harmonic_mean_ho(double acc_e, double acc_s, double acc_g) {
  check_unit(acc_e, "acc_e");
  check_unit(acc_s, "acc_s");
  check_unit(acc_g, "acc_g");
  const double a = 1.0 - acc_e;
  const double b = acc_s;
  const double c = 1.0 - acc_g;
  if (a == 0.0 || b == 0.0 || c == 0.0) return 0.0;
  return 3.0 / (1.0 / a + 1.0 / b + 1.0 / c);
}

Report summarize_run(const std::vector<ConceptRecord>& records) {
  if (records.empty()) throw PreconditionError("report needs at least one record");
  Report rep;
  rep.mean.record.subject = "mean";
  const double n = static_cast<double>(records.size());
  for (const auto& r : records) {
    r.validate();
    const double ho = harmonic_mean_ho(r.acc_e, r.acc_s, r.acc_g);
    rep.rows.push_back({r, ho});
    rep.mean.record.acc_e += r.acc_e / n;
    rep.mean.record.acc_g += r.acc_g / n;
    rep.mean.record.acc_s += r.acc_s / n;
    rep.mean.record.acc_b += r.acc_b / n;
    rep.mean.ho += ho / n;
  }
  return rep;
}

std::vector<ConceptRecord> parse_records_csv(std::string_view text, Scale scale) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  std::vector<ConceptRecord> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (header.empty()) {
      for (auto& c : cells) header.push_back(to_lower(c));
      for (const char* need : {"concept", "acc_e", "acc_g", "acc_s", "acc_b"}) {
        if (std::find(header.begin(), header.end(), need) == header.end()) {
          throw ParseError(std::string("missing column ") + need, lineno);
        }
      }
      continue;
    }
    if (cells.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " cells, got " +
                           std::to_string(cells.size()),
                       lineno);
    }
    ConceptRecord r;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto& h = header[i];
      if (h == "concept") {
        r.subject = cells[i];
      } else if (cells[i].empty()) {
        continue;
      } else if (h == "acc_e") {
        r.acc_e = parse_number(cells[i], lineno);
      } else if (h == "acc_g") {
        r.acc_g = parse_number(cells[i], lineno);
      } else if (h == "acc_s") {
        r.acc_s = parse_number(cells[i], lineno);
      } else if (h == "acc_b") {
        r.acc_b = parse_number(cells[i], lineno);
      } else {
        r.extra[h] = parse_number(cells[i], lineno);
      }
    }
    out.push_back(std::move(r));
  }
  apply_scale(out, scale);
  return out;
}

std::vector<ConceptRecord> parse_records_json(const nlohmann::json& j, Scale scale) {
  if (!j.is_array()) throw PreconditionError("records JSON must be an array");
  std::vector<ConceptRecord> out;
  for (const auto& o : j) {
    ConceptRecord r;
    for (const auto& [k, v] : o.items()) {
      const auto key = to_lower(k);
      if (key == "concept") {
        r.subject = v.get<std::string>();
      } else if (key == "acc_e") {
        r.acc_e = v.get<double>();
      } else if (key == "acc_g") {
        r.acc_g = v.get<double>();
      } else if (key == "acc_s") {
        r.acc_s = v.get<double>();
      } else if (key == "acc_b") {
        r.acc_b = v.get<double>();
      } else if (v.is_number()) {
        r.extra[key] = v.get<double>();
      }
    }
    out.push_back(std::move(r));
  }
  apply_scale(out, scale);
  return out;
}

std::vector<ConceptRecord> load_records(const std::string& path, Scale scale) {
  const auto text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '[' || text[first] == '{')) {
    try {
      return parse_records_json(nlohmann::json::parse(text), scale);
    } catch (const nlohmann::json::exception& e) {
      throw Error("invalid records file " + path + ": " + e.what());
    }
  }
  return parse_records_csv(text, scale);
}

nlohmann::json report_to_json(const Report& r, bool percent) {
  const double k = percent ? 100.0 : 1.0;
  auto row = [&](const ReportRow& x) {
    nlohmann::json j{{"concept", x.record.subject},
                     {"acc_e", x.record.acc_e * k},
                     {"acc_g", x.record.acc_g * k},
                     {"acc_s", x.record.acc_s * k},
                     {"acc_b", x.record.acc_b * k},
                     {"ho", x.ho * k}};
    if (!x.record.extra.empty()) j["extra"] = x.record.extra;
    return j;
  };
  nlohmann::json out{{"scale", percent ? "percent" : "fraction"}};
  auto& rows = out["rows"] = nlohmann::json::array();
  for (const auto& x : r.rows) rows.push_back(row(x));
  out["mean"] = row(r.mean);
  return out;
}

std::string report_to_csv(const Report& r, bool percent) {
  const double k = percent ? 100.0 : 1.0;
  const std::string unit = percent ? "_pct" : "";
  std::ostringstream out;
  out << "concept,acc_e" << unit << ",acc_g" << unit << ",acc_s" << unit << ",acc_b" << unit
      << ",ho" << unit << '\n';
  auto row = [&](const ReportRow& x) {
    out << csv_field(x.record.subject) << ',' << csv_number(x.record.acc_e * k) << ','
        << csv_number(x.record.acc_g * k) << ',' << csv_number(x.record.acc_s * k) << ','
        << csv_number(x.record.acc_b * k) << ',' << csv_number(x.ho * k) << '\n';
  };
  for (const auto& x : r.rows) row(x);
  row(r.mean);
  return out.str();
}

}  // namespace selectkit

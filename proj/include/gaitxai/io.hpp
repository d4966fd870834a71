#pragma once

// Feature CSV, number formatting, and atomic file output.

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "gaitxai/dataset.hpp"
#include "gaitxai/error.hpp"
#include "gaitxai/features.hpp"

namespace gaitxai {

/// Shortest text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw Error(Errc::malformed_document, "not a number: '" + std::string(text) + "'");
  }
  return v;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes via a sibling temporary file and rename, so readers never observe a
/// partial file.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_error, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(Errc::io_error, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(Errc::io_error, "cannot rename onto " + path.string());
  }
}

namespace csv {

inline std::string quote(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

/// Splits CSV text into records; handles quoted fields and CRLF.
inline std::vector<std::vector<std::string>> parse(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
      any = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
      }
      record.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (in_quotes) throw Error(Errc::malformed_document, "unterminated quoted CSV field");
  if (any || !field.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace csv

struct FeatureRow {
  std::string subject_id;
  std::string cycle_id;
  FeatureVector features;
  std::optional<std::string> label;
};

inline std::string feature_csv_header() {
  std::string h = "subject_id,cycle_id";
  for (auto name : kFeatureNames) {
    h += ',';
    h += name;
  }
  h += ",label";
  return h;
}

inline std::string write_feature_csv(const std::vector<FeatureRow>& rows) {
  std::string out = feature_csv_header() + "\n";
  for (const auto& r : rows) {
    out += csv::quote(r.subject_id);
    out += ',';
    out += csv::quote(r.cycle_id);
    for (double v : r.features.to_array()) {
      out += ',';
      out += format_double(v);
    }
    out += ',';
    if (r.label) out += csv::quote(*r.label);
    out += '\n';
  }
  return out;
}

inline std::vector<FeatureRow> read_feature_csv(std::string_view text) {
  const auto records = csv::parse(text);
  if (records.empty()) throw Error(Errc::malformed_document, "feature CSV is empty");
  std::string header;
  for (std::size_t i = 0; i < records[0].size(); ++i) {
    if (i) header += ',';
    header += records[0][i];
  }
  if (header != feature_csv_header()) {
    throw Error(Errc::malformed_document, "unexpected feature CSV header: " + header);
  }
  std::vector<FeatureRow> rows;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != kFeatureCount + 3) {
      throw Error(Errc::malformed_document, "row " + std::to_string(r) + " has " +
                                                std::to_string(rec.size()) + " fields");
    }
    FeatureRow row;
    row.subject_id = rec[0];
    row.cycle_id = rec[1];
    std::array<double, kFeatureCount> values{};
    for (std::size_t i = 0; i < kFeatureCount; ++i) values[i] = parse_double(rec[i + 2]);
    row.features = FeatureVector::from_array(values);
    if (!rec.back().empty()) row.label = rec.back();
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Builds a labelled dataset; class names are the sorted distinct labels.
inline Dataset dataset_from_rows(const std::vector<FeatureRow>& rows) {
  std::set<std::string> names;
  for (const auto& r : rows) {
    if (!r.label) {
      throw Error(Errc::malformed_document,
                  "row for subject '" + r.subject_id + "' cycle '" + r.cycle_id + "' has no label");
    }
    names.insert(*r.label);
  }
  Dataset d;
  d.class_names.assign(names.begin(), names.end());
  d.rows = Matrix(rows.size(), kFeatureCount);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto values = rows[i].features.to_array();
    std::copy(values.begin(), values.end(), d.rows.row(i).begin());
    d.labels.push_back(static_cast<std::size_t>(
        std::find(d.class_names.begin(), d.class_names.end(), *rows[i].label) -
        d.class_names.begin()));
    d.subject_ids.push_back(rows[i].subject_id);
    d.cycle_ids.push_back(rows[i].cycle_id);
  }
  return d;
}

}  // namespace gaitxai

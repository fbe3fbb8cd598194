#pragma once

// Field files and dataset manifests.
//
// manifest.json (format 1):
//   {"format": 1, "dim": m,
//    "axes": [{"min": .., "max": .., "samples": ..}, ...],
//    "fields": {"g": {"shape": [2, 2], "path": "g.csv", "encoding": "csv"}},
//    "metadata": {...}}
// Paths are relative to the manifest. Points are in lexicographic order
// (last axis fastest), components row-major. csv: one line per point with
// 17 significant digits; raw: little-endian float64, no header.

#include <filesystem>
#include <map>
#include <string>

#include "json.hpp"
#include "minkembed/grid.hpp"

namespace minkembed {

enum class Encoding { Csv, Raw };

std::string to_string(Encoding e);
/// Throws FormatError.
Encoding parse_encoding(const std::string& s);

struct FieldEntry {
  std::vector<std::size_t> shape;
  std::string path;
  Encoding encoding = Encoding::Csv;
};

struct Manifest {
  int format = 1;
  GridChart chart;
  std::map<std::string, FieldEntry> fields;
  nlohmann::json metadata = nlohmann::json::object();

  nlohmann::json to_json() const;
  /// Throws FormatError.
  static Manifest from_json(const nlohmann::json& j);
};

/// Throws IoError.
void write_field(const TensorField& f, const std::filesystem::path& path, Encoding encoding);
/// Throws IoError, FormatError (wrong length, unparsable or non-finite values).
TensorField read_field(const std::filesystem::path& path, const GridChart& chart, std::vector<std::size_t> shape,
                       Encoding encoding);

/// Writes every field as <name>.<csv|bin> plus manifest.json into `dir`
/// (created if missing). Returns the manifest.
Manifest write_dataset(const std::filesystem::path& dir, const std::map<std::string, TensorField>& fields,
                       Encoding encoding, const nlohmann::json& metadata);

struct Dataset {
  Manifest manifest;
  std::map<std::string, TensorField> fields;

  /// Throws InvalidInput when the field is missing.
  const TensorField& field(const std::string& name) const;
};

/// Accepts the manifest file or its directory. Throws IoError, FormatError.
Dataset read_dataset(const std::filesystem::path& manifest);

}  // namespace minkembed

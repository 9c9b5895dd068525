#pragma once

// File formats: NPY v1.0 and CSV matrices, pair manifests, run reports.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scendi/kernels.hpp"
#include "scendi/scores.hpp"

namespace scendi::io {

inline constexpr std::string_view kReportSchema = "scendi-report/1";
inline constexpr std::string_view kManifestSchema = "scendi-manifest/1";

std::string_view tool_version();

// ---------------------------------------------------------------- matrices

/// Serialized NPY v1.0 bytes (little-endian f8, C order, 2-D).
std::string encode_npy(const Matrix& m);
/// Parses NPY v1.0 bytes with dtype <f8 or <f4 (upcast). Each malformed
/// aspect raises its own error kind: npy_magic, npy_version, npy_header,
/// npy_dtype, npy_fortran_order, npy_shape, npy_truncated; NaN or Inf
/// entries raise a ValidationError of kind non_finite.
Matrix decode_npy(std::string_view bytes);

Matrix read_npy(const std::filesystem::path& path);
void write_npy(const Matrix& m, const std::filesystem::path& path);

/// Numeric CSV, one row per line; a non-numeric first line is a header.
Matrix read_csv(const std::filesystem::path& path);

struct Shape {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
};

/// NPY (by magic bytes) or CSV; shape checked against `expected` when given.
EmbeddingMatrix load_matrix(const std::filesystem::path& path,
                            std::optional<Shape> expected = std::nullopt);
/// Always NPY v1.0 f8.
void save_matrix(const Matrix& m, const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(std::string_view bytes);

/// UTC timestamp, ISO 8601.
std::string utc_timestamp();

// ---------------------------------------------------------------- manifest

struct PairRecord {
  std::string prompt;
  Eigen::Index image_row = 0;
  Eigen::Index text_row = 0;
  std::optional<std::string> group;

  bool operator==(const PairRecord&) const = default;
};

struct PairManifest {
  std::vector<PairRecord> records;
  std::optional<std::filesystem::path> image_matrix;
  std::optional<std::filesystem::path> text_matrix;

  bool operator==(const PairManifest&) const = default;
};

/// JSON (by extension .json or leading '{') or CSV with columns
/// prompt,image_row,text_row[,group]. Relative matrix paths are resolved
/// against the manifest's directory.
PairManifest load_manifest(const std::filesystem::path& path);
/// Writes JSON; matrix paths are stored as given.
void save_manifest(const PairManifest& m, const std::filesystem::path& path);

/// Structural checks plus row bounds against the referenced matrices.
void validate_manifest(const PairManifest& m, Eigen::Index image_rows,
                       Eigen::Index text_rows);

/// Positional identity manifest for n aligned rows.
PairManifest identity_manifest(Eigen::Index n);

/// Gathers rows in manifest order.
Matrix select_rows(const Matrix& m, const std::vector<Eigen::Index>& rows);
std::vector<Eigen::Index> image_rows(const PairManifest& m);
std::vector<Eigen::Index> text_rows(const PairManifest& m);

// ---------------------------------------------------------------- reports

struct RunConfig {
  KernelConfig kernel;
  double rel_cutoff = kDefaultRelCutoff;
  double ridge = 0.0;
  bool center = false;
  bool renormalize = false;
  std::vector<std::string> outputs;

  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

struct InputDigest {
  std::string role;
  std::string path;
  std::string sha256;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;

  bool operator==(const InputDigest&) const = default;
};

struct ReportDocument {
  DiversityReport report;
  RunConfig config;
  std::vector<InputDigest> inputs;
  std::string tool_version;
  std::string created_at;

  bool operator==(const ReportDocument&) const = default;
};

std::string report_to_json(const ReportDocument& doc, int indent = 2);
ReportDocument report_from_json(std::string_view text);

void write_report(const ReportDocument& doc, const std::filesystem::path& path);
ReportDocument read_report(const std::filesystem::path& path);

}  // namespace scendi::io

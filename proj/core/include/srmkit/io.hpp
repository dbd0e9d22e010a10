#pragma once

// Matrix files and activation ingestion.
//
// Binary matrix layout (all little-endian):
//   bytes 0-3   "AMAT"
//   byte  4     format version, 0x01
//   bytes 5-8   rows, uint32
//   bytes 9-12  cols, uint32
//   then rows*cols IEEE-754 float64 values, row-major
//
// CSV: one matrix row per line, comma-separated; lines starting with '#' are
// headers/comments and blank lines are skipped. Values are written with 17
// significant digits so doubles round-trip exactly.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "srmkit/activity.hpp"
#include "srmkit/matcore.hpp"

namespace srmkit::io {

enum class MatrixFormat { kBinary, kCsv };

inline constexpr std::string_view kBinaryMagic = "AMAT";
inline constexpr unsigned char kBinaryVersion = 0x01;

std::string_view to_string(MatrixFormat format);
MatrixFormat parse_matrix_format(std::string_view text);
// ".csv" for CSV, ".amat" for binary
std::string_view extension(MatrixFormat format);

std::string encode_binary(const Matrix& m);
Matrix decode_binary(std::string_view bytes, std::string_view origin = "<memory>");
std::string encode_csv(const Matrix& m);
Matrix decode_csv(std::string_view text, std::string_view origin = "<memory>");

/// Reads a matrix; files ending in ".csv" are parsed as CSV, everything else
/// must be a binary AMAT file.
Matrix read_matrix(const std::filesystem::path& path);

/// Writes atomically: the payload goes to a sibling temp file which is then
/// renamed over `path`.
void write_matrix(const Matrix& m, const std::filesystem::path& path,
                  MatrixFormat format = MatrixFormat::kBinary);

/// Writes `contents` to `path` via temp file + rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

struct ManifestEntry {
  std::string network_id;
  std::string layer_id;
  std::filesystem::path path;  // as written in the manifest
  int line = 0;
};

/// Parses `network_id, layer_id, path` lines; '#' starts a comment.
/// Duplicate (network, layer) pairs are DuplicateEntry errors.
std::vector<ManifestEntry> parse_manifest(std::string_view text,
                                          std::string_view origin = "<manifest>");

/// Loads every matrix named in the manifest. Relative paths resolve against
/// `directory` (the manifest's own directory when empty). Results are grouped
/// by layer in order of first appearance, networks in manifest order; all
/// matrices of one layer must share their example count.
std::vector<ActivityMatrix> ingest_activations(const std::filesystem::path& manifest,
                                               const std::filesystem::path& directory = {});

/// Layer ids in order of first appearance.
std::vector<std::string> layers_of(const std::vector<ActivityMatrix>& mats);

/// The matrices of one layer, in network order.
std::vector<ActivityMatrix> select_layer(const std::vector<ActivityMatrix>& mats,
                                         std::string_view layer_id);

/// Writes a manifest for `entries` (paths written as given).
std::string format_manifest(const std::vector<ManifestEntry>& entries);

}  // namespace srmkit::io

#include "srmkit/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "srmkit/errors.hpp"

namespace srmkit::io {
namespace fs = std::filesystem;

namespace {

constexpr std::size_t kHeaderBytes = 4 + 1 + 4 + 4;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

std::uint64_t get_le(std::string_view bytes, std::size_t offset, int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
  }
  return v;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

}  // namespace

std::string_view to_string(MatrixFormat format) {
  return format == MatrixFormat::kBinary ? "binary" : "csv";
}

MatrixFormat parse_matrix_format(std::string_view text) {
  if (text == "binary") return MatrixFormat::kBinary;
  if (text == "csv") return MatrixFormat::kCsv;
  throw Error(ErrorCode::kInvalidSpec,
              "unknown matrix format '" + std::string(text) + "' (binary or csv)");
}

std::string_view extension(MatrixFormat format) {
  return format == MatrixFormat::kBinary ? ".amat" : ".csv";
}

std::string encode_binary(const Matrix& m) {
  if (m.rows() > 0xFFFFFFFFLL || m.cols() > 0xFFFFFFFFLL) {
    throw Error(ErrorCode::kDimMismatch, "matrix too large for AMAT dims");
  }
  std::string out;
  out.reserve(kHeaderBytes + static_cast<std::size_t>(m.size()) * 8);
  out.append(kBinaryMagic);
  out.push_back(static_cast<char>(kBinaryVersion));
  put_u32(out, static_cast<std::uint32_t>(m.rows()));
  put_u32(out, static_cast<std::uint32_t>(m.cols()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) put_f64(out, m(i, j));
  }
  return out;
}

Matrix decode_binary(std::string_view bytes, std::string_view origin) {
  const std::string where(origin);
  if (bytes.size() < 5 || bytes.substr(0, 4) != kBinaryMagic) {
    throw Error(ErrorCode::kBadMagic, where + ": missing AMAT magic bytes");
  }
  if (static_cast<unsigned char>(bytes[4]) != kBinaryVersion) {
    throw Error(ErrorCode::kBadMagic,
                where + ": unsupported AMAT version " +
                    std::to_string(static_cast<unsigned char>(bytes[4])));
  }
  if (bytes.size() < kHeaderBytes) {
    throw Error(ErrorCode::kTruncatedPayload, where + ": header is truncated");
  }
  const auto rows = get_le(bytes, 5, 4);
  const auto cols = get_le(bytes, 9, 4);
  const std::uint64_t expected = rows * cols * 8;
  const std::uint64_t payload = bytes.size() - kHeaderBytes;
  if (payload < expected) {
    throw Error(ErrorCode::kTruncatedPayload,
                where + ": dims " + std::to_string(rows) + "x" + std::to_string(cols) +
                    " need " + std::to_string(expected / 8) + " values, file holds " +
                    std::to_string(payload / 8));
  }
  if (payload > expected) {
    throw Error(ErrorCode::kDimMismatch,
                where + ": " + std::to_string(payload - expected) +
                    " bytes beyond the declared " + std::to_string(rows) + "x" +
                    std::to_string(cols) + " payload");
  }
  if (rows == 0 || cols == 0) {
    throw Error(ErrorCode::kInvalidMatrix, where + ": matrix has a zero dimension");
  }

  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  std::size_t offset = kHeaderBytes;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      m(i, j) = std::bit_cast<double>(get_le(bytes, offset, 8));
      offset += 8;
    }
  }
  require_finite(m, where);
  return m;
}

std::string encode_csv(const Matrix& m) {
  std::string out;
  char buf[32];
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out.push_back(',');
      const int len = std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      out.append(buf, static_cast<std::size_t>(len));
    }
    out.push_back('\n');
  }
  return out;
}

Matrix decode_csv(std::string_view text, std::string_view origin) {
  const std::string where(origin);
  std::vector<std::vector<double>> rows;
  int line_no = 0;
  for (const auto raw : split_lines(text)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    std::vector<double> row;
    std::size_t pos = 0;
    int col = 0;
    while (true) {
      const auto comma = line.find(',', pos);
      const std::string cell =
          trim(std::string_view(line).substr(pos, comma == std::string::npos ? line.npos : comma - pos));
      ++col;
      double v = 0.0;
      const char* end = cell.data() + cell.size();
      const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
      if (cell.empty() || ec != std::errc() || ptr != end) {
        throw Error(ErrorCode::kNonNumericCell,
                    where + ": line " + std::to_string(line_no) + " column " +
                        std::to_string(col) + ": '" + cell + "' is not a number");
      }
      row.push_back(v);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorCode::kDimMismatch,
                  where + ": line " + std::to_string(line_no) + " has " +
                      std::to_string(row.size()) + " cells, expected " +
                      std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::kInvalidMatrix, where + ": no data rows");

  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  require_finite(m, where);
  return m;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& path, std::string_view contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorCode::kIo, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot rename onto " + path.string() + ": " + ec.message());
}

Matrix read_matrix(const fs::path& path) {
  const std::string bytes = read_file(path);
  if (path.extension() == ".csv") return decode_csv(bytes, path.string());
  return decode_binary(bytes, path.string());
}

void write_matrix(const Matrix& m, const fs::path& path, MatrixFormat format) {
  require_finite(m, path.string());
  write_file_atomic(path, format == MatrixFormat::kBinary ? encode_binary(m) : encode_csv(m));
}

std::vector<ManifestEntry> parse_manifest(std::string_view text, std::string_view origin) {
  const std::string where(origin);
  std::vector<ManifestEntry> entries;
  std::map<std::pair<std::string, std::string>, int> seen;
  int line_no = 0;
  for (auto raw : split_lines(text)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;

    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos) {
      throw Error(ErrorCode::kConfigParse,
                  where + ": line " + std::to_string(line_no) +
                      ": expected 'network_id, layer_id, path'");
    }
    ManifestEntry e;
    e.network_id = trim(std::string_view(line).substr(0, c1));
    e.layer_id = trim(std::string_view(line).substr(c1 + 1, c2 - c1 - 1));
    e.path = trim(std::string_view(line).substr(c2 + 1));
    e.line = line_no;
    if (e.network_id.empty() || e.layer_id.empty() || e.path.empty()) {
      throw Error(ErrorCode::kConfigParse,
                  where + ": line " + std::to_string(line_no) + ": empty field");
    }
    const auto [it, inserted] = seen.emplace(std::pair{e.network_id, e.layer_id}, line_no);
    if (!inserted) {
      throw Error(ErrorCode::kDuplicateEntry,
                  where + ": line " + std::to_string(line_no) + ": network '" +
                      e.network_id + "' layer '" + e.layer_id +
                      "' already listed on line " + std::to_string(it->second));
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<ActivityMatrix> ingest_activations(const fs::path& manifest,
                                               const fs::path& directory) {
  if (!fs::exists(manifest)) {
    throw Error(ErrorCode::kMissingFile, "manifest " + manifest.string() + " not found");
  }
  const auto entries = parse_manifest(read_file(manifest), manifest.string());
  const fs::path base = directory.empty() ? manifest.parent_path() : directory;

  std::vector<std::string> layer_order;
  for (const auto& e : entries) {
    if (std::find(layer_order.begin(), layer_order.end(), e.layer_id) == layer_order.end()) {
      layer_order.push_back(e.layer_id);
    }
  }

  std::vector<ActivityMatrix> out;
  for (const auto& layer : layer_order) {
    const ManifestEntry* first = nullptr;
    for (const auto& e : entries) {
      if (e.layer_id != layer) continue;
      const fs::path file = e.path.is_absolute() ? e.path : base / e.path;
      if (!fs::exists(file)) {
        throw Error(ErrorCode::kMissingFile,
                    "manifest line " + std::to_string(e.line) + " (network '" +
                        e.network_id + "', layer '" + e.layer_id + "'): " +
                        file.string() + " not found");
      }
      ActivityMatrix a{e.network_id, e.layer_id, read_matrix(file)};
      validate(a);
      if (first != nullptr && a.examples() != out.back().examples()) {
        throw Error(ErrorCode::kExampleCountMismatch,
                    "layer '" + layer + "': " + first->path.string() + " has " +
                        std::to_string(out.back().examples()) + " examples but " +
                        e.path.string() + " has " + std::to_string(a.examples()));
      }
      if (first == nullptr) first = &e;
      out.push_back(std::move(a));
    }
  }
  return out;
}

std::vector<std::string> layers_of(const std::vector<ActivityMatrix>& mats) {
  std::vector<std::string> layers;
  for (const auto& a : mats) {
    if (std::find(layers.begin(), layers.end(), a.layer_id) == layers.end()) {
      layers.push_back(a.layer_id);
    }
  }
  return layers;
}

std::vector<ActivityMatrix> select_layer(const std::vector<ActivityMatrix>& mats,
                                         std::string_view layer_id) {
  std::vector<ActivityMatrix> out;
  for (const auto& a : mats) {
    if (a.layer_id == layer_id) out.push_back(a);
  }
  return out;
}

std::string format_manifest(const std::vector<ManifestEntry>& entries) {
  std::string out = "# network_id, layer_id, path\n";
  for (const auto& e : entries) {
    out += e.network_id + ", " + e.layer_id + ", " + e.path.generic_string() + "\n";
  }
  return out;
}

}  // namespace srmkit::io

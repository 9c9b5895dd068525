#include <openssl/evp.h>

#include <array>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstring>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "scendi/io.hpp"

#ifndef SCENDI_VERSION
#define SCENDI_VERSION "0.0.0"
#endif

namespace scendi::io {

static_assert(std::endian::native == std::endian::little,
              "NPY encoding assumes a little-endian host");

namespace {

constexpr std::string_view kMagic = "\x93NUMPY";
constexpr std::size_t kPreludeBytes = 10;  // magic(6) + version(2) + len(2)

IoError npy_error(std::string_view kind, const std::string& what) {
  return IoError("NPY: " + what, "npy_" + std::string(kind));
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// Value text following `'key':` in a Python dict literal.
std::string_view dict_value(std::string_view header, std::string_view key) {
  const std::string quoted = "'" + std::string(key) + "'";
  const auto pos = header.find(quoted);
  if (pos == std::string_view::npos) {
    throw npy_error("header", "header has no '" + std::string(key) + "' key");
  }
  auto rest = header.substr(pos + quoted.size());
  rest = trim(rest);
  if (rest.empty() || rest.front() != ':') {
    throw npy_error("header", "malformed header near '" + std::string(key) + "'");
  }
  return trim(rest.substr(1));
}

struct NpyHeader {
  std::string descr;
  bool fortran_order = false;
  std::vector<long long> shape;
};

NpyHeader parse_header(std::string_view header) {
  NpyHeader h;
  {
    auto v = dict_value(header, "descr");
    if (v.empty() || (v.front() != '\'' && v.front() != '"')) {
      throw npy_error("header", "descr is not a string");
    }
    const char q = v.front();
    const auto end = v.find(q, 1);
    if (end == std::string_view::npos) throw npy_error("header", "unterminated descr");
    h.descr = std::string(v.substr(1, end - 1));
  }
  {
    auto v = dict_value(header, "fortran_order");
    if (v.starts_with("True")) {
      h.fortran_order = true;
    } else if (v.starts_with("False")) {
      h.fortran_order = false;
    } else {
      throw npy_error("header", "fortran_order is not a boolean");
    }
  }
  {
    auto v = dict_value(header, "shape");
    if (v.empty() || v.front() != '(') throw npy_error("header", "shape is not a tuple");
    const auto close = v.find(')');
    if (close == std::string_view::npos) throw npy_error("header", "unterminated shape");
    std::string_view body = v.substr(1, close - 1);
    while (!body.empty()) {
      const auto comma = body.find(',');
      const auto item = trim(body.substr(0, comma));
      if (!item.empty()) {
        long long dim = 0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), dim);
        if (ec != std::errc() || ptr != item.data() + item.size() || dim < 0) {
          throw npy_error("header", "bad shape entry '" + std::string(item) + "'");
        }
        h.shape.push_back(dim);
      }
      if (comma == std::string_view::npos) break;
      body = body.substr(comma + 1);
    }
  }
  return h;
}

void require_finite(const Matrix& m, std::string_view source) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (!std::isfinite(m(i, j))) {
        std::ostringstream os;
        os << source << ": non-finite value at (" << i << ", " << j << ")";
        throw ValidationError(os.str(), "non_finite");
      }
    }
  }
}

template <typename T>
T read_le(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

}  // namespace

std::string_view tool_version() { return SCENDI_VERSION; }

std::string encode_npy(const Matrix& m) {
  std::ostringstream dict;
  dict << "{'descr': '<f8', 'fortran_order': False, 'shape': (" << m.rows() << ", "
       << m.cols() << "), }";
  std::string header = dict.str();
  // Pad with spaces so the data starts on a 64-byte boundary; newline last.
  const std::size_t unpadded = kPreludeBytes + header.size() + 1;
  const std::size_t padded = (unpadded + 63) / 64 * 64;
  header.append(padded - unpadded, ' ');
  header.push_back('\n');

  std::string out;
  out.reserve(padded + static_cast<std::size_t>(m.size()) * sizeof(double));
  out.append(kMagic);
  out.push_back('\x01');
  out.push_back('\x00');
  const auto len = static_cast<std::uint16_t>(header.size());
  out.push_back(static_cast<char>(len & 0xff));
  out.push_back(static_cast<char>(len >> 8));
  out.append(header);
  // Row-major copy regardless of Eigen's storage order.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
  out.append(reinterpret_cast<const char*>(rm.data()),
             static_cast<std::size_t>(rm.size()) * sizeof(double));
  return out;
}

Matrix decode_npy(std::string_view bytes) {
  if (bytes.size() < kMagic.size() || bytes.substr(0, kMagic.size()) != kMagic) {
    throw npy_error("magic", "missing \\x93NUMPY magic");
  }
  if (bytes.size() < kPreludeBytes) throw npy_error("truncated", "file ends inside prelude");
  const auto major = static_cast<unsigned char>(bytes[6]);
  const auto minor = static_cast<unsigned char>(bytes[7]);
  if (major != 1 || minor != 0) {
    throw npy_error("version", "unsupported format version " + std::to_string(major) + "." +
                                   std::to_string(minor) + " (need 1.0)");
  }
  const std::size_t header_len = read_le<std::uint16_t>(bytes.data() + 8);
  if (bytes.size() < kPreludeBytes + header_len) {
    throw npy_error("truncated", "file ends inside header");
  }
  const NpyHeader h = parse_header(bytes.substr(kPreludeBytes, header_len));

  std::size_t item = 0;
  if (h.descr == "<f8") {
    item = 8;
  } else if (h.descr == "<f4") {
    item = 4;
  } else {
    throw npy_error("dtype", "unsupported dtype '" + h.descr + "' (need <f8 or <f4)");
  }
  if (h.fortran_order) throw npy_error("fortran_order", "Fortran-ordered arrays are not supported");
  if (h.shape.size() != 2) {
    throw npy_error("shape", "expected a 2-D array, got " + std::to_string(h.shape.size()) +
                                 " dimensions");
  }
  const auto rows = static_cast<Eigen::Index>(h.shape[0]);
  const auto cols = static_cast<Eigen::Index>(h.shape[1]);
  const std::size_t count = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  const std::string_view data = bytes.substr(kPreludeBytes + header_len);
  if (data.size() < count * item) {
    throw npy_error("truncated", "expected " + std::to_string(count * item) +
                                     " data bytes, found " + std::to_string(data.size()));
  }

  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(rows, cols);
  if (item == 8) {
    std::memcpy(rm.data(), data.data(), count * 8);
  } else {
    for (std::size_t k = 0; k < count; ++k) {
      rm.data()[k] = static_cast<double>(read_le<float>(data.data() + 4 * k));
    }
  }
  Matrix out = rm;
  require_finite(out, "NPY");
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading", "io_open");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path.string() + "'", "io_read");
  return std::move(ss).str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing", "io_open");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'", "io_write");
}

Matrix read_npy(const std::filesystem::path& path) { return decode_npy(read_file(path)); }

void write_npy(const Matrix& m, const std::filesystem::path& path) {
  write_file(path, encode_npy(m));
}

Matrix read_csv(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    const auto content = trim(line);
    if (content.empty()) continue;
    std::vector<double> row;
    bool numeric = true;
    std::string_view rest = content;
    while (true) {
      const auto comma = rest.find(',');
      const auto field = trim(rest.substr(0, comma));
      double v = 0.0;
      const char* b = field.data();
      const char* e = field.data() + field.size();
      if (!field.empty() && *b == '+') ++b;
      const auto [ptr, ec] = std::from_chars(b, e, v);
      if (field.empty() || ec != std::errc() || ptr != e) {
        numeric = false;
        break;
      }
      row.push_back(v);
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (!numeric) {
      if (first_content) {
        first_content = false;
        continue;  // header
      }
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": non-numeric field",
                    "csv_parse");
    }
    first_content = false;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(rows.front().size()) + " columns, got " +
                        std::to_string(row.size()),
                    "csv_parse");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError(path.string() + ": no data rows", "csv_parse");
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  require_finite(out, path.string());
  return out;
}

EmbeddingMatrix load_matrix(const std::filesystem::path& path, std::optional<Shape> expected) {
  const std::string bytes = read_file(path);
  Matrix m;
  if (bytes.size() >= kMagic.size() && bytes.compare(0, kMagic.size(), kMagic) == 0) {
    m = decode_npy(bytes);
  } else if (path.extension() == ".npy") {
    throw npy_error("magic", "'" + path.string() + "' is not an NPY file");
  } else {
    m = read_csv(path);
  }
  if (expected && (m.rows() != expected->rows || m.cols() != expected->cols)) {
    std::ostringstream os;
    os << path.string() << ": expected shape (" << expected->rows << ", " << expected->cols
       << "), got (" << m.rows() << ", " << m.cols() << ")";
    throw ValidationError(os.str(), "shape");
  }
  return m;
}

void save_matrix(const Matrix& m, const std::filesystem::path& path) { write_npy(m, path); }

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1) {
    throw IoError("SHA-256 computation failed", "digest");
  }
  std::ostringstream os;
  os << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) os << std::setw(2) << static_cast<int>(md[i]);
  return os.str();
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace scendi::io

#pragma once

// Dense sample matrices (rows = samples) and their two on-disk formats:
// headerless CSV and the "SPMX" little-endian binary container.

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spade/error.hpp"

namespace spade {

enum class DType : std::uint8_t { f32 = 0, f64 = 1 };

enum class MatrixFormat { csv, binary, auto_detect };

/// Row-major real matrix. Values are always held as double; `dtype()` records
/// the precision the data was stored with so binary saves can reproduce it.
class DenseMatrix {
 public:
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data,
              DType dtype = DType::f64)
      : rows_(rows), cols_(cols), data_(std::move(data)), dtype_(dtype) {
    if (rows_ == 0 || cols_ == 0) {
      throw Error(ErrorKind::EmptyInput, "matrix must have at least one row and one column");
    }
    if (data_.size() != rows_ * cols_) {
      throw Error(ErrorKind::InvalidArgument,
                  "data length " + std::to_string(data_.size()) + " != rows*cols " +
                      std::to_string(rows_ * cols_));
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
      if (!std::isfinite(data_[i])) {
        throw Error(ErrorKind::NonFinite, "non-finite value",
                    SourcePos{i / cols_ + 1, i % cols_ + 1});
      }
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  DType dtype() const noexcept { return dtype_; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<const double> row(std::size_t i) const noexcept {
    return std::span<const double>(data_).subspan(i * cols_, cols_);
  }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
  DType dtype_;
};

inline constexpr std::array<unsigned char, 4> kSpmxMagic{0x53, 0x50, 0x4D, 0x58};
inline constexpr std::uint8_t kSpmxVersion = 1;
inline constexpr std::size_t kSpmxHeaderSize = 22;

namespace detail {

template <typename T>
void put_le(std::string& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(std::begin(bytes), std::end(bytes));
  out.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(const unsigned char* p) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(std::begin(bytes), std::end(bytes));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorKind::Io, "read failure on '" + path.string() + "'");
  return bytes;
}

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "write failure on '" + path.string() + "'");
}

inline bool has_spmx_magic(std::string_view bytes) {
  return bytes.size() >= kSpmxMagic.size() &&
         std::memcmp(bytes.data(), kSpmxMagic.data(), kSpmxMagic.size()) == 0;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace detail

/// Parses CSV text. Blank lines and lines starting with `#` are skipped;
/// `skip_header` drops the first remaining line.
inline DenseMatrix parse_csv(std::string_view text, bool skip_header = false) {
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  bool header_pending = skip_header;

  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
    ++line_no;
    line = detail::trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }

    std::size_t col = 0;
    while (true) {
      const auto comma = line.find(',');
      const std::string_view token = detail::trim(line.substr(0, comma));
      ++col;
      const SourcePos pos{line_no, col};
      double value = 0.0;
      const char* first = token.data();
      const char* last = token.data() + token.size();
      if (!token.empty() && *first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, last, value);
      if (token.empty() || ec == std::errc::invalid_argument || ptr != last) {
        throw Error(ErrorKind::NonNumeric, "cannot parse '" + std::string(token) + "' as a number", pos);
      }
      if (ec == std::errc::result_out_of_range || !std::isfinite(value)) {
        throw Error(ErrorKind::NonFinite, "non-finite value '" + std::string(token) + "'", pos);
      }
      values.push_back(value);
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }

    if (rows == 0) {
      cols = col;
    } else if (col != cols) {
      throw Error(ErrorKind::RaggedRow,
                  "expected " + std::to_string(cols) + " columns, found " + std::to_string(col),
                  SourcePos{line_no, 0});
    }
    ++rows;
  }

  if (rows == 0) throw Error(ErrorKind::EmptyInput, "no data rows");
  return DenseMatrix(rows, cols, std::move(values), DType::f64);
}

inline DenseMatrix parse_spmx(std::string_view bytes) {
  if (!detail::has_spmx_magic(bytes)) throw Error(ErrorKind::BadFormat, "missing SPMX magic");
  if (bytes.size() < kSpmxHeaderSize) throw Error(ErrorKind::BadFormat, "truncated SPMX header");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (p[4] != kSpmxVersion) {
    throw Error(ErrorKind::BadFormat, "unsupported SPMX version " + std::to_string(p[4]));
  }
  if (p[5] > 1) throw Error(ErrorKind::BadFormat, "unknown SPMX dtype " + std::to_string(p[5]));
  const auto dtype = static_cast<DType>(p[5]);
  const auto rows = detail::get_le<std::uint64_t>(p + 6);
  const auto cols = detail::get_le<std::uint64_t>(p + 14);
  if (rows == 0 || cols == 0) throw Error(ErrorKind::EmptyInput, "SPMX header declares an empty matrix");

  const std::size_t width = dtype == DType::f32 ? 4 : 8;
  if (cols > (bytes.size() / width) || rows > (bytes.size() / width) / cols ||
      bytes.size() - kSpmxHeaderSize != rows * cols * width) {
    throw Error(ErrorKind::BadFormat, "SPMX payload size does not match rows*cols");
  }

  std::vector<double> values(rows * cols);
  const unsigned char* payload = p + kSpmxHeaderSize;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = dtype == DType::f32 ? static_cast<double>(detail::get_le<float>(payload + i * 4))
                                         : detail::get_le<double>(payload + i * 8);
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::NonFinite, "non-finite value in SPMX payload",
                  SourcePos{i / cols + 1, i % cols + 1});
    }
    values[i] = v;
  }
  return DenseMatrix(rows, cols, std::move(values), dtype);
}

inline DenseMatrix load_matrix(const std::filesystem::path& path,
                               MatrixFormat format = MatrixFormat::auto_detect,
                               bool skip_header = false) {
  const std::string bytes = detail::read_file(path);
  if (bytes.empty()) throw Error(ErrorKind::EmptyInput, "'" + path.string() + "' is empty");
  switch (format) {
    case MatrixFormat::binary: return parse_spmx(bytes);
    case MatrixFormat::csv: return parse_csv(bytes, skip_header);
    case MatrixFormat::auto_detect:
      return detail::has_spmx_magic(bytes) ? parse_spmx(bytes) : parse_csv(bytes, skip_header);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown matrix format");
}

inline std::string to_csv(const DenseMatrix& m) {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out.push_back(',');
      // 17 significant digits round-trip any double.
      const auto res = std::to_chars(buf, buf + sizeof(buf), m(i, j), std::chars_format::general, 17);
      out.append(buf, res.ptr);
    }
    out.push_back('\n');
  }
  return out;
}

inline std::string to_spmx(const DenseMatrix& m) {
  std::string out;
  const std::size_t width = m.dtype() == DType::f32 ? 4 : 8;
  out.reserve(kSpmxHeaderSize + m.rows() * m.cols() * width);
  out.append(reinterpret_cast<const char*>(kSpmxMagic.data()), kSpmxMagic.size());
  out.push_back(static_cast<char>(kSpmxVersion));
  out.push_back(static_cast<char>(m.dtype()));
  detail::put_le<std::uint64_t>(out, m.rows());
  detail::put_le<std::uint64_t>(out, m.cols());
  for (const double v : m.data()) {
    if (m.dtype() == DType::f32) {
      detail::put_le<float>(out, static_cast<float>(v));
    } else {
      detail::put_le<double>(out, v);
    }
  }
  return out;
}

inline void save_matrix(const DenseMatrix& m, const std::filesystem::path& path, MatrixFormat format) {
  if (format == MatrixFormat::auto_detect) {
    throw Error(ErrorKind::InvalidArgument, "save_matrix needs an explicit format");
  }
  detail::write_file(path, format == MatrixFormat::binary ? to_spmx(m) : to_csv(m));
}

}  // namespace spade

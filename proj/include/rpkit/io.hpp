// Copyright 2026 The rpkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <bit>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>

#include "rpkit/error.hpp"
#include "rpkit/matrix.hpp"

// Matrix serialization.
//
//   CSV   one row per line, ',' separated, '.' decimal, no header.
//   RPKM  magic "RPKM", rows u32 LE, cols u32 LE, entries f64 LE row-major.
//
// CSV errors carry 1-based line numbers, binary errors carry byte offsets.

namespace rpkit::io {

enum class MatrixFormat { csv, rpkm };

namespace detail {

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian platforms are unsupported");

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_f64(std::string& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

inline std::uint32_t get_u32(const std::string& b, std::size_t off) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) {
    v = (v << 8) | static_cast<std::uint8_t>(b[off + static_cast<std::size_t>(i)]);
  }
  return v;
}

inline std::uint64_t get_u64(const std::string& b, std::size_t off) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) {
    v = (v << 8) | static_cast<std::uint8_t>(b[off + static_cast<std::size_t>(i)]);
  }
  return v;
}

inline double get_f64(const std::string& b, std::size_t off) {
  return std::bit_cast<double>(get_u64(b, off));
}

inline std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error(path + ": cannot open for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw io_error(path + ": read failed");
  return std::move(buf).str();
}

inline void write_file_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error(path + ": cannot open for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw io_error(path + ": write failed");
}

// Shortest representation that parses back to the identical double.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double_field(const std::string& path, std::size_t line,
                                 std::string_view field) {
  std::size_t b = 0;
  std::size_t e = field.size();
  while (b < e && (field[b] == ' ' || field[b] == '\t')) ++b;
  while (e > b && (field[e - 1] == ' ' || field[e - 1] == '\t')) --e;
  const std::string_view body = field.substr(b, e - b);
  if (body.empty()) {
    throw io_error(path + ":" + std::to_string(line) + ": empty field");
  }
  double v = 0.0;
  const auto res = std::from_chars(body.data(), body.data() + body.size(), v);
  if (res.ec != std::errc() || res.ptr != body.data() + body.size()) {
    throw io_error(path + ":" + std::to_string(line) + ": cannot parse '" +
                   std::string(body) + "' as a number");
  }
  if (!std::isfinite(v)) {
    throw io_error(path + ":" + std::to_string(line) + ": non-finite value '" +
                   std::string(body) + "'");
  }
  return v;
}

}  // namespace detail

inline constexpr char kMatrixMagic[4] = {'R', 'P', 'K', 'M'};

inline Matrix read_matrix_csv(const std::string& path) {
  const std::string bytes = detail::read_file_bytes(path);
  if (bytes.empty()) throw io_error(path + ": file is empty");
  std::vector<double> data;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= bytes.size()) {
    std::size_t eol = bytes.find('\n', pos);
    const bool last = (eol == std::string::npos);
    std::string_view line(bytes.data() + pos, (last ? bytes.size() : eol) - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    if (last && line.empty()) break;  // trailing newline, not a row
    std::size_t field_start = 0;
    std::size_t row_cols = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        data.push_back(detail::parse_double_field(
            path, line_no, line.substr(field_start, i - field_start)));
        ++row_cols;
        field_start = i + 1;
      }
    }
    if (cols == 0) {
      cols = row_cols;
    } else if (row_cols != cols) {
      throw io_error(path + ":" + std::to_string(line_no) + ": expected " +
                     std::to_string(cols) + " fields, got " +
                     std::to_string(row_cols));
    }
    ++rows;
    if (last) break;
    pos = eol + 1;
  }
  if (rows == 0) throw io_error(path + ": no rows");
  return Matrix(rows, cols, std::move(data));
}

inline void write_matrix_csv(const std::string& path, const Matrix& m) {
  std::string out;
  out.reserve(m.rows() * m.cols() * 12);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j > 0) out.push_back(',');
      out += detail::format_double(m(i, j));
    }
    out.push_back('\n');
  }
  detail::write_file_bytes(path, out);
}

inline Matrix read_matrix_rpkm(const std::string& path) {
  const std::string b = detail::read_file_bytes(path);
  if (b.size() < 12) {
    throw io_error(path + ": truncated header, file has " +
                   std::to_string(b.size()) + " bytes");
  }
  if (b.compare(0, 4, kMatrixMagic, 4) != 0) {
    throw io_error(path + ": bad magic at byte 0");
  }
  const std::uint32_t rows = detail::get_u32(b, 4);
  const std::uint32_t cols = detail::get_u32(b, 8);
  if (rows == 0 || cols == 0) {
    throw io_error(path + ": zero dimension in header at byte 4");
  }
  const std::size_t expected =
      12 + static_cast<std::size_t>(rows) * cols * 8;
  if (b.size() < expected) {
    throw io_error(path + ": truncated at byte " + std::to_string(b.size()) +
                   ", expected " + std::to_string(expected) + " bytes");
  }
  if (b.size() > expected) {
    throw io_error(path + ": trailing bytes after payload at byte " +
                   std::to_string(expected));
  }
  Vector data(static_cast<std::size_t>(rows) * cols);
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = detail::get_f64(b, 12 + i * 8);
    if (!std::isfinite(data[i])) {
      throw io_error(path + ": non-finite entry at byte " +
                     std::to_string(12 + i * 8));
    }
  }
  return Matrix(rows, cols, std::move(data));
}

inline void write_matrix_rpkm(const std::string& path, const Matrix& m) {
  if (m.rows() > 0xffffffffULL || m.cols() > 0xffffffffULL) {
    throw std::invalid_argument("matrix too large for the binary format");
  }
  std::string out;
  out.reserve(12 + m.rows() * m.cols() * 8);
  out.append(kMatrixMagic, 4);
  detail::put_u32(out, static_cast<std::uint32_t>(m.rows()));
  detail::put_u32(out, static_cast<std::uint32_t>(m.cols()));
  for (double v : m.data()) detail::put_f64(out, v);
  detail::write_file_bytes(path, out);
}

// Format detection goes by content, not extension: a file opening with the
// RPKM magic is binary, anything else is CSV.
inline Matrix read_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error(path + ": cannot open for reading");
  char magic[4] = {0, 0, 0, 0};
  in.read(magic, 4);
  const bool is_rpkm =
      in.gcount() == 4 && std::string_view(magic, 4) ==
                              std::string_view(kMatrixMagic, 4);
  in.close();
  return is_rpkm ? read_matrix_rpkm(path) : read_matrix_csv(path);
}

inline void write_matrix(const std::string& path, const Matrix& m,
                         MatrixFormat format) {
  if (format == MatrixFormat::rpkm) {
    write_matrix_rpkm(path, m);
  } else {
    write_matrix_csv(path, m);
  }
}

// A vector on disk is a 1×n or n×1 matrix. Anything else is a usage error,
// not a file defect.
inline Vector read_vector(const std::string& path) {
  Matrix m = read_matrix(path);
  if (m.rows() != 1 && m.cols() != 1) {
    throw std::invalid_argument(path + ": expected a vector, file holds a " +
                                rpkit::detail::shape_str(m.rows(), m.cols()) +
                                " matrix");
  }
  return m.data();
}

inline void write_vector(const std::string& path, const Vector& v,
                         MatrixFormat format) {
  write_matrix(path, Matrix(1, v.size(), v), format);
}

}  // namespace rpkit::io

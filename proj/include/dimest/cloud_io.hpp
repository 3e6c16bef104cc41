#pragma once

// Point-cloud files.
//
// CSV: one point per line, comma-separated decimals, optional first line
// starting with '#'. Written with 17 significant digits.
//
// Binary: "DIMC" | u32 version=1 | u64 N | u64 m | N*m f64, all little-endian,
// row-major.

#include <algorithm>
#include <array>
#include <bit>
#include <cerrno>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "dimest/error.hpp"
#include "dimest/point_cloud.hpp"

namespace dimest {

enum class CloudFormat { csv, binary };

inline constexpr std::array<char, 4> kBinaryMagic = {'D', 'I', 'M', 'C'};
inline constexpr std::uint32_t kBinaryVersion = 1;
inline constexpr std::size_t kBinaryHeaderSize = 24;

/// ".csv" (case-sensitive) selects CSV; anything else is binary.
inline CloudFormat format_from_path(std::string_view path) {
  return path.size() >= 4 && path.substr(path.size() - 4) == ".csv" ? CloudFormat::csv : CloudFormat::binary;
}

namespace detail {

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
}

template <class T>
void put(std::string& buf, T v) {
  v = to_little(v);
  char raw[sizeof(T)];
  std::memcpy(raw, &v, sizeof(T));
  buf.append(raw, sizeof(T));
}

template <class T>
T get(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return to_little(v);
}

inline std::string system_cause() { return std::generic_category().message(errno); }

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::string read_file(const std::string& path) {
  if (path.empty()) throw IoError("cannot read file: empty path");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "': " + system_cause());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error reading '" + path + "': " + system_cause());
  return content;
}

inline void write_file(const std::string& path, const std::string& content) {
  if (path.empty()) throw IoError("cannot write file: empty path");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing: " + system_cause());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw IoError("error writing '" + path + "': " + system_cause());
}

}  // namespace detail

inline PointCloud parse_csv(std::string_view text, std::string label = {}) {
  std::vector<double> coords;
  std::size_t columns = 0;
  std::size_t line_no = 0;
  std::size_t rows = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (rows > 0 || line_no > 1) throw ParseError("line " + std::to_string(line_no) + ": header only allowed first");
      continue;
    }
    std::size_t fields = 0;
    while (true) {
      const auto comma = line.find(',');
      const std::string_view field = detail::trim(line.substr(0, comma));
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
      if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size())
        throw ParseError("line " + std::to_string(line_no) + ": cannot parse field " + std::to_string(fields + 1) +
                         " '" + std::string(field) + "'");
      if (!std::isfinite(value))
        throw ValidationError("non-finite value at row " + std::to_string(rows) + ", column " +
                              std::to_string(fields) + " (line " + std::to_string(line_no) + ")");
      coords.push_back(value);
      ++fields;
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    if (rows == 0) {
      columns = fields;
    } else if (fields != columns) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(columns) +
                       " columns, found " + std::to_string(fields));
    }
    ++rows;
  }
  if (rows < 2) throw ValidationError("point cloud needs at least 2 points, got " + std::to_string(rows));
  return PointCloud(std::move(coords), columns, std::move(label));
}

inline std::string format_csv(const PointCloud& cloud) {
  std::string out;
  out.reserve(cloud.size() * cloud.ambient_dim() * 24);
  char buf[32];
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto row = cloud.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j > 0) out.push_back(',');
      const auto res = std::to_chars(buf, buf + sizeof(buf), row[j], std::chars_format::general, 17);
      out.append(buf, res.ptr);
    }
    out.push_back('\n');
  }
  return out;
}

inline PointCloud parse_binary(std::string_view bytes, std::string label = {}) {
  if (bytes.size() < kBinaryHeaderSize) throw ParseError("binary cloud: truncated header");
  if (std::memcmp(bytes.data(), kBinaryMagic.data(), 4) != 0) throw ParseError("binary cloud: bad magic");
  const auto version = detail::get<std::uint32_t>(bytes.data() + 4);
  if (version != kBinaryVersion) throw ParseError("binary cloud: unsupported version " + std::to_string(version));
  const auto n = detail::get<std::uint64_t>(bytes.data() + 8);
  const auto m = detail::get<std::uint64_t>(bytes.data() + 16);
  if (m == 0) throw ValidationError("binary cloud: ambient dimension is 0");
  if (n > (bytes.size() - kBinaryHeaderSize) / 8 / m || (bytes.size() - kBinaryHeaderSize) != n * m * 8)
    throw ParseError("binary cloud: payload size does not match header N=" + std::to_string(n) +
                     " m=" + std::to_string(m));
  std::vector<double> coords(n * m);
  const char* p = bytes.data() + kBinaryHeaderSize;
  for (std::size_t k = 0; k < coords.size(); ++k, p += 8) {
    coords[k] = std::bit_cast<double>(detail::get<std::uint64_t>(p));
    if (!std::isfinite(coords[k]))
      throw ValidationError("non-finite value at row " + std::to_string(k / m) + ", column " + std::to_string(k % m));
  }
  return PointCloud(std::move(coords), m, std::move(label));
}

inline std::string format_binary(const PointCloud& cloud) {
  std::string out;
  out.reserve(kBinaryHeaderSize + cloud.data().size() * 8);
  out.append(kBinaryMagic.data(), 4);
  detail::put<std::uint32_t>(out, kBinaryVersion);
  detail::put<std::uint64_t>(out, cloud.size());
  detail::put<std::uint64_t>(out, cloud.ambient_dim());
  for (double v : cloud.data()) detail::put<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

inline PointCloud load_cloud(const std::string& path, CloudFormat format) {
  const std::string content = detail::read_file(path);
  return format == CloudFormat::csv ? parse_csv(content, path) : parse_binary(content, path);
}

inline PointCloud load_cloud(const std::string& path) { return load_cloud(path, format_from_path(path)); }

inline void save_cloud(const PointCloud& cloud, const std::string& path, CloudFormat format) {
  detail::write_file(path, format == CloudFormat::csv ? format_csv(cloud) : format_binary(cloud));
}

inline void save_cloud(const PointCloud& cloud, const std::string& path) {
  save_cloud(cloud, path, format_from_path(path));
}

}  // namespace dimest

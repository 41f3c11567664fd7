#pragma once

// Internal little-endian binary readers/writers shared by the cache,
// checkpoint, and trace serializers.

#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "graphmax/matrix.hpp"

namespace graphmax::binio {

inline void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

inline void write_i32(std::ostream& out, std::int32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

inline void write_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

inline void write_string(std::ostream& out, const std::string& s) {
  write_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline void write_matrix(std::ostream& out, const Matrix& m) {
  write_u32(out, static_cast<std::uint32_t>(m.rows()));
  write_u32(out, static_cast<std::uint32_t>(m.cols()));
  if (!m.empty()) {
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(m.size() * sizeof(double)));
  }
}

inline std::uint32_t read_u32(std::istream& in, const char* what) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(v))) {
    throw std::runtime_error(std::string("binary read: truncated ") + what);
  }
  return v;
}

inline std::int32_t read_i32(std::istream& in, const char* what) {
  std::int32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(v))) {
    throw std::runtime_error(std::string("binary read: truncated ") + what);
  }
  return v;
}

inline std::uint64_t read_u64(std::istream& in, const char* what) {
  std::uint64_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(v))) {
    throw std::runtime_error(std::string("binary read: truncated ") + what);
  }
  return v;
}

inline std::string read_string(std::istream& in, const char* what) {
  std::uint32_t len = read_u32(in, what);
  std::string s(len, '\0');
  if (len > 0 && !in.read(s.data(), len)) {
    throw std::runtime_error(std::string("binary read: truncated ") + what);
  }
  return s;
}

inline Matrix read_matrix(std::istream& in, const char* what) {
  std::uint32_t rows = read_u32(in, what);
  std::uint32_t cols = read_u32(in, what);
  if (rows == 0 || cols == 0) return Matrix();
  std::vector<double> data(static_cast<std::size_t>(rows) * cols);
  if (!in.read(reinterpret_cast<char*>(data.data()),
               static_cast<std::streamsize>(data.size() * sizeof(double)))) {
    throw std::runtime_error(std::string("binary read: truncated ") + what);
  }
  return Matrix(static_cast<int>(rows), static_cast<int>(cols), std::move(data));
}

}  // namespace graphmax::binio

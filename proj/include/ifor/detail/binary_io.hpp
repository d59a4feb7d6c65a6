#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "ifor/errors.hpp"

namespace ifor::detail {

// All on-disk multi-byte values are little-endian.

template <typename T>
void write_le(std::ostream& out, T value) {
  static_assert(std::is_integral_v<T>);
  std::uint8_t buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i)
    buf[i] = std::uint8_t((std::make_unsigned_t<T>(value) >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

inline void write_f64(std::ostream& out, double value) {
  std::uint64_t bits;
  std::memcpy(&bits, &value, sizeof(bits));
  write_le<std::uint64_t>(out, bits);
}

template <typename T>
T read_le(std::istream& in, const char* context) {
  static_assert(std::is_integral_v<T>);
  std::uint8_t buf[sizeof(T)];
  in.read(reinterpret_cast<char*>(buf), sizeof(T));
  if (std::size_t(in.gcount()) != sizeof(T))
    throw IoError(IoError::Kind::Truncated, std::string(context) + ": unexpected end of file");
  std::make_unsigned_t<T> value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    value |= std::make_unsigned_t<T>(buf[i]) << (8 * i);
  return T(value);
}

inline double read_f64(std::istream& in, const char* context) {
  const std::uint64_t bits = read_le<std::uint64_t>(in, context);
  double value;
  std::memcpy(&value, &bits, sizeof(value));
  return value;
}

inline void write_tag(std::ostream& out, const std::string& tag) {
  if (tag.size() > 0xffff)
    throw IoError(IoError::Kind::Malformed, "tag string longer than 65535 bytes");
  write_le<std::uint16_t>(out, std::uint16_t(tag.size()));
  out.write(tag.data(), std::streamsize(tag.size()));
}

inline std::string read_tag(std::istream& in, const char* context) {
  const std::uint16_t len = read_le<std::uint16_t>(in, context);
  std::string tag(len, '\0');
  in.read(tag.data(), len);
  if (std::size_t(in.gcount()) != len)
    throw IoError(IoError::Kind::Truncated, std::string(context) + ": unexpected end of file");
  return tag;
}

}  // namespace ifor::detail

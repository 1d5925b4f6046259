#pragma once
//
// Little-endian primitives for the serialized offline artifacts (table
// files, randomness pools, bundle manifest sections).  Reads throw
// CorruptBundle on short data so a truncated file can never be consumed
// partially.

#include <cstring>
#include <istream>
#include <ostream>

#include "lutmpc/errors.hpp"
#include "lutmpc/sha256.hpp"

namespace lutmpc::detail {

inline void put_bytes(std::ostream& out, const void* p, std::size_t n) {
  out.write(static_cast<const char*>(p), std::streamsize(n));
  if (!out) throw IoError("write to serialized table stream failed");
}

inline void put_u16(std::ostream& out, u16 v) {
  u8 b[2] = {u8(v), u8(v >> 8)};
  put_bytes(out, b, 2);
}

inline void put_u32(std::ostream& out, u32 v) {
  u8 b[4];
  for (int i = 0; i < 4; ++i) b[i] = u8(v >> (8 * i));
  put_bytes(out, b, 4);
}

inline void put_u64(std::ostream& out, u64 v) {
  u8 b[8];
  for (int i = 0; i < 8; ++i) b[i] = u8(v >> (8 * i));
  put_bytes(out, b, 8);
}

inline void put_f64(std::ostream& out, double v) {
  u64 bits;
  std::memcpy(&bits, &v, 8);
  put_u64(out, bits);
}

inline void get_bytes(std::istream& in, void* p, std::size_t n) {
  in.read(static_cast<char*>(p), std::streamsize(n));
  if (std::size_t(in.gcount()) != n)
    throw CorruptBundle("serialized stream ends mid-record");
}

inline u16 get_u16(std::istream& in) {
  u8 b[2];
  get_bytes(in, b, 2);
  return u16(b[0] | (u16(b[1]) << 8));
}

inline u32 get_u32(std::istream& in) {
  u8 b[4];
  get_bytes(in, b, 4);
  u32 v = 0;
  for (int i = 0; i < 4; ++i) v |= u32(b[i]) << (8 * i);
  return v;
}

inline u64 get_u64(std::istream& in) {
  u8 b[8];
  get_bytes(in, b, 8);
  u64 v = 0;
  for (int i = 0; i < 8; ++i) v |= u64(b[i]) << (8 * i);
  return v;
}

inline double get_f64(std::istream& in) {
  u64 bits = get_u64(in);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

inline bool at_eof(std::istream& in) {
  return in.peek() == std::istream::traits_type::eof();
}

}  // namespace lutmpc::detail

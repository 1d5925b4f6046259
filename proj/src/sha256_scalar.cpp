// Portable SHA-256: the reference backend every SIMD kernel is checked
// against, and the fallback when the CPU offers nothing better.

#include "lutmpc/sha256.hpp"

#include <cstring>

namespace lutmpc {
namespace sha256_detail {

// FIPS 180-4 round constants and initial hash value, shared with the SIMD
// translation units.
extern const u32 kK[64];
extern const u32 kIv[8];

const u32 kK[64] = {
    0x428a2f98u, 0x71374491u, 0xb5c0fbcfu, 0xe9b5dba5u, 0x3956c25bu,
    0x59f111f1u, 0x923f82a4u, 0xab1c5ed5u, 0xd807aa98u, 0x12835b01u,
    0x243185beu, 0x550c7dc3u, 0x72be5d74u, 0x80deb1feu, 0x9bdc06a7u,
    0xc19bf174u, 0xe49b69c1u, 0xefbe4786u, 0x0fc19dc6u, 0x240ca1ccu,
    0x2de92c6fu, 0x4a7484aau, 0x5cb0a9dcu, 0x76f988dau, 0x983e5152u,
    0xa831c66du, 0xb00327c8u, 0xbf597fc7u, 0xc6e00bf3u, 0xd5a79147u,
    0x06ca6351u, 0x14292967u, 0x27b70a85u, 0x2e1b2138u, 0x4d2c6dfcu,
    0x53380d13u, 0x650a7354u, 0x766a0abbu, 0x81c2c92eu, 0x92722c85u,
    0xa2bfe8a1u, 0xa81a664bu, 0xc24b8b70u, 0xc76c51a3u, 0xd192e819u,
    0xd6990624u, 0xf40e3585u, 0x106aa070u, 0x19a4c116u, 0x1e376c08u,
    0x2748774cu, 0x34b0bcb5u, 0x391c0cb3u, 0x4ed8aa4au, 0x5b9cca4fu,
    0x682e6ff3u, 0x748f82eeu, 0x78a5636fu, 0x84c87814u, 0x8cc70208u,
    0x90befffau, 0xa4506cebu, 0xbef9a3f7u, 0xc67178f2u};

const u32 kIv[8] = {0x6a09e667u, 0xbb67ae85u, 0x3c6ef372u, 0xa54ff53au,
                    0x510e527fu, 0x9b05688cu, 0x1f83d9abu, 0x5be0cd19u};

namespace {

inline u32 ror(u32 x, int r) { return (x >> r) | (x << (32 - r)); }

inline u32 load_be32(const u8* p) {
  return (u32(p[0]) << 24) | (u32(p[1]) << 16) | (u32(p[2]) << 8) | u32(p[3]);
}

inline void store_be32(u8* p, u32 v) {
  p[0] = u8(v >> 24);
  p[1] = u8(v >> 16);
  p[2] = u8(v >> 8);
  p[3] = u8(v);
}

void compress(u32 state[8], const u8* block) {
  u32 w[64];
  for (int t = 0; t < 16; ++t) w[t] = load_be32(block + 4 * t);
  for (int t = 16; t < 64; ++t) {
    u32 s0 = ror(w[t - 15], 7) ^ ror(w[t - 15], 18) ^ (w[t - 15] >> 3);
    u32 s1 = ror(w[t - 2], 17) ^ ror(w[t - 2], 19) ^ (w[t - 2] >> 10);
    w[t] = w[t - 16] + s0 + w[t - 7] + s1;
  }
  u32 a = state[0], b = state[1], c = state[2], d = state[3];
  u32 e = state[4], f = state[5], g = state[6], h = state[7];
  for (int t = 0; t < 64; ++t) {
    u32 s1 = ror(e, 6) ^ ror(e, 11) ^ ror(e, 25);
    u32 ch = (e & f) ^ (~e & g);
    u32 t1 = h + s1 + ch + kK[t] + w[t];
    u32 s0 = ror(a, 2) ^ ror(a, 13) ^ ror(a, 22);
    u32 maj = (a & b) ^ (a & c) ^ (b & c);
    u32 t2 = s0 + maj;
    h = g;
    g = f;
    f = e;
    e = d + t1;
    d = c;
    c = b;
    b = a;
    a = t1 + t2;
  }
  state[0] += a;
  state[1] += b;
  state[2] += c;
  state[3] += d;
  state[4] += e;
  state[5] += f;
  state[6] += g;
  state[7] += h;
}

}  // namespace

void compress_blocks_scalar(const u8* blocks, std::size_t n, Digest32* out) {
  for (std::size_t i = 0; i < n; ++i) {
    u32 st[8];
    std::memcpy(st, kIv, sizeof st);
    compress(st, blocks + 64 * i);
    for (int j = 0; j < 8; ++j) store_be32(out[i].data() + 4 * j, st[j]);
  }
}

}  // namespace sha256_detail

Digest32 sha256(const void* data, std::size_t len) {
  using namespace sha256_detail;
  u32 st[8];
  std::memcpy(st, kIv, sizeof st);
  const u8* p = static_cast<const u8*>(data);
  std::size_t remaining = len;
  while (remaining >= 64) {
    compress(st, p);
    p += 64;
    remaining -= 64;
  }
  // Final padding: 0x80, zeros, then the message length in bits, big-endian.
  u8 tail[128] = {0};
  std::memcpy(tail, p, remaining);
  tail[remaining] = 0x80;
  std::size_t tail_blocks = remaining + 1 + 8 <= 64 ? 1 : 2;
  u64 bits = u64(len) * 8;
  u8* lenp = tail + 64 * tail_blocks - 8;
  for (int j = 0; j < 8; ++j) lenp[j] = u8(bits >> (56 - 8 * j));
  compress(st, tail);
  if (tail_blocks == 2) compress(st, tail + 64);
  Digest32 out;
  for (int j = 0; j < 8; ++j) sha256_detail::store_be32(out.data() + 4 * j, st[j]);
  return out;
}

}  // namespace lutmpc

// Backend selection and message layout for the SHA-256 subsystem.
//
// Every digest this project computes is of a short (<= 55 byte) message, so
// each message occupies exactly one padded block and the multi-buffer
// kernels never need cross-block chaining.  This file builds padded blocks
// (or striped schedule words for the SIMD kernels), picks the fastest
// usable kernel the first time a batch entry point runs, and exposes the
// public API declared in sha256.hpp.

#include "lutmpc/sha256.hpp"

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

namespace lutmpc {
namespace {

using namespace sha256_detail;

enum class Backend { scalar, shani, avx2, avx512 };

const char* backend_label(Backend b) {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::shani: return "shani";
    case Backend::avx2: return "avx2";
    case Backend::avx512: return "avx512";
  }
  return "scalar";
}

bool backend_usable(Backend b) {
  switch (b) {
    case Backend::scalar: return true;
    case Backend::shani: return have_shani();
    case Backend::avx2: return have_avx2();
    case Backend::avx512: return have_avx512();
  }
  return false;
}

inline u32 bswap32(u32 v) { return __builtin_bswap32(v); }

inline u32 load_be32(const u8* p) {
  return (u32(p[0]) << 24) | (u32(p[1]) << 16) | (u32(p[2]) << 8) | u32(p[3]);
}

inline void store_be32(u8* p, u32 v) {
  p[0] = u8(v >> 24);
  p[1] = u8(v >> 16);
  p[2] = u8(v >> 8);
  p[3] = u8(v);
}

// Lay out one short message as a fully padded 64-byte block.
inline void pad_block(const u8* msg, std::size_t msg_len, u8 block[64]) {
  std::memcpy(block, msg, msg_len);
  std::memset(block + msg_len, 0, 64 - msg_len);
  block[msg_len] = 0x80;
  u32 bits = u32(msg_len) * 8;
  block[62] = u8(bits >> 8);
  block[63] = u8(bits);
}

inline void pad_block_u64le(u64 x, u8 block[64]) {
  std::memset(block, 0, 64);
  for (int j = 0; j < 8; ++j) block[j] = u8(x >> (8 * j));
  block[8] = 0x80;
  block[63] = 64;  // 8 bytes = 64 bits
}

// --- striped staging for the multi-buffer kernels ---------------------------

// Schedule words of the padded block of an 8-byte LE message: W0/W1 carry the
// data, W2 the 0x80 pad marker, W15 the bit length.
inline void stage_u64le(u64 x, std::size_t lane, std::size_t lanes, u32* w) {
  w[0 * lanes + lane] = bswap32(u32(x));
  w[1 * lanes + lane] = bswap32(u32(x >> 32));
  w[2 * lanes + lane] = 0x80000000u;
  w[15 * lanes + lane] = 64;
}

inline void stage_block(const u8 block[64], std::size_t lane,
                        std::size_t lanes, u32* w) {
  for (int t = 0; t < 16; ++t) w[t * lanes + lane] = load_be32(block + 4 * t);
}

inline void unstripe(const u32* st, std::size_t lane, std::size_t lanes,
                     Digest32& out) {
  for (int j = 0; j < 8; ++j)
    store_be32(out.data() + 4 * j, st[j * lanes + lane]);
}

// --- batch runners per backend ---------------------------------------------

void batch_blocks(Backend b, const u8* blocks, std::size_t n, Digest32* out) {
  // Block-oriented backends.
  if (b == Backend::shani) {
    compress_blocks_shani(blocks, n, out);
    return;
  }
  if (b == Backend::scalar) {
    compress_blocks_scalar(blocks, n, out);
    return;
  }
  // Tile backends: stripe, compress, unstripe.
  const std::size_t lanes = b == Backend::avx512 ? 16 : 8;
  u32 w[16 * 16];
  u32 st[8 * 16];
  for (std::size_t base = 0; base < n; base += lanes) {
    const std::size_t m = n - base < lanes ? n - base : lanes;
    for (std::size_t l = 0; l < m; ++l)
      stage_block(blocks + 64 * (base + l), l, lanes, w);
    // Partial tail tile: repeat the last message in the unused lanes.
    for (std::size_t l = m; l < lanes; ++l)
      stage_block(blocks + 64 * (base + m - 1), l, lanes, w);
    if (b == Backend::avx512)
      tile16_avx512(w, st);
    else
      tile8_avx2(w, st);
    for (std::size_t l = 0; l < m; ++l) unstripe(st, l, lanes, out[base + l]);
  }
}

void batch_u64le(Backend b, const u64* xs, std::size_t n, Digest32* out) {
  if (b == Backend::shani || b == Backend::scalar) {
    std::vector<u8> blocks(64 * n);
    for (std::size_t i = 0; i < n; ++i) pad_block_u64le(xs[i], blocks.data() + 64 * i);
    batch_blocks(b, blocks.data(), n, out);
    return;
  }
  const std::size_t lanes = b == Backend::avx512 ? 16 : 8;
  u32 w[16 * 16];
  u32 st[8 * 16];
  for (std::size_t base = 0; base < n; base += lanes) {
    const std::size_t m = n - base < lanes ? n - base : lanes;
    std::memset(w, 0, sizeof(u32) * 16 * lanes);
    for (std::size_t l = 0; l < lanes; ++l)
      stage_u64le(xs[base + (l < m ? l : m - 1)], l, lanes, w);
    if (b == Backend::avx512)
      tile16_avx512(w, st);
    else
      tile8_avx2(w, st);
    for (std::size_t l = 0; l < m; ++l) unstripe(st, l, lanes, out[base + l]);
  }
}

// --- selection --------------------------------------------------------------

Backend benchmark_pick() {
  const Backend candidates[] = {Backend::scalar, Backend::shani, Backend::avx2,
                                Backend::avx512};
  constexpr std::size_t kN = 4096;
  std::vector<u64> xs(kN);
  for (std::size_t i = 0; i < kN; ++i) xs[i] = i * 0x9e3779b97f4a7c15ull;
  std::vector<Digest32> sink(kN);

  Backend best = Backend::scalar;
  double best_ns = 1e300;
  for (Backend b : candidates) {
    if (!backend_usable(b)) continue;
    batch_u64le(b, xs.data(), kN, sink.data());  // warm up
    double ns = 1e300;
    for (int rep = 0; rep < 3; ++rep) {
      auto t0 = std::chrono::steady_clock::now();
      batch_u64le(b, xs.data(), kN, sink.data());
      auto t1 = std::chrono::steady_clock::now();
      double d = std::chrono::duration<double, std::nano>(t1 - t0).count();
      if (d < ns) ns = d;
    }
    if (ns < best_ns) {
      best_ns = ns;
      best = b;
    }
  }
  return best;
}

Backend pick_backend() {
  if (const char* env = std::getenv("LUTMPC_SHA_BACKEND")) {
    const std::string want = env;
    for (Backend b : {Backend::scalar, Backend::shani, Backend::avx2,
                      Backend::avx512}) {
      if (want == backend_label(b) && backend_usable(b)) return b;
    }
    // Unknown or unusable names fall through to the benchmark rather than
    // risking an illegal instruction.
  }
  return benchmark_pick();
}

Backend chosen_backend() {
  static const Backend b = pick_backend();
  return b;
}

}  // namespace

Digest32 sha256_u64le(u64 x) {
  u8 block[64];
  pad_block_u64le(x, block);
  Digest32 out;
  if (have_shani())
    compress_blocks_shani(block, 1, &out);
  else
    compress_blocks_scalar(block, 1, &out);
  return out;
}

void sha256_batch(const u8* msgs, std::size_t msg_len, std::size_t n,
                  Digest32* out) {
  if (n == 0) return;
  const Backend b = chosen_backend();
  if (b == Backend::shani || b == Backend::scalar) {
    std::vector<u8> blocks(64 * n);
    for (std::size_t i = 0; i < n; ++i)
      pad_block(msgs + msg_len * i, msg_len, blocks.data() + 64 * i);
    batch_blocks(b, blocks.data(), n, out);
    return;
  }
  const std::size_t lanes = b == Backend::avx512 ? 16 : 8;
  u32 w[16 * 16];
  u32 st[8 * 16];
  u8 block[64];
  for (std::size_t base = 0; base < n; base += lanes) {
    const std::size_t m = n - base < lanes ? n - base : lanes;
    for (std::size_t l = 0; l < lanes; ++l) {
      pad_block(msgs + msg_len * (base + (l < m ? l : m - 1)), msg_len, block);
      stage_block(block, l, lanes, w);
    }
    if (b == Backend::avx512)
      tile16_avx512(w, st);
    else
      tile8_avx2(w, st);
    for (std::size_t l = 0; l < m; ++l) unstripe(st, l, lanes, out[base + l]);
  }
}

void sha256_u64le_batch(const u64* xs, std::size_t n, Digest32* out) {
  if (n == 0) return;
  batch_u64le(chosen_backend(), xs, n, out);
}

const char* sha256_backend_name() { return backend_label(chosen_backend()); }

}  // namespace lutmpc

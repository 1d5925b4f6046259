#pragma once
//
// Randomness utilities.
//
// Two tiers, chosen by what an adversary could do with the stream:
//
//  * Drbg — SHA-256 in counter mode.  Used for everything a party must not
//    be able to predict: per-query masks, table keys, Beaver triples,
//    matrix masks.  Seeds form a derivation tree (derive_seed), so any
//    component's stream is addressable by path and independent of
//    generation order.
//
//  * Prf64 — a splitmix-style integer PRF.  Used only for table value
//    shares.  Those shares need no secrecy from the opposite party: each
//    party knows the table function f and its own table, and the two
//    tables sum to f pointwise, so either party can already reconstruct
//    the other's entries in full.  What matters is O(1) random access by
//    grid point (the offline generator and the test oracle must agree
//    entry-by-entry without replaying a stream), and that is exactly what
//    a keyed integer mix gives us at ~1ns per value.

#include <cstring>
#include <string_view>

#include "lutmpc/sha256.hpp"

namespace lutmpc {

// Finalizer from splitmix64: a fast invertible 64-bit mix with full
// avalanche, the building block of Prf64.
inline u64 mix64(u64 x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

// Keyed PRF over u64, addressable by index.
struct Prf64 {
  u64 k1 = 0;
  u64 k2 = 0;

  u64 at(u64 x) const { return mix64(k1 ^ mix64(x + k2)); }
};

// Derive a child seed from a parent and a textual tag plus an index pair.
// The tag keeps different uses of the same parent seed in disjoint domains;
// the indices address repeated structures (table counters, triple indices).
inline Digest32 derive_seed(const Digest32& parent, std::string_view tag,
                            u64 a = 0, u64 b = 0) {
  u8 buf[32 + 48 + 16];
  std::size_t tag_len = tag.size() > 48 ? 48 : tag.size();
  std::memcpy(buf, parent.data(), 32);
  std::memset(buf + 32, 0, 48);
  std::memcpy(buf + 32, tag.data(), tag_len);
  for (int j = 0; j < 8; ++j) {
    buf[80 + j] = u8(a >> (8 * j));
    buf[88 + j] = u8(b >> (8 * j));
  }
  return sha256(buf, sizeof buf);
}

inline Digest32 seed_from_u64(u64 s) { return sha256_u64le(s); }

// Deterministic random bit generator: SHA-256 over (seed || counter),
// consumed 32 bytes at a time.
class Drbg {
 public:
  explicit Drbg(const Digest32& seed) : seed_(seed) {}
  Drbg(const Digest32& parent, std::string_view tag, u64 a = 0, u64 b = 0)
      : seed_(derive_seed(parent, tag, a, b)) {}

  u64 next_u64() {
    if (pos_ == 4) refill();
    return block_[pos_++];
  }

  // Uniform value in [0, n) by rejection sampling (n >= 1).
  u64 next_below(u64 n) {
    if (n == 0) return 0;
    const u64 limit = n * (~u64(0) / n);  // largest multiple of n that fits
    for (;;) {
      u64 v = next_u64();
      if (v < limit) return v % n;
    }
  }

  // Uniform double in [0, 1) with 53 bits of precision.
  double next_unit() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Bulk draw; identical to n calls of next_u64 but whole blocks go through
  // the multi-buffer hash backend.
  void fill(u64* out, std::size_t n) {
    std::size_t i = 0;
    while (pos_ < 4 && i < n) out[i++] = block_[pos_++];
    std::size_t whole = (n - i) / 4;
    if (whole > 0) {
      bulk_blocks(out + i, whole);
      i += 4 * whole;
    }
    while (i < n) out[i] = next_u64(), ++i;
  }

 private:
  void bulk_blocks(u64* out, std::size_t nblocks) {
    constexpr std::size_t kChunk = 256;
    u8 msgs[kChunk * 40];
    Digest32 digests[kChunk];
    while (nblocks > 0) {
      std::size_t k = nblocks < kChunk ? nblocks : kChunk;
      for (std::size_t m = 0; m < k; ++m) {
        std::memcpy(msgs + 40 * m, seed_.data(), 32);
        u64 c = ctr_ + m;
        for (int j = 0; j < 8; ++j) msgs[40 * m + 32 + j] = u8(c >> (8 * j));
      }
      sha256_batch(msgs, 40, k, digests);
      std::memcpy(out, digests, 32 * k);
      ctr_ += k;
      out += 4 * k;
      nblocks -= k;
    }
  }

  void refill() {
    u8 buf[40];
    std::memcpy(buf, seed_.data(), 32);
    for (int j = 0; j < 8; ++j) buf[32 + j] = u8(ctr_ >> (8 * j));
    Digest32 d = sha256(buf, sizeof buf);
    std::memcpy(block_, d.data(), 32);
    ++ctr_;
    pos_ = 0;
  }

  Digest32 seed_;
  u64 ctr_ = 0;
  u64 block_[4] = {};
  int pos_ = 4;
};

}  // namespace lutmpc

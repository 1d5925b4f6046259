#pragma once
//
// SHA-256 with pluggable SIMD backends.
//
// Table generation hashes every grid point of every lookup table, so the
// offline phase is bounded by single-block SHA-256 throughput.  The batch
// entry points below therefore run a multi-buffer kernel (8-way AVX2 or
// 16-way AVX-512) when the CPU has one, a SHA-NI single-stream kernel as a
// middle option, and plain C++ everywhere else.  The first batch call
// micro-benchmarks the usable kernels and keeps the fastest; set
// LUTMPC_SHA_BACKEND=scalar|shani|avx2|avx512 to force one.
//
// All backends produce byte-identical digests; tests cross-check them
// against the FIPS 180-4 vectors and against each other.

#include <array>
#include <cstddef>
#include <cstdint>

namespace lutmpc {

using u8 = std::uint8_t;
using u16 = std::uint16_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;

using Digest32 = std::array<u8, 32>;

// One-shot hash of an arbitrary-length message.
Digest32 sha256(const void* data, std::size_t len);

// Hash of the 8-byte little-endian encoding of `x` (the ring-element hash
// used for table keys).
Digest32 sha256_u64le(u64 x);

// Batch hash of `n` fixed-size messages, each `msg_len` bytes (msg_len <= 55
// so every message fits one padded block), laid out contiguously.
void sha256_batch(const u8* msgs, std::size_t msg_len, std::size_t n,
                  Digest32* out);

// Batch form of sha256_u64le: digests of the 8-byte LE encodings of xs[0..n).
void sha256_u64le_batch(const u64* xs, std::size_t n, Digest32* out);

// Name of the kernel the batch entry points currently use ("scalar",
// "shani", "avx2", "avx512").  Forces backend selection if it has not
// happened yet.
const char* sha256_backend_name();

namespace sha256_detail {

// Compress `n` 64-byte blocks, each an independent single-block message
// (i.e. each is compressed against the SHA-256 IV), writing big-endian
// serialized digests.
void compress_blocks_scalar(const u8* blocks, std::size_t n, Digest32* out);
void compress_blocks_shani(const u8* blocks, std::size_t n, Digest32* out);

// Multi-buffer tile kernels.  Input is the 16 message-schedule words of
// LANES independent single-block messages in striped layout:
//   w[t * LANES + lane] = word t of message `lane`, already big-endian
// decoded.  Output is the 8 state words in the same striped layout.
void tile8_avx2(const u32* w, u32* out);     // LANES = 8
void tile16_avx512(const u32* w, u32* out);  // LANES = 16

bool have_shani();
bool have_avx2();
bool have_avx512();

}  // namespace sha256_detail

}  // namespace lutmpc

// SHA-NI backend: single-stream compression using the dedicated SHA-256
// instructions.  Compiled with -msha -msse4.1; only dispatched when cpuid
// reports the extension.

#include "lutmpc/sha256.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace lutmpc {
namespace sha256_detail {

namespace {

// Four rounds: the low two K+W words feed the CDGH update, the high two
// (after the lane swap) feed the ABEF update.
inline void rounds4(__m128i& abef, __m128i& cdgh, __m128i kw) {
  cdgh = _mm_sha256rnds2_epu32(cdgh, abef, kw);
  kw = _mm_shuffle_epi32(kw, 0x0e);
  abef = _mm_sha256rnds2_epu32(abef, cdgh, kw);
}

}  // namespace

void compress_blocks_shani(const u8* blocks, std::size_t n, Digest32* out) {
  extern const u32 kK[64];
  extern const u32 kIv[8];

  // Byte shuffle turning little-endian loads into big-endian words.
  const __m128i bswap =
      _mm_set_epi64x(0x0c0d0e0f08090a0bll, 0x0405060700010203ll);

  // Pack the IV into the ABEF/CDGH register layout the sha256rnds2
  // instruction expects (high lane first: A,B,E,F and C,D,G,H).
  const __m128i init0 = _mm_set_epi32(int(kIv[0]), int(kIv[1]), int(kIv[4]), int(kIv[5]));
  const __m128i init1 = _mm_set_epi32(int(kIv[2]), int(kIv[3]), int(kIv[6]), int(kIv[7]));

  const __m128i* k = reinterpret_cast<const __m128i*>(kK);

  for (std::size_t i = 0; i < n; ++i) {
    const u8* p = blocks + 64 * i;
    __m128i abef = init0;
    __m128i cdgh = init1;

    __m128i m0 = _mm_shuffle_epi8(_mm_loadu_si128(reinterpret_cast<const __m128i*>(p + 0)), bswap);
    __m128i m1 = _mm_shuffle_epi8(_mm_loadu_si128(reinterpret_cast<const __m128i*>(p + 16)), bswap);
    __m128i m2 = _mm_shuffle_epi8(_mm_loadu_si128(reinterpret_cast<const __m128i*>(p + 32)), bswap);
    __m128i m3 = _mm_shuffle_epi8(_mm_loadu_si128(reinterpret_cast<const __m128i*>(p + 48)), bswap);

    rounds4(abef, cdgh, _mm_add_epi32(m0, _mm_loadu_si128(k + 0)));
    rounds4(abef, cdgh, _mm_add_epi32(m1, _mm_loadu_si128(k + 1)));
    rounds4(abef, cdgh, _mm_add_epi32(m2, _mm_loadu_si128(k + 2)));
    rounds4(abef, cdgh, _mm_add_epi32(m3, _mm_loadu_si128(k + 3)));

    for (int g = 4; g < 16; ++g) {
      // Schedule one new 4-word group from the previous four.
      __m128i next = _mm_sha256msg1_epu32(m0, m1);
      next = _mm_add_epi32(next, _mm_alignr_epi8(m3, m2, 4));
      next = _mm_sha256msg2_epu32(next, m3);
      m0 = m1;
      m1 = m2;
      m2 = m3;
      m3 = next;
      rounds4(abef, cdgh, _mm_add_epi32(m3, _mm_loadu_si128(k + g)));
    }

    abef = _mm_add_epi32(abef, init0);
    cdgh = _mm_add_epi32(cdgh, init1);

    // Unpack ABEF/CDGH back to the A..H order and serialize big-endian.
    alignas(16) u32 s0[4], s1[4];
    _mm_store_si128(reinterpret_cast<__m128i*>(s0), abef);  // F E B A
    _mm_store_si128(reinterpret_cast<__m128i*>(s1), cdgh);  // H G D C
    const u32 st[8] = {s0[3], s0[2], s1[3], s1[2], s0[1], s0[0], s1[1], s1[0]};
    for (int j = 0; j < 8; ++j) {
      u32 v = st[j];
      u8* q = out[i].data() + 4 * j;
      q[0] = u8(v >> 24);
      q[1] = u8(v >> 16);
      q[2] = u8(v >> 8);
      q[3] = u8(v);
    }
  }
}

bool have_shani() { return __builtin_cpu_supports("sha") != 0; }

}  // namespace sha256_detail
}  // namespace lutmpc

#else

namespace lutmpc {
namespace sha256_detail {
void compress_blocks_shani(const u8*, std::size_t, Digest32*) {}
bool have_shani() { return false; }
}  // namespace sha256_detail
}  // namespace lutmpc

#endif

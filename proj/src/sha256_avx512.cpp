// AVX-512 backend: sixteen independent single-block SHA-256 compressions in
// the sixteen 32-bit lanes of one zmm register set.  Native rotates and
// ternary-logic fusion of ch/maj/xor3 make this the fastest software path.
// Compiled with -mavx512f -mavx512bw.

#include "lutmpc/sha256.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace lutmpc {
namespace sha256_detail {

extern const u32 kK[64];
extern const u32 kIv[8];

namespace {

// Three-input boolean ops as single vpternlog instructions:
//   0x96 = a ^ b ^ c,  0xca = (a & b) | (~a & c),  0xe8 = majority(a, b, c).
inline __m512i xor3(__m512i a, __m512i b, __m512i c) {
  return _mm512_ternarylogic_epi32(a, b, c, 0x96);
}
inline __m512i ch3(__m512i e, __m512i f, __m512i g) {
  return _mm512_ternarylogic_epi32(e, f, g, 0xca);
}
inline __m512i maj3(__m512i a, __m512i b, __m512i c) {
  return _mm512_ternarylogic_epi32(a, b, c, 0xe8);
}

}  // namespace

void tile16_avx512(const u32* w_in, u32* out) {
  __m512i w[16];
  for (int t = 0; t < 16; ++t)
    w[t] = _mm512_loadu_si512(w_in + 16 * t);

  __m512i a = _mm512_set1_epi32(int(kIv[0]));
  __m512i b = _mm512_set1_epi32(int(kIv[1]));
  __m512i c = _mm512_set1_epi32(int(kIv[2]));
  __m512i d = _mm512_set1_epi32(int(kIv[3]));
  __m512i e = _mm512_set1_epi32(int(kIv[4]));
  __m512i f = _mm512_set1_epi32(int(kIv[5]));
  __m512i g = _mm512_set1_epi32(int(kIv[6]));
  __m512i h = _mm512_set1_epi32(int(kIv[7]));

  for (int t = 0; t < 64; ++t) {
    if (t >= 16) {
      __m512i w15 = w[(t - 15) & 15];
      __m512i w2 = w[(t - 2) & 15];
      __m512i s0 = xor3(_mm512_ror_epi32(w15, 7), _mm512_ror_epi32(w15, 18),
                        _mm512_srli_epi32(w15, 3));
      __m512i s1 = xor3(_mm512_ror_epi32(w2, 17), _mm512_ror_epi32(w2, 19),
                        _mm512_srli_epi32(w2, 10));
      w[t & 15] = _mm512_add_epi32(_mm512_add_epi32(w[t & 15], s0),
                                   _mm512_add_epi32(w[(t - 7) & 15], s1));
    }
    __m512i s1 = xor3(_mm512_ror_epi32(e, 6), _mm512_ror_epi32(e, 11),
                      _mm512_ror_epi32(e, 25));
    __m512i t1 = _mm512_add_epi32(
        _mm512_add_epi32(h, s1),
        _mm512_add_epi32(
            _mm512_add_epi32(ch3(e, f, g), _mm512_set1_epi32(int(kK[t]))),
            w[t & 15]));
    __m512i s0 = xor3(_mm512_ror_epi32(a, 2), _mm512_ror_epi32(a, 13),
                      _mm512_ror_epi32(a, 22));
    __m512i t2 = _mm512_add_epi32(s0, maj3(a, b, c));
    h = g;
    g = f;
    f = e;
    e = _mm512_add_epi32(d, t1);
    d = c;
    c = b;
    b = a;
    a = _mm512_add_epi32(t1, t2);
  }

  const __m512i st[8] = {
      _mm512_add_epi32(a, _mm512_set1_epi32(int(kIv[0]))),
      _mm512_add_epi32(b, _mm512_set1_epi32(int(kIv[1]))),
      _mm512_add_epi32(c, _mm512_set1_epi32(int(kIv[2]))),
      _mm512_add_epi32(d, _mm512_set1_epi32(int(kIv[3]))),
      _mm512_add_epi32(e, _mm512_set1_epi32(int(kIv[4]))),
      _mm512_add_epi32(f, _mm512_set1_epi32(int(kIv[5]))),
      _mm512_add_epi32(g, _mm512_set1_epi32(int(kIv[6]))),
      _mm512_add_epi32(h, _mm512_set1_epi32(int(kIv[7])))};
  for (int j = 0; j < 8; ++j) _mm512_storeu_si512(out + 16 * j, st[j]);
}

bool have_avx512() {
  return __builtin_cpu_supports("avx512f") != 0 &&
         __builtin_cpu_supports("avx512bw") != 0;
}

}  // namespace sha256_detail
}  // namespace lutmpc

#else

namespace lutmpc {
namespace sha256_detail {
void tile16_avx512(const u32*, u32*) {}
bool have_avx512() { return false; }
}  // namespace sha256_detail
}  // namespace lutmpc

#endif

// AVX2 backend: eight independent single-block SHA-256 compressions run in
// the eight 32-bit lanes of one ymm register set.  Compiled with -mavx2.

#include "lutmpc/sha256.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace lutmpc {
namespace sha256_detail {

extern const u32 kK[64];
extern const u32 kIv[8];

namespace {

inline __m256i ror(__m256i x, int r) {
  return _mm256_or_si256(_mm256_srli_epi32(x, r), _mm256_slli_epi32(x, 32 - r));
}

}  // namespace

void tile8_avx2(const u32* w_in, u32* out) {
  __m256i w[16];
  for (int t = 0; t < 16; ++t)
    w[t] = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(w_in + 8 * t));

  __m256i a = _mm256_set1_epi32(int(kIv[0]));
  __m256i b = _mm256_set1_epi32(int(kIv[1]));
  __m256i c = _mm256_set1_epi32(int(kIv[2]));
  __m256i d = _mm256_set1_epi32(int(kIv[3]));
  __m256i e = _mm256_set1_epi32(int(kIv[4]));
  __m256i f = _mm256_set1_epi32(int(kIv[5]));
  __m256i g = _mm256_set1_epi32(int(kIv[6]));
  __m256i h = _mm256_set1_epi32(int(kIv[7]));

  for (int t = 0; t < 64; ++t) {
    if (t >= 16) {
      __m256i w15 = w[(t - 15) & 15];
      __m256i w2 = w[(t - 2) & 15];
      __m256i s0 = _mm256_xor_si256(_mm256_xor_si256(ror(w15, 7), ror(w15, 18)),
                                    _mm256_srli_epi32(w15, 3));
      __m256i s1 = _mm256_xor_si256(_mm256_xor_si256(ror(w2, 17), ror(w2, 19)),
                                    _mm256_srli_epi32(w2, 10));
      w[t & 15] = _mm256_add_epi32(
          _mm256_add_epi32(w[t & 15], s0),
          _mm256_add_epi32(w[(t - 7) & 15], s1));
    }
    __m256i s1 = _mm256_xor_si256(_mm256_xor_si256(ror(e, 6), ror(e, 11)),
                                  ror(e, 25));
    __m256i ch = _mm256_xor_si256(_mm256_and_si256(e, f),
                                  _mm256_andnot_si256(e, g));
    __m256i t1 = _mm256_add_epi32(
        _mm256_add_epi32(h, s1),
        _mm256_add_epi32(_mm256_add_epi32(ch, _mm256_set1_epi32(int(kK[t]))),
                         w[t & 15]));
    __m256i s0 = _mm256_xor_si256(_mm256_xor_si256(ror(a, 2), ror(a, 13)),
                                  ror(a, 22));
    __m256i maj = _mm256_xor_si256(
        _mm256_xor_si256(_mm256_and_si256(a, b), _mm256_and_si256(a, c)),
        _mm256_and_si256(b, c));
    __m256i t2 = _mm256_add_epi32(s0, maj);
    h = g;
    g = f;
    f = e;
    e = _mm256_add_epi32(d, t1);
    d = c;
    c = b;
    b = a;
    a = _mm256_add_epi32(t1, t2);
  }

  const __m256i st[8] = {
      _mm256_add_epi32(a, _mm256_set1_epi32(int(kIv[0]))),
      _mm256_add_epi32(b, _mm256_set1_epi32(int(kIv[1]))),
      _mm256_add_epi32(c, _mm256_set1_epi32(int(kIv[2]))),
      _mm256_add_epi32(d, _mm256_set1_epi32(int(kIv[3]))),
      _mm256_add_epi32(e, _mm256_set1_epi32(int(kIv[4]))),
      _mm256_add_epi32(f, _mm256_set1_epi32(int(kIv[5]))),
      _mm256_add_epi32(g, _mm256_set1_epi32(int(kIv[6]))),
      _mm256_add_epi32(h, _mm256_set1_epi32(int(kIv[7])))};
  for (int j = 0; j < 8; ++j)
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + 8 * j), st[j]);
}

bool have_avx2() { return __builtin_cpu_supports("avx2") != 0; }

}  // namespace sha256_detail
}  // namespace lutmpc

#else

namespace lutmpc {
namespace sha256_detail {
void tile8_avx2(const u32*, u32*) {}
bool have_avx2() { return false; }
}  // namespace sha256_detail
}  // namespace lutmpc

#endif

// secp256k1 arithmetic over 4x64-bit limbs.
//
// Reduction exploits the Mersenne-like shape of both moduli:
//   p = 2^256 - C_p,  C_p = 2^32 + 977            (fits 33 bits)
//   N = 2^256 - C_n,  C_n ~ 1.27 * 2^128          (fits 129 bits)
// so 2^256 = C mod m lets a 512-bit product be folded into a 256-bit value
// in two or three passes followed by conditional subtractions.

#include "lutmpc/secp256k1.hpp"

#include <vector>

namespace lutmpc::ec {
namespace {

using u128 = unsigned __int128;

constexpr u64 kP[4] = {0xfffffffefffffc2full, 0xffffffffffffffffull,
                       0xffffffffffffffffull, 0xffffffffffffffffull};
constexpr u64 kN[4] = {0xbfd25e8cd0364141ull, 0xbaaedce6af48a03bull,
                       0xfffffffffffffffeull, 0xffffffffffffffffull};
// C_n = 2^256 - N (three limbs).
constexpr u64 kCn[3] = {0x402da1732fc9bebfull, 0x4551231950b75fc4ull, 1};
constexpr u64 kCp = 0x1000003d1ull;  // 2^32 + 977

constexpr u64 kGx[4] = {0x59f2815b16f81798ull, 0x029bfcdb2dce28d9ull,
                       0x55a06295ce870b07ull, 0x79be667ef9dcbbacull};
constexpr u64 kGy[4] = {0x9c47d08ffb10d4b8ull, 0xfd17b448a6855419ull,
                       0x5da4fbfc0e1108a8ull, 0x483ada7726a3c465ull};

// --- generic 256-bit helpers -----------------------------------------------

inline u64 add4(u64 r[4], const u64 a[4], const u64 b[4]) {
  u128 acc = 0;
  for (int i = 0; i < 4; ++i) {
    acc += u128(a[i]) + b[i];
    r[i] = u64(acc);
    acc >>= 64;
  }
  return u64(acc);
}

inline u64 sub4(u64 r[4], const u64 a[4], const u64 b[4]) {
  u128 borrow = 0;
  for (int i = 0; i < 4; ++i) {
    u128 cur = u128(a[i]) - b[i] - borrow;
    r[i] = u64(cur);
    borrow = (cur >> 64) ? 1 : 0;
  }
  return u64(borrow);
}

inline bool ge4(const u64 a[4], const u64 b[4]) {
  for (int i = 3; i >= 0; --i) {
    if (a[i] != b[i]) return a[i] > b[i];
  }
  return true;
}

inline void mul4(u64 t[8], const u64 a[4], const u64 b[4]) {
  for (int i = 0; i < 8; ++i) t[i] = 0;
  for (int i = 0; i < 4; ++i) {
    u64 carry = 0;
    for (int j = 0; j < 4; ++j) {
      u128 cur = u128(a[i]) * b[j] + t[i + j] + carry;
      t[i + j] = u64(cur);
      carry = u64(cur >> 64);
    }
    t[i + 4] = carry;
  }
}

inline bool is_zero4(const u64 a[4]) {
  return (a[0] | a[1] | a[2] | a[3]) == 0;
}

// --- field arithmetic mod p ------------------------------------------------

Fe fe_from_limbs(const u64 v[4]) {
  Fe f;
  for (int i = 0; i < 4; ++i) f.v[i] = v[i];
  return f;
}

inline void fe_reduce_once(u64 r[4]) {
  if (ge4(r, kP)) sub4(r, r, kP);
}

Fe fe_add(const Fe& a, const Fe& b) {
  Fe r;
  u64 carry = add4(r.v, a.v, b.v);
  if (carry) {
    // 2^256 == C_p mod p.
    u128 acc = u128(r.v[0]) + kCp;
    r.v[0] = u64(acc);
    u64 c = u64(acc >> 64);
    for (int i = 1; i < 4 && c; ++i) {
      acc = u128(r.v[i]) + c;
      r.v[i] = u64(acc);
      c = u64(acc >> 64);
    }
  }
  fe_reduce_once(r.v);
  return r;
}

Fe fe_sub(const Fe& a, const Fe& b) {
  Fe r;
  u64 borrow = sub4(r.v, a.v, b.v);
  if (borrow) add4(r.v, r.v, kP);
  return r;
}

Fe fe_reduce512(const u64 t[8]) {
  // First fold: r = t_lo + t_hi * C_p  (result fits 5 limbs).
  u64 r[4];
  u128 acc = 0;
  for (int i = 0; i < 4; ++i) {
    acc += t[i];
    acc += u128(t[4 + i]) * kCp;
    r[i] = u64(acc);
    acc >>= 64;
  }
  u64 top = u64(acc);  // < 2^34
  // Second fold of the small top limb.
  acc = u128(top) * kCp + r[0];
  r[0] = u64(acc);
  u64 c = u64(acc >> 64);
  for (int i = 1; i < 4 && c; ++i) {
    acc = u128(r[i]) + c;
    r[i] = u64(acc);
    c = u64(acc >> 64);
  }
  if (c) {
    // Wrapped past 2^256 once more; add C_p (cannot carry again: value
    // is now tiny).
    acc = u128(r[0]) + kCp;
    r[0] = u64(acc);
    u64 c2 = u64(acc >> 64);
    for (int i = 1; i < 4 && c2; ++i) {
      acc = u128(r[i]) + c2;
      r[i] = u64(acc);
      c2 = u64(acc >> 64);
    }
  }
  fe_reduce_once(r);
  return fe_from_limbs(r);
}

Fe fe_mul(const Fe& a, const Fe& b) {
  u64 t[8];
  mul4(t, a.v, b.v);
  return fe_reduce512(t);
}

Fe fe_sqr(const Fe& a) { return fe_mul(a, a); }

bool fe_is_zero(const Fe& a) { return is_zero4(a.v); }

Fe fe_pow(const Fe& base, const u64 exp[4]) {
  Fe result;
  result.v[0] = 1;
  bool started = false;
  for (int limb = 3; limb >= 0; --limb) {
    for (int bit = 63; bit >= 0; --bit) {
      if (started) result = fe_sqr(result);
      if ((exp[limb] >> bit) & 1) {
        if (started) {
          result = fe_mul(result, base);
        } else {
          result = base;
          started = true;
        }
      }
    }
  }
  return result;
}

Fe fe_inv(const Fe& a) {
  // Fermat: a^(p-2).
  u64 e[4];
  u64 two[4] = {2, 0, 0, 0};
  sub4(e, kP, two);
  return fe_pow(a, e);
}

// Square root via a^((p+1)/4); valid because p == 3 mod 4.  Returns false
// if a is a non-residue.
bool fe_sqrt(const Fe& a, Fe& out) {
  constexpr u64 kExp[4] = {0xffffffffbfffff0cull, 0xffffffffffffffffull,
                           0xffffffffffffffffull, 0x3fffffffffffffffull};
  Fe r = fe_pow(a, kExp);
  if (!(fe_sqr(r) == a)) return false;
  out = r;
  return true;
}

Fe fe_from_u64(u64 x) {
  Fe f;
  f.v[0] = x;
  return f;
}

void fe_to_bytes(const Fe& a, u8 out[32]) {
  for (int i = 0; i < 4; ++i) {
    u64 limb = a.v[3 - i];
    for (int j = 0; j < 8; ++j) out[8 * i + j] = u8(limb >> (56 - 8 * j));
  }
}

bool fe_from_bytes(const u8 in[32], Fe& out) {
  Fe f;
  for (int i = 0; i < 4; ++i) {
    u64 limb = 0;
    for (int j = 0; j < 8; ++j) limb = (limb << 8) | in[8 * i + j];
    f.v[3 - i] = limb;
  }
  if (ge4(f.v, kP)) return false;
  out = f;
  return true;
}

const Fe kSeven = fe_from_u64(7);

Fe curve_rhs(const Fe& x) { return fe_add(fe_mul(fe_sqr(x), x), kSeven); }

}  // namespace

// --- scalar arithmetic mod N -----------------------------------------------

namespace {

// Reduce an 8-limb value mod N by repeated folding with C_n.
Scalar sc_reduce512(const u64 in[8]) {
  u64 t[8];
  for (int i = 0; i < 8; ++i) t[i] = in[i];
  // Each fold replaces t with t_lo + t_hi * C_n, shrinking the high part
  // by ~127 bits per pass; three passes reach < 2^257.
  for (int pass = 0; pass < 3; ++pass) {
    if (is_zero4(t + 4)) break;
    u64 hi[4] = {t[4], t[5], t[6], t[7]};
    u64 cn[4] = {kCn[0], kCn[1], kCn[2], 0};
    u64 prod[8];
    mul4(prod, hi, cn);
    u64 lo[8] = {t[0], t[1], t[2], t[3], 0, 0, 0, 0};
    u128 acc = 0;
    for (int i = 0; i < 8; ++i) {
      acc += u128(lo[i]) + prod[i];
      t[i] = u64(acc);
      acc >>= 64;
    }
  }
  u64 r[4] = {t[0], t[1], t[2], t[3]};
  while (t[4] || ge4(r, kN)) {
    // At most two subtractions: value < 2^257 after the folds.
    u64 borrow = sub4(r, r, kN);
    if (borrow) --t[4]; else t[4] = 0;
  }
  Scalar s;
  for (int i = 0; i < 4; ++i) s.v[i] = r[i];
  return s;
}

}  // namespace

Scalar scalar_from_u64(u64 x) {
  Scalar s;
  s.v[0] = x;
  return s;
}

Scalar scalar_from_i64(i64 x) {
  if (x >= 0) return scalar_from_u64(u64(x));
  Scalar s;
  u64 mag[4] = {u64(-x), 0, 0, 0};
  sub4(s.v, kN, mag);
  return s;
}

Scalar scalar_from_bytes_mod_n(const u8 bytes[32]) {
  u64 t[8] = {0};
  for (int i = 0; i < 4; ++i) {
    u64 limb = 0;
    for (int j = 0; j < 8; ++j) limb = (limb << 8) | bytes[8 * i + j];
    t[3 - i] = limb;
  }
  return sc_reduce512(t);
}

void scalar_to_bytes(const Scalar& s, u8 out[32]) {
  for (int i = 0; i < 4; ++i) {
    u64 limb = s.v[3 - i];
    for (int j = 0; j < 8; ++j) out[8 * i + j] = u8(limb >> (56 - 8 * j));
  }
}

Scalar sc_add(const Scalar& a, const Scalar& b) {
  Scalar r;
  u64 carry = add4(r.v, a.v, b.v);
  if (carry || ge4(r.v, kN)) {
    u64 borrow = sub4(r.v, r.v, kN);
    (void)borrow;  // carry bit cancels the borrow when it was set
  }
  return r;
}

Scalar sc_sub(const Scalar& a, const Scalar& b) {
  Scalar r;
  if (sub4(r.v, a.v, b.v)) add4(r.v, r.v, kN);  // borrow: wrap back into [0, N)
  return r;
}

Scalar sc_mul(const Scalar& a, const Scalar& b) {
  u64 t[8];
  mul4(t, a.v, b.v);
  return sc_reduce512(t);
}

bool sc_is_zero(const Scalar& s) { return is_zero4(s.v); }

// --- point arithmetic ------------------------------------------------------

const Affine& generator() {
  static const Affine g = [] {
    Affine a;
    a.x = fe_from_limbs(kGx);
    a.y = fe_from_limbs(kGy);
    a.inf = false;
    return a;
  }();
  return g;
}

Jacobian to_jacobian(const Affine& a) {
  Jacobian j;
  if (a.inf) return j;
  j.x = a.x;
  j.y = a.y;
  j.z = fe_from_u64(1);
  j.inf = false;
  return j;
}

Jacobian dbl(const Jacobian& p) {
  if (p.inf || fe_is_zero(p.y)) return Jacobian{};
  Fe a = fe_sqr(p.x);
  Fe b = fe_sqr(p.y);
  Fe c = fe_sqr(b);
  Fe xb = fe_sqr(fe_add(p.x, b));
  Fe d = fe_sub(xb, fe_add(a, c));
  d = fe_add(d, d);  // d = 2((x+b)^2 - a - c)
  Fe e = fe_add(fe_add(a, a), a);
  Fe f = fe_sqr(e);
  Jacobian r;
  r.inf = false;
  r.x = fe_sub(f, fe_add(d, d));
  Fe c8 = fe_add(c, c);
  c8 = fe_add(c8, c8);
  c8 = fe_add(c8, c8);
  r.y = fe_sub(fe_mul(e, fe_sub(d, r.x)), c8);
  Fe yz = fe_mul(p.y, p.z);
  r.z = fe_add(yz, yz);
  return r;
}

Jacobian add(const Jacobian& p, const Jacobian& q) {
  if (p.inf) return q;
  if (q.inf) return p;
  Fe z1z1 = fe_sqr(p.z);
  Fe z2z2 = fe_sqr(q.z);
  Fe u1 = fe_mul(p.x, z2z2);
  Fe u2 = fe_mul(q.x, z1z1);
  Fe s1 = fe_mul(fe_mul(p.y, q.z), z2z2);
  Fe s2 = fe_mul(fe_mul(q.y, p.z), z1z1);
  if (u1 == u2) {
    if (s1 == s2) return dbl(p);
    return Jacobian{};  // p == -q
  }
  Fe h = fe_sub(u2, u1);
  Fe h2 = fe_add(h, h);
  Fe i = fe_sqr(h2);
  Fe j = fe_mul(h, i);
  Fe rr = fe_sub(s2, s1);
  rr = fe_add(rr, rr);
  Fe v = fe_mul(u1, i);
  Jacobian r;
  r.inf = false;
  r.x = fe_sub(fe_sub(fe_sqr(rr), j), fe_add(v, v));
  Fe s1j = fe_mul(s1, j);
  r.y = fe_sub(fe_mul(rr, fe_sub(v, r.x)), fe_add(s1j, s1j));
  Fe zz = fe_sqr(fe_add(p.z, q.z));
  r.z = fe_mul(fe_sub(fe_sub(zz, z1z1), z2z2), h);
  return r;
}

Jacobian add_mixed(const Jacobian& p, const Affine& q) {
  if (q.inf) return p;
  if (p.inf) return to_jacobian(q);
  Fe z1z1 = fe_sqr(p.z);
  Fe u2 = fe_mul(q.x, z1z1);
  Fe s2 = fe_mul(fe_mul(q.y, p.z), z1z1);
  if (p.x == u2) {
    if (p.y == s2) return dbl(p);
    return Jacobian{};
  }
  Fe h = fe_sub(u2, p.x);
  Fe hh = fe_sqr(h);
  Fe i = fe_add(hh, hh);
  i = fe_add(i, i);
  Fe j = fe_mul(h, i);
  Fe rr = fe_sub(s2, p.y);
  rr = fe_add(rr, rr);
  Fe v = fe_mul(p.x, i);
  Jacobian r;
  r.inf = false;
  r.x = fe_sub(fe_sub(fe_sqr(rr), j), fe_add(v, v));
  Fe yj = fe_mul(p.y, j);
  r.y = fe_sub(fe_mul(rr, fe_sub(v, r.x)), fe_add(yj, yj));
  Fe zz = fe_sqr(fe_add(p.z, h));
  r.z = fe_sub(fe_sub(zz, z1z1), hh);
  return r;
}

Affine to_affine(const Jacobian& p) {
  Affine a;
  if (p.inf) {
    a.inf = true;
    return a;
  }
  Fe zi = fe_inv(p.z);
  Fe zi2 = fe_sqr(zi);
  a.x = fe_mul(p.x, zi2);
  a.y = fe_mul(p.y, fe_mul(zi2, zi));
  a.inf = false;
  return a;
}

void batch_normalize(const Jacobian* pts, std::size_t n, Affine* out) {
  if (n == 0) return;
  std::vector<Fe> prefix(n);
  Fe acc = fe_from_u64(1);
  for (std::size_t i = 0; i < n; ++i) {
    if (pts[i].inf) throw InvalidPoint("cannot normalize point at infinity");
    prefix[i] = acc;
    acc = fe_mul(acc, pts[i].z);
  }
  Fe inv = fe_inv(acc);
  for (std::size_t i = n; i-- > 0;) {
    Fe zi = fe_mul(inv, prefix[i]);
    inv = fe_mul(inv, pts[i].z);
    Fe zi2 = fe_sqr(zi);
    out[i].x = fe_mul(pts[i].x, zi2);
    out[i].y = fe_mul(pts[i].y, fe_mul(zi2, zi));
    out[i].inf = false;
  }
}

Jacobian mult(const Scalar& s, const Affine& base) {
  Jacobian acc;
  for (int limb = 3; limb >= 0; --limb) {
    for (int bit = 63; bit >= 0; --bit) {
      acc = dbl(acc);
      if ((s.v[limb] >> bit) & 1) acc = add_mixed(acc, base);
    }
  }
  return acc;
}

Jacobian g_mult(const Scalar& s) { return mult(s, generator()); }

bool on_curve(const Affine& a) {
  if (a.inf) return false;
  return fe_sqr(a.y) == curve_rhs(a.x);
}

std::array<u8, 33> compress(const Affine& a) {
  if (a.inf) throw InvalidPoint("cannot compress point at infinity");
  std::array<u8, 33> out;
  out[0] = (a.y.v[0] & 1) ? 0x03 : 0x02;
  fe_to_bytes(a.x, out.data() + 1);
  return out;
}

Affine decompress(const u8 bytes[33]) {
  if (bytes[0] != 0x02 && bytes[0] != 0x03)
    throw InvalidPoint("bad compressed-point prefix");
  Affine a;
  if (!fe_from_bytes(bytes + 1, a.x))
    throw InvalidPoint("x coordinate out of field range");
  Fe y;
  if (!fe_sqrt(curve_rhs(a.x), y))
    throw InvalidPoint("x coordinate not on curve");
  const bool want_odd = bytes[0] == 0x03;
  if ((y.v[0] & 1) != u64(want_odd)) y = fe_sub(fe_from_limbs(kP), y);
  a.y = y;
  a.inf = false;
  // fe_sqrt succeeding already proves y^2 == x^3 + 7.
  return a;
}

}  // namespace lutmpc::ec

#pragma once
//
// Minimal secp256k1 arithmetic for the reusable-table key agreement.
//
// The protocol needs exactly: scalar arithmetic mod the group order,
// scalar-by-point multiplication, point addition (for walking a table's
// grid with increments), compressed serialization, and strict validation
// of peer-supplied points.  We implement the curve directly over 4x64-bit
// limbs rather than pulling in a full crypto library: the artifact's
// security model is honest-but-curious, so side-channel hardening is out
// of scope, and keeping the arithmetic local makes the operation counting
// (table generation must cost exactly m+1 scalar multiplications) easy to
// audit.
//
// All field elements are kept fully reduced; all entry points that accept
// external bytes validate and throw InvalidPoint on anything that is not
// a point on the curve.

#include <array>

#include "lutmpc/errors.hpp"
#include "lutmpc/sha256.hpp"

namespace lutmpc::ec {

// Field element mod p = 2^256 - 2^32 - 977, little-endian limbs.
struct Fe {
  u64 v[4] = {0, 0, 0, 0};
  friend bool operator==(const Fe&, const Fe&) = default;
};

// Scalar mod the group order N, little-endian limbs.
struct Scalar {
  u64 v[4] = {0, 0, 0, 0};
  friend bool operator==(const Scalar&, const Scalar&) = default;
};

struct Affine {
  Fe x, y;
  bool inf = false;
};

struct Jacobian {
  Fe x, y, z;
  bool inf = true;
};

// --- scalars ---------------------------------------------------------------

Scalar scalar_from_u64(u64 x);
// Signed lift: negative values map to N + x.
Scalar scalar_from_i64(i64 x);
// 256-bit big-endian bytes reduced mod N (the spec'd H(s||c) mod N path).
Scalar scalar_from_bytes_mod_n(const u8 bytes[32]);
void scalar_to_bytes(const Scalar& s, u8 out[32]);  // 32 bytes, big-endian

Scalar sc_add(const Scalar& a, const Scalar& b);
Scalar sc_sub(const Scalar& a, const Scalar& b);
Scalar sc_mul(const Scalar& a, const Scalar& b);
bool sc_is_zero(const Scalar& s);

// --- points ----------------------------------------------------------------

const Affine& generator();

Jacobian dbl(const Jacobian& p);
Jacobian add(const Jacobian& p, const Jacobian& q);
Jacobian add_mixed(const Jacobian& p, const Affine& q);
Jacobian to_jacobian(const Affine& a);
Affine to_affine(const Jacobian& p);

// One pass of the Montgomery inversion trick: normalize n Jacobian points
// with a single field inversion.  Throws InvalidPoint if any input is the
// point at infinity (table generation never produces one legitimately).
void batch_normalize(const Jacobian* pts, std::size_t n, Affine* out);

// Scalar multiplication s*base (binary double-and-add; not constant time).
Jacobian mult(const Scalar& s, const Affine& base);
Jacobian g_mult(const Scalar& s);

bool on_curve(const Affine& a);

// SEC1 compressed encoding (02/03 prefix + 32-byte big-endian x).
// Compressing infinity or decompressing anything that is not a valid
// on-curve encoding throws InvalidPoint.
std::array<u8, 33> compress(const Affine& a);
Affine decompress(const u8 bytes[33]);

inline Digest32 hash_point(const Affine& a) {
  auto c = compress(a);
  return sha256(c.data(), c.size());
}

}  // namespace lutmpc::ec

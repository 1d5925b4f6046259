#include <doctest.h>

#include <vector>

#include "lutmpc/rng.hpp"
#include "lutmpc/secp256k1.hpp"

using namespace lutmpc;
using namespace lutmpc::ec;

namespace {

Scalar random_scalar(Drbg& g) {
  u8 bytes[32];
  for (int i = 0; i < 4; ++i) {
    u64 v = g.next_u64();
    for (int j = 0; j < 8; ++j) bytes[8 * i + j] = u8(v >> (8 * j));
  }
  return scalar_from_bytes_mod_n(bytes);
}

}  // namespace

TEST_CASE("generator satisfies the curve equation") {
  CHECK(on_curve(generator()));
}

TEST_CASE("group laws bind scalar and point arithmetic together") {
  Drbg g(seed_from_u64(0xec01));
  for (int iter = 0; iter < 8; ++iter) {
    Scalar a = random_scalar(g);
    Scalar b = random_scalar(g);
    // (a+b)G == aG + bG
    Affine lhs = to_affine(g_mult(sc_add(a, b)));
    Affine rhs = to_affine(add(g_mult(a), g_mult(b)));
    REQUIRE(lhs.x == rhs.x);
    REQUIRE(lhs.y == rhs.y);
    // a(bG) == b(aG) == (ab)G
    Affine bg = to_affine(g_mult(b));
    Affine ag = to_affine(g_mult(a));
    Affine abg = to_affine(g_mult(sc_mul(a, b)));
    Affine a_bg = to_affine(mult(a, bg));
    Affine b_ag = to_affine(mult(b, ag));
    REQUIRE(abg.x == a_bg.x);
    REQUIRE(abg.y == a_bg.y);
    REQUIRE(abg.x == b_ag.x);
    REQUIRE(abg.y == b_ag.y);
    REQUIRE(on_curve(abg));
  }
}

TEST_CASE("order annihilates the generator") {
  // N*G = infinity, reached via (N-1)G + G.
  Scalar n_minus_1 = scalar_from_i64(-1);  // N - 1
  Jacobian p = g_mult(n_minus_1);
  Jacobian sum = add_mixed(p, generator());
  CHECK(sum.inf);
  // (N-1)G == -G: same x, negated y.
  Affine a = to_affine(p);
  Affine g = generator();
  CHECK(a.x == g.x);
  CHECK_FALSE(a.y == g.y);
}

TEST_CASE("compression round-trips and rejects invalid encodings") {
  Drbg g(seed_from_u64(0xec02));
  for (int iter = 0; iter < 8; ++iter) {
    Affine p = to_affine(g_mult(random_scalar(g)));
    auto enc = compress(p);
    Affine q = decompress(enc.data());
    REQUIRE(q.x == p.x);
    REQUIRE(q.y == p.y);
  }

  auto enc = compress(generator());
  SUBCASE("bad prefix") {
    enc[0] = 0x04;
    CHECK_THROWS_AS((void)decompress(enc.data()), InvalidPoint);
  }
  SUBCASE("x not on curve") {
    // x = 5 gives 132, a quadratic non-residue... not guaranteed by fiat,
    // so instead corrupt until rejection: flipping low bits of x lands on
    // a non-residue about half the time; scan for one deterministically.
    bool rejected = false;
    for (u8 delta = 1; delta != 0 && !rejected; ++delta) {
      auto bad = enc;
      bad[32] ^= delta;
      try {
        Affine q = decompress(bad.data());
        CHECK(on_curve(q));  // accepted points must still be valid
      } catch (const InvalidPoint&) {
        rejected = true;
      }
    }
    CHECK(rejected);
  }
  SUBCASE("x beyond field size") {
    for (int i = 1; i <= 32; ++i) enc[i] = 0xff;
    CHECK_THROWS_AS((void)decompress(enc.data()), InvalidPoint);
  }
}

TEST_CASE("batch normalization matches individual affine conversion") {
  Drbg g(seed_from_u64(0xec03));
  std::vector<Jacobian> pts;
  for (int i = 0; i < 37; ++i) pts.push_back(g_mult(random_scalar(g)));
  std::vector<Affine> batch(pts.size());
  batch_normalize(pts.data(), pts.size(), batch.data());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    Affine want = to_affine(pts[i]);
    REQUIRE(batch[i].x == want.x);
    REQUIRE(batch[i].y == want.y);
  }
  // Infinity is rejected rather than silently normalized.
  std::vector<Jacobian> with_inf(1);
  std::vector<Affine> sink(1);
  CHECK_THROWS_AS(batch_normalize(with_inf.data(), 1, sink.data()),
                  InvalidPoint);
}

TEST_CASE("incremental point walk equals per-point scalar multiplication") {
  // The table generator's core trick: start + j*G via repeated addition.
  Drbg g(seed_from_u64(0xec04));
  Scalar s0 = random_scalar(g);
  Jacobian walk = g_mult(s0);
  for (u64 j = 1; j <= 32; ++j) {
    walk = add_mixed(walk, generator());
    Affine direct = to_affine(g_mult(sc_add(s0, scalar_from_u64(j))));
    Affine stepped = to_affine(walk);
    REQUIRE(stepped.x == direct.x);
    REQUIRE(stepped.y == direct.y);
  }
}

TEST_CASE("scalar arithmetic edge cases") {
  CHECK(sc_is_zero(scalar_from_u64(0)));
  CHECK(sc_is_zero(sc_add(scalar_from_i64(-5), scalar_from_u64(5))));

  // Reduction of values >= N: serialize N-1, bump the low byte to get the
  // big-endian encoding of N, which must reduce to zero.
  u8 enc[32];
  scalar_to_bytes(scalar_from_i64(-1), enc);  // N - 1
  enc[31] += 1;                               // N (low byte of N-1 is 0x40)
  CHECK(sc_is_zero(scalar_from_bytes_mod_n(enc)));

  // Round-trip through bytes for values < N, and avalanche on reduction of
  // an all-ones 256-bit value.
  Scalar s = scalar_from_u64(0x123456789abcdefull);
  scalar_to_bytes(s, enc);
  CHECK(scalar_from_bytes_mod_n(enc) == s);
  u8 ones[32];
  for (int i = 0; i < 32; ++i) ones[i] = 0xff;
  CHECK_FALSE(sc_is_zero(scalar_from_bytes_mod_n(ones)));
}

TEST_CASE("hash_point is stable and parity-sensitive") {
  Digest32 h1 = hash_point(generator());
  CHECK(h1 == hash_point(generator()));
  // -G has the same x but opposite y parity, so its hash must differ.
  CHECK(hash_point(to_affine(g_mult(scalar_from_i64(-1)))) != h1);
}

TEST_CASE("compressing infinity throws") {
  Affine inf;
  inf.inf = true;
  CHECK_THROWS_AS((void)compress(inf), InvalidPoint);
}

TEST_CASE("scalar subtraction wraps into the group order") {
  using namespace lutmpc::ec;
  Scalar a = scalar_from_u64(1000), b = scalar_from_u64(400);
  u8 got[32], want[32];
  scalar_to_bytes(sc_sub(a, b), got);
  scalar_to_bytes(scalar_from_u64(600), want);
  CHECK(std::memcmp(got, want, 32) == 0);
  // a - b + b == a even when the subtraction borrows.
  Scalar diff = sc_sub(b, a);
  scalar_to_bytes(sc_add(diff, a), got);
  scalar_to_bytes(sc_add(scalar_from_u64(0), b), want);
  CHECK(std::memcmp(got, want, 32) == 0);
  CHECK(sc_is_zero(sc_sub(a, a)));
  // 0 - 1 is the largest scalar: adding 1 back yields zero.
  Scalar minus1 = sc_sub(scalar_from_u64(0), scalar_from_u64(1));
  CHECK(sc_is_zero(sc_add(minus1, scalar_from_u64(1))));
}

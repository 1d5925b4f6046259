#include <doctest.h>

#include "lutmpc/dealer.hpp"
#include "lutmpc/errors.hpp"
#include "lutmpc/secp256k1.hpp"

using namespace lutmpc;

namespace {

Mat ring_add(const Mat& x, const Mat& y) { return add(x, y); }

}  // namespace

TEST_CASE("matrix shares sum to the derived full matrix") {
  Dealer d = Dealer::from_u64(7);
  Mat full = d.mat_full("mask", 3, 5, 9);
  Mat s0 = d.mat_share("mask", 3, 0, 5, 9);
  Mat s1 = d.mat_share("mask", 3, 1, 5, 9);
  REQUIRE(full.rows == 5);
  REQUIRE(full.cols == 9);
  CHECK(ring_add(s0, s1) == full);
  // The mask and its share-0 stream must be distinct domains.
  CHECK(full != s0);
}

TEST_CASE("row slices agree with the whole matrix") {
  Dealer d = Dealer::from_u64(8);
  Mat whole = d.mat_full("u", 0, 100, 7);
  Mat part = d.mat_full("u", 0, 100, 7, 40, 55);
  REQUIRE(part.rows == 15);
  for (std::size_t i = 0; i < part.rows; ++i)
    for (std::size_t j = 0; j < part.cols; ++j)
      REQUIRE(part(i, j) == whole(40 + i, j));
  // Shares of a slice are the slice of the shares.
  Mat sw = d.mat_share("u", 0, 1, 100, 7);
  Mat sp = d.mat_share("u", 0, 1, 100, 7, 40, 55);
  for (std::size_t i = 0; i < sp.rows; ++i)
    for (std::size_t j = 0; j < sp.cols; ++j)
      REQUIRE(sp(i, j) == sw(40 + i, j));
}

TEST_CASE("share_of splits a caller-supplied matrix") {
  Dealer d = Dealer::from_u64(9);
  Mat x(4, 6);
  for (std::size_t k = 0; k < x.a.size(); ++k) x.a[k] = k * k + 13;
  Mat s0 = d.share_of("data", 2, 0, x);
  Mat s1 = d.share_of("data", 2, 1, x);
  CHECK(ring_add(s0, s1) == x);
  CHECK(s0 != x);  // actually masked
}

TEST_CASE("product shares sum to the sliced, transposed product") {
  Dealer d = Dealer::from_u64(10);
  // U is a 20x6 mask; take rows [4, 12), transpose to 6x8, multiply by an
  // 8x3 mask: the walk a batched backward pass takes over a dataset mask.
  MatSlice u{"bigmask", 0, 20, 6, 4, 12, true};
  MatSlice v{"vecmask", 5, 8, 3};
  Mat z0 = d.product_share("prod", 5, 0, u, v);
  Mat z1 = d.product_share("prod", 5, 1, u, v);
  Mat expect = mul(transpose(d.mat_full("bigmask", 0, 20, 6, 4, 12)),
                   d.mat_full("vecmask", 5, 8, 3));
  REQUIRE(z0.rows == 6);
  REQUIRE(z0.cols == 3);
  CHECK(ring_add(z0, z1) == expect);
}

TEST_CASE("beaver triple streams are consistent across parties") {
  Dealer d = Dealer::from_u64(11);
  auto t0 = d.triple_vec("mul", 77, 0, 50);
  auto t1 = d.triple_vec("mul", 77, 1, 50);
  auto tf = d.triple_vec_full("mul", 77, 50);
  REQUIRE(t0.size() == 50);
  for (std::size_t i = 0; i < 50; ++i) {
    u64 a = t0[i].a + t1[i].a;
    u64 b = t0[i].b + t1[i].b;
    u64 c = t0[i].c + t1[i].c;
    REQUIRE(c == a * b);
    REQUIRE(tf[i][0] == a);
    REQUIRE(tf[i][1] == b);
    REQUIRE(tf[i][2] == c);
  }
  // Different index, different triples.
  auto other = d.triple_vec_full("mul", 78, 1);
  CHECK(other[0][0] != tf[0][0]);
}

TEST_CASE("conversion pairs share r in both rings") {
  Dealer d = Dealer::from_u64(12);
  auto p0 = d.conv_vec("conv", 3, 0, 40);
  auto p1 = d.conv_vec("conv", 3, 1, 40);
  auto rs = d.conv_r_vec("conv", 3, 40);
  for (std::size_t i = 0; i < 40; ++i) {
    u64 r = p0[i].r64 + p1[i].r64;
    REQUIRE(r == rs[i]);
    REQUIRE(r < (u64(1) << 62));
    ec::Scalar sum = ec::sc_add(p0[i].rN, p1[i].rN);
    u8 got[32], want[32];
    ec::scalar_to_bytes(sum, got);
    ec::scalar_to_bytes(ec::scalar_from_u64(r), want);
    REQUIRE(std::memcmp(got, want, 32) == 0);
  }
}

TEST_CASE("derivations are deterministic and tag-separated") {
  Dealer a = Dealer::from_u64(1), b = Dealer::from_u64(1);
  CHECK(a.mat_full("x", 0, 2, 2) == b.mat_full("x", 0, 2, 2));
  CHECK(a.mat_full("x", 0, 2, 2) != a.mat_full("y", 0, 2, 2));
  CHECK(a.mat_full("x", 0, 2, 2) != a.mat_full("x", 1, 2, 2));
  CHECK(a.subseed("tables") == b.subseed("tables"));
  CHECK(a.subseed("tables") != a.subseed("tables", 1));
  Dealer c = Dealer::from_u64(2);
  CHECK(a.mat_full("x", 0, 2, 2) != c.mat_full("x", 0, 2, 2));
}

TEST_CASE("dealer rejects bad parties and slices") {
  Dealer d = Dealer::from_u64(5);
  CHECK_THROWS_AS((void)d.mat_share("m", 0, 2, 4, 4), BadConfig);
  CHECK_THROWS_AS((void)d.mat_full("m", 0, 4, 4, 3, 2), BadConfig);
  CHECK_THROWS_AS((void)d.mat_full("m", 0, 4, 4, 0, 5), BadConfig);
}

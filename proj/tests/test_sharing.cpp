#include <doctest.h>

#include <vector>

#include "lutmpc/rng.hpp"
#include "lutmpc/sharing.hpp"

using namespace lutmpc;

namespace {

// Deal one triple: random (a, b), c = a*b, each split additively.
void deal_triple(Drbg& g, BeaverTriple& t0, BeaverTriple& t1) {
  const u64 a = g.next_u64(), b = g.next_u64();
  const u64 c = a * b;
  t0.a = g.next_u64();
  t0.b = g.next_u64();
  t0.c = g.next_u64();
  t1.a = a - t0.a;
  t1.b = b - t0.b;
  t1.c = c - t0.c;
}

void deal_conv_pair(Drbg& g, ConvPair& p0, ConvPair& p1) {
  const u64 r = g.next_u64() >> 2;  // r in [0, 2^62)
  p0.r64 = g.next_u64();
  p1.r64 = r - p0.r64;
  u8 bytes[32];
  for (int i = 0; i < 4; ++i) {
    u64 v = g.next_u64();
    for (int j = 0; j < 8; ++j) bytes[8 * i + j] = u8(v >> (8 * j));
  }
  p0.rN = ec::scalar_from_bytes_mod_n(bytes);
  // p1.rN = r - p0.rN mod N, via r + (N - p0.rN).
  ec::Scalar r_mod_n = ec::scalar_from_u64(r);
  ec::Scalar neg = ec::sc_mul(p0.rN, ec::scalar_from_i64(-1));
  p1.rN = ec::sc_add(r_mod_n, neg);
}

}  // namespace

TEST_CASE("opening reconstructs shared values in one round") {
  Drbg g(seed_from_u64(0x5410));
  std::vector<u64> values(17);
  for (u64& v : values) v = g.next_u64();
  std::vector<u64> s0(values.size()), s1(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    share_value(values[i], g.next_u64(), s0[i], s1[i]);

  run_pair([&](int party, Chan& chan) {
    std::vector<u64> opened =
        open_vec(chan, MsgType::kOpen, party == 0 ? s0 : s1);
    REQUIRE(opened == values);
    CHECK(chan.stats().rounds == 1);
  });
}

TEST_CASE("beaver multiplication of shared vectors") {
  Drbg g(seed_from_u64(0x5411));
  constexpr std::size_t kN = 64;
  std::vector<u64> xs(kN), ys(kN), x0(kN), x1(kN), y0(kN), y1(kN);
  std::vector<BeaverTriple> t0(kN), t1(kN);
  for (std::size_t i = 0; i < kN; ++i) {
    xs[i] = g.next_u64();
    ys[i] = g.next_u64();
    share_value(xs[i], g.next_u64(), x0[i], x1[i]);
    share_value(ys[i], g.next_u64(), y0[i], y1[i]);
    deal_triple(g, t0[i], t1[i]);
  }

  std::vector<u64> z0, z1;
  run_pair([&](int party, Chan& chan) {
    auto& z = party == 0 ? z0 : z1;
    z = beaver_mul_vec(party, chan, party == 0 ? x0 : x1,
                       party == 0 ? y0 : y1, party == 0 ? t0 : t1);
    CHECK(chan.stats().rounds == 1);
    CHECK(chan.stats().payload_bytes == 2 * kN * 8);
  });
  for (std::size_t i = 0; i < kN; ++i)
    REQUIRE(z0[i] + z1[i] == xs[i] * ys[i]);
}

TEST_CASE("masked matrix product equals the plaintext product") {
  Drbg g(seed_from_u64(0x5412));
  const std::size_t n = 5, k = 7, m = 3;
  auto rand_mat = [&](std::size_t r, std::size_t c) {
    Mat x(r, c);
    for (u64& v : x.a) v = g.next_u64();
    return x;
  };
  Mat X = rand_mat(n, k), W = rand_mat(k, m);
  Mat U = rand_mat(n, k), V = rand_mat(k, m);
  Mat Z = mul(U, V);
  // Shares.
  Mat X0 = rand_mat(n, k), W0 = rand_mat(k, m), U0 = rand_mat(n, k),
      V0 = rand_mat(k, m), Z0 = rand_mat(n, m);
  Mat X1 = sub(X, X0), W1 = sub(W, W0), U1 = sub(U, U0), V1 = sub(V, V0),
      Z1 = sub(Z, Z0);

  Mat G0, G1;
  run_pair([&](int party, Chan& chan) {
    const Mat& Xi = party == 0 ? X0 : X1;
    const Mat& Wi = party == 0 ? W0 : W1;
    const Mat& Ui = party == 0 ? U0 : U1;
    const Mat& Vi = party == 0 ? V0 : V1;
    const Mat& Zi = party == 0 ? Z0 : Z1;
    // E and F opened in one exchange each here; a real training loop
    // opens E once and reuses it.
    Mat E = open_mat(chan, sub(Xi, Ui));
    Mat F = open_mat(chan, sub(Wi, Vi));
    Mat G = masked_matmul(party, E, F, Xi, Wi, Zi);
    (party == 0 ? G0 : G1) = G;
  });
  Mat want = mul(X, W);
  REQUIRE(add(G0, G1) == want);
}

TEST_CASE("share conversion lands in the scalar field exactly") {
  Drbg g(seed_from_u64(0x5413));
  // Values a table query would convert: rebased grid indices and small
  // signed excursions from noise.
  std::vector<u64> values = {0, 1, 65535, 70000, u64(0) - 3, (u64(1) << 40)};
  std::vector<u64> v0(values.size()), v1(values.size());
  std::vector<ConvPair> p0(values.size()), p1(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    share_value(values[i], g.next_u64(), v0[i], v1[i]);
    deal_conv_pair(g, p0[i], p1[i]);
  }

  std::vector<ec::Scalar> s0, s1;
  run_pair([&](int party, Chan& chan) {
    auto& out = party == 0 ? s0 : s1;
    out = convert_to_scalar_shares(party, chan, party == 0 ? v0 : v1,
                                   party == 0 ? p0 : p1);
    CHECK(chan.stats().rounds == 1);
  });
  for (std::size_t i = 0; i < values.size(); ++i) {
    ec::Scalar got = ec::sc_add(s0[i], s1[i]);
    ec::Scalar want = ec::scalar_from_i64(i64(values[i]));  // signed view
    REQUIRE(got == want);
  }
}

TEST_CASE("matrix helpers behave over the ring") {
  Mat a(2, 2);
  a(0, 0) = 1;
  a(0, 1) = u64(0) - 2;  // -2 in the ring
  a(1, 0) = 3;
  a(1, 1) = 4;
  Mat b(2, 2);
  b(0, 0) = 5;
  b(0, 1) = 6;
  b(1, 0) = 7;
  b(1, 1) = 8;
  Mat c = mul(a, b);
  CHECK(c(0, 0) == u64(5 - 14));
  CHECK(c(0, 1) == u64(6 - 16));
  CHECK(c(1, 0) == 15 + 28);
  CHECK(c(1, 1) == 18 + 32);
  CHECK(transpose(transpose(a)) == a);
  CHECK_THROWS_AS((void)mul(a, Mat(3, 2)), BadConfig);
  CHECK_THROWS_AS((void)add(a, Mat(2, 3)), BadConfig);
}

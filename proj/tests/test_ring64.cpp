#include <doctest.h>

#include "lutmpc/ring64.hpp"
#include "lutmpc/rng.hpp"

using namespace lutmpc;

TEST_CASE("fixed-point encodings of landmark values") {
  CHECK(encode(0.5, kSigmoidCfg) == 4096);        // 0.5 * 2^13
  CHECK(encode(-1.0, kSigmoidCfg) == u64(0) - 8192);
  CHECK(encode(0.0, kSigmoidCfg) == 0);
  CHECK(encode(0.25, kExpCfg) == 256);            // 0.25 * 2^10
  CHECK(encode(1.0, kDreluCfg) == 2);             // 1 fractional bit
  CHECK(encode(-0.5, kDreluCfg) == u64(0) - 1);
  CHECK(decode(u64(0) - 8192, kSigmoidCfg) == doctest::Approx(-1.0));
  CHECK(decode64(u64(0) - (u64(1) << 13), 13) == doctest::Approx(-1.0));
}

TEST_CASE("encode rounds half away from zero") {
  // 0.5 ulp cases on the sigmoid grid: 1 ulp = 2^-13.
  const double ulp = 1.0 / 8192.0;
  CHECK(encode(1.5 * ulp, kSigmoidCfg) == 2);
  CHECK(encode(0.5 * ulp, kSigmoidCfg) == 1);
  CHECK(encode(-0.5 * ulp, kSigmoidCfg) == u64(0) - 1);
  CHECK(encode(-1.5 * ulp, kSigmoidCfg) == u64(0) - 2);
}

TEST_CASE("encode range checks") {
  // Sigmoid grid spans [-4, 4) in steps of 2^-13.
  CHECK(encode(-4.0, kSigmoidCfg) == u64(0) - 32768);
  CHECK_THROWS_AS((void)encode(4.0, kSigmoidCfg), EncodeRange);
  CHECK_THROWS_AS((void)encode(-4.001, kSigmoidCfg), EncodeRange);
  CHECK(encode(3.99987, kSigmoidCfg) == 32767);
}

TEST_CASE("config validation") {
  CHECK_NOTHROW(validate(kSigmoidCfg));
  CHECK_NOTHROW(validate(kDreluCfg));
  CHECK_NOTHROW(validate(kExpCfg));
  CHECK_NOTHROW(validate(kInverseCfg));
  CHECK_THROWS_AS(validate(FixedCfg{3, 13, 17}), BadConfig);
  CHECK_THROWS_AS(validate(FixedCfg{0, 5, 5}), BadConfig);
  CHECK_THROWS_AS(validate(FixedCfg{33, 32, 65}), BadConfig);
}

TEST_CASE("grid enumeration, sign extension, and membership") {
  CHECK(grid_point(0, kSigmoidCfg) == 0);
  CHECK(grid_point(32767, kSigmoidCfg) == 32767);
  CHECK(grid_point(32768, kSigmoidCfg) == u64(0) - 32768);
  CHECK(grid_point(65535, kSigmoidCfg) == u64(0) - 1);
  CHECK(on_grid(u64(0) - 1, kSigmoidCfg));
  CHECK(on_grid(32767, kSigmoidCfg));
  CHECK_FALSE(on_grid(32768, kSigmoidCfg));       // missing sign extension
  CHECK_FALSE(on_grid(u64(1) << 20, kSigmoidCfg));

  // Every grid point is on-grid and encode/decode round-trips exactly
  // (every grid value is representable in double).
  for (u64 j = 0; j < kSigmoidCfg.grid_size(); ++j) {
    u64 x = grid_point(j, kSigmoidCfg);
    REQUIRE(on_grid(x, kSigmoidCfg));
    REQUIRE(encode(decode(x, kSigmoidCfg), kSigmoidCfg) == x);
  }
}

TEST_CASE("rebased indices order the grid and round-trip") {
  // Rebasing maps the most negative encoding to 0 and the most positive to
  // 2^t - 1, monotonically in the real value.
  for (const FixedCfg& cfg : {kDreluCfg, kSigmoidCfg}) {
    u64 lo = grid_point(cfg.grid_size() / 2, cfg);  // most negative
    CHECK(rebase_index(lo, cfg) == 0);
    CHECK(rebase_index(grid_point(cfg.grid_size() / 2 - 1, cfg), cfg) ==
          cfg.grid_size() - 1);
    double prev = -1e300;
    for (u64 u = 0; u < cfg.grid_size(); ++u) {
      u64 x = unrebase_index(u, cfg);
      REQUIRE(rebase_index(x, cfg) == u);
      double v = decode(x, cfg);
      REQUIRE(v > prev);
      prev = v;
    }
  }
}

TEST_CASE("local truncation of a shared value errs by at most one ulp up") {
  Drbg g(seed_from_u64(0x7150));
  for (int t : {1, 13, 20}) {
    for (int iter = 0; iter < 20000; ++iter) {
      // |x| < 2^30 keeps the wrap probability at ~2^-34 per draw.
      u64 mag = g.next_below(u64(1) << 30);
      u64 x = g.next_below(2) ? mag : u64(0) - mag;
      u64 s0 = g.next_u64();
      u64 s1 = x - s0;
      u64 got = trunc_share(0, s0, t) + trunc_share(1, s1, t);
      u64 want = trunc_exact(x, t);
      u64 diff = got - want;
      REQUIRE((diff == 0 || diff == 1));
      if ((x & ((u64(1) << t) - 1)) == 0) REQUIRE(diff == 0);
    }
  }
}

TEST_CASE("trunc_pair shadows both parties' local rules") {
  Drbg g(seed_from_u64(0x7151));
  for (int iter = 0; iter < 1000; ++iter) {
    u64 x = g.next_below(u64(1) << 40) - (u64(1) << 39);
    u64 s0 = g.next_u64();
    ValueShare vs{x, s0};
    ValueShare out = trunc_pair(vs, 13);
    CHECK(out.s0 == trunc_share(0, s0, 13));
    CHECK(out.value ==
          trunc_share(0, s0, 13) + trunc_share(1, x - s0, 13));
  }
}

TEST_CASE("trunc_exact is floor division") {
  CHECK(trunc_exact(8192, 13) == 1);
  CHECK(trunc_exact(8191, 13) == 0);
  CHECK(trunc_exact(u64(0) - 8192, 13) == u64(0) - 1);
  CHECK(trunc_exact(u64(0) - 8191, 13) == u64(0) - 1);  // floor(-0.99..) = -1
  CHECK(trunc_exact(u64(0) - 1, 13) == u64(0) - 1);
}

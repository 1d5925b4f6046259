#include <doctest.h>

#include "lutmpc/errors.hpp"
#include "lutmpc/tables_single.hpp"

using namespace lutmpc;

namespace {

const FixedCfg kTiny{4, 1, 5};  // 32-point grid

TableSpec affine_spec() {
  return {"affine", kTiny, [](u64 enc) { return enc * 3 + 1; }};
}

SingleTables endpoint(int party, u64 first, std::size_t count,
                      TableSpec spec = affine_spec()) {
  return SingleTables(Dealer::from_u64(2024), std::move(spec), "ut-tables",
                      party, first, count);
}

}  // namespace

TEST_CASE("pad stream is key- and counter-separated") {
  Digest32 k1 = seed_from_u64(1), k2 = seed_from_u64(2);
  CHECK(h64pad(k1, 0) == h64pad(k1, 0));
  CHECK(h64pad(k1, 0) != h64pad(k1, 1));
  CHECK(h64pad(k1, 5) != h64pad(k2, 5));
}

TEST_CASE("whole grid evaluates exactly through the online protocol") {
  const std::size_t n = 32;
  std::vector<u64> sum(n);
  run_pair([&](int party, Chan& chan) {
    SingleTables tab = endpoint(party, 0, n);
    Drbg mask(seed_from_u64(500));  // same stream both sides: share splits
    std::vector<u64> xs(n);
    for (std::size_t j = 0; j < n; ++j) {
      u64 x = grid_point(u64(j), kTiny);
      u64 s0 = mask.next_u64();
      xs[j] = party == 0 ? s0 : x - s0;
    }
    u64 rounds0 = chan.stats().rounds;
    u64 payload0 = chan.stats().payload_bytes;
    std::vector<u64> vs = tab.query_batch(chan, xs);
    CHECK(chan.stats().rounds - rounds0 == 1);
    CHECK(chan.stats().payload_bytes - payload0 == 8 * n);
    CHECK(tab.remaining() == 0);
    std::vector<u64> opened = open_vec(chan, MsgType::kOpen, vs);
    if (party == 0)
      for (std::size_t j = 0; j < n; ++j) sum[j] = opened[j];
  });
  for (std::size_t j = 0; j < n; ++j)
    CHECK(sum[j] == grid_point(u64(j), kTiny) * 3 + 1);
}

TEST_CASE("output shares are freshly masked per query") {
  // Same input queried under consecutive counters must produce different
  // shares (each table carries its own value masks).
  std::vector<u64> first_share(2), second_share(2);
  run_pair([&](int party, Chan& chan) {
    SingleTables tab = endpoint(party, 0, 2);
    u64 xs = party == 0 ? 7 : 0;  // x = 7 split as (7, 0)
    first_share[party] = tab.query(chan, xs);
    second_share[party] = tab.query(chan, xs);
  });
  CHECK(first_share[0] + first_share[1] == second_share[0] + second_share[1]);
  CHECK(first_share[0] != second_share[0]);
}

TEST_CASE("depleted table sets refuse further queries") {
  run_pair([&](int party, Chan& chan) {
    SingleTables tab = endpoint(party, 0, 2);
    (void)tab.query(chan, party == 0 ? u64(3) : u64(0));
    (void)tab.query(chan, party == 0 ? u64(3) : u64(0));
    CHECK(tab.remaining() == 0);
    CHECK_THROWS_AS((void)tab.query(chan, 1), TableExhausted);
    // A batch larger than what remains is refused up front, atomically.
    SingleTables tab2 = endpoint(party, 100, 3);
    CHECK_THROWS_AS((void)tab2.query_batch(chan, {1, 2, 3, 4}),
                    TableExhausted);
    CHECK(tab2.remaining() == 3);
  });
}

TEST_CASE("desynchronized counters miss every key") {
  CHECK_THROWS_AS(run_pair([&](int party, Chan& chan) {
                    // Party 1 starts one counter ahead: pads disagree.
                    SingleTables tab = endpoint(party, party == 0 ? 0 : 1, 4);
                    (void)tab.query(chan, party == 0 ? u64(5) : u64(0));
                  }),
                  MissingKey);
}

TEST_CASE("off-grid inputs miss every key") {
  CHECK_THROWS_AS(run_pair([&](int party, Chan& chan) {
                    SingleTables tab = endpoint(party, 0, 4);
                    // Shares sum to 1 << 40: not a sign-extended grid point.
                    (void)tab.query(chan, party == 0 ? u64(1) << 40 : u64(0));
                  }),
                  MissingKey);
}

TEST_CASE("mismatched batch sizes are a protocol violation") {
  CHECK_THROWS_AS(run_pair([&](int party, Chan& chan) {
                    SingleTables tab = endpoint(party, 0, 8);
                    std::vector<u64> xs(party == 0 ? 2 : 3, 0);
                    (void)tab.query_batch(chan, xs);
                  }),
                  FrameCorrupt);
}

TEST_CASE("reuse hook sweeps one table across a 16-bit grid") {
  const FixedCfg cfg = kSigmoidCfg;
  TableSpec spec{"sig-like", cfg, [&](u64 enc) { return enc ^ 0x5a5a; }};
  const std::size_t probes = 512;
  std::vector<u64> sum(probes);
  run_pair([&](int party, Chan& chan) {
    SingleTables tab(Dealer::from_u64(9), spec, "wide", party, 0, 1);
    tab.allow_reuse(true);
    Drbg pick(seed_from_u64(31)), mask(seed_from_u64(32));
    std::vector<u64> xs(probes), truth(probes);
    for (std::size_t j = 0; j < probes; ++j) {
      u64 x = grid_point(pick.next_u64() & 0xffff, cfg);
      u64 s0 = mask.next_u64();
      truth[j] = x;
      xs[j] = party == 0 ? s0 : x - s0;
    }
    std::vector<u64> vs = tab.query_batch(chan, xs);
    CHECK(tab.remaining() == 1);  // pinned counter consumed nothing
    std::vector<u64> opened = open_vec(chan, MsgType::kOpen, vs);
    if (party == 0)
      for (std::size_t j = 0; j < probes; ++j)
        sum[j] = opened[j] - (truth[j] ^ 0x5a5a);
  });
  for (u64 v : sum) CHECK(v == 0);
}

#include <doctest.h>

#include <cmath>

#include "lutmpc/activations.hpp"
#include "lutmpc/errors.hpp"

using namespace lutmpc;

namespace {

// Independent quantizers (the tests' own math, not the table specs).
u64 ref_sigmoid(u64 enc) {
  const double x = decode(enc, kSigmoidCfg);
  return encode(1.0 / (1.0 + std::exp(-x)), kSigmoidCfg);
}
u64 ref_exp(u64 enc) {
  return u64(std::llround(std::exp(decode(enc, kExpCfg)) * 1024.0));
}
u64 ref_inverse(u64 enc) {
  const double x = decode(enc, kInverseCfg);
  return x == 0.0 ? 0 : u64(std::llround(8192.0 / x));
}

std::vector<u64> share_split(Drbg& g, const std::vector<u64>& vals,
                             int party) {
  std::vector<u64> out(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) {
    u64 s0 = g.next_u64();
    out[i] = party == 0 ? s0 : vals[i] - s0;
  }
  return out;
}

}  // namespace

TEST_CASE("sigmoid tables agree with the quantized function everywhere") {
  const std::size_t n = kSigmoidCfg.grid_size();
  std::vector<u64> opened;
  run_pair([&](int party, Chan& chan) {
    SingleTables tab(Dealer::from_u64(11), sigmoid_table_spec(), "sig", party,
                     0, 1);
    tab.allow_reuse(true);
    Drbg mask(seed_from_u64(21));
    std::vector<u64> got;
    for (std::size_t base = 0; base < n; base += 8192) {
      std::vector<u64> vals(8192);
      for (std::size_t j = 0; j < 8192; ++j)
        vals[j] = grid_point(u64(base + j), kSigmoidCfg);
      std::vector<u64> xs = share_split(mask, vals, party);
      u64 r0 = chan.stats().rounds;
      u64 p0 = chan.stats().payload_bytes;
      std::vector<u64> v = sigmoid_batch(chan, tab, xs);
      CHECK(chan.stats().rounds - r0 == 1);
      CHECK(chan.stats().payload_bytes - p0 == 8 * 8192);
      std::vector<u64> o = open_vec(chan, MsgType::kOpen, v);
      got.insert(got.end(), o.begin(), o.end());
    }
    if (party == 0) opened = got;
  });
  REQUIRE(opened.size() == n);
  for (std::size_t j = 0; j < n; ++j)
    REQUIRE(opened[j] == ref_sigmoid(grid_point(u64(j), kSigmoidCfg)));
  // Pinned points: sigma(0) = 0.5 exactly; the grid edges quantize the
  // saturated values.
  CHECK(opened[0] == 4096);
  CHECK(opened[32768] == ref_sigmoid(encode(-4.0, kSigmoidCfg)));
  CHECK(decode(ref_sigmoid(encode(3.999, kSigmoidCfg)), kSigmoidCfg) ==
        doctest::Approx(0.982).epsilon(0.001));
}

TEST_CASE("drelu's shifted representation equals the sign test") {
  // Value level, every 16-bit working encoding: exact.
  for (u64 j = 0; j < (u64(1) << 16); ++j) {
    const u64 x = sign_extend(j, 16);
    const i64 v = (i64(x) + 8191) >> 12;
    CHECK((v >= 2) == (i64(x) > 0));
  }
  // Spec'd examples at value level via the table function.
  const TableSpec spec = drelu_table_spec();
  auto via_table = [&](double xv) {
    const u64 x = encode(xv, {3, 13, 16});
    const i64 v = (i64(x) + 8191) >> 12;
    return spec.f(sign_extend(u64(v), kDreluCfg.total_bits));
  };
  CHECK(via_table(2.0) == 1);
  CHECK(via_table(2.57) == 1);
  CHECK(via_table(0.0) == 0);
  CHECK(via_table(-1.25) == 0);
}

TEST_CASE("drelu protocol is exact outside the truncation band") {
  const std::size_t n = 1500;
  std::vector<u64> vals(n), s0s(n);
  Drbg gen(seed_from_u64(33));
  for (std::size_t i = 0; i < n; ++i) {
    vals[i] = sign_extend(gen.next_u64() & 0xffff, 16);
    s0s[i] = gen.next_u64();
  }
  std::vector<u64> opened;
  run_pair([&](int party, Chan& chan) {
    SingleTables tab(Dealer::from_u64(12), drelu_table_spec(), "dr", party, 0,
                     n);
    std::vector<u64> xs(n);
    for (std::size_t i = 0; i < n; ++i)
      xs[i] = party == 0 ? s0s[i] : vals[i] - s0s[i];
    std::vector<u64> b = drelu_batch(party, chan, tab, xs);
    std::vector<u64> o = open_vec(chan, MsgType::kOpen, b);
    if (party == 0) opened = o;
  });
  for (std::size_t i = 0; i < n; ++i) {
    // Share-exact expectation: both parties' local truncations composed.
    const u64 q0 = drelu_precompute(0, s0s[i]);
    const u64 q1 = drelu_precompute(1, vals[i] - s0s[i]);
    const i64 v = i64(sign_extend(q0 + q1, kDreluCfg.total_bits));
    REQUIRE(opened[i] == u64(v >= 2 ? 1 : 0));
    CHECK((opened[i] == 0 || opened[i] == 1));
    if (std::llabs(i64(vals[i])) >= 4096)
      REQUIRE(opened[i] == u64(i64(vals[i]) > 0 ? 1 : 0));
  }
}

TEST_CASE("relu reconstructs x times its sign") {
  const std::size_t n = 2048;
  std::vector<u64> vals(n);
  Drbg gen(seed_from_u64(44));
  vals[0] = encode(-3.0, {3, 13, 16});
  vals[1] = encode(1.5, {3, 13, 16});
  for (std::size_t i = 2; i < n; ++i) {
    u64 v;
    do {
      v = sign_extend(gen.next_u64() & 0xffff, 16);
    } while (std::llabs(i64(v)) < 4096);  // stay outside the trunc band
    vals[i] = v;
  }
  std::vector<u64> opened;
  run_pair([&](int party, Chan& chan) {
    Dealer dealer = Dealer::from_u64(13);
    SingleTables tab(dealer, drelu_table_spec(), "dr", party, 0, n);
    std::vector<BeaverTriple> triples = dealer.triple_vec("t", 0, party, n);
    Drbg mask(seed_from_u64(45));
    std::vector<u64> xs = share_split(mask, vals, party);
    u64 r0 = chan.stats().rounds;
    u64 p0 = chan.stats().payload_bytes;
    std::vector<u64> z = relu_batch(party, chan, tab, xs, triples);
    CHECK(chan.stats().rounds - r0 == 2);
    CHECK(chan.stats().payload_bytes - p0 == 8 * n + 16 * n);
    std::vector<u64> o = open_vec(chan, MsgType::kOpen, z);
    if (party == 0) opened = o;
  });
  for (std::size_t i = 0; i < n; ++i)
    REQUIRE(opened[i] == (i64(vals[i]) > 0 ? vals[i] : 0));
  CHECK(opened[0] == 0);                          // relu(-3)
  CHECK(opened[1] == encode(1.5, {3, 13, 16}));   // relu(1.5)
}

TEST_CASE("single-table softmax matches the share-exact composed oracle") {
  const std::size_t samples = 2, classes = 10;
  const std::size_t nd = samples * classes;
  const u64 seed = 14;
  std::vector<double> logit_vals = {0.3,  -1.2, 2.0, 0.0,  1.4,
                                    -0.7, 0.9,  2.9, -2.5, 0.1,
                                    1.0,  1.0,  1.0, 1.0,  1.0,
                                    1.0,  1.0,  1.0, 1.0,  1.0};
  std::vector<u64> vals(nd), s0s(nd);
  Drbg gen(seed_from_u64(55));
  for (std::size_t i = 0; i < nd; ++i) {
    vals[i] = encode(logit_vals[i], {3, 13, 16});
    s0s[i] = gen.next_u64();
  }

  std::vector<u64> share0, opened;
  run_pair([&](int party, Chan& chan) {
    Dealer dealer = Dealer::from_u64(seed);
    SingleTables exp_t(dealer, exp_table_spec(), "sm-exp", party, 0, nd);
    SingleTables inv_t(dealer, inverse_table_spec(), "sm-inv", party, 0,
                       samples, classes);
    std::vector<u64> xs(nd);
    for (std::size_t i = 0; i < nd; ++i)
      xs[i] = party == 0 ? s0s[i] : vals[i] - s0s[i];
    u64 r0 = chan.stats().rounds;
    u64 p0 = chan.stats().payload_bytes;
    std::vector<u64> z =
        softmax_single_batch(party, chan, exp_t, inv_t, classes, xs);
    CHECK(chan.stats().rounds - r0 == 3);
    CHECK(chan.stats().payload_bytes - p0 == 8 * (nd + samples + nd));
    std::vector<u64> o = open_vec(chan, MsgType::kOpen, z);
    if (party == 0) {
      share0 = z;
      opened = o;
    }
  });

  // Oracle: replay the dealt randomness and both parties' local arithmetic.
  Dealer dealer = Dealer::from_u64(seed);
  const Digest32 base_exp =
      derive_seed(dealer.subseed("sm-exp"), "exp");
  const Digest32 base_inv =
      derive_seed(dealer.subseed("sm-inv"), "inverse");
  auto prf_at = [](const Digest32& base, const char* tag, u64 ctr, u64 idx) {
    Digest32 d = derive_seed(base, tag, ctr);
    Prf64 prf{detail::le64_at(d.data()), detail::le64_at(d.data() + 8)};
    return prf.at(idx);
  };

  for (std::size_t k = 0; k < samples; ++k) {
    // Exp stage per class, then the summed inverse input.
    std::vector<ValueShare> e(classes);
    ValueShare sum{0, 0};
    for (std::size_t j = 0; j < classes; ++j) {
      const std::size_t i = k * classes + j;
      ValueShare t = trunc_pair({vals[i], s0s[i]}, kSoftmaxExpShift);
      const u64 ev = ref_exp(t.value);
      e[j] = {ev, prf_at(base_exp, "valshare", u64(i), t.value)};
      sum.value += e[j].value;
      sum.s0 += e[j].s0;
    }
    ValueShare s = trunc_pair(sum, kSoftmaxSumShift);
    const u64 rv = ref_inverse(s.value);
    ValueShare r = {rv, prf_at(base_inv, "valshare", u64(k), s.value)};
    const u64 slot = s.value & (kInverseCfg.grid_size() - 1);

    std::vector<u64> a_full(classes);
    Drbg(base_inv, "mulmask", u64(k)).fill(a_full.data(), classes);
    for (std::size_t j = 0; j < classes; ++j) {
      const std::size_t i = k * classes + j;
      const u64 d = e[j].value - a_full[j];  // the opened difference
      const u64 aux_s0 =
          prf_at(base_inv, "auxshare", u64(k), slot * classes + j);
      ValueShare z = {d * r.value + a_full[j] * r.value,
                      d * r.s0 + aux_s0};
      z = trunc_pair(z, kSoftmaxProdShift);
      REQUIRE(opened[i] == z.value);
      REQUIRE(share0[i] == z.s0);
    }
  }

  // Distributional sanity: rows behave like probabilities.
  for (std::size_t k = 0; k < samples; ++k) {
    double sum = 0;
    for (std::size_t j = 0; j < classes; ++j) {
      double p = decode64(opened[k * classes + j], kWorkingFrac);
      CHECK(p >= 0.0);
      CHECK(p <= 1.02);
      sum += p;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(0.05));
    if (k == 1) {  // equal logits: uniform distribution
      for (std::size_t j = 0; j < classes; ++j)
        CHECK(decode64(opened[k * classes + j], kWorkingFrac) ==
              doctest::Approx(0.1).epsilon(0.03));
    }
  }
}

TEST_CASE("single-class softmax normalizes to one") {
  std::vector<u64> opened;
  run_pair([&](int party, Chan& chan) {
    Dealer dealer = Dealer::from_u64(15);
    SingleTables exp_t(dealer, exp_table_spec(), "e1", party, 0, 3);
    SingleTables inv_t(dealer, inverse_table_spec(), "i1", party, 0, 3, 1);
    // Sums must sit where the coarse inverse grid still resolves them:
    // e^x >> 0.25, i.e. positive logits.
    std::vector<u64> vals = {encode(1.7, {3, 13, 16}),
                             encode(2.5, {3, 13, 16}),
                             encode(2.9, {3, 13, 16})};
    Drbg mask(seed_from_u64(66));
    std::vector<u64> xs = share_split(mask, vals, party);
    std::vector<u64> z =
        softmax_single_batch(party, chan, exp_t, inv_t, 1, xs);
    std::vector<u64> o = open_vec(chan, MsgType::kOpen, z);
    if (party == 0) opened = o;
  });
  for (u64 v : opened)
    CHECK(decode64(v, kWorkingFrac) == doctest::Approx(1.0).epsilon(0.06));
}

TEST_CASE("softmax misconfiguration raises typed errors") {
  LoopbackPair pair(0);
  Dealer dealer = Dealer::from_u64(16);
  SingleTables exp_t(dealer, exp_table_spec(), "e", 0, 0, 10);
  SingleTables inv_no_aux(dealer, inverse_table_spec(), "i", 0, 0, 10);
  std::vector<u64> xs(10, 0);
  CHECK_THROWS_AS((void)softmax_single_batch(0, pair.end(0), exp_t,
                                             inv_no_aux, 5, xs),
                  BadConfig);
  SingleTables inv_t(dealer, inverse_table_spec(), "i2", 0, 0, 10, 3);
  CHECK_THROWS_AS((void)softmax_single_batch(0, pair.end(0), exp_t, inv_t, 3,
                                             xs),  // 10 % 3 != 0
                  BadConfig);
  CHECK_THROWS_AS((void)inv_no_aux.query_batch_aux(pair.end(0), xs),
                  BadConfig);
}

TEST_CASE("reusable-table softmax runs in seven rounds") {
  const std::size_t classes = 4;
  std::vector<double> logit_vals = {1.2, -0.6, 0.4, 2.1};
  std::vector<u64> opened;
  run_pair([&](int party, Chan& chan) {
    Dealer dealer = Dealer::from_u64(17);
    MultiParams params{0.1, 10.0};  // 100 queries per table
    MultiTables exp_t(dealer, exp_table_spec(), "me", party, 1, params);
    MultiTables inv_t(dealer, inverse_table_spec(), "mi", party, 1, params);
    exp_t.enable_noise(false);
    inv_t.enable_noise(false);
    std::vector<BeaverTriple> triples =
        dealer.triple_vec("mt", 0, party, classes);
    std::vector<u64> vals(classes);
    for (std::size_t j = 0; j < classes; ++j)
      vals[j] = encode(logit_vals[j], {3, 13, 16});
    Drbg mask(seed_from_u64(77));
    std::vector<u64> xs = share_split(mask, vals, party);
    u64 r0 = chan.stats().rounds;
    std::vector<u64> z = softmax_multi_batch(party, chan, exp_t, inv_t,
                                             classes, xs, triples);
    CHECK(chan.stats().rounds - r0 == 7);
    std::vector<u64> o = open_vec(chan, MsgType::kOpen, z);
    if (party == 0) opened = o;
  });
  double sum = 0, esum = 0;
  std::vector<double> expect(classes);
  for (std::size_t j = 0; j < classes; ++j) esum += std::exp(logit_vals[j]);
  for (std::size_t j = 0; j < classes; ++j)
    expect[j] = std::exp(logit_vals[j]) / esum;
  for (std::size_t j = 0; j < classes; ++j) {
    double p = decode64(opened[j], kWorkingFrac);
    CHECK(p == doctest::Approx(expect[j]).epsilon(0.05));
    sum += p;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(0.02));
}

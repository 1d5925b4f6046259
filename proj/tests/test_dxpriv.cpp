#include <doctest.h>

#include <cmath>

#include "lutmpc/dxpriv.hpp"
#include "lutmpc/errors.hpp"

using namespace lutmpc;

TEST_CASE("geometric pmf identities") {
  GeometricParams p{0.5, 1 << 13};
  double total = 0.0;
  for (i64 k = -200; k <= 200; ++k) total += geometric_pmf(p, k);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(geometric_pmf(p, 0) == doctest::Approx(p_zero(p)));
  for (i64 k : {i64(0), i64(1), i64(7), i64(40)}) {
    CHECK(geometric_pmf(p, k) / geometric_pmf(p, k + 1) ==
          doctest::Approx(std::exp(p.eps)));
    CHECK(geometric_pmf(p, k) == doctest::Approx(geometric_pmf(p, -k)));
  }
  // Clamped mass agrees with the tail sum it stands for.
  GeometricParams tight{0.3, 3};
  double tail = 0.0;
  for (i64 k = 4; k <= 400; ++k) tail += 2.0 * geometric_pmf(tight, k);
  CHECK(clamped_mass(tight) == doctest::Approx(tail).epsilon(1e-9));
}

TEST_CASE("sampler consumes exactly one draw and is deterministic") {
  GeometricParams p{0.7, 100};
  Drbg a(seed_from_u64(51)), b(seed_from_u64(51));
  for (int i = 0; i < 64; ++i) (void)sample_geometric(a, p);
  for (int i = 0; i < 64; ++i) (void)b.next_u64();
  CHECK(a.next_u64() == b.next_u64());
  Drbg c(seed_from_u64(51)), d(seed_from_u64(51));
  for (int i = 0; i < 256; ++i)
    REQUIRE(sample_geometric(c, p) == sample_geometric(d, p));
}

TEST_CASE("center mass and mean match the law at three noise scales") {
  for (double eps : {0.1, 0.5, 1.0}) {
    GeometricParams p{eps, 1 << 13};
    Drbg g(seed_from_u64(1700 + u64(eps * 10)));
    const int n = 100000;
    int zeros = 0;
    double mean = 0.0;
    for (int i = 0; i < n; ++i) {
      i64 s = sample_geometric(g, p);
      zeros += s == 0;
      mean += double(s);
    }
    mean /= n;
    CHECK(std::abs(double(zeros) / n - p_zero(p)) < 0.01);
    CHECK(std::abs(mean) < 0.25);
  }
}

TEST_CASE("clamping confines samples and folds tail mass onto the edge") {
  GeometricParams p{0.3, 2};
  Drbg g(seed_from_u64(9000));
  const int n = 200000;
  int at_edge = 0;
  for (int i = 0; i < n; ++i) {
    i64 s = sample_geometric(g, p);
    REQUIRE(s >= -2);
    REQUIRE(s <= 2);
    at_edge += s == 2;
  }
  double expect = geometric_pmf(p, 2) + clamped_mass(p) / 2.0;
  CHECK(std::abs(double(at_edge) / n - expect) < 0.01);
}

TEST_CASE("noise shares sum to the dealt samples") {
  Dealer d = Dealer::from_u64(31);
  GeometricParams p{0.2, 4096};
  auto full = geometric_noise_full(d, "mnoise", 6, 300, p);
  auto s0 = geometric_noise_share(d, "mnoise", 6, 0, 300, p);
  auto s1 = geometric_noise_share(d, "mnoise", 6, 1, 300, p);
  for (std::size_t i = 0; i < full.size(); ++i)
    REQUIRE(s0[i] + s1[i] == u64(full[i]));
  // Share streams hide the sample: share 0 alone is not the value.
  int hits = 0;
  for (std::size_t i = 0; i < full.size(); ++i) hits += s0[i] == u64(full[i]);
  CHECK(hits < 5);
}

TEST_CASE("trace audit bounds the observed likelihood ratio") {
  GeometricParams p{0.5, 1 << 13};
  Drbg g(seed_from_u64(77));
  AccessTrace trace;
  const u64 center = 9000;
  for (u64 i = 0; i < 100000; ++i)
    trace.push_back({i, 0, center + u64(sample_geometric(g, p))});
  AuditReport rep = audit_trace(trace, p.eps);
  CHECK(rep.samples == 100000);
  CHECK(rep.stats >= 4);
  CHECK(rep.max_ratio > 1.0);
  CHECK(rep.max_ratio <= std::exp(p.eps) * 1.05);
  CHECK(rep.bound == doctest::Approx(std::exp(p.eps)));
}

TEST_CASE("trace audit refuses under-powered traces") {
  CHECK_THROWS_AS(audit_trace({}, 0.5), InsufficientSamples);
  AccessTrace tiny;
  Drbg g(seed_from_u64(5));
  GeometricParams p{0.5, 100};
  for (u64 i = 0; i < 200; ++i)
    tiny.push_back({i, 0, 50 + u64(sample_geometric(g, p))});
  CHECK_THROWS_AS(audit_trace(tiny, 0.5), InsufficientSamples);
  CHECK_THROWS_AS(audit_trace(tiny, -1.0), BadConfig);
}

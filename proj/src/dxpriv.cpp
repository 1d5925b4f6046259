#include "lutmpc/dxpriv.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "lutmpc/errors.hpp"

namespace lutmpc {

void GeometricParams::validate() const {
  if (!(eps > 0.0) || !std::isfinite(eps))
    throw BadConfig("noise scale eps must be positive and finite");
  if (clamp <= 0) throw BadConfig("noise clamp must be positive");
}

GeometricParams geometric_for_grid(double eps, const FixedCfg& cfg) {
  GeometricParams p{eps, i64(1) << cfg.frac_bits};
  p.validate();
  return p;
}

double p_zero(const GeometricParams& p) {
  double q = std::exp(-p.eps);
  return (1.0 - q) / (1.0 + q);
}

double clamped_mass(const GeometricParams& p) {
  double q = std::exp(-p.eps);
  return 2.0 * std::pow(q, double(p.clamp) + 1.0) / (1.0 + q);
}

double geometric_pmf(const GeometricParams& p, i64 k) {
  double q = std::exp(-p.eps);
  return p_zero(p) * std::pow(q, double(k < 0 ? -k : k));
}

i64 sample_geometric(Drbg& g, const GeometricParams& p) {
  p.validate();
  const double q = std::exp(-p.eps);
  const double lq = std::log(q);
  double u = g.next_unit();
  if (u <= 0.0) u = 0x1p-54;  // keep the logarithms finite
  const double lo = q / (1.0 + q);   // P[γ <= -1]
  const double hi = 1.0 / (1.0 + q); // P[γ <= 0]
  i64 k;
  if (u >= hi) {
    // Smallest k >= 1 with 1 - q^(k+1)/(1+q) >= u.
    k = i64(std::ceil(std::log((1.0 - u) * (1.0 + q)) / lq)) - 1;
    if (k < 1) k = 1;
  } else if (u < lo) {
    // Largest tail: smallest |k| with q^|k|/(1+q) >= u on the negative side.
    k = i64(std::ceil(-std::log(u * (1.0 + q)) / lq));
    if (k > -1) k = -1;
  } else {
    k = 0;
  }
  return std::clamp(k, -p.clamp, p.clamp);
}

namespace {

Drbg noise_drbg(const Dealer& d, std::string_view tag, u64 index,
                const char* stream) {
  return Drbg(d.subseed(tag, index), stream);
}

}  // namespace

std::vector<i64> geometric_noise_full(const Dealer& d, std::string_view tag,
                                      u64 index, std::size_t count,
                                      const GeometricParams& p) {
  Drbg g = noise_drbg(d, tag, index, "gamma");
  std::vector<i64> out(count);
  for (auto& v : out) v = sample_geometric(g, p);
  return out;
}

std::vector<u64> geometric_noise_share(const Dealer& d, std::string_view tag,
                                       u64 index, int party,
                                       std::size_t count,
                                       const GeometricParams& p) {
  if (party != 0 && party != 1)
    throw BadConfig("party index must be 0 or 1");
  std::vector<i64> full = geometric_noise_full(d, tag, index, count, p);
  Drbg g = noise_drbg(d, tag, index, "gamma-share0");
  std::vector<u64> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    u64 s0 = g.next_u64();
    out[i] = party == 0 ? s0 : u64(full[i]) - s0;
  }
  return out;
}

AuditReport audit_trace(const AccessTrace& trace, double eps,
                        std::size_t min_tail) {
  if (!(eps > 0.0) || !std::isfinite(eps))
    throw BadConfig("audit eps must be positive and finite");
  AuditReport rep;
  rep.bound = std::exp(eps);
  rep.samples = trace.size();

  std::map<u64, std::size_t> hist;
  for (const auto& e : trace) ++hist[e.slot];
  if (hist.empty())
    throw InsufficientSamples("empty access trace");

  u64 mode = hist.begin()->first;
  std::size_t best = 0;
  for (const auto& [slot, n] : hist)
    if (n > best) best = n, mode = slot;

  // Tail sums outward from the mode, one side at a time: tail[j] counts
  // events at distance >= j.  For the geometric law every tail[j]/tail[j+1]
  // estimates one per-step likelihood ratio.
  for (int side = 0; side < 2; ++side) {
    std::vector<std::size_t> bins;  // bins[j]: events at distance j
    for (const auto& [slot, n] : hist) {
      bool right = slot >= mode;
      if ((side == 0) != right) continue;
      u64 dist = right ? slot - mode : mode - slot;
      if (side == 1 && dist == 0) continue;  // center counted on one side
      if (dist >= bins.size()) bins.resize(dist + 1, 0);
      bins[dist] += n;
    }
    std::vector<std::size_t> tail(bins.size() + 1, 0);
    for (std::size_t j = bins.size(); j-- > 0;)
      tail[j] = tail[j + 1] + bins[j];
    for (std::size_t j = 0; j + 1 < tail.size(); ++j) {
      if (tail[j + 1] < min_tail) break;
      rep.max_ratio =
          std::max(rep.max_ratio, double(tail[j]) / double(tail[j + 1]));
      ++rep.stats;
    }
    // Per-bin ratios where both neighbors are individually well populated.
    for (std::size_t j = 0; j + 1 < bins.size(); ++j) {
      if (bins[j] < min_tail || bins[j + 1] < min_tail) continue;
      rep.max_ratio =
          std::max(rep.max_ratio, double(bins[j]) / double(bins[j + 1]));
      ++rep.stats;
    }
  }
  if (rep.stats == 0)
    throw InsufficientSamples(
        "trace too small for any likelihood-ratio statistic");
  return rep;
}

}  // namespace lutmpc

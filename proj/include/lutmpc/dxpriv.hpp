#pragma once
//
// Two-sided geometric noise for metric-private table access, and an
// empirical auditor for recorded access patterns.
//
// The mechanism adds integer noise γ to a query's grid position, with
// P[γ = k] ∝ e^(-eps·|k|).  Under this distribution the probability of any
// observed access position shifts by at most a factor e^(eps·d) when the
// true input moves by d grid units, so the access pattern of a reusable
// table reveals a query's position only up to that metric bound.  Noise is
// dealt as additive shares, so neither online party learns γ itself.
//
// Samples are clamped to ±clamp grid units (a table query must stay on the
// finite grid); clamped_mass reports the probability mass this folds onto
// the boundary, which callers surface alongside results.

#include <cstdlib>
#include <vector>

#include "lutmpc/dealer.hpp"
#include "lutmpc/ring64.hpp"
#include "lutmpc/rng.hpp"

namespace lutmpc {

struct GeometricParams {
  double eps = 1.0;  // per-grid-unit privacy scale
  i64 clamp = 0;     // maximum |γ| in grid units

  void validate() const;
};

// Clamp wide enough for a whole unit step (2^frac grid points) on this grid.
GeometricParams geometric_for_grid(double eps, const FixedCfg& cfg);

// P[γ = 0] = (1 - e^-eps) / (1 + e^-eps).
double p_zero(const GeometricParams& p);

// Probability mass of the unclamped distribution with |γ| > clamp.
double clamped_mass(const GeometricParams& p);

// Unclamped pmf at k.
double geometric_pmf(const GeometricParams& p, i64 k);

// Draw one clamped sample by inverting the CDF on a single 64-bit uniform.
// Consumes exactly one value from the generator.
i64 sample_geometric(Drbg& g, const GeometricParams& p);

// Dealer-addressed noise: `count` samples under (tag, index).  The full
// values are the auditor/offline view; shares sum to the sample embedded
// in the ring (two's complement).
std::vector<i64> geometric_noise_full(const Dealer& d, std::string_view tag,
                                      u64 index, std::size_t count,
                                      const GeometricParams& p);
std::vector<u64> geometric_noise_share(const Dealer& d, std::string_view tag,
                                       u64 index, int party,
                                       std::size_t count,
                                       const GeometricParams& p);

// One recorded table access: which query, which table generation, and the
// grid slot whose key was touched — the position an access-pattern observer
// learns.
struct AccessEvent {
  u64 counter = 0;
  u64 table = 0;
  u64 slot = 0;
};
using AccessTrace = std::vector<AccessEvent>;

struct AuditReport {
  double max_ratio = 0.0;   // largest observed per-step likelihood ratio
  double bound = 0.0;       // e^eps, the mechanism's per-step promise
  std::size_t samples = 0;  // events audited
  std::size_t stats = 0;    // ratio statistics with enough mass to count
};

// Estimate the worst per-grid-step likelihood ratio from a trace of
// repeated queries at one fixed input.  Counts are aggregated from the
// observed mode outward (tail sums on each side), and a ratio statistic is
// used only when its denominator holds at least `min_tail` events; with
// fewer events the estimate would be noise, so a trace yielding no usable
// statistic raises InsufficientSamples.
AuditReport audit_trace(const AccessTrace& trace, double eps,
                        std::size_t min_tail = 5000);

}  // namespace lutmpc

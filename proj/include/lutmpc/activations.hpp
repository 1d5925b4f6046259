#pragma once
//
// Secure activation protocols over shared fixed-point values.
//
// Univariate activations (sigmoid, drelu) are a single table query on a
// small input grid; relu adds one Beaver multiplication to drelu.  Softmax
// composes two univariate tables — exponential and inverse — with one
// multiplication per class: the exponentials are summed locally, the sum's
// inverse is looked up once, and each product e^{x_j} * (1/s) is completed
// against the inverse table's product columns by opening a single masked
// difference per class.  That keeps the traffic of a whole softmax at
// (1 + 2*d) ring elements per party for d classes, in three rounds.
//
// Quantization pipeline (fractional bits at each stage):
//   working 13 -> exp input {6,10} (shift 3) -> exp output 10
//   sum of exps 10 -> inverse input {14,2} (shift 8) -> inverse output 13
//   product 10+13=23 -> output 13 (shift 10)
// Truncations are the local-share kind, so each stage can sit one LSB
// above the exact value; oracles mirror this share-for-share.

#include <vector>

#include "lutmpc/sharing.hpp"
#include "lutmpc/tables_multi.hpp"
#include "lutmpc/tables_single.hpp"

namespace lutmpc {

// --- table functions --------------------------------------------------------

// Stable function identifiers, stamped into serialized table files and
// provisioning manifests.
inline constexpr u16 kFuncSigmoid = 1;
inline constexpr u16 kFuncDrelu = 2;
inline constexpr u16 kFuncExp = 3;
inline constexpr u16 kFuncInverse = 4;

// sigmoid(x) on {3,13,16}, output quantized to 13 fractional bits.
TableSpec sigmoid_table_spec();

// The sign table for the shifted-truncated drelu representation on
// {4,1,5}: 1 when the (1-fractional-bit) input is >= 2 grid units, else 0.
TableSpec drelu_table_spec();

// e^(x - shift) on {6,10,16}, output in 10 fractional bits.  The public
// shift widens the usable logit range; both parties must use the same
// value.  Default 0.
TableSpec exp_table_spec(double shift = 0.0);

// 1/x on {14,2,16}, output in 13 fractional bits; 0 maps to 0.
TableSpec inverse_table_spec();

// --- stage shifts (shared with oracles) ------------------------------------

inline constexpr int kSoftmaxExpShift = kWorkingFrac - kExpCfg.frac_bits;
inline constexpr int kSoftmaxSumShift =
    kExpCfg.frac_bits - kInverseCfg.frac_bits;
inline constexpr int kSoftmaxProdShift = kExpCfg.frac_bits;
inline constexpr int kDreluShift = kWorkingFrac - kDreluCfg.frac_bits;

// Party i's local preprocessing for drelu: offset by i*(2^13 - 1), then
// truncate the share down to one retained fractional bit.
inline u64 drelu_precompute(int party, u64 x_share) {
  const u64 offset = party == 1 ? (u64(1) << kWorkingFrac) - 1 : 0;
  return trunc_share(party, x_share + offset, kDreluShift);
}

// --- protocols --------------------------------------------------------------
// Each works with either table flavor (single-use or reusable); rounds and
// bytes are those of the underlying query plus any multiplication.

// Sigmoid: inputs are working shares of values in (-4, 4); one query.
template <class Tables>
std::vector<u64> sigmoid_batch(Chan& chan, Tables& tables,
                               const std::vector<u64>& xs) {
  return tables.query_batch(chan, xs);
}

// DReLU: shares of 1 if x > 0 else 0 (plain ring integer).  Exact except
// within one truncation step of zero (|x| < 2^12), where the share-local
// truncation may tip the result to the neighbouring grid point.
template <class Tables>
std::vector<u64> drelu_batch(int party, Chan& chan, Tables& tables,
                             const std::vector<u64>& xs) {
  std::vector<u64> q(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    q[i] = drelu_precompute(party, xs[i]);
  return tables.query_batch(chan, q);
}

// ReLU = x * drelu(x): one extra round for the Beaver multiplication, one
// triple per input.  No truncation; the bit factor adds no scale.
template <class Tables>
std::vector<u64> relu_batch(int party, Chan& chan, Tables& drelu_tables,
                            const std::vector<u64>& xs,
                            const std::vector<BeaverTriple>& triples) {
  std::vector<u64> b = drelu_batch(party, chan, drelu_tables, xs);
  return beaver_mul_vec(party, chan, xs, b, triples);
}

namespace detail {

inline void check_softmax_shape(std::size_t classes, std::size_t total) {
  if (classes == 0 || total % classes != 0)
    throw BadConfig("logit count is not a multiple of the class count");
}

// Stages shared by both flavors and the oracles: exp inputs from working
// logits, and the per-sample truncated sums feeding the inverse lookup.
inline std::vector<u64> exp_inputs(int party,
                                   const std::vector<u64>& logits) {
  std::vector<u64> t(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i)
    t[i] = trunc_share(party, logits[i], kSoftmaxExpShift);
  return t;
}

inline std::vector<u64> summed_inputs(int party, const std::vector<u64>& e,
                                      std::size_t classes) {
  const std::size_t samples = e.size() / classes;
  std::vector<u64> s(samples, 0);
  for (std::size_t k = 0; k < samples; ++k) {
    for (std::size_t j = 0; j < classes; ++j) s[k] += e[k * classes + j];
    s[k] = trunc_share(party, s[k], kSoftmaxSumShift);
  }
  return s;
}

}  // namespace detail

// Softmax over flattened logits (samples x classes, row-major), working
// shares in.  Single-use flavor: 3 rounds, 8*(1 + 2*classes) payload bytes
// per sample per party.  `inverse_tables` must carry `classes` product
// columns; `exp_tables` is consumed classes-per-sample, `inverse_tables`
// once per sample.
template <class ExpTables, class InvTables>
std::vector<u64> softmax_single_batch(int party, Chan& chan,
                                      ExpTables& exp_tables,
                                      InvTables& inverse_tables,
                                      std::size_t classes,
                                      const std::vector<u64>& logits) {
  detail::check_softmax_shape(classes, logits.size());
  if (inverse_tables.aux_count() != classes)
    throw BadConfig("inverse tables lack one product column per class");
  const std::size_t samples = logits.size() / classes;

  std::vector<u64> e =
      exp_tables.query_batch(chan, detail::exp_inputs(party, logits));
  TableAuxBatch inv = inverse_tables.query_batch_aux(
      chan, detail::summed_inputs(party, e, classes));

  // One open per product: d = e - a, then z = d*<1/s> + <a * 1/s>.
  std::vector<u64> dmsg(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) dmsg[i] = e[i] - inv.masks[i];
  std::vector<u64> dopen = open_vec(chan, MsgType::kOpen, dmsg);

  std::vector<u64> out(e.size());
  for (std::size_t k = 0; k < samples; ++k) {
    for (std::size_t j = 0; j < classes; ++j) {
      const std::size_t i = k * classes + j;
      const u64 z = dopen[i] * inv.value[k] + inv.aux[i];
      out[i] = trunc_share(party, z, kSoftmaxProdShift);
    }
  }
  return out;
}

// Reusable flavor: 7 rounds (3 + 3 + 1); products via standard Beaver
// triples, one per logit.
template <class ExpTables, class InvTables>
std::vector<u64> softmax_multi_batch(
    int party, Chan& chan, ExpTables& exp_tables, InvTables& inverse_tables,
    std::size_t classes, const std::vector<u64>& logits,
    const std::vector<BeaverTriple>& triples) {
  detail::check_softmax_shape(classes, logits.size());
  const std::size_t samples = logits.size() / classes;

  std::vector<u64> e =
      exp_tables.query_batch(chan, detail::exp_inputs(party, logits));
  std::vector<u64> r =
      inverse_tables.query_batch(chan, detail::summed_inputs(party, e,
                                                             classes));

  std::vector<u64> rep(e.size());
  for (std::size_t k = 0; k < samples; ++k)
    for (std::size_t j = 0; j < classes; ++j) rep[k * classes + j] = r[k];
  std::vector<u64> z = beaver_mul_vec(party, chan, e, rep, triples);
  for (u64& v : z) v = trunc_share(party, v, kSoftmaxProdShift);
  return z;
}

}  // namespace lutmpc

#include "lutmpc/sharing.hpp"

namespace lutmpc {

std::vector<u64> open_vec(Chan& chan, MsgType type,
                          const std::vector<u64>& shares) {
  std::vector<u64> peer = chan.exchange_u64(type, shares);
  for (std::size_t i = 0; i < peer.size(); ++i) peer[i] += shares[i];
  return peer;
}

u64 open_one(Chan& chan, MsgType type, u64 share) {
  return open_vec(chan, type, {share})[0];
}

Mat open_mat(Chan& chan, const Mat& share) {
  Mat out = share;
  out.a = open_vec(chan, MsgType::kOpen, share.a);
  return out;
}

std::vector<u64> beaver_mul_vec(int party, Chan& chan,
                                const std::vector<u64>& x,
                                const std::vector<u64>& y,
                                const std::vector<BeaverTriple>& triples) {
  const std::size_t n = x.size();
  if (y.size() != n || triples.size() != n)
    throw BadConfig("beaver_mul_vec input size mismatch");
  // One frame carries every d = x-a followed by every e = y-b.
  std::vector<u64> de(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    de[i] = x[i] - triples[i].a;
    de[n + i] = y[i] - triples[i].b;
  }
  std::vector<u64> opened = open_vec(chan, MsgType::kOpen, de);
  std::vector<u64> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    const u64 d = opened[i];
    const u64 e = opened[n + i];
    z[i] = triples[i].c + e * triples[i].a + d * triples[i].b;
    if (party == 1) z[i] += d * e;
  }
  return z;
}

Mat masked_matmul(int party, const Mat& E, const Mat& F, const Mat& Xi,
                  const Mat& Wi, const Mat& Zi) {
  Mat g = add(add(mul(Xi, F), mul(E, Wi)), Zi);
  if (party == 1) {
    Mat ef = mul(E, F);
    g = sub(g, ef);
  }
  return g;
}

std::vector<ec::Scalar> convert_to_scalar_shares(
    int party, Chan& chan, const std::vector<u64>& x_shares,
    const std::vector<ConvPair>& pairs) {
  const std::size_t n = x_shares.size();
  if (pairs.size() != n) throw BadConfig("conversion pair count mismatch");
  std::vector<u64> masked(n);
  for (std::size_t i = 0; i < n; ++i) masked[i] = x_shares[i] - pairs[i].r64;
  std::vector<u64> z = open_vec(chan, MsgType::kOpen, masked);
  std::vector<ec::Scalar> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (party == 0) {
      out[i] = ec::sc_add(ec::scalar_from_i64(i64(z[i])), pairs[i].rN);
    } else {
      out[i] = pairs[i].rN;
    }
  }
  return out;
}

}  // namespace lutmpc

#pragma once
//
// Two-out-of-two additive sharing over Z_{2^64} and the protocol
// primitives built on it:
//
//  * openings (reveal a shared value by exchanging shares),
//  * Beaver multiplication (one round: the d,e openings travel together),
//  * masked matrix products (the data-matrix mask is opened once per
//    dataset; each weight use costs one opening of W - V),
//  * share conversion from Z_{2^64} into the curve's scalar field.
//
// All functions take this party's shares plus the correlated randomness
// the offline phase provisioned, and a channel to the peer.  They are
// deterministic given those inputs, which is what lets a plaintext oracle
// replay an entire training run share-for-share.

#include <vector>

#include "lutmpc/mat.hpp"
#include "lutmpc/net.hpp"
#include "lutmpc/ring64.hpp"
#include "lutmpc/secp256k1.hpp"

namespace lutmpc {

// One party's share of a multiplication triple (a, b, c) with c = a*b.
struct BeaverTriple {
  u64 a = 0, b = 0, c = 0;
};

// One party's share of a random r held both mod 2^64 and mod the curve
// order; consumed by one share conversion.
struct ConvPair {
  u64 r64 = 0;
  ec::Scalar rN;
};

// Split a value into two additive shares using the given randomness for
// share 0.
inline void share_value(u64 value, u64 s0, u64& out0, u64& out1) {
  out0 = s0;
  out1 = value - s0;
}

// --- openings --------------------------------------------------------------

std::vector<u64> open_vec(Chan& chan, MsgType type,
                          const std::vector<u64>& shares);
u64 open_one(Chan& chan, MsgType type, u64 share);
Mat open_mat(Chan& chan, const Mat& share);

// --- multiplication --------------------------------------------------------

// Element-wise product of two shared vectors; consumes one triple per
// element, one round total (all d,e openings batched into one frame).
std::vector<u64> beaver_mul_vec(int party, Chan& chan,
                                const std::vector<u64>& x,
                                const std::vector<u64>& y,
                                const std::vector<BeaverTriple>& triples);

// Local combination step of the masked matrix product
//   X*W  =  Xi*F + E*Wi + Zi  (summed over parties, minus E*F once),
// where E = open(X - U) and F = open(W - V) and Z = U*V.  Party 1 folds
// the public -E*F term in.
Mat masked_matmul(int party, const Mat& E, const Mat& F, const Mat& Xi,
                  const Mat& Wi, const Mat& Zi);

// --- share conversion ------------------------------------------------------

// Convert shares of small ring values into shares mod the curve order N.
// One round: the parties open z = x - r in the 64-bit ring and reinterpret
// it as a signed integer, which is exact whenever |x| < 2^61 (the mask r
// is drawn from [0, 2^62)).  Party 0 adds the opened value to its share of
// r mod N; party 1's output is just its share of r mod N.
//
// The opened z values statistically hide x (distance ~2^-44 for grid-sized
// inputs) and are the only thing this step reveals.
std::vector<ec::Scalar> convert_to_scalar_shares(
    int party, Chan& chan, const std::vector<u64>& x_shares,
    const std::vector<ConvPair>& pairs);

}  // namespace lutmpc

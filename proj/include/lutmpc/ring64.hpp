#pragma once
//
// Fixed-point arithmetic over the ring Z_{2^64}.
//
// Real values are encoded as value * 2^frac_bits in two's complement,
// carried in a u64 so that ring addition/multiplication are plain unsigned
// arithmetic (wraparound is the ring reduction).  A FixedCfg describes a
// quantization grid: total_bits of encoding (sign included in int_bits),
// of which frac_bits sit below the binary point.  Lookup tables enumerate
// every encoding of their input grid, so grids are kept small (<= 16 bits)
// while working-precision values use the full 64-bit ring.

#include <cmath>

#include "lutmpc/errors.hpp"
#include "lutmpc/sha256.hpp"

namespace lutmpc {

struct FixedCfg {
  int int_bits;    // integer bits, sign included
  int frac_bits;   // fractional bits
  int total_bits;  // total encoding width == int_bits + frac_bits

  constexpr int grid_bits() const { return total_bits; }
  constexpr u64 grid_size() const { return u64(1) << total_bits; }
};

// Grids used by the activation tables and the shared working precision.
inline constexpr FixedCfg kSigmoidCfg{3, 13, 16};
inline constexpr FixedCfg kDreluCfg{4, 1, 5};
inline constexpr FixedCfg kExpCfg{6, 10, 16};
inline constexpr FixedCfg kInverseCfg{14, 2, 16};
inline constexpr int kWorkingFrac = 13;

inline void validate(const FixedCfg& cfg) {
  if (cfg.int_bits < 1 || cfg.frac_bits < 0 ||
      cfg.total_bits != cfg.int_bits + cfg.frac_bits || cfg.total_bits < 2 ||
      cfg.total_bits > 64) {
    throw BadConfig("fixed-point config out of range");
  }
}

// Sign-extend the low `bits` bits of v to the full ring.
inline u64 sign_extend(u64 v, int bits) {
  if (bits >= 64) return v;
  const u64 m = u64(1) << (bits - 1);
  v &= (u64(1) << bits) - 1;
  return (v ^ m) - m;
}

// True iff x is a valid encoding on cfg's grid, i.e. the high bits are a
// sign extension of the low total_bits.
inline bool on_grid(u64 x, const FixedCfg& cfg) {
  return sign_extend(x, cfg.total_bits) == x;
}

// Encode with rounding half away from zero.  Throws EncodeRange if the
// scaled value does not fit the grid's signed range.
inline u64 encode(double v, const FixedCfg& cfg) {
  const double scaled = v * std::ldexp(1.0, cfg.frac_bits);
  const double rounded = scaled >= 0 ? std::floor(scaled + 0.5)
                                     : std::ceil(scaled - 0.5);
  const double lo = -std::ldexp(1.0, cfg.total_bits - 1);
  const double hi = std::ldexp(1.0, cfg.total_bits - 1);  // exclusive
  if (!(rounded >= lo && rounded < hi))
    throw EncodeRange("value does not fit fixed-point grid");
  return u64(i64(rounded));
}

inline double decode(u64 x, const FixedCfg& cfg) {
  return double(i64(sign_extend(x, cfg.total_bits))) *
         std::ldexp(1.0, -cfg.frac_bits);
}

inline double decode64(u64 x, int frac_bits) {
  return double(i64(x)) * std::ldexp(1.0, -frac_bits);
}

// Ring encoding of grid index j in [0, 2^total): the two's-complement
// value whose low total_bits equal j.  Enumerating j enumerates the grid.
inline u64 grid_point(u64 j, const FixedCfg& cfg) {
  return sign_extend(j, cfg.total_bits);
}

// Rebased (offset-binary) index of a grid point: u = x + 2^(total-1)
// mod 2^total, a value in [0, 2^total).  The reusable-table construction
// works on rebased indices so that a table's key material can be walked
// with increments instead of per-point scalar multiplications.
inline u64 rebase_index(u64 x, const FixedCfg& cfg) {
  return (x + (u64(1) << (cfg.total_bits - 1))) & (cfg.grid_size() - 1);
}

inline u64 unrebase_index(u64 u, const FixedCfg& cfg) {
  return sign_extend((u - (u64(1) << (cfg.total_bits - 1))) &
                         (cfg.grid_size() - 1),
                     cfg.total_bits);
}

// --- truncation -------------------------------------------------------------
//
// After a fixed-point multiply the product carries 2*frac bits; each party
// shifts its own share locally.  Party 0 divides its share as an unsigned
// value; party 1 negates, divides, negates back.  For shares of a value x
// with |x| well below the ring modulus this yields a sharing of
// floor(x / 2^t) + e with e in {0, 1}, where P(e = 1) is the dropped
// fraction of x's shares -- the standard local-truncation trick.

inline u64 trunc_share(int party, u64 s, int t) {
  if (t == 0) return s;
  if (party == 0) return s >> t;
  return u64(0) - ((u64(0) - s) >> t);
}

// Ideal signed truncation floor(x / 2^t) on a plaintext ring value.
inline u64 trunc_exact(u64 x, int t) { return u64(i64(x) >> t); }

// Plaintext shadow of a shared truncation: given a value and party 0's
// share, apply both parties' local rules and return the new (value, share0)
// pair.  Oracles use this to track an MPC trajectory bit-for-bit.
struct ValueShare {
  u64 value;
  u64 s0;
};

inline ValueShare trunc_pair(ValueShare vs, int t) {
  const u64 s0 = trunc_share(0, vs.s0, t);
  const u64 s1 = trunc_share(1, vs.value - vs.s0, t);
  return {s0 + s1, s0};
}

}  // namespace lutmpc

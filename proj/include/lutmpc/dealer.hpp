#pragma once
//
// Dealer: the trusted offline party's randomness tree, viewed as a pure
// function of one master seed.
//
// Every correlated object the online phase consumes — matrix masks, product
// shares, Beaver triples, conversion pairs, table seeds — is addressed by a
// (tag, index) path below the master seed.  Both parties (and the test
// oracle) hold the same Dealer and evaluate the same paths, so shares are
// consistent by construction without any shared mutable state, and any
// object can be re-derived out of order.  File bundles written by the
// offline generator materialize exactly these values.
//
// Party 0's share of an object is streamed from a child seed; party 1's is
// the full value minus that stream, so shares always sum to the derived
// full value.  All secret draws go through the hash-based Drbg (see
// rng.hpp for why the fast integer PRF is reserved for table value shares).
//
// Matrices are streamed row by row, each row from its own child seed, so a
// row slice of a large mask can be derived without generating the rest.

#include <array>
#include <string_view>
#include <vector>

#include "lutmpc/mat.hpp"
#include "lutmpc/rng.hpp"
#include "lutmpc/sharing.hpp"

namespace lutmpc {

inline constexpr std::size_t kAllRows = ~std::size_t(0);

// Reference to a derived matrix, with an optional row slice and transpose
// (slice first, then transpose).  `rows`/`cols` are the shape of the stored
// matrix, before slicing.
struct MatSlice {
  std::string_view tag;
  u64 index = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t row0 = 0;
  std::size_t row1 = kAllRows;
  bool transpose = false;
};

class Dealer {
 public:
  explicit Dealer(const Digest32& master) : master_(master) {}
  static Dealer from_u64(u64 seed) { return Dealer(seed_from_u64(seed)); }

  const Digest32& master() const { return master_; }

  // The full matrix behind (tag, index), rows [row0, row1).
  Mat mat_full(std::string_view tag, u64 index, std::size_t rows,
               std::size_t cols, std::size_t row0 = 0,
               std::size_t row1 = kAllRows) const;

  // One party's additive share of mat_full over the same slice.
  Mat mat_share(std::string_view tag, u64 index, int party, std::size_t rows,
                std::size_t cols, std::size_t row0 = 0,
                std::size_t row1 = kAllRows) const;

  // One party's additive share of a caller-supplied matrix (data owner or
  // derived initialization values), masked by the (tag, index) stream.
  Mat share_of(std::string_view tag, u64 index, int party,
               const Mat& full) const;

  // Resolve a MatSlice to its full value (slice applied, then transpose).
  Mat resolve(const MatSlice& m) const;

  // One party's share of resolve(u) * resolve(v), the product term that
  // completes a masked matrix multiplication.
  Mat product_share(std::string_view tag, u64 index, int party,
                    const MatSlice& u, const MatSlice& v) const;

  // Beaver triples: `count` triples from one (tag, index) stream.
  std::vector<BeaverTriple> triple_vec(std::string_view tag, u64 index,
                                       int party, std::size_t count) const;
  // The underlying (a, b, c) values, for the offline generator and tests.
  std::vector<std::array<u64, 3>> triple_vec_full(std::string_view tag,
                                                  u64 index,
                                                  std::size_t count) const;

  // Share-conversion pairs: r held additively both mod 2^64 and mod the
  // curve group order, r uniform in [0, 2^62).
  std::vector<ConvPair> conv_vec(std::string_view tag, u64 index, int party,
                                 std::size_t count) const;
  std::vector<u64> conv_r_vec(std::string_view tag, u64 index,
                              std::size_t count) const;

  // Child seed for a submodule with its own derivation needs (table sets).
  Digest32 subseed(std::string_view tag, u64 index = 0) const;

 private:
  Digest32 master_;
};

}  // namespace lutmpc

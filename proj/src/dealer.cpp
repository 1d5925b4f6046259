#include "lutmpc/dealer.hpp"

#include "lutmpc/errors.hpp"
#include "lutmpc/secp256k1.hpp"

namespace lutmpc {

namespace {

// Domain separators packed into the high byte of derive_seed's second index,
// keeping distinct object kinds under one (tag, index) in disjoint domains.
// The low 56 bits address the row within a matrix-shaped object.
enum Kind : u64 {
  kMatRow = 1,
  kMatShareRow = 2,
  kProdShareRow = 3,
  kTripleStream = 4,
  kConvStream = 5,
  kSubseed = 6,
};

u64 kind_of(Kind k, u64 row = 0) { return (u64(k) << 56) | row; }

void check_party(int party) {
  if (party != 0 && party != 1)
    throw BadConfig("party index must be 0 or 1");
}

void check_slice(std::size_t rows, std::size_t row0, std::size_t& row1) {
  if (row1 == kAllRows) row1 = rows;
  if (row0 > row1 || row1 > rows)
    throw BadConfig("matrix row slice out of range");
}

// Stream rows [row0, row1) of a rows x cols matrix, one child seed per row.
Mat stream_rows(const Digest32& master, std::string_view tag, u64 index,
                Kind kind, std::size_t cols, std::size_t row0,
                std::size_t row1) {
  Mat m(row1 - row0, cols);
  for (std::size_t r = row0; r < row1; ++r) {
    Drbg g(master, tag, index, kind_of(kind, r));
    g.fill(m.row(r - row0), cols);
  }
  return m;
}

}  // namespace

Mat Dealer::mat_full(std::string_view tag, u64 index, std::size_t rows,
                     std::size_t cols, std::size_t row0,
                     std::size_t row1) const {
  check_slice(rows, row0, row1);
  return stream_rows(master_, tag, index, kMatRow, cols, row0, row1);
}

Mat Dealer::mat_share(std::string_view tag, u64 index, int party,
                      std::size_t rows, std::size_t cols, std::size_t row0,
                      std::size_t row1) const {
  check_party(party);
  check_slice(rows, row0, row1);
  Mat s0 = stream_rows(master_, tag, index, kMatShareRow, cols, row0, row1);
  if (party == 0) return s0;
  return sub(stream_rows(master_, tag, index, kMatRow, cols, row0, row1), s0);
}

Mat Dealer::share_of(std::string_view tag, u64 index, int party,
                     const Mat& full) const {
  check_party(party);
  Mat s0 =
      stream_rows(master_, tag, index, kMatShareRow, full.cols, 0, full.rows);
  return party == 0 ? s0 : sub(full, s0);
}

Mat Dealer::resolve(const MatSlice& m) const {
  Mat full = mat_full(m.tag, m.index, m.rows, m.cols, m.row0, m.row1);
  return m.transpose ? transpose(full) : full;
}

Mat Dealer::product_share(std::string_view tag, u64 index, int party,
                          const MatSlice& u, const MatSlice& v) const {
  check_party(party);
  Mat z = mul(resolve(u), resolve(v));
  Mat z0 =
      stream_rows(master_, tag, index, kProdShareRow, z.cols, 0, z.rows);
  return party == 0 ? z0 : sub(z, z0);
}

std::vector<BeaverTriple> Dealer::triple_vec(std::string_view tag, u64 index,
                                             int party,
                                             std::size_t count) const {
  check_party(party);
  Drbg g(master_, tag, index, kind_of(kTripleStream));
  std::vector<BeaverTriple> out(count);
  for (auto& t : out) {
    u64 a = g.next_u64(), b = g.next_u64(), c = a * b;
    u64 a0 = g.next_u64(), b0 = g.next_u64(), c0 = g.next_u64();
    t = party == 0 ? BeaverTriple{a0, b0, c0}
                   : BeaverTriple{a - a0, b - b0, c - c0};
  }
  return out;
}

std::vector<std::array<u64, 3>> Dealer::triple_vec_full(
    std::string_view tag, u64 index, std::size_t count) const {
  Drbg g(master_, tag, index, kind_of(kTripleStream));
  std::vector<std::array<u64, 3>> out(count);
  for (auto& t : out) {
    u64 a = g.next_u64(), b = g.next_u64();
    t = {a, b, a * b};
    g.next_u64(), g.next_u64(), g.next_u64();  // skip the share draws
  }
  return out;
}

std::vector<ConvPair> Dealer::conv_vec(std::string_view tag, u64 index,
                                       int party, std::size_t count) const {
  check_party(party);
  Drbg g(master_, tag, index, kind_of(kConvStream));
  std::vector<ConvPair> out(count);
  for (auto& p : out) {
    u64 r = g.next_u64() >> 2;  // uniform in [0, 2^62)
    u64 r0 = g.next_u64();
    u8 nb[32];
    for (int w = 0; w < 4; ++w) {
      u64 v = g.next_u64();
      std::memcpy(nb + 8 * w, &v, 8);
    }
    ec::Scalar rn0 = ec::scalar_from_bytes_mod_n(nb);
    p = party == 0
            ? ConvPair{r0, rn0}
            : ConvPair{r - r0, ec::sc_sub(ec::scalar_from_u64(r), rn0)};
  }
  return out;
}

std::vector<u64> Dealer::conv_r_vec(std::string_view tag, u64 index,
                                    std::size_t count) const {
  Drbg g(master_, tag, index, kind_of(kConvStream));
  std::vector<u64> out(count);
  for (auto& r : out) {
    r = g.next_u64() >> 2;
    for (int skip = 0; skip < 5; ++skip) g.next_u64();
  }
  return out;
}

Digest32 Dealer::subseed(std::string_view tag, u64 index) const {
  return derive_seed(master_, tag, index, kind_of(kSubseed));
}

}  // namespace lutmpc

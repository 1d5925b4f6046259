#pragma once
//
// Reusable lookup tables keyed by elliptic-curve points, with metric-
// private access patterns and a per-table query budget.
//
// Generation.  Each party's secret is a curve scalar k_i and an epoch seed
// s_i.  For table epoch c, derive per-epoch scalars s_i^c = H(s_i || c)
// mod N.  The key for rebased grid position u is
//
//     kappa_c(u) = k_0 k_1 (u + s_0^c + s_1^c) * G,
//
// stored as SHA-256 of the compressed point, mapping to additive value
// shares of f at that position.  Building m tables costs exactly m + 1
// scalar multiplications — (k_0 k_1) G once, then one start point per
// epoch — plus 2^t point additions per table, since consecutive keys
// differ by the fixed step (k_0 k_1) G; the cost is tracked in
// gen_counters() and everything is normalized and hashed in batches.
//
// Query (three rounds, 74 payload bytes per party).  Parties hold additive
// shares of a sign-extended grid encoding x; rebasing to u in [0, 2^t) is
// share-local (party 0 adds 2^(t-1)).  Each side adds its share of dealt
// geometric noise, converts the result to shares modulo the group order
// (one 8-byte opening), then: exchange A_i = k_i (<u>_i + s_i^c) G (33
// bytes), exchange B_i = k_i A_peer (33 bytes), and look up
// H(compress(B_0 + B_1)) in the local table.  Received points are
// decompressed with full validation, so a malformed or off-curve message
// raises InvalidPoint before any use.
//
// Reuse discipline.  A table epoch serves floor(eps_total / eps) queries;
// afterwards queries advance to the next epoch's table, and running past
// the last provisioned epoch raises BudgetExhausted.  Every hit appends
// (query counter, epoch, touched position) to an access trace for audit.

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <map>
#include <vector>

#include "lutmpc/dealer.hpp"
#include "lutmpc/dxpriv.hpp"
#include "lutmpc/net.hpp"
#include "lutmpc/secp256k1.hpp"
#include "lutmpc/sharing.hpp"  // ConvPair
#include "lutmpc/table_map.hpp"
#include "lutmpc/tables_single.hpp"  // TableSpec, FileTableMeta

namespace lutmpc {

struct MultiParams {
  double eps = 0.1;        // per-query access-pattern scale
  double eps_total = 1.0;  // per-table budget
  i64 clamp = 0;           // noise clamp in grid units; 0: one unit step

  void validate() const;
  u64 queries_per_table() const;
};

struct EcOpCounters {
  u64 scalar_mults = 0;
  u64 point_adds = 0;
};

struct BudgetStatus {
  u64 next_query = 0;  // global index the next query will use
  u64 table = 0;       // epoch that query will draw on
  u64 queries_per_table = 0;
  u64 num_tables = 0;
};

// Per-epoch scalar s^c = H(seed || c) mod N (c big-endian), forced
// nonzero.  Shared by the dealer-backed and file-backed endpoints.
ec::Scalar epoch_scalar_from(const Digest32& seed, u64 epoch);

class MultiTables {
 public:
  MultiTables(const Dealer& dealer, TableSpec spec, std::string_view tag,
              int party, std::size_t num_tables, const MultiParams& params);

  // Evaluate f on a batch of shared inputs.  Three exchange rounds
  // regardless of batch size; 74 bytes of payload per input each way.
  std::vector<u64> query_batch(Chan& chan, const std::vector<u64>& xs);
  u64 query(Chan& chan, u64 x_share);

  BudgetStatus budget() const;
  const EcOpCounters& gen_counters() const { return gen_ops_; }
  const AccessTrace& trace() const { return trace_; }
  const GeometricParams& noise_params() const { return noise_; }

  // Noise is on by default; exactness tests and calibration runs turn it
  // off (both parties must agree).
  void enable_noise(bool on) { noise_on_ = on; }

  // The derivations behind one party's secret material, exposed so the
  // offline generator can hand a file-backed endpoint the same values.
  static Dealer scoped(const Dealer& dealer, const TableSpec& spec,
                       std::string_view tag);
  static ec::Scalar party_key(const Dealer& scoped_dealer, int party);
  static Digest32 party_epoch_seed(const Dealer& scoped_dealer, int party);
  static GeometricParams effective_noise(const MultiParams& params,
                                         const FixedCfg& cfg);

  // Serialize every epoch's table to binary blocks: a header (magic
  // "HWK2", function id, grid config, epoch, entry count, the eps pair
  // the budget was provisioned under), then the entries (32-byte key,
  // 8-byte value share) sorted by key so storage order carries no grid
  // information.
  void write_tables(std::ostream& out, u16 func_id);

 private:
  void ensure_table(u64 epoch);
  std::vector<Digest32> epoch_keys(u64 epoch);
  std::vector<u64> epoch_values(u64 epoch) const;
  ec::Scalar own_epoch_scalar(u64 epoch);

  Dealer scoped_;  // dealer view narrowed to this table set
  TableSpec spec_;
  int party_;
  std::size_t num_tables_;
  MultiParams params_;
  GeometricParams noise_;
  bool noise_on_ = true;

  Digest32 s_seed_own_, s_seed_peer_;
  ec::Scalar k_own_, k_peer_, k_prod_;
  ec::Affine walk_step_;  // (k_0 k_1) G
  bool walk_step_ready_ = false;

  u64 query_index_ = 0;
  u64 cached_epoch_ = ~u64(0);
  detail::KeyedMap map_;
  EcOpCounters gen_ops_;
  AccessTrace trace_;
  std::map<u64, ec::Scalar> epoch_cache_;
};

// One party's secret material for a file-backed reusable table set: its
// curve scalar and its epoch seed.  Deliberately excludes the peer's —
// a bundle must hand a party only its own half.
struct FileMultiKeys {
  ec::Scalar k;
  Digest32 epoch_seed;
};

// The reusable-table query endpoint reading serialized epoch blocks and
// pre-dealt randomness pools instead of deriving them from a dealer: what
// a real party runs.  The wire protocol is bit-identical to the
// dealer-backed endpoint, so either side may use either form.  Blocks
// stream forward one epoch at a time.
//
// `conv_pool` and `noise_pool` hold one share-conversion pair and one
// noise share per future query, in query order; when provisioning turned
// noise off the noise pool is all zeros on both sides.  Running past
// either pool raises OfflineUnderprovisioned.  The access trace records
// file positions, i.e. ranks in the key-sorted block — a fixed
// pseudonymous relabeling of grid positions per epoch.
class FileMultiTables {
 public:
  FileMultiTables(const std::filesystem::path& file, const FileMultiKeys& own,
                  int party, const FileTableMeta& meta,
                  const MultiParams& params, std::vector<ConvPair> conv_pool,
                  std::vector<u64> noise_pool);

  std::vector<u64> query_batch(Chan& chan, const std::vector<u64>& xs);
  u64 query(Chan& chan, u64 x_share);

  BudgetStatus budget() const;
  const AccessTrace& trace() const { return trace_; }
  // Table entries resident right now; at most one epoch's worth.
  std::size_t resident_entries() const { return entries_; }

 private:
  void load_block(u64 epoch);
  ec::Scalar own_epoch_scalar(u64 epoch);

  std::ifstream in_;
  FileMultiKeys own_;
  int party_;
  FileTableMeta meta_;
  MultiParams params_;
  std::vector<ConvPair> conv_pool_;
  std::vector<u64> noise_pool_;

  u64 query_index_ = 0;
  u64 cached_epoch_ = ~u64(0);
  std::size_t entries_ = 0;
  detail::KeyedMap map_;
  AccessTrace trace_;
  std::map<u64, ec::Scalar> epoch_cache_;
};

}  // namespace lutmpc

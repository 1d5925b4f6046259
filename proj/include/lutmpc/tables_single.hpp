#pragma once
//
// Single-use keyed lookup tables for secure function evaluation.
//
// For a function f over a fixed-point grid, the offline dealer hands each
// party one table per future query.  Party i's table for query counter c
// maps H(x + pad(k_peer, c)) -> v_i(x) over every grid point x, where
// pad(k, c) is a 64-bit value derived from a party key and the counter, and
// v_0(x) + v_1(x) = f(x).  Online, each party sends its input share plus
// its own pad (one exchange, 8 bytes each way per query); adding the
// received message to its own share yields x + pad(k_peer, c), whose hash
// finds its table entry.  Neither message nor table order reveals x: the
// pad masks the share, and the hashed keys carry no ordering.
//
// Each table answers exactly one query — the pad changes with the counter,
// so a fresh x under an old table (or any replay) misses every key.  The
// party object enforces the discipline: counters advance per query and an
// exhausted set raises TableExhausted.  A test hook can pin the counter to
// run many queries against one table; production paths never enable it.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "lutmpc/dealer.hpp"
#include "lutmpc/net.hpp"
#include "lutmpc/ring64.hpp"
#include "lutmpc/table_map.hpp"

namespace lutmpc {

// A tabulated function: `f` maps a sign-extended grid encoding (all
// 2^total_bits of them) to the full ring value the parties' output shares
// must sum to.
struct TableSpec {
  std::string name;
  FixedCfg in_cfg;
  std::function<u64(u64)> f;
};

// The pad stream: low 8 bytes (little-endian) of SHA-256(key || counter),
// counter big-endian.  Exposed for the offline generator and tests.
u64 h64pad(const Digest32& key, u64 counter);

// Product columns returned next to a batch of lookups, all row-major
// n x aux_count: aux[i*aux_count+j] is a share of a_j * f(x_i) and
// masks[i*aux_count+j] the matching share of a_j.
struct TableAuxBatch {
  std::vector<u64> value;
  std::vector<u64> aux;
  std::vector<u64> masks;
};

// Identity of a serialized table run, cross-checked against every block
// header a reader consumes.  `first`/`count` are the counter range for
// single-use runs and (0, epoch count) for reusable runs.
struct FileTableMeta {
  u16 func_id = 0;
  FixedCfg cfg{};
  u64 first = 0;
  std::size_t count = 0;
  std::size_t aux_count = 0;
};

// One party's endpoint for a run of single-use tables, counters
// [first, first + count).  Tables are derived lazily from the dealer at
// query time, used once, and dropped.
//
// A table set may additionally carry `aux_count` product columns: for each
// counter the dealer draws fresh multiplication masks a_0..a_{aux-1}, and
// every table entry stores shares of a_j * f(x) next to the share of f(x).
// A query then yields, besides <f(x)>, the pairs (<a_j>, <a_j f(x)>) that
// let the caller multiply f(x) by another shared value while opening only
// one masked difference per product instead of a Beaver pair.
class SingleTables {
 public:
  SingleTables(const Dealer& dealer, TableSpec spec, std::string_view tag,
               int party, u64 first, std::size_t count,
               std::size_t aux_count = 0);

  // Evaluate f on a batch of shared inputs: one exchange round, 8 bytes per
  // input each way, one table consumed per input.  Returns output value
  // shares.  Throws TableExhausted when fewer than xs.size() tables remain
  // and MissingKey if a lookup misses (off-grid input or desynchronized
  // counters).
  std::vector<u64> query_batch(Chan& chan, const std::vector<u64>& xs);
  u64 query(Chan& chan, u64 x_share);

  // Batch query also returning the product columns.  Requires
  // aux_count > 0.
  using AuxBatch = TableAuxBatch;
  AuxBatch query_batch_aux(Chan& chan, const std::vector<u64>& xs);

  std::size_t aux_count() const { return aux_count_; }
  std::size_t remaining() const { return count_ - used_; }
  u64 next_counter() const { return first_ + used_; }
  const TableSpec& spec() const { return spec_; }

  // The pad key this party adds to its outgoing query shares; a bundle
  // carries it so a file-backed endpoint can form identical messages.
  const Digest32& own_key() const { return own_key_; }

  // Serialize the whole run to binary blocks, one per counter: a header
  // (magic "HWK1", function id, grid config, counter, entry count), then
  // the entries (32-byte key, 8-byte value share, aux_count x 8-byte
  // product-column shares), then aux_count mask-share words.  Entries are
  // sorted by key so storage order carries no grid information — a reader
  // learning which position matched learns nothing about the input.
  void write_tables(std::ostream& out, u16 func_id);

  // Test hook: pin every query to the first counter's table so one table
  // can be swept across the whole grid.
  void allow_reuse(bool on) { reuse_ = on; }

 private:
  struct BlockData {
    std::vector<Digest32> keys;  // grid order
    std::vector<u64> values;     // this party's value shares, grid order
    std::vector<u64> aux;        // grid_size x aux_count shares
    std::vector<u64> mask_share;  // aux_count shares of the a_j masks
  };
  BlockData make_block(u64 counter) const;
  void build_table(u64 counter);
  AuxBatch run_batch(Chan& chan, const std::vector<u64>& xs, bool want_aux);

  Dealer dealer_;
  TableSpec spec_;
  int party_;
  u64 first_;
  std::size_t count_;
  std::size_t aux_count_;
  std::size_t used_ = 0;
  bool reuse_ = false;

  Digest32 base_;      // seed below which this set's keys live
  Digest32 own_key_;   // pads this party adds to its outgoing shares
  Digest32 peer_key_;  // pads baked into this party's table keys

  u64 cached_counter_ = ~u64(0);
  detail::KeyedMap map_;
  std::vector<u64> aux_store_;  // grid_size x aux_count for the cached table
  std::vector<u64> mask_share_;  // aux_count for the cached table
};

// The same query endpoint reading serialized blocks instead of deriving
// tables from a dealer: what a real party runs, holding only its own half
// of the provisioned material.  Blocks stream forward one at a time —
// memory stays one table regardless of how many the file holds — and the
// wire protocol is bit-identical to the dealer-backed endpoint, so either
// side may use either form.
class FileSingleTables {
 public:
  FileSingleTables(const std::filesystem::path& file, const Digest32& own_key,
                   const FileTableMeta& meta);

  std::vector<u64> query_batch(Chan& chan, const std::vector<u64>& xs);
  u64 query(Chan& chan, u64 x_share);

  using AuxBatch = TableAuxBatch;
  AuxBatch query_batch_aux(Chan& chan, const std::vector<u64>& xs);

  std::size_t aux_count() const { return meta_.aux_count; }
  std::size_t remaining() const { return meta_.count - used_; }
  u64 next_counter() const { return meta_.first + used_; }
  // Table entries resident right now; at most one block's worth.
  std::size_t resident_entries() const { return entries_; }

 private:
  void load_block(u64 counter);
  AuxBatch run_batch(Chan& chan, const std::vector<u64>& xs, bool want_aux);

  std::ifstream in_;
  Digest32 own_key_;
  FileTableMeta meta_;
  std::size_t used_ = 0;

  u64 cached_counter_ = ~u64(0);
  std::size_t entries_ = 0;
  detail::KeyedMap map_;
  std::vector<u64> aux_entries_;  // entries x aux_count, storage order
  std::vector<u64> mask_share_;   // aux_count for the loaded block
};

}  // namespace lutmpc

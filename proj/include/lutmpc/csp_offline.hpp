#pragma once
//
// Offline provisioning: a third process (the correlated-randomness
// provider) derives every value the online phase will consume for one
// configured training run and writes each party a bundle directory.
// Online, the parties open their bundles and run with no dealer in the
// loop; a bundle holds only its own party's halves, never the master seed
// or any peer material.
//
// The single source of truth for what a run consumes is walk_consumption:
// it replays the training loop symbolically, emitting every dealt mask,
// product, Beaver chunk, and per-iteration table demand in exactly the
// order the trainer consumes them.  The provisioner lays out the bundle by
// walking it; counting the same walk yields the consumption plan recorded
// in the manifest; a reader re-derives the plan from the manifest's
// configuration and rejects a bundle whose counts disagree.  There is no
// closed-form count to fall out of sync with.
//
// Bundle layout (one directory per party):
//
//   manifest.json        run configuration, counts, per-file checksums
//   data.bin             this party's input share, row-major u64 LE
//   labels.bin           this party's label share
//   masks.bin            mask and mask-product words, walk order
//   beaver.bin           Beaver triples, (a, b, c) u64 LE each
//   tables_<kind>.tbl    serialized lookup tables (see tables_*.hpp)
//   conv_<kind>.bin      share-conversion pairs, reusable kinds only
//   noise_<kind>.bin     access-noise shares, reusable kinds only
//
// Every multi-byte integer is little-endian except where a format says
// otherwise.  Table blocks are self-delimiting and ordered by counter, so
// material produced by several provider processes concatenates.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "lutmpc/dealer.hpp"
#include "lutmpc/mat.hpp"
#include "lutmpc/tables_multi.hpp"
#include "lutmpc/tables_single.hpp"
#include "lutmpc/train_config.hpp"

namespace lutmpc {

inline constexpr u32 kBundleFormatVersion = 1;

// One dealt mask matrix, or masked product, in walk order.  `tag` points
// at one of the rnd:: constants.
struct MaskItem {
  std::string_view tag;
  u64 index = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool product = false;  // value is resolve(u) * resolve(v)
  MatSlice u, v;         // set when product
};

// What one iteration consumes, with the offset each pool cursor has
// reached when the iteration starts.
struct BatchPlanItem {
  u64 iter = 0;
  u64 epoch = 0;
  std::size_t examples = 0;  // rows in this batch; the last may be short
  u64 sigmoid = 0, drelu = 0, exp = 0, inverse = 0;  // table queries
  u64 beaver = 0;
  u64 mask_words = 0;
  u64 sigmoid_offset = 0, drelu_offset = 0, exp_offset = 0,
      inverse_offset = 0;
  u64 beaver_offset = 0;
  u64 mask_word_offset = 0;
};

struct ConsumptionPlan {
  u64 iterations = 0;
  u64 setup_mask_words = 0;  // dataset-wide input mask, before iteration 0
  u64 mask_words = 0;        // total, setup included
  u64 beaver_triples = 0;
  u64 sigmoid_queries = 0;
  u64 drelu_queries = 0;
  u64 exp_queries = 0;
  u64 inverse_queries = 0;
  std::vector<BatchPlanItem> batches;
};

// Replay the training loop symbolically.  Callbacks fire in consumption
// order: the dataset mask first, then per iteration its masks and products
// (on_mask), its Beaver chunks (on_beaver, one call per stream), and
// finally the iteration's summary (on_batch).  Any callback may be null.
void walk_consumption(
    const TrainConfig& cfg, std::size_t examples,
    const std::function<void(const MaskItem&)>& on_mask,
    const std::function<void(std::string_view tag, u64 index,
                             std::size_t count)>& on_beaver,
    const std::function<void(const BatchPlanItem&)>& on_batch);

// The counting walk.
ConsumptionPlan plan_consumption(const TrainConfig& cfg,
                                 std::size_t examples);

// Tables needed to serve `queries` lookups under the configured mode:
// one per query single-use, one per floor(eps_total / eps) queries
// reusable.
u64 tables_for_queries(u64 queries, const TrainConfig& cfg);

// The table sets a run uses, with their provisioned sizes.
struct TableKind {
  std::string kind;      // "sigmoid" | "drelu" | "exp" | "inverse"
  std::string_view tag;  // dealer tag the set derives from
  u16 func_id = 0;
  std::size_t aux = 0;  // product columns per entry
  u64 queries = 0;
  u64 tables = 0;
};
std::vector<TableKind> table_kinds(const TrainConfig& cfg,
                                   const ConsumptionPlan& plan);

// The function a named kind tabulates, under this run's configuration.
TableSpec spec_for_kind(std::string_view kind, const TrainConfig& cfg);

// The manifest for one party's bundle, complete except for the per-file
// checksum section the writer appends.  Key material is derived from the
// dealer; counts come from the plan walk — building a manifest never
// materializes a table, so dry runs over full-size datasets are cheap.
nlohmann::json build_manifest(const Dealer& dealer, const TrainConfig& cfg,
                              std::size_t examples, int party);

// Derive and write both parties' bundles.  `x_fixed` (examples x features)
// and `y_fixed` (examples x 1 logistic, examples x classes neural) carry
// fixed-point encoded plaintext at the working precision.
void provision(const Dealer& dealer, const TrainConfig& cfg,
               const Mat& x_fixed, const Mat& y_fixed,
               const std::filesystem::path& dir0,
               const std::filesystem::path& dir1);

// Whole-file checksum: SHA-256 over the concatenated per-MiB chunk
// digests followed by the total length, so large files hash in constant
// memory.
Digest32 file_digest(const std::filesystem::path& path);

std::string to_hex(const u8* data, std::size_t n);
std::string to_hex(const Digest32& d);
bool from_hex(std::string_view hex, u8* out, std::size_t n);

// One party's view of a provisioned bundle.  Opening verifies the
// manifest (format, version, every file's size and checksum) and
// re-derives the consumption plan from the embedded configuration,
// rejecting any disagreement, so a consumer never gets past open() with
// tampered or mismatched material.
class Bundle {
 public:
  static Bundle open(const std::filesystem::path& dir);

  const std::filesystem::path& dir() const { return dir_; }
  const nlohmann::json& manifest() const { return manifest_; }
  int party() const { return party_; }
  std::size_t examples() const { return examples_; }
  const TrainConfig& config() const { return cfg_; }
  const ConsumptionPlan& plan() const { return plan_; }
  std::string bundle_id() const;

  Mat data_share() const;   // examples x features
  Mat label_share() const;  // examples x 1 or examples x classes

  // Sequential pool reads; offsets in words / triples from the plan.
  // Reading past the provisioned count raises OfflineUnderprovisioned.
  std::vector<u64> mask_words(u64 offset, std::size_t count) const;
  std::vector<BeaverTriple> triples(u64 offset, std::size_t count) const;

  struct TableRef {
    std::string kind;
    std::string tag;
    std::string file;
    u16 func_id = 0;
    FixedCfg cfg{};
    u64 queries = 0;
    u64 tables = 0;
    std::size_t aux = 0;
    Digest32 own_key{};   // single-use kinds
    FileMultiKeys keys{};  // reusable kinds
    std::string conv_file, noise_file;
  };
  const std::vector<TableRef>& tables() const { return tables_; }
  const TableRef& table(std::string_view kind) const;

  // Query endpoints over the serialized tables.  Reusable endpoints load
  // their conversion and noise pools from the bundle.
  FileSingleTables single_tables(std::string_view kind) const;
  FileMultiTables multi_tables(std::string_view kind) const;

 private:
  Bundle() = default;

  std::filesystem::path dir_;
  nlohmann::json manifest_;
  int party_ = 0;
  std::size_t examples_ = 0;
  TrainConfig cfg_;
  ConsumptionPlan plan_;
  std::vector<TableRef> tables_;
};

}  // namespace lutmpc

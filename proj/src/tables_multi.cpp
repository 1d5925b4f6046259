#include "lutmpc/tables_multi.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "lutmpc/binio.hpp"
#include "lutmpc/errors.hpp"
#include "lutmpc/rng.hpp"

namespace lutmpc {

void MultiParams::validate() const {
  if (!(eps > 0.0) || !std::isfinite(eps))
    throw BadConfig("per-query eps must be positive and finite");
  if (!(eps_total > 0.0) || !std::isfinite(eps_total))
    throw BadConfig("per-table eps budget must be positive and finite");
  if (queries_per_table() == 0)
    throw BadConfig("per-table budget admits no queries");
  if (clamp < 0) throw BadConfig("noise clamp must not be negative");
}

u64 MultiParams::queries_per_table() const {
  // Tolerance keeps intended integer ratios (1 / 0.1 = 10) exact in
  // floating point.
  return u64(std::floor(eps_total / eps + 1e-9));
}

namespace {

ec::Scalar nonzero_scalar(const Digest32& d) {
  ec::Scalar s = ec::scalar_from_bytes_mod_n(d.data());
  if (ec::sc_is_zero(s)) s = ec::scalar_from_u64(1);  // unreachable in practice
  return s;
}

// Rounds 2 and 3 of the query protocol plus the final combine, shared by
// the dealer-backed and file-backed endpoints: exchange
// A_i = k_i (<u>_i + s_i^c) G, exchange B_i = k_i A_peer, return the
// combined kappa = B_0 + B_1 per query.
template <class OwnScalarFn>
std::vector<ec::Affine> point_rounds(Chan& chan, const ec::Scalar& k_own,
                                     const std::vector<ec::Scalar>& un,
                                     const std::vector<u64>& epochs,
                                     OwnScalarFn&& own_sc) {
  const std::size_t n = un.size();
  std::vector<ec::Jacobian> ja(n);
  for (std::size_t j = 0; j < n; ++j) {
    ec::Scalar s = ec::sc_mul(k_own, ec::sc_add(un[j], own_sc(epochs[j])));
    ja[j] = ec::g_mult(s);
  }
  std::vector<ec::Affine> aff(n);
  ec::batch_normalize(ja.data(), n, aff.data());
  std::vector<u8> msg(n * 33);
  for (std::size_t j = 0; j < n; ++j) {
    auto c = ec::compress(aff[j]);
    std::memcpy(msg.data() + 33 * j, c.data(), 33);
  }
  std::vector<u8> peer = chan.exchange(MsgType::kPoint, msg);
  if (peer.size() != msg.size())
    throw FrameCorrupt("point batch size mismatch");

  for (std::size_t j = 0; j < n; ++j) {
    ec::Affine a = ec::decompress(peer.data() + 33 * j);
    ja[j] = ec::mult(k_own, a);
  }
  ec::batch_normalize(ja.data(), n, aff.data());
  for (std::size_t j = 0; j < n; ++j) {
    auto c = ec::compress(aff[j]);
    std::memcpy(msg.data() + 33 * j, c.data(), 33);
  }
  peer = chan.exchange(MsgType::kPoint, msg);
  if (peer.size() != msg.size())
    throw FrameCorrupt("point batch size mismatch");

  for (std::size_t j = 0; j < n; ++j) {
    ec::Affine b_peer = ec::decompress(peer.data() + 33 * j);
    ja[j] = ec::add_mixed(ec::to_jacobian(aff[j]), b_peer);
  }
  std::vector<ec::Affine> kappa(n);
  ec::batch_normalize(ja.data(), n, kappa.data());
  return kappa;
}

}  // namespace

ec::Scalar epoch_scalar_from(const Digest32& seed, u64 epoch) {
  u8 buf[40];
  std::memcpy(buf, seed.data(), 32);
  for (int j = 0; j < 8; ++j) buf[32 + j] = u8(epoch >> (56 - 8 * j));
  return nonzero_scalar(sha256(buf, sizeof buf));
}

Dealer MultiTables::scoped(const Dealer& dealer, const TableSpec& spec,
                           std::string_view tag) {
  return Dealer(derive_seed(dealer.subseed(tag), spec.name));
}

ec::Scalar MultiTables::party_key(const Dealer& scoped_dealer, int party) {
  return nonzero_scalar(scoped_dealer.subseed("ec-key", u64(party)));
}

Digest32 MultiTables::party_epoch_seed(const Dealer& scoped_dealer,
                                       int party) {
  return scoped_dealer.subseed("epoch-seed", u64(party));
}

GeometricParams MultiTables::effective_noise(const MultiParams& params,
                                             const FixedCfg& cfg) {
  return params.clamp > 0 ? GeometricParams{params.eps, params.clamp}
                          : geometric_for_grid(params.eps, cfg);
}

MultiTables::MultiTables(const Dealer& dealer, TableSpec spec,
                         std::string_view tag, int party,
                         std::size_t num_tables, const MultiParams& params)
    : scoped_(scoped(dealer, spec, tag)),
      spec_(std::move(spec)),
      party_(party),
      num_tables_(num_tables),
      params_(params) {
  if (party_ != 0 && party_ != 1)
    throw BadConfig("party index must be 0 or 1");
  validate(spec_.in_cfg);
  if (spec_.in_cfg.total_bits > 20)
    throw BadConfig("table grid too large to tabulate");
  if (!spec_.f) throw BadConfig("table spec has no function");
  if (num_tables_ == 0) throw BadConfig("no table epochs provisioned");
  params_.validate();
  noise_ = effective_noise(params_, spec_.in_cfg);

  s_seed_own_ = party_epoch_seed(scoped_, party_);
  s_seed_peer_ = party_epoch_seed(scoped_, 1 - party_);
  k_own_ = party_key(scoped_, party_);
  k_peer_ = party_key(scoped_, 1 - party_);
  k_prod_ = ec::sc_mul(k_own_, k_peer_);
}

ec::Scalar MultiTables::own_epoch_scalar(u64 epoch) {
  auto it = epoch_cache_.find(epoch);
  if (it != epoch_cache_.end()) return it->second;
  ec::Scalar s = epoch_scalar_from(s_seed_own_, epoch);
  epoch_cache_.emplace(epoch, s);
  return s;
}

std::vector<Digest32> MultiTables::epoch_keys(u64 epoch) {
  if (!walk_step_ready_) {
    walk_step_ = ec::to_affine(ec::g_mult(k_prod_));
    ++gen_ops_.scalar_mults;
    walk_step_ready_ = true;
  }
  const std::size_t n = std::size_t(1) << spec_.in_cfg.total_bits;

  ec::Scalar sum_c = ec::sc_add(epoch_scalar_from(s_seed_own_, epoch),
                                epoch_scalar_from(s_seed_peer_, epoch));
  ec::Jacobian p = ec::g_mult(ec::sc_mul(k_prod_, sum_c));
  ++gen_ops_.scalar_mults;

  std::vector<ec::Jacobian> walk(n);
  for (std::size_t j = 0; j < n; ++j) {
    walk[j] = p;
    p = ec::add_mixed(p, walk_step_);
    ++gen_ops_.point_adds;
  }
  std::vector<ec::Affine> aff(n);
  ec::batch_normalize(walk.data(), n, aff.data());

  std::vector<u8> enc(n * 33);
  for (std::size_t j = 0; j < n; ++j) {
    auto c = ec::compress(aff[j]);
    std::memcpy(enc.data() + 33 * j, c.data(), 33);
  }
  std::vector<Digest32> dig(n);
  sha256_batch(enc.data(), 33, n, dig.data());
  return dig;
}

std::vector<u64> MultiTables::epoch_values(u64 epoch) const {
  const std::size_t n = std::size_t(1) << spec_.in_cfg.total_bits;
  Digest32 pd = scoped_.subseed("valshare", epoch);
  Prf64 prf{detail::le64_at(pd.data()), detail::le64_at(pd.data() + 8)};
  std::vector<u64> values(n);
  for (std::size_t j = 0; j < n; ++j) {
    u64 x_enc = unrebase_index(u64(j), spec_.in_cfg);
    u64 s0 = prf.at(x_enc);
    values[j] = party_ == 0 ? s0 : spec_.f(x_enc) - s0;
  }
  return values;
}

void MultiTables::ensure_table(u64 epoch) {
  if (cached_epoch_ == epoch) return;
  std::vector<Digest32> keys = epoch_keys(epoch);
  std::vector<u64> values = epoch_values(epoch);
  const std::size_t n = keys.size();
  map_.reset(n);
  for (std::size_t j = 0; j < n; ++j) map_.insert(keys[j], values[j], u64(j));
  cached_epoch_ = epoch;
}

void MultiTables::write_tables(std::ostream& out, u16 func_id) {
  const std::size_t n = std::size_t(1) << spec_.in_cfg.total_bits;
  for (u64 epoch = 0; epoch < num_tables_; ++epoch) {
    std::vector<Digest32> keys = epoch_keys(epoch);
    std::vector<u64> values = epoch_values(epoch);
    std::vector<u32> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](u32 x, u32 y) {
      return std::memcmp(keys[x].data(), keys[y].data(), 32) < 0;
    });

    detail::put_bytes(out, "HWK2", 4);
    detail::put_u16(out, func_id);
    const u8 cfgb[3] = {u8(spec_.in_cfg.int_bits), u8(spec_.in_cfg.frac_bits),
                        u8(spec_.in_cfg.total_bits)};
    detail::put_bytes(out, cfgb, 3);
    detail::put_u64(out, epoch);
    detail::put_u32(out, u32(n));
    detail::put_f64(out, params_.eps);
    detail::put_f64(out, params_.eps_total);
    for (u32 j : order) {
      detail::put_bytes(out, keys[j].data(), 32);
      detail::put_u64(out, values[j]);
    }
  }
}

BudgetStatus MultiTables::budget() const {
  u64 r = params_.queries_per_table();
  return BudgetStatus{query_index_, query_index_ / r, r, num_tables_};
}

std::vector<u64> MultiTables::query_batch(Chan& chan,
                                          const std::vector<u64>& xs) {
  const std::size_t n = xs.size();
  if (n == 0) return {};
  const u64 r = params_.queries_per_table();
  if (query_index_ + n > r * u64(num_tables_))
    throw BudgetExhausted("table epochs depleted");

  const u64 half = u64(1) << (spec_.in_cfg.total_bits - 1);
  std::vector<u64> us(n);
  std::vector<ConvPair> pairs(n);
  std::vector<u64> epochs(n);
  for (std::size_t j = 0; j < n; ++j) {
    const u64 idx = query_index_ + j;
    epochs[j] = idx / r;
    us[j] = xs[j] + (party_ == 0 ? half : 0);
    if (noise_on_)
      us[j] += geometric_noise_share(scoped_, "noise", idx, party_, 1,
                                     noise_)[0];
    pairs[j] = scoped_.conv_vec("conv", idx, party_, 1)[0];
  }

  // Round 1: to shares modulo the group order.
  std::vector<ec::Scalar> un = convert_to_scalar_shares(party_, chan, us,
                                                        pairs);

  // Rounds 2 and 3: blinded input points, then cross-multiplied points.
  std::vector<ec::Affine> kappa = point_rounds(
      chan, k_own_, un, epochs, [&](u64 e) { return own_epoch_scalar(e); });

  std::vector<u64> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const u64 idx = query_index_ + j;
    ensure_table(epochs[j]);
    detail::KeyedMap::Hit hit = map_.lookup(ec::hash_point(kappa[j]));
    out[j] = hit.value;
    trace_.push_back(AccessEvent{idx, epochs[j], hit.slot});
  }
  query_index_ += n;
  return out;
}

u64 MultiTables::query(Chan& chan, u64 x_share) {
  return query_batch(chan, {x_share})[0];
}

FileMultiTables::FileMultiTables(const std::filesystem::path& file,
                                 const FileMultiKeys& own, int party,
                                 const FileTableMeta& meta,
                                 const MultiParams& params,
                                 std::vector<ConvPair> conv_pool,
                                 std::vector<u64> noise_pool)
    : in_(file, std::ios::binary),
      own_(own),
      party_(party),
      meta_(meta),
      params_(params),
      conv_pool_(std::move(conv_pool)),
      noise_pool_(std::move(noise_pool)) {
  if (!in_) throw IoError("cannot open table file " + file.string());
  if (party_ != 0 && party_ != 1)
    throw BadConfig("party index must be 0 or 1");
  validate(meta_.cfg);
  params_.validate();
}

ec::Scalar FileMultiTables::own_epoch_scalar(u64 epoch) {
  auto it = epoch_cache_.find(epoch);
  if (it != epoch_cache_.end()) return it->second;
  ec::Scalar s = epoch_scalar_from(own_.epoch_seed, epoch);
  epoch_cache_.emplace(epoch, s);
  return s;
}

void FileMultiTables::load_block(u64 epoch) {
  if (cached_epoch_ == epoch) return;
  char magic[4];
  detail::get_bytes(in_, magic, 4);
  if (std::memcmp(magic, "HWK2", 4) != 0)
    throw CorruptBundle("table block magic mismatch");
  if (detail::get_u16(in_) != meta_.func_id)
    throw CorruptBundle("table block function id mismatch");
  u8 cfgb[3];
  detail::get_bytes(in_, cfgb, 3);
  if (cfgb[0] != u8(meta_.cfg.int_bits) || cfgb[1] != u8(meta_.cfg.frac_bits) ||
      cfgb[2] != u8(meta_.cfg.total_bits))
    throw CorruptBundle("table block grid mismatch");
  if (detail::get_u64(in_) != epoch)
    throw CorruptBundle("table blocks out of sequence");
  const u32 n = detail::get_u32(in_);
  if (n != u32(1) << meta_.cfg.total_bits)
    throw CorruptBundle("table block entry count mismatch");
  const double eps = detail::get_f64(in_);
  const double eps_total = detail::get_f64(in_);
  if (eps != params_.eps || eps_total != params_.eps_total)
    throw CorruptBundle("table block budget parameters mismatch");

  map_.reset(n);
  for (u32 j = 0; j < n; ++j) {
    Digest32 key;
    detail::get_bytes(in_, key.data(), 32);
    const u64 value = detail::get_u64(in_);
    map_.insert(key, value, u64(j));
  }
  entries_ = n;
  cached_epoch_ = epoch;
}

BudgetStatus FileMultiTables::budget() const {
  u64 r = params_.queries_per_table();
  return BudgetStatus{query_index_, query_index_ / r, r, meta_.count};
}

std::vector<u64> FileMultiTables::query_batch(Chan& chan,
                                              const std::vector<u64>& xs) {
  const std::size_t n = xs.size();
  if (n == 0) return {};
  const u64 r = params_.queries_per_table();
  if (query_index_ + n > r * u64(meta_.count))
    throw BudgetExhausted("table epochs depleted");
  if (query_index_ + n > conv_pool_.size() ||
      query_index_ + n > noise_pool_.size())
    throw OfflineUnderprovisioned(
        "randomness pools exhausted before the table budget");

  const u64 half = u64(1) << (meta_.cfg.total_bits - 1);
  std::vector<u64> us(n);
  std::vector<ConvPair> pairs(n);
  std::vector<u64> epochs(n);
  for (std::size_t j = 0; j < n; ++j) {
    const u64 idx = query_index_ + j;
    epochs[j] = idx / r;
    us[j] = xs[j] + (party_ == 0 ? half : 0) + noise_pool_[idx];
    pairs[j] = conv_pool_[idx];
  }

  std::vector<ec::Scalar> un = convert_to_scalar_shares(party_, chan, us,
                                                        pairs);
  std::vector<ec::Affine> kappa = point_rounds(
      chan, own_.k, un, epochs, [&](u64 e) { return own_epoch_scalar(e); });

  std::vector<u64> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const u64 idx = query_index_ + j;
    load_block(epochs[j]);
    detail::KeyedMap::Hit hit = map_.lookup(ec::hash_point(kappa[j]));
    out[j] = hit.value;
    trace_.push_back(AccessEvent{idx, epochs[j], hit.slot});
  }
  query_index_ += n;
  return out;
}

u64 FileMultiTables::query(Chan& chan, u64 x_share) {
  return query_batch(chan, {x_share})[0];
}

}  // namespace lutmpc

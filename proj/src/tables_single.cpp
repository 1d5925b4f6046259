#include "lutmpc/tables_single.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>

#include "lutmpc/binio.hpp"
#include "lutmpc/errors.hpp"
#include "lutmpc/rng.hpp"

namespace lutmpc {

u64 h64pad(const Digest32& key, u64 counter) {
  u8 buf[40];
  std::memcpy(buf, key.data(), 32);
  for (int j = 0; j < 8; ++j) buf[32 + j] = u8(counter >> (56 - 8 * j));
  Digest32 d = sha256(buf, sizeof buf);
  return detail::le64_at(d.data());
}

SingleTables::SingleTables(const Dealer& dealer, TableSpec spec,
                           std::string_view tag, int party, u64 first,
                           std::size_t count, std::size_t aux_count)
    : dealer_(dealer),
      spec_(std::move(spec)),
      party_(party),
      first_(first),
      count_(count),
      aux_count_(aux_count) {
  if (party_ != 0 && party_ != 1)
    throw BadConfig("party index must be 0 or 1");
  validate(spec_.in_cfg);
  if (spec_.in_cfg.total_bits > 20)
    throw BadConfig("table grid too large to tabulate");
  if (!spec_.f) throw BadConfig("table spec has no function");
  base_ = derive_seed(dealer_.subseed(tag), spec_.name);
  own_key_ = derive_seed(base_, "hashkey", u64(party_));
  peer_key_ = derive_seed(base_, "hashkey", u64(1 - party_));
}

SingleTables::BlockData SingleTables::make_block(u64 counter) const {
  const std::size_t n = std::size_t(1) << spec_.in_cfg.total_bits;
  BlockData bd;

  const u64 pad_peer = h64pad(peer_key_, counter);
  std::vector<u64> pre(n);
  for (std::size_t j = 0; j < n; ++j)
    pre[j] = grid_point(u64(j), spec_.in_cfg) + pad_peer;
  bd.keys.resize(n);
  sha256_u64le_batch(pre.data(), n, bd.keys.data());

  Digest32 pd = derive_seed(base_, "valshare", counter);
  Prf64 prf{detail::le64_at(pd.data()), detail::le64_at(pd.data() + 8)};
  bd.values.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    u64 enc = grid_point(u64(j), spec_.in_cfg);
    u64 s0 = prf.at(enc);
    bd.values[j] = party_ == 0 ? s0 : spec_.f(enc) - s0;
  }

  if (aux_count_ > 0) {
    std::vector<u64> a_full(aux_count_);
    Drbg(base_, "mulmask", counter).fill(a_full.data(), aux_count_);
    Digest32 ad = derive_seed(base_, "auxshare", counter);
    Prf64 aprf{detail::le64_at(ad.data()), detail::le64_at(ad.data() + 8)};
    bd.aux.resize(n * aux_count_);
    for (std::size_t j = 0; j < n; ++j) {
      const u64 fx = spec_.f(grid_point(u64(j), spec_.in_cfg));
      for (std::size_t t = 0; t < aux_count_; ++t) {
        const u64 s0 = aprf.at(u64(j) * aux_count_ + t);
        bd.aux[j * aux_count_ + t] = party_ == 0 ? s0 : a_full[t] * fx - s0;
      }
    }
    std::vector<u64> s0(aux_count_);
    Drbg(base_, "mulmask-share0", counter).fill(s0.data(), aux_count_);
    bd.mask_share.resize(aux_count_);
    for (std::size_t t = 0; t < aux_count_; ++t)
      bd.mask_share[t] = party_ == 0 ? s0[t] : a_full[t] - s0[t];
  }
  return bd;
}

void SingleTables::build_table(u64 counter) {
  if (cached_counter_ == counter) return;
  BlockData bd = make_block(counter);
  const std::size_t n = bd.keys.size();
  map_.reset(n);
  for (std::size_t j = 0; j < n; ++j)
    map_.insert(bd.keys[j], bd.values[j], u64(j));
  aux_store_ = std::move(bd.aux);
  mask_share_ = std::move(bd.mask_share);
  cached_counter_ = counter;
}

void SingleTables::write_tables(std::ostream& out, u16 func_id) {
  for (u64 c = first_; c < first_ + count_; ++c) {
    BlockData bd = make_block(c);
    const std::size_t n = bd.keys.size();
    std::vector<u32> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](u32 x, u32 y) {
      return std::memcmp(bd.keys[x].data(), bd.keys[y].data(), 32) < 0;
    });

    detail::put_bytes(out, "HWK1", 4);
    detail::put_u16(out, func_id);
    const u8 cfgb[3] = {u8(spec_.in_cfg.int_bits), u8(spec_.in_cfg.frac_bits),
                        u8(spec_.in_cfg.total_bits)};
    detail::put_bytes(out, cfgb, 3);
    detail::put_u64(out, c);
    detail::put_u32(out, u32(n));
    for (u32 j : order) {
      detail::put_bytes(out, bd.keys[j].data(), 32);
      detail::put_u64(out, bd.values[j]);
      for (std::size_t t = 0; t < aux_count_; ++t)
        detail::put_u64(out, bd.aux[std::size_t(j) * aux_count_ + t]);
    }
    for (std::size_t t = 0; t < aux_count_; ++t)
      detail::put_u64(out, bd.mask_share[t]);
  }
}

SingleTables::AuxBatch SingleTables::run_batch(Chan& chan,
                                               const std::vector<u64>& xs,
                                               bool want_aux) {
  const std::size_t n = xs.size();
  AuxBatch out;
  if (n == 0) return out;
  if (!reuse_ && used_ + n > count_)
    throw TableExhausted("single-use tables depleted");

  std::vector<u64> msg(n);
  for (std::size_t j = 0; j < n; ++j) {
    u64 c = reuse_ ? first_ : first_ + used_ + j;
    msg[j] = xs[j] + h64pad(own_key_, c);
  }
  std::vector<u64> peer = chan.exchange_u64(MsgType::kTableQuery, msg);
  if (peer.size() != n)
    throw FrameCorrupt("table query batch size mismatch");

  out.value.resize(n);
  if (want_aux) {
    out.aux.resize(n * aux_count_);
    out.masks.resize(n * aux_count_);
  }
  for (std::size_t j = 0; j < n; ++j) {
    u64 c = reuse_ ? first_ : first_ + used_ + j;
    build_table(c);
    const detail::KeyedMap::Hit hit =
        map_.lookup(sha256_u64le(peer[j] + xs[j]));
    out.value[j] = hit.value;
    if (want_aux) {
      for (std::size_t t = 0; t < aux_count_; ++t) {
        out.aux[j * aux_count_ + t] =
            aux_store_[std::size_t(hit.slot) * aux_count_ + t];
        out.masks[j * aux_count_ + t] = mask_share_[t];
      }
    }
  }
  if (!reuse_) used_ += n;
  return out;
}

std::vector<u64> SingleTables::query_batch(Chan& chan,
                                           const std::vector<u64>& xs) {
  return run_batch(chan, xs, false).value;
}

SingleTables::AuxBatch SingleTables::query_batch_aux(
    Chan& chan, const std::vector<u64>& xs) {
  if (aux_count_ == 0)
    throw BadConfig("table set carries no product columns");
  return run_batch(chan, xs, true);
}

u64 SingleTables::query(Chan& chan, u64 x_share) {
  return query_batch(chan, {x_share})[0];
}

FileSingleTables::FileSingleTables(const std::filesystem::path& file,
                                   const Digest32& own_key,
                                   const FileTableMeta& meta)
    : in_(file, std::ios::binary), own_key_(own_key), meta_(meta) {
  if (!in_) throw IoError("cannot open table file " + file.string());
  validate(meta_.cfg);
  if (meta_.cfg.total_bits > 20)
    throw BadConfig("table grid too large to tabulate");
}

void FileSingleTables::load_block(u64 counter) {
  if (cached_counter_ == counter) return;
  char magic[4];
  detail::get_bytes(in_, magic, 4);
  if (std::memcmp(magic, "HWK1", 4) != 0)
    throw CorruptBundle("table block magic mismatch");
  if (detail::get_u16(in_) != meta_.func_id)
    throw CorruptBundle("table block function id mismatch");
  u8 cfgb[3];
  detail::get_bytes(in_, cfgb, 3);
  if (cfgb[0] != u8(meta_.cfg.int_bits) || cfgb[1] != u8(meta_.cfg.frac_bits) ||
      cfgb[2] != u8(meta_.cfg.total_bits))
    throw CorruptBundle("table block grid mismatch");
  if (detail::get_u64(in_) != counter)
    throw CorruptBundle("table blocks out of sequence");
  const u32 n = detail::get_u32(in_);
  if (n != u32(1) << meta_.cfg.total_bits)
    throw CorruptBundle("table block entry count mismatch");

  map_.reset(n);
  aux_entries_.resize(std::size_t(n) * meta_.aux_count);
  for (u32 j = 0; j < n; ++j) {
    Digest32 key;
    detail::get_bytes(in_, key.data(), 32);
    const u64 value = detail::get_u64(in_);
    map_.insert(key, value, u64(j));
    for (std::size_t t = 0; t < meta_.aux_count; ++t)
      aux_entries_[std::size_t(j) * meta_.aux_count + t] =
          detail::get_u64(in_);
  }
  mask_share_.resize(meta_.aux_count);
  for (std::size_t t = 0; t < meta_.aux_count; ++t)
    mask_share_[t] = detail::get_u64(in_);

  entries_ = n;
  cached_counter_ = counter;
}

TableAuxBatch FileSingleTables::run_batch(Chan& chan,
                                          const std::vector<u64>& xs,
                                          bool want_aux) {
  const std::size_t n = xs.size();
  TableAuxBatch out;
  if (n == 0) return out;
  if (used_ + n > meta_.count)
    throw TableExhausted("single-use tables depleted");

  std::vector<u64> msg(n);
  for (std::size_t j = 0; j < n; ++j)
    msg[j] = xs[j] + h64pad(own_key_, meta_.first + used_ + j);
  std::vector<u64> peer = chan.exchange_u64(MsgType::kTableQuery, msg);
  if (peer.size() != n)
    throw FrameCorrupt("table query batch size mismatch");

  out.value.resize(n);
  if (want_aux) {
    out.aux.resize(n * meta_.aux_count);
    out.masks.resize(n * meta_.aux_count);
  }
  for (std::size_t j = 0; j < n; ++j) {
    load_block(meta_.first + used_ + j);
    const detail::KeyedMap::Hit hit =
        map_.lookup(sha256_u64le(peer[j] + xs[j]));
    out.value[j] = hit.value;
    if (want_aux) {
      for (std::size_t t = 0; t < meta_.aux_count; ++t) {
        out.aux[j * meta_.aux_count + t] =
            aux_entries_[std::size_t(hit.slot) * meta_.aux_count + t];
        out.masks[j * meta_.aux_count + t] = mask_share_[t];
      }
    }
  }
  used_ += n;
  return out;
}

std::vector<u64> FileSingleTables::query_batch(Chan& chan,
                                               const std::vector<u64>& xs) {
  return run_batch(chan, xs, false).value;
}

TableAuxBatch FileSingleTables::query_batch_aux(Chan& chan,
                                                const std::vector<u64>& xs) {
  if (meta_.aux_count == 0)
    throw BadConfig("table set carries no product columns");
  return run_batch(chan, xs, true);
}

u64 FileSingleTables::query(Chan& chan, u64 x_share) {
  return query_batch(chan, {x_share})[0];
}

}  // namespace lutmpc

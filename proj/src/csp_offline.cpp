#include "lutmpc/csp_offline.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <utility>

#include "lutmpc/activations.hpp"
#include "lutmpc/binio.hpp"
#include "lutmpc/errors.hpp"

namespace lutmpc {

namespace {

using nlohmann::json;

json config_json(const TrainConfig& cfg) {
  return json{
      {"model", cfg.model == ModelKind::kLogistic ? "logistic" : "neural"},
      {"features", cfg.features},
      {"classes", cfg.classes},
      {"hidden1", cfg.hidden1},
      {"hidden2", cfg.hidden2},
      {"batch", cfg.batch},
      {"epochs", cfg.epochs},
      {"alpha_log2", cfg.alpha_log2},
      {"mode", cfg.mode == LookupMode::kSingle ? "single" : "multi"},
      {"eps", cfg.multi.eps},
      {"eps_total", cfg.multi.eps_total},
      {"clamp", cfg.multi.clamp},
      {"noise", cfg.noise},
      {"exp_shift", cfg.exp_shift},
      {"init_seed", cfg.init_seed}};
}

TrainConfig config_from_json(const json& j) {
  TrainConfig cfg;
  const std::string model = j.at("model").get<std::string>();
  if (model == "logistic")
    cfg.model = ModelKind::kLogistic;
  else if (model == "neural")
    cfg.model = ModelKind::kNeural;
  else
    throw CorruptBundle("bundle model kind unknown");
  cfg.features = j.at("features").get<std::size_t>();
  cfg.classes = j.at("classes").get<std::size_t>();
  cfg.hidden1 = j.at("hidden1").get<std::size_t>();
  cfg.hidden2 = j.at("hidden2").get<std::size_t>();
  cfg.batch = j.at("batch").get<std::size_t>();
  cfg.epochs = j.at("epochs").get<std::size_t>();
  cfg.alpha_log2 = j.at("alpha_log2").get<unsigned>();
  const std::string mode = j.at("mode").get<std::string>();
  if (mode == "single")
    cfg.mode = LookupMode::kSingle;
  else if (mode == "multi")
    cfg.mode = LookupMode::kMulti;
  else
    throw CorruptBundle("bundle lookup mode unknown");
  cfg.multi.eps = j.at("eps").get<double>();
  cfg.multi.eps_total = j.at("eps_total").get<double>();
  cfg.multi.clamp = j.at("clamp").get<i64>();
  cfg.noise = j.at("noise").get<bool>();
  cfg.exp_shift = j.at("exp_shift").get<double>();
  cfg.init_seed = j.at("init_seed").get<u64>();
  return cfg;
}

json counts_json(const ConsumptionPlan& plan, const TrainConfig& cfg) {
  u64 conv = 0;
  if (cfg.mode == LookupMode::kMulti)
    conv = plan.sigmoid_queries + plan.drelu_queries + plan.exp_queries +
           plan.inverse_queries;
  return json{{"iterations", plan.iterations},
              {"sigmoid", plan.sigmoid_queries},
              {"drelu", plan.drelu_queries},
              {"exp", plan.exp_queries},
              {"inverse", plan.inverse_queries},
              {"beaver", plan.beaver_triples},
              {"mask_words", plan.mask_words},
              {"setup_mask_words", plan.setup_mask_words},
              {"conv", conv},
              {"noise", conv}};
}

json batches_json(const ConsumptionPlan& plan) {
  json arr = json::array();
  for (const BatchPlanItem& b : plan.batches)
    arr.push_back(json{{"iter", b.iter},
                       {"epoch", b.epoch},
                       {"examples", b.examples},
                       {"sigmoid", b.sigmoid},
                       {"sigmoid_offset", b.sigmoid_offset},
                       {"drelu", b.drelu},
                       {"drelu_offset", b.drelu_offset},
                       {"exp", b.exp},
                       {"exp_offset", b.exp_offset},
                       {"inverse", b.inverse},
                       {"inverse_offset", b.inverse_offset},
                       {"beaver", b.beaver},
                       {"beaver_offset", b.beaver_offset},
                       {"mask_words", b.mask_words},
                       {"mask_word_offset", b.mask_word_offset}});
  return arr;
}

}  // namespace

void walk_consumption(
    const TrainConfig& cfg, std::size_t examples,
    const std::function<void(const MaskItem&)>& on_mask,
    const std::function<void(std::string_view tag, u64 index,
                             std::size_t count)>& on_beaver,
    const std::function<void(const BatchPlanItem&)>& on_batch) {
  cfg.validate();
  const u64 iters = cfg.iterations(examples);
  if (iters == 0) return;

  u64 mask_pos = 0, beaver_pos = 0;
  u64 sig = 0, dre = 0, ex = 0, inv = 0;

  auto emit_mask = [&](std::string_view tag, u64 index, std::size_t rows,
                       std::size_t cols) {
    if (on_mask) {
      MaskItem it;
      it.tag = tag;
      it.index = index;
      it.rows = rows;
      it.cols = cols;
      on_mask(it);
    }
    mask_pos += u64(rows) * cols;
  };
  auto emit_prod = [&](std::string_view tag, u64 index, const MatSlice& u,
                       const MatSlice& v, std::size_t rows, std::size_t cols) {
    if (on_mask) {
      MaskItem it;
      it.tag = tag;
      it.index = index;
      it.rows = rows;
      it.cols = cols;
      it.product = true;
      it.u = u;
      it.v = v;
      on_mask(it);
    }
    mask_pos += u64(rows) * cols;
  };
  auto emit_beaver = [&](std::string_view tag, u64 index, std::size_t count) {
    if (on_beaver) on_beaver(tag, index, count);
    beaver_pos += count;
  };
  auto full = [](std::string_view tag, u64 index, std::size_t rows,
                 std::size_t cols, bool tr = false) {
    MatSlice s;
    s.tag = tag;
    s.index = index;
    s.rows = rows;
    s.cols = cols;
    s.transpose = tr;
    return s;
  };

  const std::size_t d = cfg.features;
  const bool lr = cfg.model == ModelKind::kLogistic;

  // The dataset-wide input mask, opened once at run start.
  emit_mask(lr ? rnd::kLrU : rnd::kNnU, 0, examples, d);

  const u64 per_epoch = (examples + cfg.batch - 1) / cfg.batch;
  for (u64 it = 0; it < iters; ++it) {
    const std::size_t r0 = std::size_t(it % per_epoch) * cfg.batch;
    const std::size_t r1 = std::min(examples, r0 + cfg.batch);
    const std::size_t b = r1 - r0;

    BatchPlanItem bp;
    bp.iter = it;
    bp.epoch = it / per_epoch;
    bp.examples = b;
    bp.sigmoid_offset = sig;
    bp.drelu_offset = dre;
    bp.exp_offset = ex;
    bp.inverse_offset = inv;
    bp.beaver_offset = beaver_pos;
    bp.mask_word_offset = mask_pos;

    auto uslice = [&](bool tr) {
      MatSlice s;
      s.tag = lr ? rnd::kLrU : rnd::kNnU;
      s.index = 0;
      s.rows = examples;
      s.cols = d;
      s.row0 = r0;
      s.row1 = r1;
      s.transpose = tr;
      return s;
    };

    if (lr) {
      emit_mask(rnd::kLrV, it, d, 1);
      emit_prod(rnd::kLrZ, it, uslice(false), full(rnd::kLrV, it, d, 1), b, 1);
      sig += b;
      emit_mask(rnd::kLrM, it, b, 1);
      emit_prod(rnd::kLrZb, it, uslice(true), full(rnd::kLrM, it, b, 1), d, 1);
    } else {
      const std::size_t h1 = cfg.hidden1, h2 = cfg.hidden2, k = cfg.classes;
      emit_mask(rnd::kNnV0, it, d, h1);
      emit_prod(rnd::kNnZ0, it, uslice(false), full(rnd::kNnV0, it, d, h1), b,
                h1);
      emit_mask(rnd::kNnU1, it, b, h1);
      emit_mask(rnd::kNnV1, it, h1, h2);
      emit_prod(rnd::kNnZ1, it, full(rnd::kNnU1, it, b, h1),
                full(rnd::kNnV1, it, h1, h2), b, h2);
      emit_mask(rnd::kNnU2, it, b, h2);
      emit_mask(rnd::kNnV2, it, h2, k);
      emit_prod(rnd::kNnZ2, it, full(rnd::kNnU2, it, b, h2),
                full(rnd::kNnV2, it, h2, k), b, k);
      emit_mask(rnd::kNnM2, it, b, k);
      emit_prod(rnd::kNnZa2, it, full(rnd::kNnU2, it, b, h2, true),
                full(rnd::kNnM2, it, b, k), h2, k);
      emit_prod(rnd::kNnZb2, it, full(rnd::kNnM2, it, b, k),
                full(rnd::kNnV2, it, h2, k, true), b, h2);
      emit_mask(rnd::kNnM1, it, b, h2);
      emit_prod(rnd::kNnZa1, it, full(rnd::kNnU1, it, b, h1, true),
                full(rnd::kNnM1, it, b, h2), h1, h2);
      emit_prod(rnd::kNnZb1, it, full(rnd::kNnM1, it, b, h2),
                full(rnd::kNnV1, it, h1, h2, true), b, h1);
      emit_mask(rnd::kNnM0, it, b, h1);
      emit_prod(rnd::kNnZa0, it, uslice(true), full(rnd::kNnM0, it, b, h1), d,
                h1);

      emit_beaver(rnd::kNnRelu0, it, b * h1);
      emit_beaver(rnd::kNnRelu1, it, b * h2);
      if (cfg.mode == LookupMode::kMulti) emit_beaver(rnd::kNnSmx, it, b * k);
      emit_beaver(rnd::kNnBw1, it, b * h2);
      emit_beaver(rnd::kNnBw0, it, b * h1);

      dre += u64(b) * (h1 + h2);
      ex += u64(b) * k;
      inv += b;
    }

    bp.sigmoid = sig - bp.sigmoid_offset;
    bp.drelu = dre - bp.drelu_offset;
    bp.exp = ex - bp.exp_offset;
    bp.inverse = inv - bp.inverse_offset;
    bp.beaver = beaver_pos - bp.beaver_offset;
    bp.mask_words = mask_pos - bp.mask_word_offset;
    if (on_batch) on_batch(bp);
  }
}

ConsumptionPlan plan_consumption(const TrainConfig& cfg,
                                 std::size_t examples) {
  ConsumptionPlan p;
  walk_consumption(cfg, examples, nullptr, nullptr,
                   [&](const BatchPlanItem& b) { p.batches.push_back(b); });
  p.iterations = p.batches.size();
  if (!p.batches.empty()) {
    const BatchPlanItem& last = p.batches.back();
    p.setup_mask_words = p.batches.front().mask_word_offset;
    p.mask_words = last.mask_word_offset + last.mask_words;
    p.beaver_triples = last.beaver_offset + last.beaver;
    p.sigmoid_queries = last.sigmoid_offset + last.sigmoid;
    p.drelu_queries = last.drelu_offset + last.drelu;
    p.exp_queries = last.exp_offset + last.exp;
    p.inverse_queries = last.inverse_offset + last.inverse;
  }
  return p;
}

u64 tables_for_queries(u64 queries, const TrainConfig& cfg) {
  if (cfg.mode == LookupMode::kSingle) return queries;
  const u64 r = cfg.multi.queries_per_table();
  return (queries + r - 1) / r;
}

std::vector<TableKind> table_kinds(const TrainConfig& cfg,
                                   const ConsumptionPlan& plan) {
  std::vector<TableKind> out;
  auto add = [&](const char* kind, std::string_view tag, u16 func_id,
                 std::size_t aux, u64 queries) {
    out.push_back(TableKind{kind, tag, func_id, aux, queries,
                            tables_for_queries(queries, cfg)});
  };
  if (cfg.model == ModelKind::kLogistic) {
    add("sigmoid", rnd::kLrSigmoid, kFuncSigmoid, 0, plan.sigmoid_queries);
  } else {
    add("drelu", rnd::kNnDrelu, kFuncDrelu, 0, plan.drelu_queries);
    add("exp", rnd::kNnExp, kFuncExp, 0, plan.exp_queries);
    add("inverse", rnd::kNnInv, kFuncInverse,
        cfg.mode == LookupMode::kSingle ? cfg.classes : 0,
        plan.inverse_queries);
  }
  return out;
}

TableSpec spec_for_kind(std::string_view kind, const TrainConfig& cfg) {
  if (kind == "sigmoid") return sigmoid_table_spec();
  if (kind == "drelu") return drelu_table_spec();
  if (kind == "exp") return exp_table_spec(cfg.exp_shift);
  if (kind == "inverse") return inverse_table_spec();
  throw BadConfig("unknown table kind");
}

nlohmann::json build_manifest(const Dealer& dealer, const TrainConfig& cfg,
                              std::size_t examples, int party) {
  cfg.validate();
  if (party != 0 && party != 1)
    throw BadConfig("party index must be 0 or 1");
  const ConsumptionPlan plan = plan_consumption(cfg, examples);

  json tables = json::array();
  for (const TableKind& tk : table_kinds(cfg, plan)) {
    TableSpec spec = spec_for_kind(tk.kind, cfg);
    json t{{"kind", tk.kind},
           {"tag", std::string(tk.tag)},
           {"func_id", tk.func_id},
           {"cfg",
            {spec.in_cfg.int_bits, spec.in_cfg.frac_bits,
             spec.in_cfg.total_bits}},
           {"queries", tk.queries},
           {"tables", tk.tables},
           {"aux", tk.aux},
           {"file", "tables_" + tk.kind + ".tbl"}};
    if (cfg.mode == LookupMode::kSingle) {
      SingleTables st(dealer, spec, tk.tag, party, 0, tk.queries, tk.aux);
      t["own_key"] = to_hex(st.own_key());
    } else {
      Dealer sc = MultiTables::scoped(dealer, spec, tk.tag);
      u8 kb[32];
      ec::scalar_to_bytes(MultiTables::party_key(sc, party), kb);
      t["k"] = to_hex(kb, 32);
      t["epoch_seed"] = to_hex(MultiTables::party_epoch_seed(sc, party));
      t["conv_file"] = "conv_" + tk.kind + ".bin";
      t["noise_file"] = "noise_" + tk.kind + ".bin";
      t["queries_per_table"] = cfg.multi.queries_per_table();
    }
    tables.push_back(std::move(t));
  }

  return json{{"format", "lutmpc-bundle"},
              {"version", kBundleFormatVersion},
              {"bundle_id", to_hex(dealer.subseed("bundle-id"))},
              {"party", party},
              {"examples", examples},
              {"config", config_json(cfg)},
              {"counts", counts_json(plan, cfg)},
              {"tables", std::move(tables)},
              {"batches", batches_json(plan)}};
}

void provision(const Dealer& dealer, const TrainConfig& cfg,
               const Mat& x_fixed, const Mat& y_fixed,
               const std::filesystem::path& dir0,
               const std::filesystem::path& dir1) {
  cfg.validate();
  const std::size_t examples = x_fixed.rows;
  if (x_fixed.cols != cfg.features)
    throw BadConfig("data width disagrees with the configured feature count");
  const std::size_t label_cols =
      cfg.model == ModelKind::kLogistic ? 1 : cfg.classes;
  if (y_fixed.rows != examples || y_fixed.cols != label_cols)
    throw BadConfig("label shape disagrees with the configuration");

  const ConsumptionPlan plan = plan_consumption(cfg, examples);

  for (int party = 0; party < 2; ++party) {
    const std::filesystem::path& dir = party == 0 ? dir0 : dir1;
    std::filesystem::create_directories(dir);
    json files = json::object();

    auto record = [&](const std::string& name) {
      const std::filesystem::path p = dir / name;
      files[name] = json{{"bytes", std::filesystem::file_size(p)},
                         {"sha256", to_hex(file_digest(p))}};
    };
    auto write_file = [&](const std::string& name,
                          const std::function<void(std::ostream&)>& body) {
      const std::filesystem::path p = dir / name;
      {
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot create " + p.string());
        body(out);
        out.flush();
        if (!out) throw IoError("write failed for " + p.string());
      }
      record(name);
    };
    auto write_mat = [](std::ostream& out, const Mat& m) {
      for (u64 w : m.a) detail::put_u64(out, w);
    };

    write_file("data.bin", [&](std::ostream& out) {
      write_mat(out, dealer.share_of(rnd::kData, 0, party, x_fixed));
    });
    write_file("labels.bin", [&](std::ostream& out) {
      write_mat(out, dealer.share_of(rnd::kLabels, 0, party, y_fixed));
    });

    {
      const std::filesystem::path mp = dir / "masks.bin";
      const std::filesystem::path bp = dir / "beaver.bin";
      std::ofstream mout(mp, std::ios::binary | std::ios::trunc);
      std::ofstream bout(bp, std::ios::binary | std::ios::trunc);
      if (!mout || !bout) throw IoError("cannot create pool files");
      walk_consumption(
          cfg, examples,
          [&](const MaskItem& it) {
            Mat m = it.product ? dealer.product_share(it.tag, it.index, party,
                                                      it.u, it.v)
                               : dealer.mat_share(it.tag, it.index, party,
                                                  it.rows, it.cols);
            write_mat(mout, m);
          },
          [&](std::string_view tag, u64 index, std::size_t count) {
            for (const BeaverTriple& t :
                 dealer.triple_vec(tag, index, party, count)) {
              detail::put_u64(bout, t.a);
              detail::put_u64(bout, t.b);
              detail::put_u64(bout, t.c);
            }
          },
          nullptr);
      mout.flush();
      bout.flush();
      if (!mout || !bout) throw IoError("write failed for pool files");
    }
    record("masks.bin");
    record("beaver.bin");

    for (const TableKind& tk : table_kinds(cfg, plan)) {
      const TableSpec spec = spec_for_kind(tk.kind, cfg);
      write_file("tables_" + tk.kind + ".tbl", [&](std::ostream& out) {
        if (tk.tables == 0) return;
        if (cfg.mode == LookupMode::kSingle) {
          SingleTables st(dealer, spec, tk.tag, party, 0, tk.queries, tk.aux);
          st.write_tables(out, tk.func_id);
        } else {
          MultiTables mt(dealer, spec, tk.tag, party, tk.tables, cfg.multi);
          mt.write_tables(out, tk.func_id);
        }
      });
      if (cfg.mode == LookupMode::kMulti) {
        Dealer sc = MultiTables::scoped(dealer, spec, tk.tag);
        const GeometricParams noise =
            MultiTables::effective_noise(cfg.multi, spec.in_cfg);
        write_file("conv_" + tk.kind + ".bin", [&](std::ostream& out) {
          for (u64 idx = 0; idx < tk.queries; ++idx) {
            const ConvPair p = sc.conv_vec("conv", idx, party, 1)[0];
            detail::put_u64(out, p.r64);
            u8 rb[32];
            ec::scalar_to_bytes(p.rN, rb);
            detail::put_bytes(out, rb, 32);
          }
        });
        write_file("noise_" + tk.kind + ".bin", [&](std::ostream& out) {
          for (u64 idx = 0; idx < tk.queries; ++idx) {
            const u64 sh = cfg.noise ? geometric_noise_share(sc, "noise", idx,
                                                             party, 1,
                                                             noise)[0]
                                     : 0;
            detail::put_u64(out, sh);
          }
        });
      }
    }

    json manifest = build_manifest(dealer, cfg, examples, party);
    manifest["files"] = std::move(files);
    const std::filesystem::path mp = dir / "manifest.json";
    std::ofstream mout(mp, std::ios::trunc);
    if (!mout) throw IoError("cannot create " + mp.string());
    mout << manifest.dump(2) << '\n';
    mout.flush();
    if (!mout) throw IoError("write failed for " + mp.string());
  }
}

Digest32 file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  constexpr std::size_t kChunk = std::size_t(1) << 20;
  std::vector<u8> buf(kChunk);
  std::vector<u8> digests;
  u64 total = 0;
  for (;;) {
    in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(kChunk));
    const std::size_t got = std::size_t(in.gcount());
    if (got == 0) break;
    total += got;
    const Digest32 d = sha256(buf.data(), got);
    digests.insert(digests.end(), d.begin(), d.end());
    if (got < kChunk) break;
  }
  for (int j = 0; j < 8; ++j) digests.push_back(u8(total >> (8 * j)));
  return sha256(digests.data(), digests.size());
}

std::string to_hex(const u8* data, std::size_t n) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s(2 * n, '0');
  for (std::size_t i = 0; i < n; ++i) {
    s[2 * i] = kDigits[data[i] >> 4];
    s[2 * i + 1] = kDigits[data[i] & 15];
  }
  return s;
}

std::string to_hex(const Digest32& d) { return to_hex(d.data(), d.size()); }

bool from_hex(std::string_view hex, u8* out, std::size_t n) {
  if (hex.size() != 2 * n) return false;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  for (std::size_t i = 0; i < n; ++i) {
    const int hi = nibble(hex[2 * i]);
    const int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) return false;
    out[i] = u8(hi << 4 | lo);
  }
  return true;
}

Bundle Bundle::open(const std::filesystem::path& dir) {
  Bundle b;
  b.dir_ = dir;
  const std::filesystem::path mp = dir / "manifest.json";
  {
    std::ifstream in(mp);
    if (!in) throw IoError("cannot open " + mp.string());
    try {
      in >> b.manifest_;
    } catch (const json::exception&) {
      throw CorruptBundle("bundle manifest is not valid JSON");
    }
  }

  try {
    if (b.manifest_.at("format").get<std::string>() != "lutmpc-bundle")
      throw CorruptBundle("not a bundle manifest");
    if (b.manifest_.at("version").get<u32>() != kBundleFormatVersion)
      throw VersionMismatch("bundle format version not supported");
    b.party_ = b.manifest_.at("party").get<int>();
    if (b.party_ != 0 && b.party_ != 1)
      throw CorruptBundle("bundle party index invalid");
    b.examples_ = b.manifest_.at("examples").get<std::size_t>();
    b.cfg_ = config_from_json(b.manifest_.at("config"));
    try {
      b.cfg_.validate();
    } catch (const BadConfig&) {
      throw CorruptBundle("bundle configuration invalid");
    }
    b.plan_ = plan_consumption(b.cfg_, b.examples_);

    if (b.manifest_.at("counts") != counts_json(b.plan_, b.cfg_) ||
        b.manifest_.at("batches") != batches_json(b.plan_))
      throw CorruptBundle("bundle counts disagree with its configuration");

    const std::vector<TableKind> kinds = table_kinds(b.cfg_, b.plan_);
    const json& jt = b.manifest_.at("tables");
    if (!jt.is_array() || jt.size() != kinds.size())
      throw CorruptBundle("bundle table list disagrees with its configuration");
    for (std::size_t i = 0; i < kinds.size(); ++i) {
      const json& t = jt[i];
      TableRef ref;
      ref.kind = t.at("kind").get<std::string>();
      ref.tag = t.at("tag").get<std::string>();
      ref.file = t.at("file").get<std::string>();
      ref.func_id = t.at("func_id").get<u16>();
      const json& jc = t.at("cfg");
      ref.cfg = FixedCfg{jc.at(0).get<int>(), jc.at(1).get<int>(),
                         jc.at(2).get<int>()};
      ref.queries = t.at("queries").get<u64>();
      ref.tables = t.at("tables").get<u64>();
      ref.aux = t.at("aux").get<std::size_t>();
      const TableSpec spec = spec_for_kind(kinds[i].kind, b.cfg_);
      if (ref.kind != kinds[i].kind || ref.tag != kinds[i].tag ||
          ref.func_id != kinds[i].func_id || ref.queries != kinds[i].queries ||
          ref.tables != kinds[i].tables || ref.aux != kinds[i].aux ||
          ref.cfg.int_bits != spec.in_cfg.int_bits ||
          ref.cfg.frac_bits != spec.in_cfg.frac_bits ||
          ref.cfg.total_bits != spec.in_cfg.total_bits)
        throw CorruptBundle(
            "bundle table list disagrees with its configuration");
      if (b.cfg_.mode == LookupMode::kSingle) {
        if (!from_hex(t.at("own_key").get<std::string>(), ref.own_key.data(),
                      32))
          throw CorruptBundle("bundle table key material malformed");
      } else {
        u8 kb[32];
        if (!from_hex(t.at("k").get<std::string>(), kb, 32))
          throw CorruptBundle("bundle table key material malformed");
        ref.keys.k = ec::scalar_from_bytes_mod_n(kb);
        if (!from_hex(t.at("epoch_seed").get<std::string>(),
                      ref.keys.epoch_seed.data(), 32))
          throw CorruptBundle("bundle table key material malformed");
        ref.conv_file = t.at("conv_file").get<std::string>();
        ref.noise_file = t.at("noise_file").get<std::string>();
      }
      b.tables_.push_back(std::move(ref));
    }

    const json& files = b.manifest_.at("files");
    if (!files.is_object())
      throw CorruptBundle("bundle manifest lacks a file section");
    std::vector<std::string> expected = {"data.bin", "labels.bin", "masks.bin",
                                         "beaver.bin"};
    for (const TableRef& t : b.tables_) {
      expected.push_back(t.file);
      if (!t.conv_file.empty()) expected.push_back(t.conv_file);
      if (!t.noise_file.empty()) expected.push_back(t.noise_file);
    }
    for (const std::string& name : expected)
      if (!files.contains(name))
        throw CorruptBundle("bundle file not listed: " + name);
    for (auto it = files.begin(); it != files.end(); ++it) {
      const std::filesystem::path p = dir / it.key();
      std::error_code fec;
      const auto size = std::filesystem::file_size(p, fec);
      if (fec) throw CorruptBundle("bundle file missing: " + it.key());
      if (size != it.value().at("bytes").get<u64>())
        throw CorruptBundle("bundle file size mismatch: " + it.key());
      if (to_hex(file_digest(p)) != it.value().at("sha256").get<std::string>())
        throw CorruptBundle("bundle file checksum mismatch: " + it.key());
    }
  } catch (const json::exception&) {
    throw CorruptBundle("bundle manifest lacks required fields");
  }
  return b;
}

std::string Bundle::bundle_id() const {
  return manifest_.at("bundle_id").get<std::string>();
}

namespace {

std::vector<u64> read_words_file(const std::filesystem::path& p, u64 offset,
                                 std::size_t count, u64 provisioned,
                                 const char* what) {
  if (offset + count > provisioned)
    throw OfflineUnderprovisioned(std::string(what) + " pool exhausted");
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  in.seekg(std::streamoff(offset * 8));
  std::vector<u64> out(count);
  for (u64& w : out) w = detail::get_u64(in);
  return out;
}

}  // namespace

Mat Bundle::data_share() const {
  const std::size_t n = examples_ * cfg_.features;
  Mat m(examples_, cfg_.features);
  m.a = read_words_file(dir_ / "data.bin", 0, n, n, "data");
  return m;
}

Mat Bundle::label_share() const {
  const std::size_t cols =
      cfg_.model == ModelKind::kLogistic ? 1 : cfg_.classes;
  const std::size_t n = examples_ * cols;
  Mat m(examples_, cols);
  m.a = read_words_file(dir_ / "labels.bin", 0, n, n, "label");
  return m;
}

std::vector<u64> Bundle::mask_words(u64 offset, std::size_t count) const {
  return read_words_file(dir_ / "masks.bin", offset, count, plan_.mask_words,
                         "mask");
}

std::vector<BeaverTriple> Bundle::triples(u64 offset,
                                          std::size_t count) const {
  if (offset + count > plan_.beaver_triples)
    throw OfflineUnderprovisioned("triple pool exhausted");
  const std::filesystem::path p = dir_ / "beaver.bin";
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  in.seekg(std::streamoff(offset * 24));
  std::vector<BeaverTriple> out(count);
  for (BeaverTriple& t : out) {
    t.a = detail::get_u64(in);
    t.b = detail::get_u64(in);
    t.c = detail::get_u64(in);
  }
  return out;
}

const Bundle::TableRef& Bundle::table(std::string_view kind) const {
  for (const TableRef& t : tables_)
    if (t.kind == kind) return t;
  throw BadConfig("bundle has no such table kind");
}

FileSingleTables Bundle::single_tables(std::string_view kind) const {
  if (cfg_.mode != LookupMode::kSingle)
    throw BadConfig("bundle was provisioned with reusable tables");
  const TableRef& t = table(kind);
  const FileTableMeta meta{t.func_id, t.cfg, 0, t.tables, t.aux};
  return FileSingleTables(dir_ / t.file, t.own_key, meta);
}

FileMultiTables Bundle::multi_tables(std::string_view kind) const {
  if (cfg_.mode != LookupMode::kMulti)
    throw BadConfig("bundle was provisioned with single-use tables");
  const TableRef& t = table(kind);
  std::vector<ConvPair> conv(t.queries);
  {
    const std::filesystem::path p = dir_ / t.conv_file;
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot open " + p.string());
    for (ConvPair& pr : conv) {
      pr.r64 = detail::get_u64(in);
      u8 rb[32];
      detail::get_bytes(in, rb, 32);
      pr.rN = ec::scalar_from_bytes_mod_n(rb);
    }
  }
  std::vector<u64> noise(t.queries);
  {
    const std::filesystem::path p = dir_ / t.noise_file;
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot open " + p.string());
    for (u64& w : noise) w = detail::get_u64(in);
  }
  const FileTableMeta meta{t.func_id, t.cfg, 0, t.tables, 0};
  return FileMultiTables(dir_ / t.file, t.keys, party_, meta, cfg_.multi,
                         std::move(conv), std::move(noise));
}

}  // namespace lutmpc

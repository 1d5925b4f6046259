#include "lutmpc/activations.hpp"

#include <cmath>

namespace lutmpc {

TableSpec sigmoid_table_spec() {
  return {"sigmoid", kSigmoidCfg, [](u64 enc) {
            const double x = decode(enc, kSigmoidCfg);
            return encode(1.0 / (1.0 + std::exp(-x)), kSigmoidCfg);
          }};
}

TableSpec drelu_table_spec() {
  return {"drelu", kDreluCfg,
          [](u64 enc) { return u64(i64(enc) >= 2 ? 1 : 0); }};
}

TableSpec exp_table_spec(double shift) {
  return {"exp", kExpCfg, [shift](u64 enc) {
            const double x = decode(enc, kExpCfg);
            const double v =
                std::exp(x - shift) * std::ldexp(1.0, kExpCfg.frac_bits);
            return u64(std::llround(v));
          }};
}

TableSpec inverse_table_spec() {
  return {"inverse", kInverseCfg, [](u64 enc) {
            const double x = decode(enc, kInverseCfg);
            if (x == 0.0) return u64(0);
            return u64(std::llround((1.0 / x) * std::ldexp(1.0, kWorkingFrac)));
          }};
}

}  // namespace lutmpc

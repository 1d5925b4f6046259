#pragma once
//
// Configuration of one secure training run, shared verbatim by the offline
// provisioner, the online trainers, and the plaintext reference model: the
// same struct drives what material gets provisioned and what the online
// phase consumes, so the two sides cannot drift apart.
//
// The rnd namespace pins the (tag, index) addresses of every dealt object.
// Both parties, the offline generator, and the test oracle derive the same
// randomness from these names; changing one silently breaks share
// consistency, so they live here as named constants rather than string
// literals at call sites.

#include <bit>
#include <cstddef>
#include <string_view>

#include "lutmpc/errors.hpp"
#include "lutmpc/ring64.hpp"
#include "lutmpc/tables_multi.hpp"  // MultiParams

namespace lutmpc {

enum class ModelKind { kLogistic, kNeural };
enum class LookupMode { kSingle, kMulti };

struct TrainConfig {
  ModelKind model = ModelKind::kLogistic;
  std::size_t features = 0;
  std::size_t classes = 1;  // 1 for logistic regression
  std::size_t hidden1 = 0;  // neural model only
  std::size_t hidden2 = 0;
  std::size_t batch = 128;  // power of two
  std::size_t epochs = 1;   // 0 allowed: provision and train nothing
  unsigned alpha_log2 = 7;  // learning rate 2^-alpha_log2
  LookupMode mode = LookupMode::kSingle;
  MultiParams multi;        // used when mode == kMulti
  bool noise = true;        // access-pattern noise (kMulti only)
  double exp_shift = 0.0;   // argument shift baked into the exp table
  u64 init_seed = 1;        // public seed for the neural weight init

  void validate() const {
    if (features == 0) throw BadConfig("feature count must be positive");
    if (batch == 0 || !std::has_single_bit(batch))
      throw BadConfig("batch size must be a power of two");
    if (model == ModelKind::kLogistic) {
      if (classes != 1)
        throw BadConfig("logistic model has exactly one output");
    } else {
      if (classes < 2)
        throw BadConfig("neural model needs at least two classes");
      if (hidden1 == 0 || hidden2 == 0)
        throw BadConfig("neural model needs two hidden layer widths");
    }
    if (mode == LookupMode::kMulti) multi.validate();
  }

  // Iteration count for a dataset of the given size: every epoch sweeps
  // ceil(examples / batch) batches, the last possibly short.
  u64 iterations(std::size_t examples) const {
    if (examples == 0) return 0;
    return u64(epochs) * ((examples + batch - 1) / batch);
  }

  unsigned batch_log2() const { return unsigned(std::countr_zero(batch)); }

  // One combined truncation folds the working-point product shift, the
  // learning rate, and the batch-average divisor into a single shift.
  unsigned update_shift() const {
    return unsigned(kWorkingFrac) + alpha_log2 + batch_log2();
  }
};

// Addresses of dealt randomness below the run's master seed.
namespace rnd {

inline constexpr std::string_view kData = "data";
inline constexpr std::string_view kLabels = "labels";

// Logistic regression.  U masks the dataset once; per iteration j the run
// consumes a weight mask V_j, the product Z_j = U[batch_j] * V_j, a
// gradient-signal mask M_j, and the product Zb_j = U[batch_j]^T * M_j.
inline constexpr std::string_view kLrU = "lr-u";
inline constexpr std::string_view kLrV = "lr-v";
inline constexpr std::string_view kLrZ = "lr-z";
inline constexpr std::string_view kLrM = "lr-m";
inline constexpr std::string_view kLrZb = "lr-zb";
inline constexpr std::string_view kLrSigmoid = "lr-sigmoid";

// Neural network.  U masks the input once.  Per iteration: forward masks
// V_l (weights), U_l (layer activations), Z_l = U_{l-1} * V_l; backward
// masks M_l (deltas) with products Za_l = U_l^T * M_l (weight gradients)
// and Zb_l = M_l * V_l^T (delta propagation).
inline constexpr std::string_view kNnU = "nn-u";
inline constexpr std::string_view kNnV0 = "nn-v0";
inline constexpr std::string_view kNnZ0 = "nn-z0";
inline constexpr std::string_view kNnU1 = "nn-u1";
inline constexpr std::string_view kNnV1 = "nn-v1";
inline constexpr std::string_view kNnZ1 = "nn-z1";
inline constexpr std::string_view kNnU2 = "nn-u2";
inline constexpr std::string_view kNnV2 = "nn-v2";
inline constexpr std::string_view kNnZ2 = "nn-z2";
inline constexpr std::string_view kNnM2 = "nn-m2";
inline constexpr std::string_view kNnZa2 = "nn-za2";
inline constexpr std::string_view kNnZb2 = "nn-zb2";
inline constexpr std::string_view kNnM1 = "nn-m1";
inline constexpr std::string_view kNnZa1 = "nn-za1";
inline constexpr std::string_view kNnZb1 = "nn-zb1";
inline constexpr std::string_view kNnM0 = "nn-m0";
inline constexpr std::string_view kNnZa0 = "nn-za0";

// Beaver triple streams, in per-iteration consumption order.
inline constexpr std::string_view kNnRelu0 = "nn-relu0";
inline constexpr std::string_view kNnRelu1 = "nn-relu1";
inline constexpr std::string_view kNnSmx = "nn-smx";
inline constexpr std::string_view kNnBw1 = "nn-bw1";
inline constexpr std::string_view kNnBw0 = "nn-bw0";

// Table sets and the public weight initialization stream.
inline constexpr std::string_view kNnDrelu = "nn-drelu";
inline constexpr std::string_view kNnExp = "nn-exp";
inline constexpr std::string_view kNnInv = "nn-inv";
inline constexpr std::string_view kNnInit = "nn-init";

}  // namespace rnd

}  // namespace lutmpc

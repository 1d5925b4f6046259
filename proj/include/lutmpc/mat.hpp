#pragma once
//
// Dense row-major matrices over Z_{2^64}.  Everything the training loops
// need: ring add/sub/mul (wraparound is the ring reduction), transpose,
// and element-wise helpers.  Kept header-only so the hot multiply inlines
// into both the protocol and the plaintext oracle.

#include <cstddef>
#include <vector>

#include "lutmpc/errors.hpp"
#include "lutmpc/sha256.hpp"

namespace lutmpc {

struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<u64> a;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0) {}

  u64& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  u64 operator()(std::size_t i, std::size_t j) const {
    return a[i * cols + j];
  }
  u64* row(std::size_t i) { return a.data() + i * cols; }
  const u64* row(std::size_t i) const { return a.data() + i * cols; }

  std::size_t size() const { return a.size(); }

  friend bool operator==(const Mat&, const Mat&) = default;
};

inline void check_same_shape(const Mat& x, const Mat& y) {
  if (x.rows != y.rows || x.cols != y.cols)
    throw BadConfig("matrix shape mismatch");
}

inline Mat add(const Mat& x, const Mat& y) {
  check_same_shape(x, y);
  Mat r = x;
  for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] += y.a[i];
  return r;
}

inline Mat sub(const Mat& x, const Mat& y) {
  check_same_shape(x, y);
  Mat r = x;
  for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] -= y.a[i];
  return r;
}

inline Mat mul(const Mat& x, const Mat& y) {
  if (x.cols != y.rows) throw BadConfig("matrix product shape mismatch");
  Mat r(x.rows, y.cols);
  for (std::size_t i = 0; i < x.rows; ++i) {
    u64* out = r.row(i);
    for (std::size_t l = 0; l < x.cols; ++l) {
      const u64 v = x(i, l);
      if (v == 0) continue;
      const u64* yrow = y.row(l);
      for (std::size_t j = 0; j < y.cols; ++j) out[j] += v * yrow[j];
    }
  }
  return r;
}

inline Mat transpose(const Mat& x) {
  Mat r(x.cols, x.rows);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = 0; j < x.cols; ++j) r(j, i) = x(i, j);
  return r;
}

inline Mat hadamard(const Mat& x, const Mat& y) {
  check_same_shape(x, y);
  Mat r = x;
  for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] *= y.a[i];
  return r;
}

inline Mat scale(const Mat& x, u64 k) {
  Mat r = x;
  for (u64& v : r.a) v *= k;
  return r;
}

}  // namespace lutmpc

#pragma once
//
// Open-addressed map from 32-byte digests to table entries, shared by the
// lookup-table implementations.  Entries are identified by the first 128
// bits of the digest: a false match would need a 128-bit collision inside
// one table, far below any practical concern, while a genuine miss walks to
// an empty slot and raises MissingKey at the call site.

#include <cstring>
#include <vector>

#include "lutmpc/errors.hpp"
#include "lutmpc/sha256.hpp"

namespace lutmpc::detail {

inline u64 le64_at(const u8* p) {
  u64 v;
  std::memcpy(&v, p, 8);
  return v;
}

class KeyedMap {
 public:
  struct Hit {
    u64 value = 0;
    u64 slot = 0;  // grid position of the entry, for access-pattern records
  };

  void reset(std::size_t entries) {
    std::size_t cap = 2;
    while (cap < entries * 2) cap *= 2;
    slots_.assign(cap, Slot{});
    mask_ = cap - 1;
  }

  void insert(const Digest32& d, u64 value, u64 slot) {
    u64 k8 = le64_at(d.data()), c8 = le64_at(d.data() + 8);
    u64 at = k8 & mask_;
    while (slots_[at].k8 != 0 || slots_[at].c8 != 0) {
      if (slots_[at].k8 == k8 && slots_[at].c8 == c8)
        throw BadConfig("table key collision");  // 128-bit match: unreachable
      at = (at + 1) & mask_;
    }
    slots_[at] = Slot{k8, c8, value, slot};
  }

  Hit lookup(const Digest32& d) const {
    u64 k8 = le64_at(d.data()), c8 = le64_at(d.data() + 8);
    u64 at = k8 & mask_;
    while (slots_[at].k8 != 0 || slots_[at].c8 != 0) {
      if (slots_[at].k8 == k8 && slots_[at].c8 == c8)
        return Hit{slots_[at].value, slots_[at].slot};
      at = (at + 1) & mask_;
    }
    throw MissingKey("no table entry for query");
  }

 private:
  struct Slot {
    u64 k8 = 0;
    u64 c8 = 0;
    u64 value = 0;
    u64 slot = 0;
  };
  std::vector<Slot> slots_;
  u64 mask_ = 0;
};

}  // namespace lutmpc::detail

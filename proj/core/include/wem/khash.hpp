#pragma once

#include <functional>
#include <optional>
#include <unordered_set>
#include <vector>

#include "wem/memsim.hpp"
#include "wem/rng.hpp"

namespace wem {

// Occupancy bounds as exact rationals so resize triggers are integer
// comparisons, never float rounding.
struct HashParams {
  uint32_t k = 2;
  uint32_t lower_num = 1, lower_den = 5;  // l = 0.2
  uint32_t upper_num = 4, upper_den = 5;  // r = 0.8
  uint32_t base_size_log2 = 5;            // level i holds 2^(base+i) slots
  uint64_t seed = 0x2545f4914f6cdd1dull;
};

struct Location {
  uint32_t level = 0;  // 0-based index into the current level list
  uint64_t slot = 0;
};

// Open-addressing set of 4-byte keys spread over k levels of consecutive
// doubling capacities. Insertions fill the smallest level with room; when
// every level is at its occupancy cap a new largest level is allocated and
// only the smallest level's entries are rehashed. Deletions shrink from the
// other end. Linear probing, backward-shift deletion, no tombstones.
class KLevelHashTable {
 public:
  static constexpr uint32_t kEmpty = 0xFFFFFFFFu;

  KLevelHashTable(MemSim& sim, HashParams params);

  std::optional<Location> lookup(uint32_t key);

  // Key must not be present (first-insertion semantics).
  void insert(uint32_t key);

  // loc must come from a lookup of the same key.
  void erase(uint32_t key, Location loc);

  // Empty all slots in place, keeping the current level geometry.
  void clear();

  // Visit every stored key by scanning the level arrays (tracked reads).
  template <class F>
  void for_each(F&& fn) {
    for (auto& lv : levels_) {
      for (uint64_t s = 0; s < lv.cap; ++s) {
        uint32_t v = lv.slots.get(s);
        if (v != kEmpty) fn(v);
      }
    }
  }

  double occupancy() const;
  uint64_t size() const { return count_; }
  uint64_t total_capacity() const;
  uint32_t level_count() const { return static_cast<uint32_t>(levels_.size()); }
  uint64_t level_capacity(uint32_t i) const { return levels_[i].cap; }
  uint64_t level_size(uint32_t i) const { return levels_[i].count; }

  uint64_t grow_resizes() const { return grows_; }
  uint64_t shrink_resizes() const { return shrinks_; }
  uint64_t reinsertions() const { return reinserts_; }

  // Test hook, fired once per reinserted key during a resize.
  std::function<void(uint32_t key, bool grew)> reinsert_observer;

 private:
  struct Level {
    TypedArray<uint32_t> slots;
    uint64_t cap = 0;
    uint64_t count = 0;
    uint32_t cap_log2 = 0;
  };

  // One 64-bit mix per key, masked to each level's capacity. Sharing the
  // hash across levels keeps resize reinsertions sequential: doubling a
  // capacity splits the scan of the old level into two ordered streams
  // instead of scattering every entry.
  uint64_t home_slot(uint32_t key, const Level& lv) const {
    return mix64(static_cast<uint64_t>(key) * 0x9e3779b97f4a7c15ull ^ seed_) &
           (lv.cap - 1);
  }

  Level make_level(uint32_t cap_log2);
  bool level_has_room(const Level& lv) const;
  void place(Level& lv, uint32_t key);
  bool place_anywhere(uint32_t key);  // smaller levels first
  void grow();
  void maybe_shrink();

  MemSim* sim_;
  HashParams p_;
  uint64_t seed_;
  std::vector<Level> levels_;  // ascending capacity
  uint64_t count_ = 0;
  uint64_t grows_ = 0, shrinks_ = 0, reinserts_ = 0;
  std::unordered_set<uint32_t> model_;  // duplicate-insert guard
};

}  // namespace wem

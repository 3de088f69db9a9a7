#include "wem/khash.hpp"

#include <cassert>

namespace wem {

KLevelHashTable::KLevelHashTable(MemSim& sim, HashParams params)
    : sim_(&sim), p_(params), seed_(mix64(params.seed)) {
  if (p_.k < 1) throw SimFault("k must be >= 1");
  // 0 < l < r < 1, and 4l <= r so a shrink can never cascade into a grow.
  if (!(p_.lower_num * p_.upper_den < p_.upper_num * p_.lower_den))
    throw SimFault("occupancy bounds need l < r");
  if (p_.lower_num == 0 || p_.upper_num >= p_.upper_den)
    throw SimFault("occupancy bounds must lie in (0,1)");
  if (!(4 * p_.lower_num * p_.upper_den <= p_.upper_num * p_.lower_den))
    throw SimFault("analysis requires 4l <= r");
  for (uint32_t i = 1; i <= p_.k; ++i)
    levels_.push_back(make_level(p_.base_size_log2 + i));
  model_.reserve(1 << 16);
}

KLevelHashTable::Level KLevelHashTable::make_level(uint32_t cap_log2) {
  Level lv;
  lv.cap = uint64_t{1} << cap_log2;
  lv.cap_log2 = cap_log2;
  lv.count = 0;
  lv.slots = TypedArray<uint32_t>(*sim_, lv.cap);
  lv.slots.fill(kEmpty);
  return lv;
}

bool KLevelHashTable::level_has_room(const Level& lv) const {
  // Accepts while post-insert occupancy stays <= r.
  return (lv.count + 1) * p_.upper_den <= uint64_t{p_.upper_num} * lv.cap;
}

std::optional<Location> KLevelHashTable::lookup(uint32_t key) {
  for (uint32_t i = 0; i < levels_.size(); ++i) {
    Level& lv = levels_[i];
    uint64_t s = home_slot(key, lv);
    for (;;) {
      uint32_t v = lv.slots.get(s);
      if (v == key) return Location{i, s};
      if (v == kEmpty) break;
      s = (s + 1) & (lv.cap - 1);
    }
  }
  return std::nullopt;
}

void KLevelHashTable::place(Level& lv, uint32_t key) {
  uint64_t s = home_slot(key, lv);
  for (;;) {
    uint32_t v = lv.slots.get(s);
    if (v == kEmpty) {
      lv.slots.set(s, key);
      lv.count++;
      return;
    }
    s = (s + 1) & (lv.cap - 1);
  }
}

bool KLevelHashTable::place_anywhere(uint32_t key) {
  for (auto& lv : levels_) {
    if (level_has_room(lv)) {
      place(lv, key);
      return true;
    }
  }
  return false;
}

void KLevelHashTable::insert(uint32_t key) {
  if (key == kEmpty) throw SimFault("key collides with the empty sentinel");
  if (!model_.insert(key).second)
    throw SimFault("insert of a key already present");
  if (!place_anywhere(key)) {
    grow();
    bool ok = place_anywhere(key);
    assert(ok);
    (void)ok;
  }
  count_++;
}

void KLevelHashTable::grow() {
  grows_++;
  levels_.push_back(make_level(levels_.back().cap_log2 + 1));
  Level doomed = std::move(levels_.front());
  levels_.erase(levels_.begin());
  for (uint64_t s = 0; s < doomed.cap; ++s) {
    uint32_t key = doomed.slots.get(s);
    if (key == kEmpty) continue;
    reinserts_++;
    if (reinsert_observer) reinsert_observer(key, true);
    bool ok = place_anywhere(key);
    if (!ok) throw SimFault("resize cascaded during grow");
  }
}

void KLevelHashTable::erase(uint32_t key, Location loc) {
  if (loc.level >= levels_.size()) throw SimFault("stale location");
  Level& lv = levels_[loc.level];
  if (lv.slots.get(loc.slot) != key) throw SimFault("stale location");
  model_.erase(key);

  // Backward-shift compaction of the probe chain.
  uint64_t mask = lv.cap - 1;
  uint64_t hole = loc.slot;
  uint64_t j = loc.slot;
  for (;;) {
    j = (j + 1) & mask;
    uint32_t v = lv.slots.get(j);
    if (v == kEmpty) break;
    uint64_t h = home_slot(v, lv);
    // v may move into the hole iff its home does not lie strictly
    // between the hole and its current position (cyclically).
    if (((j - h) & mask) >= ((j - hole) & mask)) {
      lv.slots.set(hole, v);
      hole = j;
    }
  }
  lv.slots.set(hole, kEmpty);
  lv.count--;
  count_--;
  maybe_shrink();
}

void KLevelHashTable::maybe_shrink() {
  // Overall occupancy below l, with the smallest level above the floor.
  if (count_ * p_.lower_den >= uint64_t{p_.lower_num} * total_capacity())
    return;
  if (levels_.front().cap_log2 <= p_.base_size_log2 + 1) return;

  shrinks_++;
  levels_.insert(levels_.begin(), make_level(levels_.front().cap_log2 - 1));
  Level doomed = std::move(levels_.back());
  levels_.pop_back();
  for (uint64_t s = 0; s < doomed.cap; ++s) {
    uint32_t key = doomed.slots.get(s);
    if (key == kEmpty) continue;
    reinserts_++;
    if (reinsert_observer) reinsert_observer(key, false);
    bool ok = place_anywhere(key);
    if (!ok) throw SimFault("resize cascaded during shrink");
  }
}

void KLevelHashTable::clear() {
  for (auto& lv : levels_) {
    lv.slots.fill(kEmpty);
    lv.count = 0;
  }
  count_ = 0;
  model_.clear();
}

double KLevelHashTable::occupancy() const {
  return static_cast<double>(count_) / static_cast<double>(total_capacity());
}

uint64_t KLevelHashTable::total_capacity() const {
  uint64_t total = 0;
  for (const auto& lv : levels_) total += lv.cap;
  return total;
}

}  // namespace wem

#include "wem/memsim.hpp"

#include <algorithm>
#include <bit>

namespace wem {

MemSim::MemSim(SimConfig cfg) : cfg_(cfg) {
  if (cfg_.line_bytes == 0 || (cfg_.line_bytes & (cfg_.line_bytes - 1)) != 0)
    throw SimFault("line_bytes must be a power of two");
  if (cfg_.capacity_lines < 2) throw SimFault("capacity_lines must be >= 2");
  line_shift_ = static_cast<uint32_t>(std::countr_zero(cfg_.line_bytes));

  if (cfg_.policy == Policy::SplitPool) {
    if (!(cfg_.split_fraction > 0.0 && cfg_.split_fraction < 1.0))
      throw SimFault("split_fraction must be in (0,1)");
    uint64_t read_pool = static_cast<uint64_t>(
        static_cast<double>(cfg_.capacity_lines) * cfg_.split_fraction);
    read_pool = std::clamp<uint64_t>(read_pool, 1, cfg_.capacity_lines - 1);
    pool_cap_[0] = read_pool;
    pool_cap_[1] = cfg_.capacity_lines - read_pool;
    pool_stats_.resize(2);
  } else {
    pool_cap_[0] = cfg_.capacity_lines;
    pool_cap_[1] = 0;
    pool_stats_.resize(1);
  }

  slots_.resize(cfg_.capacity_lines);
  prev_.assign(cfg_.capacity_lines, -1);
  next_.assign(cfg_.capacity_lines, -1);
  free_slots_.reserve(cfg_.capacity_lines);
  for (int32_t s = static_cast<int32_t>(cfg_.capacity_lines) - 1; s >= 0; --s)
    free_slots_.push_back(s);
}

ArrayHandle MemSim::alloc(uint64_t length, uint32_t elem_bytes) {
  if (elem_bytes == 0) throw SimFault("elem_bytes must be >= 1");
  uint64_t bytes = length * elem_bytes;
  uint64_t lines = (bytes + cfg_.line_bytes - 1) / cfg_.line_bytes;
  ArrayInfo info;
  info.base_line = next_line_;
  info.lines = lines;
  info.length = length;
  info.elem_bytes = elem_bytes;
  info.live = true;
  next_line_ += std::max<uint64_t>(lines, 1);  // bump, no reuse
  arrays_.push_back(info);
  line_slot_.resize(next_line_, -1);
  return ArrayHandle{static_cast<uint32_t>(arrays_.size() - 1)};
}

void MemSim::free_array(ArrayHandle h) {
  if (!h.valid() || h.id >= arrays_.size()) throw SimFault("bad array handle");
  ArrayInfo& a = arrays_[h.id];
  if (!a.live) throw SimFault("double free of tracked array");
  a.live = false;
  for (uint64_t line = a.base_line; line < a.base_line + a.lines; ++line) {
    int32_t s = line_slot_[line];
    if (s >= 0) evict_slot(s, /*count_write=*/false);
  }
  if (pinned_lines_ > 0) {
    auto lo = std::lower_bound(pin_marks_.begin(), pin_marks_.end(), a.base_line);
    auto hi = std::lower_bound(pin_marks_.begin(), pin_marks_.end(),
                               a.base_line + a.lines);
    pinned_lines_ -= static_cast<uint64_t>(hi - lo);
    pin_marks_.erase(lo, hi);
  }
}

void MemSim::pin_lines(ArrayHandle h, uint64_t first, uint64_t count) {
  if (cfg_.policy != Policy::StaticPin)
    throw SimFault("pin_lines requires the StaticPin policy");
  if (!h.valid() || h.id >= arrays_.size()) throw SimFault("bad array handle");
  const ArrayInfo& a = arrays_[h.id];
  if (!a.live) throw SimFault("pin on freed array");
  if (count == 0) return;
  if (first + count > a.length) throw SimFault("pin range out of bounds");

  uint64_t lo = a.base_line + (first * a.elem_bytes) / cfg_.line_bytes;
  uint64_t hi = a.base_line + ((first + count) * a.elem_bytes - 1) / cfg_.line_bytes;
  std::vector<uint64_t> fresh;
  for (uint64_t line = lo; line <= hi; ++line)
    if (!std::binary_search(pin_marks_.begin(), pin_marks_.end(), line))
      fresh.push_back(line);
  if (pinned_lines_ + fresh.size() > cfg_.capacity_lines - 1)
    throw SimFault("pin set would leave no unpinned line");

  pin_marks_.insert(pin_marks_.end(), fresh.begin(), fresh.end());
  std::sort(pin_marks_.begin(), pin_marks_.end());
  pinned_lines_ += fresh.size();
  for (uint64_t line : fresh) {
    int32_t s = line_slot_[line];
    if (s >= 0 && !slots_[s].pinned) {
      detach(s);
      slots_[s].pinned = true;
    }
  }
}

int MemSim::pool_of_insert(Access kind) const {
  if (cfg_.policy == Policy::SplitPool)
    return kind == Access::Read ? 0 : 1;
  return 0;
}

void MemSim::detach(int32_t s) {
  int pool = slots_[s].pool;
  int32_t p = prev_[s], n = next_[s];
  if (p >= 0) next_[p] = n; else head_[pool] = n;
  if (n >= 0) prev_[n] = p; else tail_[pool] = p;
  prev_[s] = next_[s] = -1;
}

void MemSim::push_mru(int32_t s) {
  int pool = slots_[s].pool;
  prev_[s] = -1;
  next_[s] = head_[pool];
  if (head_[pool] >= 0) prev_[head_[pool]] = s;
  head_[pool] = s;
  if (tail_[pool] < 0) tail_[pool] = s;
}

void MemSim::evict_slot(int32_t s, bool count_write) {
  const Slot& sl = slots_[s];
  if (count_write && sl.dirty) {
    pool_stats_[cfg_.policy == Policy::SplitPool ? sl.pool : 0].write_transfers++;
    if (trace_) *trace_ << "W " << sl.line << '\n';
  }
  if (!sl.pinned) detach(s);
  line_slot_[sl.line] = -1;
  pool_size_[sl.pool]--;
  resident_--;
  slots_[s] = Slot{};
  free_slots_.push_back(s);
}

void MemSim::load_line(uint64_t line, Access kind) {
  int pool = pool_of_insert(kind);
  bool pinned = pinned_lines_ > 0 &&
                std::binary_search(pin_marks_.begin(), pin_marks_.end(), line);

  if (pool_size_[pool] >= pool_cap_[pool]) {
    int32_t victim = tail_[pool];
    if (victim < 0) throw SimFault("no evictable line in target pool");
    evict_slot(victim, /*count_write=*/true);
  }

  int32_t s = free_slots_.back();
  free_slots_.pop_back();
  slots_[s].line = line;
  slots_[s].used = true;
  slots_[s].dirty = (kind == Access::Write);
  slots_[s].pinned = pinned;
  slots_[s].pool = static_cast<uint8_t>(pool);
  line_slot_[line] = s;
  pool_size_[pool]++;
  resident_++;
  if (!pinned) push_mru(s);

  pool_stats_[cfg_.policy == Policy::SplitPool ? pool : 0].read_transfers++;
  if (trace_) *trace_ << "R " << line << '\n';
}

void MemSim::touch(uint64_t line, Access kind) {
  int32_t s = line_slot_[line];
  if (s >= 0) {  // hit: free, refresh recency in its own pool
    if (kind == Access::Write) slots_[s].dirty = true;
    if (!slots_[s].pinned && head_[slots_[s].pool] != s) {
      detach(s);
      push_mru(s);
    }
    return;
  }
  load_line(line, kind);
}

void MemSim::access(ArrayHandle h, uint64_t index, Access kind) {
  if (!h.valid() || h.id >= arrays_.size()) throw SimFault("bad array handle");
  const ArrayInfo& a = arrays_[h.id];
  if (!a.live) throw SimFault("access to freed array");
  if (index >= a.length) throw SimFault("array index out of range");

  uint64_t first_byte = index * a.elem_bytes;
  uint64_t last_byte = first_byte + a.elem_bytes - 1;
  uint64_t lo = a.base_line + (first_byte >> line_shift_);
  uint64_t hi = a.base_line + (last_byte >> line_shift_);
  for (uint64_t line = lo; line <= hi; ++line) touch(line, kind);
}

IoStats MemSim::flush() {
  for (int32_t s = 0; s < static_cast<int32_t>(slots_.size()); ++s)
    if (slots_[s].used) evict_slot(s, /*count_write=*/true);
  return stats();
}

void MemSim::reset() {
  for (int32_t s = 0; s < static_cast<int32_t>(slots_.size()); ++s)
    if (slots_[s].used) evict_slot(s, /*count_write=*/false);
  for (auto& st : pool_stats_) st = IoStats{};
}

IoStats MemSim::stats() const {
  IoStats total;
  for (const auto& st : pool_stats_) total += st;
  return total;
}

uint64_t MemSim::resident_lines_in_pool(int pool) const {
  return pool_size_[pool];
}

}  // namespace wem

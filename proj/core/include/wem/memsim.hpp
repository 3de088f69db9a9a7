#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace wem {

// Single-level cache simulator for an asymmetric-memory cost model: a small
// fast memory of capacity_lines cache lines in front of an unbounded slow
// memory. Read transfers (RT) count lines loaded on a miss, write transfers
// (WT) count dirty lines written back on eviction or final flush. The
// asymmetric I/O cost of a run is RT + omega * WT.
//
// Only accesses to tracked arrays drive the model; loop variables, scalars
// and the call stack of the client algorithm are ignored.

enum class Policy { Classic, SplitPool, StaticPin };
enum class Access { Read, Write };

struct SimConfig {
  uint32_t line_bytes = 64;
  uint32_t capacity_lines = 10000;
  Policy policy = Policy::Classic;
  double split_fraction = 0.5;  // SplitPool: share of lines in the read pool
};

struct IoStats {
  uint64_t read_transfers = 0;
  uint64_t write_transfers = 0;

  IoStats& operator+=(const IoStats& o) {
    read_transfers += o.read_transfers;
    write_transfers += o.write_transfers;
    return *this;
  }
  friend IoStats operator-(IoStats a, const IoStats& b) {
    a.read_transfers -= b.read_transfers;
    a.write_transfers -= b.write_transfers;
    return a;
  }
  friend bool operator==(const IoStats&, const IoStats&) = default;
};

inline double io_cost(const IoStats& s, double omega) {
  return static_cast<double>(s.read_transfers) +
         omega * static_cast<double>(s.write_transfers);
}

class SimFault : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct ArrayHandle {
  uint32_t id = UINT32_MAX;
  bool valid() const { return id != UINT32_MAX; }
};

class MemSim {
 public:
  explicit MemSim(SimConfig cfg);

  // Fresh line-aligned address range; allocation itself is free.
  ArrayHandle alloc(uint64_t length, uint32_t elem_bytes);

  // Resident lines are discarded without write-backs: freed memory has no
  // persistence obligation. The address range is retired, never reused.
  void free_array(ArrayHandle h);

  void access(ArrayHandle h, uint64_t index, Access kind);

  // StaticPin only: lines covering elements [first, first+count) load on
  // first access and are never evicted. At least one unpinned line must
  // remain.
  void pin_lines(ArrayHandle h, uint64_t first, uint64_t count);

  // Write back every resident dirty line, empty the cache, return the
  // cumulative stats over all pools.
  IoStats flush();

  // Counters zeroed and cache emptied; tracked arrays stay allocated.
  void reset();

  IoStats stats() const;                 // cumulative, pools summed
  IoStats pool_stats(int pool) const { return pool_stats_.at(pool); }
  const SimConfig& config() const { return cfg_; }

  uint64_t resident_lines() const { return resident_; }
  uint64_t resident_lines_in_pool(int pool) const;
  uint64_t pinned_line_count() const { return pinned_lines_; }
  bool line_resident(uint64_t line) const {
    return line < line_slot_.size() && line_slot_[line] >= 0;
  }

  uint64_t array_length(ArrayHandle h) const { return arrays_.at(h.id).length; }
  uint64_t array_base_line(ArrayHandle h) const { return arrays_.at(h.id).base_line; }

  // Optional transfer log, one line per transfer: "R <line>" / "W <line>".
  void set_trace(std::ostream* os) { trace_ = os; }

 private:
  struct ArrayInfo {
    uint64_t base_line = 0;
    uint64_t lines = 0;
    uint64_t length = 0;
    uint32_t elem_bytes = 0;
    bool live = false;
  };

  struct Slot {
    uint64_t line = 0;
    bool used = false;
    bool dirty = false;
    bool pinned = false;
    uint8_t pool = 0;
  };

  int pool_of_insert(Access kind) const;
  void touch(uint64_t line, Access kind);
  void load_line(uint64_t line, Access kind);
  void evict_slot(int32_t s, bool count_write);
  void detach(int32_t s);      // unlink from its pool's LRU list
  void push_mru(int32_t s);    // link at MRU end of its pool's list

  SimConfig cfg_;
  uint32_t line_shift_;
  uint64_t next_line_ = 0;

  std::vector<ArrayInfo> arrays_;
  std::vector<int32_t> line_slot_;  // global line id -> slot, -1 if absent

  // Slot storage with one intrusive LRU list per pool (head = MRU).
  std::vector<Slot> slots_;
  std::vector<int32_t> prev_, next_;
  std::vector<int32_t> free_slots_;
  int32_t head_[2] = {-1, -1};
  int32_t tail_[2] = {-1, -1};
  uint64_t pool_size_[2] = {0, 0};  // resident lines per pool (incl. pinned)
  uint64_t pool_cap_[2] = {0, 0};

  std::vector<IoStats> pool_stats_;
  uint64_t resident_ = 0;
  uint64_t pinned_lines_ = 0;        // pinned lines declared (resident or not)
  std::vector<uint64_t> pin_marks_;  // sorted unique pinned line ids
  std::ostream* trace_ = nullptr;
};

// An array in simulated memory. Element reads and writes report to the
// simulator; peek() bypasses it for result extraction and test assertions.
template <typename T>
class TypedArray {
 public:
  TypedArray() = default;
  TypedArray(MemSim& sim, uint64_t n)
      : sim_(&sim), data_(n), h_(sim.alloc(n, sizeof(T))) {}

  TypedArray(TypedArray&& o) noexcept { *this = std::move(o); }
  TypedArray& operator=(TypedArray&& o) noexcept {
    release();
    sim_ = o.sim_;
    data_ = std::move(o.data_);
    h_ = o.h_;
    o.sim_ = nullptr;
    o.h_ = ArrayHandle{};
    return *this;
  }
  TypedArray(const TypedArray&) = delete;
  TypedArray& operator=(const TypedArray&) = delete;
  ~TypedArray() { release(); }

  T get(uint64_t i) const {
    sim_->access(h_, i, Access::Read);
    return data_[i];
  }
  void set(uint64_t i, const T& v) {
    sim_->access(h_, i, Access::Write);
    data_[i] = v;
  }
  void fill(const T& v) {
    for (uint64_t i = 0; i < data_.size(); ++i) set(i, v);
  }

  const T& peek(uint64_t i) const { return data_[i]; }
  uint64_t size() const { return data_.size(); }
  bool valid() const { return sim_ != nullptr && h_.valid(); }
  ArrayHandle handle() const { return h_; }
  MemSim& sim() const { return *sim_; }

  void pin_all() { sim_->pin_lines(h_, 0, data_.size()); }

  void release() {
    if (valid()) sim_->free_array(h_);
    sim_ = nullptr;
    h_ = ArrayHandle{};
    data_.clear();
  }

 private:
  MemSim* sim_ = nullptr;
  std::vector<T> data_;
  ArrayHandle h_;
};

}  // namespace wem

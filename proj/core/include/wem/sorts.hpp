#pragma once

#include <cstdint>
#include <vector>

#include "wem/memsim.hpp"
#include "wem/rng.hpp"

namespace wem {

// Comparison sorts instrumented for transfer counts. Keys are doubles in
// the leading 8 bytes of each record; records are 8/16/32/64 bytes in
// direct mode. Indirect mode sorts 8-byte references into a payload region
// of variable-length records (mean 64 bytes, line-packed), dereferencing
// the payload for every key comparison.

enum class SortAlgo { Quicksort, Mergesort, BstSort, Samplesort };

struct SortStats {
  IoStats io;               // includes the final flush
  uint64_t comparisons = 0;
  uint64_t elements = 0;

  double rt_per_elem() const {
    return static_cast<double>(io.read_transfers) / static_cast<double>(elements);
  }
  double wt_per_elem() const {
    return static_cast<double>(io.write_transfers) / static_cast<double>(elements);
  }
  double comp_per_elem() const {
    return static_cast<double>(comparisons) / static_cast<double>(elements);
  }
};

template <uint32_t Bytes>
struct Record {
  double key;
  char pad[Bytes - 8];
};
template <>
struct Record<8> {
  double key;
};

// Fill with i.i.d. uniform doubles; generation traffic is the caller's to
// discard (reset before measuring).
template <class Elem>
void fill_random(TypedArray<Elem>& a, uint64_t seed);

struct IndirectInput {
  TypedArray<uint64_t> refs;     // word index of each record's key
  TypedArray<uint64_t> payload;  // 8-byte words, records line-packed
};

// Variable-length records, uniform 32..96 bytes, each starting on a line
// boundary; the leading word is the sort key.
IndirectInput make_indirect_input(MemSim& sim, uint64_t n, uint64_t seed);

template <class Elem>
SortStats quicksort(MemSim& sim, TypedArray<Elem>& a, uint64_t seed);
template <class Elem>
SortStats mergesort(MemSim& sim, TypedArray<Elem>& a);
template <class Elem>
SortStats bst_sort(MemSim& sim, TypedArray<Elem>& a, uint64_t seed);
template <class Elem>
SortStats samplesort(MemSim& sim, TypedArray<Elem>& a, uint64_t seed);

SortStats sort_indirect(MemSim& sim, SortAlgo algo, IndirectInput& in,
                        uint64_t seed);

namespace detail {
// One samplesort distribution round over [0,n), exposed for the per-round
// traffic bound test. Returns comparisons.
uint64_t samplesort_one_round(MemSim& sim, TypedArray<Record<8>>& src,
                              TypedArray<Record<8>>& dst, uint64_t seed);
}  // namespace detail

}  // namespace wem

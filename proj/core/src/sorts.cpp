#include "wem/sorts.hpp"

#include <algorithm>
#include <cassert>

namespace wem {

namespace {

template <class Elem>
struct DirectPol {
  using Val = Elem;
  using Key = double;
  Key key(const Val& v) const { return v.key; }
};

struct IndirectPol {
  TypedArray<uint64_t>* payload;
  using Val = uint64_t;
  using Key = uint64_t;
  Key key(const Val& r) const { return payload->get(r); }  // tracked deref
};

template <class Val>
struct BstNode {
  Val val;
  uint32_t l, r;
};

constexpr uint32_t kNone = 0xFFFFFFFFu;
constexpr uint64_t kInsertionCutoff = 16;

template <class Policy>
class Engine {
 public:
  using Val = typename Policy::Val;
  using Key = typename Policy::Key;
  using Arr = TypedArray<Val>;

  Engine(MemSim& sim, Policy pol) : sim_(sim), pol_(pol) {}

  uint64_t comparisons() const { return comps_; }

  Key key(const Val& v) { return pol_.key(v); }
  bool lt(Key a, Key b) {
    comps_++;
    return a < b;
  }

  void insertion_sort(Arr& a, uint64_t lo, uint64_t hi) {
    for (uint64_t i = lo + 1; i < hi; ++i) {
      Val v = a.get(i);
      Key kv = key(v);
      uint64_t j = i;
      while (j > lo) {
        Val u = a.get(j - 1);
        if (!lt(kv, key(u))) break;
        a.set(j, u);
        --j;
      }
      if (j != i) a.set(j, v);
    }
  }

  void quicksort(Arr& a, uint64_t lo, uint64_t hi, Rng& rng) {
    while (hi - lo > kInsertionCutoff) {
      Key p = median_of_three(a, lo, hi, rng);
      // Single-scan three-way partition.
      int64_t lt_end = static_cast<int64_t>(lo);
      int64_t i = static_cast<int64_t>(lo);
      int64_t gt = static_cast<int64_t>(hi) - 1;
      while (i <= gt) {
        Val v = a.get(i);
        Key kv = key(v);
        if (lt(kv, p)) {
          if (lt_end != i) {
            Val u = a.get(lt_end);
            a.set(lt_end, v);
            a.set(i, u);
          }
          ++lt_end;
          ++i;
        } else if (lt(p, kv)) {
          Val u = a.get(gt);
          a.set(gt, v);
          a.set(i, u);
          --gt;
        } else {
          ++i;
        }
      }
      // Recurse into the smaller side, iterate on the larger.
      uint64_t l1 = lo, h1 = static_cast<uint64_t>(lt_end);
      uint64_t l2 = static_cast<uint64_t>(gt + 1), h2 = hi;
      if (h1 - l1 < h2 - l2) {
        if (h1 > l1 + 1) quicksort(a, l1, h1, rng);
        lo = l2;
        hi = h2;
      } else {
        if (h2 > l2 + 1) quicksort(a, l2, h2, rng);
        lo = l1;
        hi = h1;
      }
      if (hi <= lo + 1) return;
    }
    insertion_sort(a, lo, hi);
  }

  void mergesort(Arr& a, Arr& aux, uint64_t lo, uint64_t hi, bool to_aux) {
    if (hi - lo <= kInsertionCutoff) {
      insertion_sort(a, lo, hi);
      if (to_aux)
        for (uint64_t i = lo; i < hi; ++i) aux.set(i, a.get(i));
      return;
    }
    uint64_t mid = lo + (hi - lo) / 2;
    mergesort(a, aux, lo, mid, !to_aux);
    mergesort(a, aux, mid, hi, !to_aux);
    Arr& src = to_aux ? a : aux;
    Arr& dst = to_aux ? aux : a;
    merge(src, dst, lo, mid, hi);
  }

  void merge(Arr& src, Arr& dst, uint64_t lo, uint64_t mid, uint64_t hi) {
    uint64_t i = lo, j = mid, k = lo;
    Val vi{}, vj{};
    Key ki{}, kj{};
    if (i < mid) {
      vi = src.get(i);
      ki = key(vi);
    }
    if (j < hi) {
      vj = src.get(j);
      kj = key(vj);
    }
    while (i < mid && j < hi) {
      if (lt(kj, ki)) {
        dst.set(k++, vj);
        if (++j < hi) {
          vj = src.get(j);
          kj = key(vj);
        }
      } else {
        dst.set(k++, vi);
        if (++i < mid) {
          vi = src.get(i);
          ki = key(vi);
        }
      }
    }
    while (i < mid) {
      dst.set(k++, src.get(i));
      ++i;
    }
    while (j < hi) {
      dst.set(k++, src.get(j));
      ++j;
    }
  }

  // Unrotated BST built in two passes: hashed random-index insertions with a
  // flag array, then the leftovers in input order.
  void bst_sort(Arr& a, uint64_t seed) {
    uint64_t n = a.size();
    if (n < 2) return;
    TypedArray<BstNode<Val>> nodes(sim_, n);
    TypedArray<uint8_t> flags(sim_, n);
    flags.fill(0);
    uint32_t root = kNone;
    uint64_t next = 0;

    auto insert = [&](const Val& v) {
      uint32_t idx = static_cast<uint32_t>(next++);
      nodes.set(idx, BstNode<Val>{v, kNone, kNone});
      if (root == kNone) {
        root = idx;
        return;
      }
      Key kv = key(v);
      uint32_t cur = root;
      for (;;) {
        BstNode<Val> node = nodes.get(cur);
        uint32_t* child;
        if (lt(kv, key(node.val))) {
          child = &node.l;
        } else if (lt(key(node.val), kv)) {
          child = &node.r;
        } else {
          child = &node.r;  // duplicates chain right
        }
        if (*child == kNone) {
          *child = idx;
          nodes.set(cur, node);
          return;
        }
        cur = *child;
      }
    };

    for (uint64_t t = 0; t < n; ++t) {
      uint64_t idx = mix64(seed ^ (t * 0x9e3779b97f4a7c15ull)) % n;
      if (flags.get(idx) != 0) continue;
      insert(a.get(idx));
      flags.set(idx, 1);
    }
    for (uint64_t idx = 0; idx < n; ++idx) {
      if (flags.get(idx) != 0) continue;
      insert(a.get(idx));
    }

    // In-order traversal back into the input array.
    uint64_t out = 0;
    uint32_t cur = root;
    std::vector<BstNode<Val>> path;
    while (cur != kNone || !path.empty()) {
      while (cur != kNone) {
        path.push_back(nodes.get(cur));
        cur = path.back().l;
      }
      BstNode<Val> node = path.back();
      path.pop_back();
      a.set(out++, node.val);
      cur = node.r;
    }
    flags.release();
    nodes.release();
  }

  struct LeafRange {
    uint64_t lo, hi;
    bool in_aux;
  };

  // Pivot payloads must stay cached during the search pass, so indirect
  // mode samples at most cache_lines / c_prime keys (c_prime = 2) and
  // promotes them all to pivots instead of oversampling.
  uint64_t indirect_sample_budget(uint64_t span) const {
    const SimConfig& cfg = sim_.config();
    uint64_t per_line = std::max<uint64_t>(1, cfg.line_bytes / sizeof(Val));
    uint64_t budget = std::max<uint64_t>(1, cfg.capacity_lines / 2);
    return std::max<uint64_t>(1, std::min(budget, span / per_line));
  }

  bool samplesort_base(uint64_t span, bool indirect) const {
    const SimConfig& cfg = sim_.config();
    uint64_t m_bytes = uint64_t{cfg.capacity_lines} * cfg.line_bytes;
    uint64_t bytes = indirect ? span * uint64_t{cfg.line_bytes}  // payload
                              : span * sizeof(Val);
    return bytes <= m_bytes || span <= kInsertionCutoff;
  }

  // One counting-then-distributing round of [lo,hi) from src into dst.
  // Direct mode searches twice; indirect mode stores the bucket label.
  // Returns the bucket boundaries in dst.
  std::vector<uint64_t> distribute(Arr& src, Arr& dst, uint64_t lo, uint64_t hi,
                                   bool indirect, TypedArray<uint32_t>* labels,
                                   Rng& rng) {
    uint64_t span = hi - lo;
    const SimConfig& cfg = sim_.config();
    uint64_t per_line = std::max<uint64_t>(1, cfg.line_bytes / sizeof(Val));
    uint64_t n_samples;
    if (indirect) {
      n_samples = indirect_sample_budget(span);
    } else {
      uint64_t m_elems = uint64_t{cfg.capacity_lines} * cfg.line_bytes / sizeof(Val);
      n_samples = std::max<uint64_t>(
          per_line, std::min(m_elems / 2, std::max<uint64_t>(1, span / per_line)));
    }

    TypedArray<Val> samples(sim_, n_samples);
    for (uint64_t i = 0; i < n_samples; ++i)
      samples.set(i, src.get(lo + rng.below(span)));
    quicksort(samples, 0, n_samples, rng);

    // Every per_line-th sample in direct mode, every sample in indirect
    // mode; drop duplicates.
    uint64_t step = indirect ? 1 : per_line;
    TypedArray<Val> pivots(sim_, std::max<uint64_t>(1, n_samples / step));
    uint64_t n_pivots = 0;
    bool have_last = false;
    Key last{};
    for (uint64_t i = step - 1; i < n_samples; i += step) {
      Val v = samples.get(i);
      Key k = key(v);
      if (have_last && !lt(last, k)) continue;
      pivots.set(n_pivots++, v);
      last = k;
      have_last = true;
    }
    samples.release();
    uint64_t n_buckets = n_pivots + 1;

    // Keys at or below a pivot fall in the bucket to its left.
    auto bucket_of = [&](Key k) -> uint64_t {
      uint64_t b_lo = 0, b_hi = n_pivots;
      while (b_lo < b_hi) {
        uint64_t mid = b_lo + (b_hi - b_lo) / 2;
        Key pk = key(pivots.get(mid));
        if (lt(k, pk)) {
          b_hi = mid;
        } else if (lt(pk, k)) {
          b_lo = mid + 1;
        } else {
          return mid;
        }
      }
      return b_lo;
    };

    TypedArray<uint64_t> counters(sim_, n_buckets);
    counters.fill(0);
    for (uint64_t i = lo; i < hi; ++i) {
      Val v = src.get(i);
      uint64_t b = bucket_of(key(v));
      if (indirect) labels->set(i, static_cast<uint32_t>(b));
      counters.set(b, counters.get(b) + 1);
    }

    std::vector<uint64_t> bounds(n_buckets + 1);
    TypedArray<uint64_t> offsets(sim_, n_buckets);
    uint64_t run = lo;
    for (uint64_t b = 0; b < n_buckets; ++b) {
      offsets.set(b, run);
      bounds[b] = run;
      run += counters.get(b);
    }
    bounds[n_buckets] = run;

    for (uint64_t i = lo; i < hi; ++i) {
      Val v = src.get(i);
      uint64_t b = indirect ? labels->get(i) : bucket_of(key(v));
      uint64_t at = offsets.get(b);
      offsets.set(b, at + 1);
      dst.set(at, v);
    }

    offsets.release();
    counters.release();
    pivots.release();
    return bounds;
  }

  void samplesort_rec(Arr& a, Arr& aux, uint64_t lo, uint64_t hi, bool in_aux,
                      bool indirect, TypedArray<uint32_t>* labels, Rng& rng,
                      std::vector<LeafRange>& leaves) {
    Arr& cur = in_aux ? aux : a;
    if (samplesort_base(hi - lo, indirect)) {
      quicksort(cur, lo, hi, rng);
      leaves.push_back({lo, hi, in_aux});
      return;
    }
    Arr& dst = in_aux ? a : aux;
    std::vector<uint64_t> bounds =
        distribute(cur, dst, lo, hi, indirect, labels, rng);
    for (size_t b = 0; b + 1 < bounds.size(); ++b)
      if (bounds[b + 1] > bounds[b])
        samplesort_rec(a, aux, bounds[b], bounds[b + 1], !in_aux, indirect,
                       labels, rng, leaves);
  }

  void samplesort(Arr& a, uint64_t seed, bool indirect,
                  TypedArray<uint32_t>* labels) {
    uint64_t n = a.size();
    Rng rng(seed);
    if (samplesort_base(n, indirect)) {  // whole input fits: plain quicksort
      quicksort(a, 0, n, rng);
      return;
    }
    Arr aux(sim_, n);
    std::vector<LeafRange> leaves;
    samplesort_rec(a, aux, 0, n, false, indirect, labels, rng, leaves);
    for (const LeafRange& leaf : leaves)
      if (leaf.in_aux)
        for (uint64_t i = leaf.lo; i < leaf.hi; ++i) a.set(i, aux.get(i));
    aux.release();
  }

 private:
  Key median_of_three(Arr& a, uint64_t lo, uint64_t hi, Rng& rng) {
    uint64_t span = hi - lo;
    Key k0 = key(a.get(lo + rng.below(span)));
    Key k1 = key(a.get(lo + rng.below(span)));
    Key k2 = key(a.get(lo + rng.below(span)));
    if (lt(k1, k0)) std::swap(k0, k1);
    if (lt(k2, k1)) {
      std::swap(k1, k2);
      if (lt(k1, k0)) std::swap(k0, k1);
    }
    return k1;
  }

  MemSim& sim_;
  Policy pol_;
  uint64_t comps_ = 0;
};

template <class Policy>
SortStats finish(MemSim& sim, IoStats before, uint64_t comps, uint64_t n) {
  SortStats st;
  st.io = sim.flush() - before;
  st.comparisons = comps;
  st.elements = n;
  return st;
}

}  // namespace

template <class Elem>
void fill_random(TypedArray<Elem>& a, uint64_t seed) {
  Rng rng(seed);
  for (uint64_t i = 0; i < a.size(); ++i) {
    Elem e{};
    e.key = rng.uniform01();
    a.set(i, e);
  }
}

template <class Elem>
SortStats quicksort(MemSim& sim, TypedArray<Elem>& a, uint64_t seed) {
  IoStats before = sim.stats();
  Engine<DirectPol<Elem>> eng(sim, {});
  Rng rng(seed);
  if (a.size() > 1) eng.quicksort(a, 0, a.size(), rng);
  return finish<DirectPol<Elem>>(sim, before, eng.comparisons(), a.size());
}

template <class Elem>
SortStats mergesort(MemSim& sim, TypedArray<Elem>& a) {
  IoStats before = sim.stats();
  Engine<DirectPol<Elem>> eng(sim, {});
  if (a.size() > 1) {
    TypedArray<Elem> aux(sim, a.size());
    eng.mergesort(a, aux, 0, a.size(), false);
    aux.release();
  }
  return finish<DirectPol<Elem>>(sim, before, eng.comparisons(), a.size());
}

template <class Elem>
SortStats bst_sort(MemSim& sim, TypedArray<Elem>& a, uint64_t seed) {
  IoStats before = sim.stats();
  Engine<DirectPol<Elem>> eng(sim, {});
  eng.bst_sort(a, seed);
  return finish<DirectPol<Elem>>(sim, before, eng.comparisons(), a.size());
}

template <class Elem>
SortStats samplesort(MemSim& sim, TypedArray<Elem>& a, uint64_t seed) {
  IoStats before = sim.stats();
  Engine<DirectPol<Elem>> eng(sim, {});
  if (a.size() > 1) eng.samplesort(a, seed, false, nullptr);
  return finish<DirectPol<Elem>>(sim, before, eng.comparisons(), a.size());
}

IndirectInput make_indirect_input(MemSim& sim, uint64_t n, uint64_t seed) {
  Rng rng(seed);
  const uint32_t line_words = sim.config().line_bytes / 8;
  // Record lengths uniform in [32, 96] bytes, rounded up to whole lines.
  std::vector<uint64_t> starts(n);
  uint64_t word = 0;
  for (uint64_t i = 0; i < n; ++i) {
    starts[i] = word;
    uint64_t bytes = 32 + rng.below(65);
    uint64_t lines = (bytes + sim.config().line_bytes - 1) / sim.config().line_bytes;
    word += lines * line_words;
  }
  IndirectInput in;
  in.payload = TypedArray<uint64_t>(sim, word);
  for (uint64_t i = 0; i < n; ++i) in.payload.set(starts[i], rng.next());
  in.refs = TypedArray<uint64_t>(sim, n);
  // Records are laid out in a shuffled order so references are random.
  std::vector<uint64_t> order(n);
  for (uint64_t i = 0; i < n; ++i) order[i] = i;
  for (uint64_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  for (uint64_t i = 0; i < n; ++i) in.refs.set(i, starts[order[i]]);
  return in;
}

SortStats sort_indirect(MemSim& sim, SortAlgo algo, IndirectInput& in,
                        uint64_t seed) {
  IoStats before = sim.stats();
  Engine<IndirectPol> eng(sim, IndirectPol{&in.payload});
  uint64_t n = in.refs.size();
  Rng rng(seed);
  switch (algo) {
    case SortAlgo::Quicksort:
      if (n > 1) eng.quicksort(in.refs, 0, n, rng);
      break;
    case SortAlgo::Mergesort:
      if (n > 1) {
        TypedArray<uint64_t> aux(sim, n);
        eng.mergesort(in.refs, aux, 0, n, false);
        aux.release();
      }
      break;
    case SortAlgo::BstSort:
      eng.bst_sort(in.refs, seed);
      break;
    case SortAlgo::Samplesort:
      if (n > 1) {
        TypedArray<uint32_t> labels(sim, n);
        eng.samplesort(in.refs, seed, true, &labels);
        labels.release();
      }
      break;
  }
  SortStats st;
  st.io = sim.flush() - before;
  st.comparisons = eng.comparisons();
  st.elements = n;
  return st;
}

namespace detail {
uint64_t samplesort_one_round(MemSim& sim, TypedArray<Record<8>>& src,
                              TypedArray<Record<8>>& dst, uint64_t seed) {
  Engine<DirectPol<Record<8>>> eng(sim, {});
  Rng rng(seed);
  eng.distribute(src, dst, 0, src.size(), false, nullptr, rng);
  return eng.comparisons();
}
}  // namespace detail

template void fill_random<Record<8>>(TypedArray<Record<8>>&, uint64_t);
template void fill_random<Record<16>>(TypedArray<Record<16>>&, uint64_t);
template void fill_random<Record<32>>(TypedArray<Record<32>>&, uint64_t);
template void fill_random<Record<64>>(TypedArray<Record<64>>&, uint64_t);

#define WEM_INSTANTIATE_SORTS(E)                                     \
  template SortStats quicksort<E>(MemSim&, TypedArray<E>&, uint64_t); \
  template SortStats mergesort<E>(MemSim&, TypedArray<E>&);           \
  template SortStats bst_sort<E>(MemSim&, TypedArray<E>&, uint64_t);  \
  template SortStats samplesort<E>(MemSim&, TypedArray<E>&, uint64_t);

WEM_INSTANTIATE_SORTS(Record<8>)
WEM_INSTANTIATE_SORTS(Record<16>)
WEM_INSTANTIATE_SORTS(Record<32>)
WEM_INSTANTIATE_SORTS(Record<64>)
#undef WEM_INSTANTIATE_SORTS

}  // namespace wem

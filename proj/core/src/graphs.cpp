#include "wem/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include "wem/rng.hpp"

namespace wem {

namespace {

constexpr uint32_t kNoPos = 0xFFFFFFFFu;

Graph build_csr(MemSim& sim, uint32_t n,
                std::vector<std::pair<uint32_t, uint32_t>>& dir) {
  // dir holds both directions of every undirected edge.
  std::sort(dir.begin(), dir.end());
  dir.erase(std::unique(dir.begin(), dir.end()), dir.end());

  Graph g;
  g.n = n;
  g.m = dir.size() / 2;
  g.offsets = TypedArray<uint32_t>(sim, n + 1);
  g.targets = TypedArray<uint32_t>(sim, dir.size());
  uint64_t e = 0;
  for (uint32_t v = 0; v < n; ++v) {
    g.offsets.set(v, static_cast<uint32_t>(e));
    while (e < dir.size() && dir[e].first == v) {
      g.targets.set(e, dir[e].second);
      ++e;
    }
  }
  g.offsets.set(n, static_cast<uint32_t>(e));
  return g;
}

}  // namespace

Graph from_edges(MemSim& sim, uint32_t n,
                 const std::vector<std::pair<uint32_t, uint32_t>>& edges) {
  std::vector<std::pair<uint32_t, uint32_t>> dir;
  dir.reserve(edges.size() * 2);
  for (auto [a, b] : edges) {
    if (a == b) continue;  // self-loops dropped
    if (a >= n || b >= n) throw SimFault("edge endpoint out of range");
    dir.emplace_back(a, b);
    dir.emplace_back(b, a);
  }
  return build_csr(sim, n, dir);
}

Graph gen_grid2d(MemSim& sim, uint32_t width, uint32_t height) {
  if (width == 0 || height == 0) throw SimFault("grid sides must be positive");
  uint64_t n64 = uint64_t{width} * height;
  if (n64 > 0x7FFFFFFFull) throw SimFault("grid too large");
  uint32_t n = static_cast<uint32_t>(n64);

  Graph g;
  g.n = n;
  g.m = uint64_t{width - 1} * height + uint64_t{width} * (height - 1);
  g.offsets = TypedArray<uint32_t>(sim, n + 1);
  g.targets = TypedArray<uint32_t>(sim, 2 * g.m);
  uint64_t e = 0;
  for (uint32_t y = 0; y < height; ++y) {
    for (uint32_t x = 0; x < width; ++x) {
      uint32_t v = y * width + x;
      g.offsets.set(v, static_cast<uint32_t>(e));
      if (y > 0) g.targets.set(e++, v - width);
      if (x > 0) g.targets.set(e++, v - 1);
      if (x + 1 < width) g.targets.set(e++, v + 1);
      if (y + 1 < height) g.targets.set(e++, v + width);
    }
  }
  g.offsets.set(n, static_cast<uint32_t>(e));
  return g;
}

Graph gen_grid3d(MemSim& sim, uint32_t sx, uint32_t sy, uint32_t sz) {
  if (sx == 0 || sy == 0 || sz == 0) throw SimFault("grid sides must be positive");
  uint64_t n64 = uint64_t{sx} * sy * sz;
  if (n64 > 0x7FFFFFFFull) throw SimFault("grid too large");
  uint32_t n = static_cast<uint32_t>(n64);

  Graph g;
  g.n = n;
  g.m = uint64_t{sx - 1} * sy * sz + uint64_t{sx} * (sy - 1) * sz +
        uint64_t{sx} * sy * (sz - 1);
  g.offsets = TypedArray<uint32_t>(sim, n + 1);
  g.targets = TypedArray<uint32_t>(sim, 2 * g.m);
  uint64_t e = 0;
  uint32_t plane = sx * sy;
  for (uint32_t z = 0; z < sz; ++z) {
    for (uint32_t y = 0; y < sy; ++y) {
      for (uint32_t x = 0; x < sx; ++x) {
        uint32_t v = z * plane + y * sx + x;
        g.offsets.set(v, static_cast<uint32_t>(e));
        if (z > 0) g.targets.set(e++, v - plane);
        if (y > 0) g.targets.set(e++, v - sx);
        if (x > 0) g.targets.set(e++, v - 1);
        if (x + 1 < sx) g.targets.set(e++, v + 1);
        if (y + 1 < sy) g.targets.set(e++, v + sx);
        if (z + 1 < sz) g.targets.set(e++, v + plane);
      }
    }
  }
  g.offsets.set(n, static_cast<uint32_t>(e));
  return g;
}

Graph gen_powerlaw(MemSim& sim, uint32_t n, uint32_t edges_per_vertex,
                   uint64_t seed) {
  if (n == 0) throw SimFault("need at least one vertex");
  Rng rng(seed);
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  std::vector<uint32_t> endpoints;  // degree-proportional sampling pool
  uint32_t d = std::max<uint32_t>(1, edges_per_vertex);
  for (uint32_t v = 1; v < n; ++v) {
    uint32_t want = std::min<uint32_t>(d, v);
    std::vector<uint32_t> picked;
    for (uint32_t tries = 0; picked.size() < want && tries < 8 * d; ++tries) {
      uint32_t u = endpoints.empty()
                       ? static_cast<uint32_t>(rng.below(v))
                       : endpoints[rng.below(endpoints.size())];
      if (u == v) continue;
      if (std::find(picked.begin(), picked.end(), u) != picked.end()) continue;
      picked.push_back(u);
    }
    for (uint32_t u : picked) {
      edges.emplace_back(u, v);
      endpoints.push_back(u);
      endpoints.push_back(v);
    }
  }
  return from_edges(sim, n, edges);
}

Graph load_snap(MemSim& sim, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  std::unordered_map<uint64_t, uint32_t> ids;
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  std::string line;
  uint64_t lineno = 0;
  auto intern = [&](uint64_t raw) {
    auto [it, fresh] = ids.try_emplace(raw, static_cast<uint32_t>(ids.size()));
    (void)fresh;
    return it->second;
  };
  while (std::getline(in, line)) {
    ++lineno;
    size_t pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    const char* p = line.c_str() + pos;
    char* end = nullptr;
    uint64_t a = std::strtoull(p, &end, 10);
    if (end == p)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected two vertex ids");
    p = end;
    uint64_t b = std::strtoull(p, &end, 10);
    if (end == p)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected two vertex ids");
    edges.emplace_back(intern(a), intern(b));
  }
  return from_edges(sim, static_cast<uint32_t>(ids.size()), edges);
}

void assign_weights(Graph& g, uint64_t seed) {
  if (g.weighted()) throw SimFault("graph already weighted");
  g.weights = TypedArray<uint32_t>(g.offsets.sim(), 2 * g.m);
  uint64_t salt = mix64(seed ^ 0xb7e151628aed2a6bull);
  for (uint32_t v = 0; v < g.n; ++v) {
    uint32_t lo = g.offsets.peek(v), hi = g.offsets.peek(v + 1);
    for (uint32_t e = lo; e < hi; ++e) {
      uint32_t u = g.targets.peek(e);
      uint64_t a = std::min(u, v), b = std::max(u, v);
      uint32_t w = 1 + static_cast<uint32_t>(mix64(salt ^ (a << 32 | b)) % 10000);
      g.weights.set(e, w);
    }
  }
}

// ---------------------------------------------------------------------------
// BFS

std::vector<uint32_t> bfs_classic(MemSim& sim, Graph& g, uint32_t s,
                                  BfsStats* stats) {
  if (s >= g.n) throw SimFault("source out of range");
  TypedArray<uint32_t> dist(sim, g.n);  // doubles as the visited flag
  dist.fill(kUnreachedHops);
  TypedArray<uint32_t> queue(sim, g.n);

  dist.set(s, 0);
  queue.set(0, s);
  uint64_t head = 0, tail = 1;
  uint32_t depth = 0;
  uint64_t level_end = 1, frontier = 1, max_frontier = 1, levels = 1;

  while (head < tail) {
    uint32_t u = queue.get(head++);
    uint32_t lo = g.offsets.get(u), hi = g.offsets.get(u + 1);
    for (uint32_t e = lo; e < hi; ++e) {
      uint32_t v = g.targets.get(e);
      if (dist.get(v) == kUnreachedHops) {
        dist.set(v, depth + 1);
        queue.set(tail++, v);
      }
    }
    if (head == level_end && head < tail) {
      depth++;
      frontier = tail - level_end;
      max_frontier = std::max(max_frontier, frontier);
      levels++;
      level_end = tail;
    }
  }

  if (stats) {
    stats->depth = depth;
    stats->max_frontier = max_frontier;
    stats->avg_frontier =
        static_cast<double>(tail) / static_cast<double>(levels);
  }
  std::vector<uint32_t> out(g.n);
  for (uint32_t v = 0; v < g.n; ++v) out[v] = dist.peek(v);
  return out;
}

namespace {

HashParams frontier_params() {
  HashParams fp;
  fp.k = 2;
  fp.base_size_log2 = 5;
  return fp;
}

bool in_any(KLevelHashTable* sets[3], uint32_t key) {
  return sets[0]->lookup(key) || sets[1]->lookup(key) || sets[2]->lookup(key);
}

}  // namespace

std::vector<uint32_t> bfs_rotating(MemSim& sim, Graph& g, uint32_t s,
                                   BfsStats* stats) {
  if (s >= g.n) throw SimFault("source out of range");
  KLevelHashTable f0(sim, frontier_params()), f1(sim, frontier_params()),
      f2(sim, frontier_params());
  KLevelHashTable* prev = &f0;
  KLevelHashTable* cur = &f1;
  KLevelHashTable* next = &f2;

  std::vector<uint32_t> dist(g.n, kUnreachedHops);
  cur->insert(s);
  dist[s] = 0;

  uint32_t depth = 0;
  uint64_t reached = 1, max_frontier = 1, levels = 1;

  while (cur->size() > 0) {
    cur->for_each([&](uint32_t v) {
      uint32_t lo = g.offsets.get(v), hi = g.offsets.get(v + 1);
      for (uint32_t e = lo; e < hi; ++e) {
        uint32_t u = g.targets.get(e);
        KLevelHashTable* sets[3] = {prev, cur, next};
        if (!in_any(sets, u)) {
          next->insert(u);
          dist[u] = depth + 1;
        }
      }
    });
    // Rotate: the previous frontier's space is reused for the new next.
    KLevelHashTable* recycled = prev;
    prev = cur;
    cur = next;
    next = recycled;
    next->clear();
    depth++;
    if (cur->size() > 0) {
      reached += cur->size();
      max_frontier = std::max(max_frontier, cur->size());
      levels++;
    }
  }

  if (stats) {
    stats->depth = depth > 0 ? depth - 1 : 0;
    stats->max_frontier = max_frontier;
    stats->avg_frontier =
        static_cast<double>(reached) / static_cast<double>(levels);
  }
  return dist;
}

namespace {

// Shared-set bidirectional search: both directions' vertices live in the
// same three hash sets, tagged by the sign bit. Windows per side:
// sets[(rot+0)%3] previous, [(rot+1)%3] current, [(rot+2)%3] next; the
// window a contact lands in fixes that side's depth of the hit vertex.
// Sets are never cleared during a query, the smaller frontier expands.
std::optional<uint32_t> bidir_rotating(MemSim& sim, Graph& g, uint32_t s,
                                       uint32_t t) {
  if (g.n >= 0x80000000u) throw SimFault("vertex ids need the sign bit free");
  if (s == t) return 0;
  KLevelHashTable f0(sim, frontier_params()), f1(sim, frontier_params()),
      f2(sim, frontier_params());
  KLevelHashTable* sets[3] = {&f0, &f1, &f2};

  struct Side {
    uint32_t tag;  // 0 or the sign bit
    int rot = 0;
    uint32_t depth = 0;
    std::vector<uint32_t> frontier;  // iteration copy of the current window
  };
  Side src{0u, 0, 0, {s}}, dst{0x80000000u, 0, 0, {t}};
  sets[1]->insert(s | src.tag);
  sets[1]->insert(t | dst.tag);

  uint32_t best = kUnreachedHops;
  for (;;) {
    Side& a = src.frontier.size() <= dst.frontier.size() ? src : dst;
    Side& b = src.frontier.size() <= dst.frontier.size() ? dst : src;
    if (a.frontier.empty()) return std::nullopt;  // sides in different parts

    KLevelHashTable* next_set = sets[(a.rot + 2) % 3];
    std::vector<uint32_t> next_frontier;
    for (uint32_t v : a.frontier) {
      uint32_t lo = g.offsets.get(v), hi = g.offsets.get(v + 1);
      for (uint32_t e = lo; e < hi; ++e) {
        uint32_t u = g.targets.get(e);
        bool mine = false;
        for (int w = 0; w < 3 && !mine; ++w)
          if (sets[(a.rot + w) % 3]->lookup(u | a.tag)) mine = true;
        if (mine) continue;
        bool contact = false;
        for (int w = 0; w < 3; ++w) {
          if (sets[(b.rot + w) % 3]->lookup(u | b.tag)) {
            uint32_t du_b = b.depth + w;  // w counts from the previous window
            du_b = du_b > 0 ? du_b - 1 : 0;
            best = std::min(best, a.depth + 1 + du_b);
            contact = true;
            break;
          }
        }
        if (contact) continue;
        if (!next_set->lookup(u | a.tag)) {
          next_set->insert(u | a.tag);
          next_frontier.push_back(u);
        }
      }
    }
    if (best != kUnreachedHops) return best;
    a.rot = (a.rot + 1) % 3;
    a.depth++;
    a.frontier = std::move(next_frontier);
  }
}

std::optional<uint32_t> bidir_classic(MemSim& sim, Graph& g, uint32_t s,
                                      uint32_t t) {
  if (s == t) return 0;
  TypedArray<int32_t> own(sim, g.n);  // 0 free, +d+1 source, -(d+1) target
  own.fill(0);
  TypedArray<uint32_t> qs(sim, g.n), qt(sim, g.n);

  struct Side {
    TypedArray<uint32_t>* q;
    uint64_t head = 0, tail = 0;
    uint32_t depth = 0;
    int sign;
  };
  Side a{&qs, 0, 0, 0, +1}, b{&qt, 0, 0, 0, -1};
  qs.set(a.tail++, s);
  own.set(s, +1);
  qt.set(b.tail++, t);
  own.set(t, -1);

  uint32_t best = kUnreachedHops;
  while (true) {
    Side& x = (a.tail - a.head) <= (b.tail - b.head) ? a : b;
    Side& y = (a.tail - a.head) <= (b.tail - b.head) ? b : a;
    if (x.tail == x.head) break;
    uint64_t level_end = x.tail;
    while (x.head < level_end) {
      uint32_t u = x.q->get(x.head++);
      uint32_t lo = g.offsets.get(u), hi = g.offsets.get(u + 1);
      for (uint32_t e = lo; e < hi; ++e) {
        uint32_t v = g.targets.get(e);
        int32_t o = own.get(v);
        if (o == 0) {
          own.set(v, x.sign * static_cast<int32_t>(x.depth + 2));
          x.q->set(x.tail++, v);
        } else if ((o > 0) != (x.sign > 0)) {
          uint32_t dv = static_cast<uint32_t>(std::abs(o)) - 1;
          best = std::min(best, x.depth + 1 + dv);
        }
      }
    }
    x.depth++;
    if (best != kUnreachedHops) return best;
    if (x.tail == x.head && y.tail == y.head) break;
  }
  return best == kUnreachedHops ? std::nullopt : std::make_optional(best);
}

}  // namespace

std::optional<uint32_t> bfs_bidirectional(MemSim& sim, Graph& g, uint32_t s,
                                          uint32_t t, BidirFlavor flavor) {
  if (s >= g.n || t >= g.n) throw SimFault("query vertex out of range");
  return flavor == BidirFlavor::Classic ? bidir_classic(sim, g, s, t)
                                        : bidir_rotating(sim, g, s, t);
}

// ---------------------------------------------------------------------------
// Dijkstra

std::vector<int64_t> dijkstra_heap(MemSim& sim, Graph& g, uint32_t s) {
  if (s >= g.n) throw SimFault("source out of range");
  if (!g.weighted()) throw SimFault("graph has no weights");

  TypedArray<int64_t> dist(sim, g.n);
  dist.fill(kUnreachedDist);
  TypedArray<uint32_t> heap(sim, g.n);  // vertex ids only
  TypedArray<uint32_t> pos(sim, g.n);   // heap position per vertex
  pos.fill(kNoPos);
  uint64_t size = 0;

  auto less_at = [&](uint32_t hv, uint32_t hu) {
    return dist.get(hv) < dist.get(hu);
  };
  auto sift_up = [&](uint64_t i) {
    uint32_t v = heap.get(i);
    while (i > 0) {
      uint64_t parent = (i - 1) / 2;
      uint32_t pv = heap.get(parent);
      if (!less_at(v, pv)) break;
      heap.set(i, pv);
      pos.set(pv, static_cast<uint32_t>(i));
      i = parent;
    }
    heap.set(i, v);
    pos.set(v, static_cast<uint32_t>(i));
  };
  auto sift_down = [&](uint64_t i) {
    uint32_t v = heap.get(i);
    for (;;) {
      uint64_t c = 2 * i + 1;
      if (c >= size) break;
      uint32_t cv = heap.get(c);
      if (c + 1 < size) {
        uint32_t rv = heap.get(c + 1);
        if (less_at(rv, cv)) {
          c = c + 1;
          cv = rv;
        }
      }
      if (!less_at(cv, v)) break;
      heap.set(i, cv);
      pos.set(cv, static_cast<uint32_t>(i));
      i = c;
    }
    heap.set(i, v);
    pos.set(v, static_cast<uint32_t>(i));
  };

  dist.set(s, 0);
  heap.set(0, s);
  pos.set(s, 0);
  size = 1;

  while (size > 0) {
    uint32_t u = heap.get(0);
    int64_t du = dist.get(u);
    pos.set(u, kNoPos);
    size--;
    if (size > 0) {
      uint32_t last = heap.get(size);
      heap.set(0, last);
      pos.set(last, 0);
      sift_down(0);
    }

    uint32_t lo = g.offsets.get(u), hi = g.offsets.get(u + 1);
    for (uint32_t e = lo; e < hi; ++e) {
      uint32_t v = g.targets.get(e);
      int64_t nd = du + g.weights.get(e);
      int64_t dv = dist.get(v);
      if (nd >= dv) continue;
      dist.set(v, nd);
      uint32_t p = pos.get(v);
      if (p == kNoPos) {  // inserted lazily on first relaxation
        heap.set(size, v);
        pos.set(v, static_cast<uint32_t>(size));
        sift_up(size);
        size++;
      } else {
        sift_up(p);
      }
    }
  }

  std::vector<int64_t> out(g.n);
  for (uint32_t v = 0; v < g.n; ++v) out[v] = dist.peek(v);
  return out;
}

namespace {

// In-cache priority queue + vertex map for phased Dijkstra. Heap entries
// are 16 bytes (vertex, back-pointer into the map, tentative distance); map
// slots hold only the heap position, the vertex is checked via the heap.
struct PhasedQueue {
  struct Entry {
    uint32_t vertex;
    uint32_t map_ref;
    int64_t dist;
  };
  static constexpr uint32_t kEmptySlot = 0xFFFFFFFFu;

  MemSim& sim;
  TypedArray<Entry> heap;
  TypedArray<uint32_t> map;  // two levels, back to back
  uint64_t map_cap0, map_cap1;
  uint64_t map_count0 = 0, map_count1 = 0;
  uint64_t size = 0;
  uint64_t seed;
  Rng select_rng;

  PhasedQueue(MemSim& s, uint64_t cap_entries, uint64_t rng_seed)
      : sim(s), seed(mix64(rng_seed ^ 0x6a09e667f3bcc908ull)),
        select_rng(rng_seed ^ 0x3c6ef372fe94f82bull) {
    uint64_t need = cap_entries * 5 / 4 + 2;  // 0.8 occupancy headroom
    uint32_t a = 4;
    while (3 * (uint64_t{1} << a) < need) ++a;
    map_cap0 = uint64_t{1} << a;
    map_cap1 = uint64_t{1} << (a + 1);
    heap = TypedArray<Entry>(sim, cap_entries);
    map = TypedArray<uint32_t>(sim, map_cap0 + map_cap1);
    map.fill(kEmptySlot);
  }

  void pin() {
    heap.pin_all();
    map.pin_all();
  }

  uint64_t level_base(int lv) const { return lv == 0 ? 0 : map_cap0; }
  uint64_t level_cap(int lv) const { return lv == 0 ? map_cap0 : map_cap1; }

  uint64_t home(uint32_t vertex, int lv) const {
    return mix64(uint64_t{vertex} * 0x9e3779b97f4a7c15ull ^ seed ^
                 (uint64_t{lv} << 32)) &
           (level_cap(lv) - 1);
  }

  static uint32_t ref_of(int lv, uint64_t slot) {
    return (static_cast<uint32_t>(lv) << 30) | static_cast<uint32_t>(slot);
  }
  int ref_level(uint32_t ref) const { return ref >> 30; }
  uint64_t ref_slot(uint32_t ref) const { return ref & 0x3FFFFFFFu; }

  // Returns the heap position of vertex or kEmptySlot.
  uint32_t find(uint32_t vertex) {
    for (int lv = 0; lv < 2; ++lv) {
      uint64_t cap = level_cap(lv), base = level_base(lv);
      uint64_t slot = home(vertex, lv);
      for (;;) {
        uint32_t p = map.get(base + slot);
        if (p == kEmptySlot) break;
        if (heap.get(p).vertex == vertex) return p;
        slot = (slot + 1) & (cap - 1);
      }
    }
    return kEmptySlot;
  }

  uint32_t map_insert(uint32_t vertex, uint32_t heap_pos) {
    int lv = (map_count0 + 1) * 5 <= 4 * map_cap0 ? 0 : 1;
    uint64_t cap = level_cap(lv), base = level_base(lv);
    uint64_t slot = home(vertex, lv);
    while (map.get(base + slot) != kEmptySlot) slot = (slot + 1) & (cap - 1);
    map.set(base + slot, heap_pos);
    (lv == 0 ? map_count0 : map_count1)++;
    return ref_of(lv, slot);
  }

  void map_erase(uint32_t ref) {
    int lv = ref_level(ref);
    uint64_t cap = level_cap(lv), base = level_base(lv);
    uint64_t hole = ref_slot(ref);
    uint64_t j = hole;
    for (;;) {
      j = (j + 1) & (cap - 1);
      uint32_t p = map.get(base + j);
      if (p == kEmptySlot) break;
      uint64_t h = home(heap.get(p).vertex, lv);
      if (((j - h) & (cap - 1)) >= ((j - hole) & (cap - 1))) {
        map.set(base + hole, p);
        Entry e = heap.get(p);
        e.map_ref = ref_of(lv, hole);
        heap.set(p, e);
        hole = j;
      }
    }
    map.set(base + hole, kEmptySlot);
    (lv == 0 ? map_count0 : map_count1)--;
  }

  void place(uint64_t i, Entry e) {
    heap.set(i, e);
    map.set(level_base(ref_level(e.map_ref)) + ref_slot(e.map_ref),
            static_cast<uint32_t>(i));
  }

  void sift_up(uint64_t i, Entry e) {
    while (i > 0) {
      uint64_t parent = (i - 1) / 2;
      Entry pe = heap.get(parent);
      if (pe.dist <= e.dist) break;
      place(i, pe);
      i = parent;
    }
    place(i, e);
  }

  void sift_down(uint64_t i, Entry e) {
    for (;;) {
      uint64_t c = 2 * i + 1;
      if (c >= size) break;
      Entry ce = heap.get(c);
      if (c + 1 < size) {
        Entry re = heap.get(c + 1);
        if (re.dist < ce.dist) {
          c = c + 1;
          ce = re;
        }
      }
      if (ce.dist >= e.dist) break;
      place(i, ce);
      i = c;
    }
    place(i, e);
  }

  void insert(uint32_t vertex, int64_t d) {
    Entry e{vertex, 0, d};
    e.map_ref = map_insert(vertex, static_cast<uint32_t>(size));
    size++;
    sift_up(size - 1, e);
  }

  void decrease(uint32_t heap_pos, int64_t d) {
    Entry e = heap.get(heap_pos);
    e.dist = d;
    sift_up(heap_pos, e);
  }

  Entry extract_min() {
    Entry top = heap.get(0);
    map_erase(top.map_ref);
    size--;
    if (size > 0) {
      Entry last = heap.get(size);
      sift_down(0, last);
    }
    return top;
  }

  // Keep the m_prime smallest entries, rebuild heap and map, return the
  // largest kept distance.
  int64_t truncate(uint64_t m_prime) {
    uint64_t lo = 0, hi = size;  // quickselect on the flattened heap
    while (hi - lo > 1) {
      uint64_t pi = lo + select_rng.below(hi - lo);
      Entry pe = heap.get(pi);
      Entry last = heap.get(hi - 1);
      heap.set(hi - 1, pe);
      heap.set(pi, last);
      uint64_t store = lo;
      for (uint64_t i = lo; i + 1 < hi; ++i) {
        Entry e = heap.get(i);
        if (e.dist < pe.dist) {
          Entry o = heap.get(store);
          heap.set(store, e);
          heap.set(i, o);
          store++;
        }
      }
      Entry o = heap.get(store);
      heap.set(store, heap.get(hi - 1));
      heap.set(hi - 1, o);
      if (store == m_prime || store + 1 == m_prime) break;
      if (store < m_prime)
        lo = store + 1;
      else
        hi = store;
    }

    // Drop [m_prime, size), rebuild the map and re-point survivors.
    map.fill(kEmptySlot);
    map_count0 = map_count1 = 0;
    size = m_prime;
    int64_t dmax = 0;
    for (uint64_t i = 0; i < size; ++i) {
      Entry e = heap.get(i);
      e.map_ref = map_insert(e.vertex, static_cast<uint32_t>(i));
      heap.set(i, e);
      dmax = std::max(dmax, e.dist);
    }
    for (uint64_t i = size / 2; i-- > 0;) sift_down(i, heap.get(i));
    return dmax;
  }
};

}  // namespace

std::vector<int64_t> dijkstra_phased(MemSim& sim, Graph& g, uint32_t s,
                                     const PhasedParams& params,
                                     PhasedStats* stats_out) {
  if (s >= g.n) throw SimFault("source out of range");
  if (!g.weighted()) throw SimFault("graph has no weights");
  if (!(params.epsilon > 0)) throw SimFault("epsilon must be positive");

  const SimConfig& cfg = sim.config();
  uint64_t m_bytes = uint64_t{cfg.capacity_lines} * cfg.line_bytes;
  // 16 bytes per heap entry plus one 4-byte map slot at 0.8 occupancy.
  uint64_t m_prime = params.m_prime
                         ? params.m_prime
                         : static_cast<uint64_t>(
                               params.pq_cache_fraction *
                               static_cast<double>(m_bytes) / 21.0);
  m_prime = std::max<uint64_t>(m_prime, 8);
  uint64_t cap_entries =
      static_cast<uint64_t>(std::ceil((1.0 + params.epsilon) *
                                      static_cast<double>(m_prime)));

  TypedArray<int64_t> dist(sim, g.n);
  dist.fill(kUnreachedDist);

  PhasedQueue pq(sim, cap_entries + 1, mix64(s ^ 0x1234abcdull));
  if (cfg.policy == Policy::StaticPin) pq.pin();

  PhasedStats st;
  st.m_prime = m_prime;

  // Encoding in dist: kUnreachedDist unvisited, -(d+1) visited & active,
  // +(d+1) visited & retired (all edges lead to visited vertices).
  uint64_t visited = 0;
  int64_t d_max = kUnreachedDist;

  dist.set(s, -1);  // distance 0, active
  visited++;

  auto relax = [&](uint32_t v, int64_t nd) {
    uint32_t p = pq.find(v);
    if (p != PhasedQueue::kEmptySlot) {
      if (nd < pq.heap.get(p).dist) pq.decrease(p, nd);
      return;
    }
    pq.insert(v, nd);
    st.max_queue = std::max(st.max_queue, pq.size);
    if (pq.size >= cap_entries) {
      d_max = pq.truncate(m_prime);
      st.truncations++;
    }
  };

  while (visited < g.n) {
    // Phase start: seed the queue from the active set's adjacency.
    st.phases++;
    d_max = kUnreachedDist;
    for (uint32_t v = 0; v < g.n; ++v) {
      int64_t raw = dist.get(v);
      if (raw == kUnreachedDist || raw > 0) continue;
      int64_t dv = -raw - 1;
      uint32_t lo = g.offsets.get(v), hi = g.offsets.get(v + 1);
      bool any_unvisited = false;
      for (uint32_t e = lo; e < hi; ++e) {
        uint32_t u = g.targets.get(e);
        if (dist.get(u) != kUnreachedDist) continue;
        any_unvisited = true;
        relax(u, dv + g.weights.get(e));
      }
      if (!any_unvisited) dist.set(v, -raw);  // retire from the active set
    }
    if (pq.size == 0) break;  // nothing reachable remains
    if (pq.size >= m_prime) {
      d_max = pq.truncate(m_prime);
      st.truncations++;
    }

    while (pq.size > 0) {
      PhasedQueue::Entry top = pq.extract_min();
      dist.set(top.vertex, -(top.dist + 1));
      visited++;
      uint32_t lo = g.offsets.get(top.vertex), hi = g.offsets.get(top.vertex + 1);
      bool any_unvisited = false;
      for (uint32_t e = lo; e < hi; ++e) {
        uint32_t u = g.targets.get(e);
        if (dist.get(u) != kUnreachedDist) continue;
        any_unvisited = true;
        int64_t nd = top.dist + g.weights.get(e);
        if (nd < d_max) relax(u, nd);
      }
      if (!any_unvisited) dist.set(top.vertex, top.dist + 1);
    }
  }

  if (stats_out) *stats_out = st;
  std::vector<int64_t> out(g.n);
  for (uint32_t v = 0; v < g.n; ++v) {
    int64_t raw = dist.peek(v);
    out[v] = raw == kUnreachedDist ? kUnreachedDist : std::abs(raw) - 1;
  }
  return out;
}

}  // namespace wem

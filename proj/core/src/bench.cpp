#include "wem/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "wem/graphs.hpp"
#include "wem/ordered.hpp"
#include "wem/rng.hpp"
#include "wem/sorts.hpp"

namespace wem {

namespace {

std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string fmt_param(double v) {
  // Exact short form for parameter values (0.125 stays 0.125, 1 stays 1).
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string make_params(std::map<std::string, std::string> kv) {
  std::string out;
  for (auto& [k, v] : kv) {
    if (!out.empty()) out += ';';
    out += k + "=" + v;
  }
  return out;
}

struct RowBuilder {
  ResultRow row;
  RowBuilder(std::string experiment, std::map<std::string, std::string> kv) {
    row.experiment = std::move(experiment);
    row.params = make_params(std::move(kv));
  }
  RowBuilder& io(const IoStats& s, double per, const std::vector<double>& omegas) {
    row.metrics.emplace_back("rt", static_cast<double>(s.read_transfers) / per);
    row.metrics.emplace_back("wt", static_cast<double>(s.write_transfers) / per);
    for (double w : omegas)
      row.metrics.emplace_back("io@" + fmt_param(w), io_cost(s, w) / per);
    return *this;
  }
  RowBuilder& extra(const std::string& name, double v) {
    row.metrics.emplace_back(name, v);
    return *this;
  }
};

uint64_t scaled(uint64_t n, double scale) {
  return std::max<uint64_t>(1, static_cast<uint64_t>(std::llround(
                                   static_cast<double>(n) * scale)));
}

uint32_t scaled_cache(uint32_t lines, double scale) {
  return std::max<uint32_t>(2, static_cast<uint32_t>(std::llround(
                                   static_cast<double>(lines) * scale)));
}

// ---- hash ----------------------------------------------------------------

void run_hash(const BenchSpec& spec, bool with_delete, std::ostream* trace,
              std::vector<ResultRow>& out) {
  uint64_t n = scaled(1000000, spec.scale);
  for (uint32_t cache : spec.cache_lines) {
    for (uint32_t k : spec.ks) {
      for (double alpha : spec.alphas) {
        SimConfig cfg = spec.sim;
        cfg.capacity_lines = scaled_cache(cache, spec.scale);
        MemSim sim(cfg);
        if (trace) sim.set_trace(trace);
        HashParams hp = spec.hash;
        hp.k = k;
        hp.seed = spec.seed;
        KLevelHashTable table(sim, hp);
        KeyPermutation keys(spec.seed);
        Rng rng(spec.seed ^ 0x517cc1b727220a95ull);

        std::vector<uint32_t> live;
        live.reserve(n);
        uint64_t pending = 0;
        const uint64_t per_query = alpha >= 1.0 || alpha <= 0.0
                                       ? 0
                                       : static_cast<uint64_t>(
                                             std::llround(1.0 / alpha));
        bool miss_next = false;
        auto run_queries = [&]() {
          uint64_t q = 0;
          if (alpha >= 1.0) {
            q = static_cast<uint64_t>(std::llround(alpha));
          } else if (alpha > 0.0) {
            if (++pending == per_query) {
              pending = 0;
              q = 1;
            }
          }
          for (uint64_t i = 0; i < q; ++i) {
            // ~50% of query keys are present.
            uint32_t key;
            if (miss_next || live.empty()) {
              key = static_cast<uint32_t>(rng.below(1u << 30)) | (1u << 30);
            } else {
              key = live[rng.below(live.size())];
            }
            miss_next = !miss_next;
            table.lookup(key);
          }
        };

        for (uint64_t i = 0; i < n; ++i) {
          uint32_t key = keys.key_at(static_cast<uint32_t>(i));
          table.insert(key);
          live.push_back(key);
          run_queries();
        }
        if (with_delete) {
          for (uint64_t i = n; i > 1; --i)
            std::swap(live[i - 1], live[rng.below(i)]);
          for (uint64_t i = n; i-- > 0;) {
            uint32_t key = live[i];
            live.pop_back();
            auto loc = table.lookup(key);
            table.erase(key, *loc);
            run_queries();
          }
        }
        IoStats st = sim.flush();
        RowBuilder rb(with_delete ? "hash_delete" : "hash",
                      {{"alpha", fmt_param(alpha)},
                       {"cache", std::to_string(cfg.capacity_lines)},
                       {"k", std::to_string(k)}});
        rb.io(st, static_cast<double>(n), spec.omegas)
            .extra("grows", static_cast<double>(table.grow_resizes()))
            .extra("reinserts", static_cast<double>(table.reinsertions()));
        out.push_back(rb.row);
      }
    }
  }
}

// ---- bst -----------------------------------------------------------------

void run_bst(const BenchSpec& spec, std::ostream* trace,
             std::vector<ResultRow>& out) {
  uint64_t n = scaled(1000000, spec.scale);
  const char* scheme_names[3] = {"avl", "rb", "treap"};
  const Scheme schemes[3] = {Scheme::Avl, Scheme::RedBlack, Scheme::Treap};
  for (uint32_t cache : spec.cache_lines) {
    for (uint64_t batch : spec.batch_sizes) {
      for (int si = 0; si < 3; ++si) {
        SimConfig cfg = spec.sim;
        cfg.capacity_lines = scaled_cache(cache, spec.scale);
        MemSim sim(cfg);
        if (trace) sim.set_trace(trace);
        TreePool pool(sim, schemes[si], 2 * n + 16, spec.seed);
        Rng rng(spec.seed ^ 0x9216d5d98979fb1bull);

        std::vector<uint32_t> keys(n);
        for (auto& k : keys) k = static_cast<uint32_t>(rng.next());

        sim.reset();
        BalancedTree main{&pool, TreePool::kNil};
        for (uint64_t at = 0; at < n; at += batch) {
          uint64_t hi = std::min(n, at + batch);
          BalancedTree b{&pool, TreePool::kNil};
          for (uint64_t i = at; i < hi; ++i) b = tree_insert(b, keys[i]);
          main = tree_union(main, b);
        }
        IoStats ins = sim.flush();

        sim.reset();
        double depth = tree_avg_depth(main).value_or(0.0);
        sim.reset();

        std::vector<uint32_t> order = keys;
        for (uint64_t i = n; i > 1; --i)
          std::swap(order[i - 1], order[rng.below(i)]);
        for (uint64_t at = 0; at < n; at += batch) {
          uint64_t hi = std::min(n, at + batch);
          BalancedTree b{&pool, TreePool::kNil};
          for (uint64_t i = at; i < hi; ++i) b = tree_insert(b, order[i]);
          main = tree_difference(main, b);
        }
        IoStats del = sim.flush();

        std::map<std::string, std::string> kv = {
            {"batch", std::to_string(batch)},
            {"cache", std::to_string(cfg.capacity_lines)},
            {"scheme", scheme_names[si]}};
        kv["op"] = "insert";
        RowBuilder ra("bst", kv);
        ra.io(ins, static_cast<double>(n), spec.omegas).extra("avg_depth", depth);
        out.push_back(ra.row);
        kv["op"] = "delete";
        RowBuilder rd("bst", kv);
        rd.io(del, static_cast<double>(n), spec.omegas);
        out.push_back(rd.row);
      }
    }
  }
}

// ---- sort ----------------------------------------------------------------

template <class Elem>
SortStats run_one_sort(MemSim& sim, SortAlgo algo, uint64_t n, uint64_t seed) {
  TypedArray<Elem> a(sim, n);
  fill_random(a, seed);
  sim.reset();
  SortStats st;
  switch (algo) {
    case SortAlgo::Quicksort: st = quicksort(sim, a, seed); break;
    case SortAlgo::Mergesort: st = mergesort(sim, a); break;
    case SortAlgo::BstSort: st = bst_sort(sim, a, seed); break;
    case SortAlgo::Samplesort: st = samplesort(sim, a, seed); break;
  }
  for (uint64_t i = 1; i < n; ++i)
    if (a.peek(i).key < a.peek(i - 1).key) throw SimFault("sort produced disorder");
  return st;
}

void run_sort(const BenchSpec& spec, std::ostream* trace,
              std::vector<ResultRow>& out) {
  uint64_t n = scaled(10000000, spec.scale);
  const char* algo_names[4] = {"quicksort", "mergesort", "bst_sort", "samplesort"};
  const SortAlgo algos[4] = {SortAlgo::Quicksort, SortAlgo::Mergesort,
                             SortAlgo::BstSort, SortAlgo::Samplesort};
  for (uint32_t cache : spec.cache_lines) {
    for (uint32_t eb : spec.elem_bytes) {
      for (int ai = 0; ai < 4; ++ai) {
        SimConfig cfg = spec.sim;
        cfg.capacity_lines = scaled_cache(cache, spec.scale);
        MemSim sim(cfg);
        if (trace) sim.set_trace(trace);
        SortStats st;
        switch (eb) {
          case 8: st = run_one_sort<Record<8>>(sim, algos[ai], n, spec.seed); break;
          case 16: st = run_one_sort<Record<16>>(sim, algos[ai], n, spec.seed); break;
          case 32: st = run_one_sort<Record<32>>(sim, algos[ai], n, spec.seed); break;
          case 64: st = run_one_sort<Record<64>>(sim, algos[ai], n, spec.seed); break;
          default: throw SimFault("elem_bytes must be 8/16/32/64");
        }
        RowBuilder rb("sort", {{"alg", algo_names[ai]},
                               {"cache", std::to_string(cfg.capacity_lines)},
                               {"elem", std::to_string(eb)}});
        rb.io(st.io, static_cast<double>(n), spec.omegas)
            .extra("comparisons", st.comp_per_elem());
        out.push_back(rb.row);
      }
    }
  }
}

void run_sort_indirect(const BenchSpec& spec, std::ostream* trace,
                       std::vector<ResultRow>& out) {
  uint64_t n = scaled(2000000, spec.scale);
  const char* algo_names[4] = {"quicksort", "mergesort", "bst_sort", "samplesort"};
  const SortAlgo algos[4] = {SortAlgo::Quicksort, SortAlgo::Mergesort,
                             SortAlgo::BstSort, SortAlgo::Samplesort};
  for (uint32_t cache : spec.cache_lines) {
    for (int ai = 0; ai < 4; ++ai) {
      SimConfig cfg = spec.sim;
      cfg.capacity_lines = scaled_cache(cache, spec.scale);
      MemSim sim(cfg);
      if (trace) sim.set_trace(trace);
      IndirectInput in = make_indirect_input(sim, n, spec.seed);
      sim.reset();
      SortStats st = sort_indirect(sim, algos[ai], in, spec.seed);
      for (uint64_t i = 1; i < n; ++i)
        if (in.payload.peek(in.refs.peek(i)) < in.payload.peek(in.refs.peek(i - 1)))
          throw SimFault("indirect sort produced disorder");
      RowBuilder rb("sort_indirect", {{"alg", algo_names[ai]},
                                      {"cache", std::to_string(cfg.capacity_lines)}});
      rb.io(st.io, static_cast<double>(n), spec.omegas)
          .extra("comparisons", st.comp_per_elem());
      out.push_back(rb.row);
    }
  }
}

// ---- graphs ----------------------------------------------------------------

struct GraphRecipe {
  std::string kind;  // grid2d grid3d powerlaw file
  uint64_t a = 0, b = 0, c = 0;
  std::string path;
  std::string label;
};

GraphRecipe parse_graph(const std::string& text, double scale) {
  GraphRecipe r;
  auto colon = text.find(':');
  std::string head = text.substr(0, colon);
  if (head == "grid2d" || head == "grid3d" || head == "powerlaw") {
    r.kind = head;
    std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
    std::replace(rest.begin(), rest.end(), 'x', ' ');
    std::replace(rest.begin(), rest.end(), ',', ' ');
    std::istringstream ss(rest);
    ss >> r.a >> r.b;
    if (head == "grid3d") ss >> r.c;
    if (head == "grid2d") {
      double f = std::sqrt(scale);
      r.a = std::max<uint64_t>(1, static_cast<uint64_t>(std::llround(r.a * f)));
      r.b = std::max<uint64_t>(1, static_cast<uint64_t>(std::llround(r.b * f)));
    } else if (head == "grid3d") {
      double f = std::cbrt(scale);
      r.a = std::max<uint64_t>(1, static_cast<uint64_t>(std::llround(r.a * f)));
      r.b = std::max<uint64_t>(1, static_cast<uint64_t>(std::llround(r.b * f)));
      r.c = std::max<uint64_t>(1, static_cast<uint64_t>(std::llround(r.c * f)));
    } else {
      r.a = scaled(r.a, scale);
    }
    r.label = head;
  } else {
    r.kind = "file";
    r.path = text;
    auto slash = text.find_last_of('/');
    r.label = slash == std::string::npos ? text : text.substr(slash + 1);
  }
  return r;
}

Graph make_graph(MemSim& sim, const GraphRecipe& r, uint64_t seed) {
  if (r.kind == "grid2d")
    return gen_grid2d(sim, static_cast<uint32_t>(r.a), static_cast<uint32_t>(r.b));
  if (r.kind == "grid3d")
    return gen_grid3d(sim, static_cast<uint32_t>(r.a), static_cast<uint32_t>(r.b),
                      static_cast<uint32_t>(r.c));
  if (r.kind == "powerlaw")
    return gen_powerlaw(sim, static_cast<uint32_t>(r.a),
                        r.b ? static_cast<uint32_t>(r.b) : 5, seed);
  return load_snap(sim, r.path);
}

void run_bfs(const BenchSpec& spec, std::ostream* trace,
             std::vector<ResultRow>& out) {
  GraphRecipe recipe = parse_graph(spec.graph, spec.scale);
  for (uint32_t cache : spec.cache_lines) {
    SimConfig cfg = spec.sim;
    cfg.capacity_lines = scaled_cache(cache, spec.scale);

    // Same sources for every algorithm and cache size.
    MemSim probe(cfg);
    Graph pg = make_graph(probe, recipe, spec.seed);
    uint32_t n = pg.n;
    Rng srng(spec.seed ^ 0xabcdef1234567890ull);
    std::vector<uint32_t> sources, targets_v;
    for (uint32_t q = 0; q < spec.queries; ++q) {
      sources.push_back(static_cast<uint32_t>(srng.below(n)));
      targets_v.push_back(static_cast<uint32_t>(srng.below(n)));
    }

    const char* algs[4] = {"classic", "rotating", "bidir_classic",
                           "bidir_rotating"};
    for (int ai = 0; ai < 4; ++ai) {
      MemSim sim(cfg);
      if (trace) sim.set_trace(trace);
      Graph g = make_graph(sim, recipe, spec.seed);
      sim.reset();
      BfsStats bst_total{};
      for (uint32_t q = 0; q < spec.queries; ++q) {
        BfsStats bs{};
        switch (ai) {
          case 0: bfs_classic(sim, g, sources[q], &bs); break;
          case 1: bfs_rotating(sim, g, sources[q], &bs); break;
          case 2:
            bfs_bidirectional(sim, g, sources[q], targets_v[q],
                              BidirFlavor::Classic);
            break;
          case 3:
            bfs_bidirectional(sim, g, sources[q], targets_v[q],
                              BidirFlavor::Rotating);
            break;
        }
        bst_total.depth += bs.depth;
        bst_total.max_frontier = std::max(bst_total.max_frontier, bs.max_frontier);
        bst_total.avg_frontier += bs.avg_frontier;
        sim.flush();
      }
      IoStats st = sim.stats();
      RowBuilder rb("bfs", {{"alg", algs[ai]},
                            {"cache", std::to_string(cfg.capacity_lines)},
                            {"graph", recipe.label}});
      rb.io(st, static_cast<double>(n), spec.omegas);
      if (ai < 2) {
        rb.extra("depth", static_cast<double>(bst_total.depth) / spec.queries)
            .extra("max_frontier", static_cast<double>(bst_total.max_frontier))
            .extra("avg_frontier", bst_total.avg_frontier / spec.queries);
      }
      out.push_back(rb.row);
    }
  }
}

void run_dijkstra(const BenchSpec& spec, std::ostream* trace,
                  std::vector<ResultRow>& out) {
  GraphRecipe recipe = parse_graph(spec.graph, spec.scale);
  for (uint32_t cache : spec.cache_lines) {
    SimConfig cfg = spec.sim;
    cfg.capacity_lines = scaled_cache(cache, spec.scale);

    MemSim probe(cfg);
    Graph pg = make_graph(probe, recipe, spec.seed);
    uint32_t n = pg.n;
    Rng srng(spec.seed ^ 0xabcdef1234567890ull);
    std::vector<uint32_t> sources;
    for (uint32_t q = 0; q < spec.queries; ++q)
      sources.push_back(static_cast<uint32_t>(srng.below(n)));

    const char* algs[2] = {"heap", "phased"};
    for (int ai = 0; ai < 2; ++ai) {
      MemSim sim(cfg);
      if (trace) sim.set_trace(trace);
      Graph g = make_graph(sim, recipe, spec.seed);
      assign_weights(g, spec.seed);
      sim.reset();
      uint64_t phases = 0, max_queue = 0;
      for (uint32_t q = 0; q < spec.queries; ++q) {
        if (ai == 0) {
          dijkstra_heap(sim, g, sources[q]);
        } else {
          PhasedParams pp;
          pp.epsilon = spec.epsilon;
          pp.pq_cache_fraction = spec.pq_fraction;
          PhasedStats ps;
          dijkstra_phased(sim, g, sources[q], pp, &ps);
          phases += ps.phases;
          max_queue = std::max(max_queue, ps.max_queue);
        }
        sim.flush();
      }
      IoStats st = sim.stats();
      double per = static_cast<double>(n) * spec.queries;
      RowBuilder rb("dijkstra", {{"alg", algs[ai]},
                                 {"cache", std::to_string(cfg.capacity_lines)},
                                 {"graph", recipe.label}});
      rb.io(st, per, spec.omegas);
      if (ai == 1) {
        rb.extra("phases",
                 static_cast<double>(phases) / static_cast<double>(spec.queries))
            .extra("max_queue", static_cast<double>(max_queue));
      }
      out.push_back(rb.row);
    }
  }
}

}  // namespace

double ResultRow::metric(const std::string& name) const {
  for (const auto& [k, v] : metrics)
    if (k == name) return v;
  throw std::out_of_range("no metric " + name);
}

bool ResultRow::has_metric(const std::string& name) const {
  for (const auto& [k, v] : metrics)
    if (k == name) return true;
  return false;
}

std::vector<ResultRow> run_bench(const BenchSpec& spec) {
  std::vector<ResultRow> rows;
  std::ofstream trace_file;
  std::ostream* trace = nullptr;
  if (!spec.trace_path.empty()) {
    trace_file.open(spec.trace_path);
    if (!trace_file) throw SimFault("cannot open trace file " + spec.trace_path);
    trace = &trace_file;
  }
  if (spec.experiment == "hash") {
    run_hash(spec, false, trace, rows);
  } else if (spec.experiment == "hash_delete") {
    run_hash(spec, true, trace, rows);
  } else if (spec.experiment == "bst") {
    run_bst(spec, trace, rows);
  } else if (spec.experiment == "sort") {
    run_sort(spec, trace, rows);
  } else if (spec.experiment == "sort_indirect") {
    run_sort_indirect(spec, trace, rows);
  } else if (spec.experiment == "bfs") {
    run_bfs(spec, trace, rows);
  } else if (spec.experiment == "dijkstra") {
    run_dijkstra(spec, trace, rows);
  } else {
    throw SimFault("unknown experiment: " + spec.experiment);
  }
  return rows;
}

std::string emit(const std::vector<ResultRow>& rows, EmitFormat format) {
  std::string out;
  if (format == EmitFormat::Csv) {
    out = "experiment,params,metric,value\n";
    for (const auto& r : rows)
      for (const auto& [name, v] : r.metrics)
        out += r.experiment + "," + r.params + "," + name + "," + fmt2(v) + "\n";
    return out;
  }
  for (const auto& r : rows) {
    out += r.experiment + " [" + r.params + "]\n";
    for (const auto& [name, v] : r.metrics) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "  %-14s %10.2f\n", name.c_str(), v);
      out += buf;
    }
  }
  return out;
}

CompareReport compare(const std::vector<ResultRow>& rows,
                      const std::string& reference_csv) {
  CompareReport rep;
  std::istringstream in(reference_csv);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::string cur;
    for (char ch : line) {
      if (ch == ',') {
        f.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    f.push_back(cur);
    if (f.size() < 5) continue;
    if (f[0] == "experiment") continue;  // header
    CompareCell cell;
    cell.experiment = f[0];
    cell.params = f[1];
    cell.metric = f[2];
    cell.expected = std::stod(f[3]);
    cell.tolerance = std::stod(f[4]);
    cell.relative = f.size() < 6 || f[5] != "abs";
    for (const auto& r : rows) {
      if (r.experiment != cell.experiment || r.params != cell.params) continue;
      if (!r.has_metric(cell.metric)) continue;
      cell.matched = true;
      cell.actual = r.metric(cell.metric);
      double err = cell.relative
                       ? std::abs(cell.actual - cell.expected) /
                             std::max(1e-12, std::abs(cell.expected))
                       : std::abs(cell.actual - cell.expected);
      cell.ok = err <= cell.tolerance;
      break;
    }
    if (!cell.matched)
      rep.missing++;
    else if (!cell.ok)
      rep.failed++;
    rep.cells.push_back(cell);
  }
  return rep;
}

std::string CompareReport::to_string() const {
  std::string out;
  for (const auto& c : cells) {
    char buf[256];
    if (!c.matched) {
      std::snprintf(buf, sizeof(buf), "MISSING %s[%s] %s (expected %.4g)\n",
                    c.experiment.c_str(), c.params.c_str(), c.metric.c_str(),
                    c.expected);
    } else {
      std::snprintf(buf, sizeof(buf), "%s %s[%s] %s actual=%.4g expected=%.4g tol=%.3g%s\n",
                    c.ok ? "ok  " : "FAIL", c.experiment.c_str(),
                    c.params.c_str(), c.metric.c_str(), c.actual, c.expected,
                    c.tolerance, c.relative ? "" : " (abs)");
    }
    out += buf;
  }
  char tail[128];
  std::snprintf(tail, sizeof(tail), "%zu cells, %llu failed, %llu missing\n",
                cells.size(), static_cast<unsigned long long>(failed),
                static_cast<unsigned long long>(missing));
  out += tail;
  return out;
}

}  // namespace wem

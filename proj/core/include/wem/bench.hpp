#pragma once

#include <string>
#include <vector>

#include "wem/khash.hpp"
#include "wem/memsim.hpp"

namespace wem {

// Experiment driver: binds a configuration to one of the table-reproducing
// protocols and emits machine-readable rows. A (spec, seed) pair produces
// byte-identical output.

struct BenchSpec {
  std::string experiment;  // hash hash_delete bst sort sort_indirect bfs dijkstra
  SimConfig sim;           // line_bytes / policy / split_fraction template
  std::vector<uint32_t> cache_lines = {10000};
  std::vector<double> omegas = {10.0, 100.0};
  double scale = 1.0;      // shrinks n and cache proportionally
  uint64_t seed = 1;

  std::vector<uint32_t> ks = {1, 2, 3, 4};       // hash levels
  std::vector<double> alphas = {0.0};            // queries per update
  std::vector<uint64_t> batch_sizes = {1};       // bst
  std::vector<uint32_t> elem_bytes = {8};        // sort record size
  HashParams hash;                               // occupancy bounds, c'
  double epsilon = 0.25;                         // phased dijkstra
  double pq_fraction = 0.4;
  std::string graph = "grid2d:1000x1000";        // generator spec or path
  uint32_t queries = 10;
  std::string trace_path;                        // optional transfer log
};

struct ResultRow {
  std::string experiment;
  std::string params;  // canonical "key=value;key=value" (sorted keys)
  std::vector<std::pair<std::string, double>> metrics;

  double metric(const std::string& name) const;
  bool has_metric(const std::string& name) const;
};

std::vector<ResultRow> run_bench(const BenchSpec& spec);

enum class EmitFormat { Csv, Table };
std::string emit(const std::vector<ResultRow>& rows, EmitFormat format);

// Reference cells: experiment,params,metric,expected,tolerance,kind
// where kind is rel or abs. '#' lines are comments.
struct CompareCell {
  std::string experiment, params, metric;
  double expected = 0, actual = 0, tolerance = 0;
  bool relative = true;
  bool matched = false;  // a produced row covered this reference cell
  bool ok = false;
};

struct CompareReport {
  std::vector<CompareCell> cells;
  uint64_t missing = 0;  // reference cells with no matching row (reported)
  uint64_t failed = 0;
  bool pass() const { return failed == 0; }
  std::string to_string() const;
};

CompareReport compare(const std::vector<ResultRow>& rows,
                      const std::string& reference_csv);

}  // namespace wem

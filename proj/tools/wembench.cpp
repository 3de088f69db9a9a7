// Experiment harness CLI: one subcommand per workload, CSV or aligned-table
// output, optional comparison against a reference sheet.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "wem/bench.hpp"

namespace {

wem::Policy parse_policy(const std::string& name) {
  if (name == "classic") return wem::Policy::Classic;
  if (name == "splitpool") return wem::Policy::SplitPool;
  if (name == "staticpin") return wem::Policy::StaticPin;
  throw CLI::ValidationError("--policy", "expected classic|splitpool|staticpin");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asymmetric-memory transfer-count workbench"};
  app.require_subcommand(1);

  wem::BenchSpec spec;
  std::string policy = "classic";
  std::string format = "csv";
  std::string compare_path;
  std::string out_path;

  const std::vector<std::string> experiments = {
      "hash", "hash_delete", "bst", "sort", "sort_indirect", "bfs", "dijkstra"};
  for (const auto& name : experiments) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--cache-lines", spec.cache_lines,
                    "cache sizes in lines (repeatable)");
    sub->add_option("--line-bytes", spec.sim.line_bytes, "bytes per cache line");
    sub->add_option("--policy", policy, "classic|splitpool|staticpin");
    sub->add_option("--split-fraction", spec.sim.split_fraction,
                    "read-pool share under splitpool");
    sub->add_option("--omega", spec.omegas, "write/read cost ratios (repeatable)");
    sub->add_option("--seed", spec.seed, "random seed");
    sub->add_option("--scale", spec.scale, "problem-size multiplier in (0,1]")
        ->check(CLI::Range(1e-6, 1.0));
    sub->add_option("--k", spec.ks, "hash level counts (repeatable)");
    sub->add_option("--alpha", spec.alphas, "queries per update (repeatable)");
    sub->add_option("--batch-size", spec.batch_sizes,
                    "bst batch sizes (repeatable)");
    sub->add_option("--elem-bytes", spec.elem_bytes,
                    "sort record sizes (repeatable)");
    sub->add_option("--epsilon", spec.epsilon, "phased-dijkstra truncation ratio");
    sub->add_option("--pq-fraction", spec.pq_fraction,
                    "cache share for the phased priority queue");
    sub->add_option("--graph", spec.graph,
                    "grid2d:WxH | grid3d:XxYxZ | powerlaw:N,D | edge-list path");
    sub->add_option("--queries", spec.queries, "graph queries per row");
    sub->add_option("--format", format, "csv|table");
    sub->add_option("--compare", compare_path,
                    "reference CSV; exit status reflects the comparison");
    sub->add_option("--trace", spec.trace_path, "transfer log path (debug)");
    sub->add_option("--output", out_path, "write rows to a file instead of stdout");
  }

  CLI11_PARSE(app, argc, argv);

  spec.experiment = app.get_subcommands().front()->get_name();
  try {
    spec.sim.policy = parse_policy(policy);
    std::vector<wem::ResultRow> rows = wem::run_bench(spec);

    std::string text = wem::emit(
        rows, format == "table" ? wem::EmitFormat::Table : wem::EmitFormat::Csv);
    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(out_path);
      if (!out) throw std::runtime_error("cannot open " + out_path);
      out << text;
    }

    if (!compare_path.empty()) {
      std::ifstream ref(compare_path);
      if (!ref) throw std::runtime_error("cannot open " + compare_path);
      std::stringstream buf;
      buf << ref.rdbuf();
      wem::CompareReport rep = wem::compare(rows, buf.str());
      std::cerr << rep.to_string();
      return rep.pass() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

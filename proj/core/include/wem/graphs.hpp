#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wem/khash.hpp"
#include "wem/memsim.hpp"

namespace wem {

// CSR adjacency over tracked arrays. Undirected edges are stored twice and
// weights, when assigned, are symmetric.
struct Graph {
  uint32_t n = 0;
  uint64_t m = 0;  // undirected edge count; targets holds 2m endpoints
  TypedArray<uint32_t> offsets;  // n+1
  TypedArray<uint32_t> targets;  // 2m
  TypedArray<uint32_t> weights;  // 2m when weighted, else empty

  bool weighted() const { return weights.valid(); }
};

Graph gen_grid2d(MemSim& sim, uint32_t width, uint32_t height);
Graph gen_grid3d(MemSim& sim, uint32_t sx, uint32_t sy, uint32_t sz);

// Preferential-attachment graph with small diameter, the stand-in for the
// social-network instances.
Graph gen_powerlaw(MemSim& sim, uint32_t n, uint32_t edges_per_vertex,
                   uint64_t seed);

// Whitespace-separated edge list with '#' comment lines. Vertices are
// densely re-indexed in first-appearance order; self-loops and duplicate
// edges are dropped; the adjacency is symmetrized.
Graph load_snap(MemSim& sim, const std::string& path);

// Build a graph directly from an edge list (same cleanup as load_snap).
Graph from_edges(MemSim& sim, uint32_t n,
                 const std::vector<std::pair<uint32_t, uint32_t>>& edges);

// One random weight in [1, 10000] per undirected edge, both directions.
void assign_weights(Graph& g, uint64_t seed);

inline constexpr uint32_t kUnreachedHops = 0xFFFFFFFFu;
inline constexpr int64_t kUnreachedDist = INT64_MAX;

struct BfsStats {
  uint32_t depth = 0;
  uint64_t max_frontier = 0;
  double avg_frontier = 0.0;
};

std::vector<uint32_t> bfs_classic(MemSim& sim, Graph& g, uint32_t s,
                                  BfsStats* stats = nullptr);
std::vector<uint32_t> bfs_rotating(MemSim& sim, Graph& g, uint32_t s,
                                   BfsStats* stats = nullptr);

enum class BidirFlavor { Classic, Rotating };
std::optional<uint32_t> bfs_bidirectional(MemSim& sim, Graph& g, uint32_t s,
                                          uint32_t t, BidirFlavor flavor);

std::vector<int64_t> dijkstra_heap(MemSim& sim, Graph& g, uint32_t s);

struct PhasedParams {
  uint64_t m_prime = 0;          // 0: derive from pq_cache_fraction
  double epsilon = 0.25;         // truncation ratio
  double pq_cache_fraction = 0.4;
};

struct PhasedStats {
  uint64_t phases = 0;
  uint64_t max_queue = 0;
  uint64_t truncations = 0;
  uint64_t m_prime = 0;
};

std::vector<int64_t> dijkstra_phased(MemSim& sim, Graph& g, uint32_t s,
                                     const PhasedParams& params,
                                     PhasedStats* stats = nullptr);

}  // namespace wem

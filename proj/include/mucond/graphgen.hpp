#pragma once

#include <cstdint>
#include <vector>

#include "mucond/graph.hpp"

namespace mucond {

struct CoreDecomposition {
  std::vector<int> core_number;  // per vertex, unweighted degrees
  int max_core = 0;
};

// Bucket peeling in O(n + m).
CoreDecomposition core_numbers(const Graph& g);

// Induced subgraph on {v : core(v) >= k}. An empty k-core comes back as a
// zero-vertex graph (check num_vertices()); the result may be disconnected,
// chain largest_connected_component as needed.
SubgraphResult k_core_subgraph(const Graph& g, int k);

struct SynthConfig {
  index_t n = 537;
  int dim = 2;
  double core_fraction = 0.10;
  double core_scale = 0.1;
  double periphery_scale = 1.5;
  int neighbors = 5;
  std::uint64_t seed = 1;
};

struct SynthResult {
  Graph graph;
  std::vector<double> coords;       // n x dim, row-major
  std::vector<std::uint8_t> is_core;
};

// Core-periphery point cloud: n standard-normal points, a uniformly chosen
// core_fraction subset pulled in by core_scale, the rest spread by
// periphery_scale, then the union of directed k-nearest-neighbor edges
// (self excluded), unweighted. Min degree is `neighbors` by construction.
SynthResult generate_core_periphery(const SynthConfig& cfg);

}  // namespace mucond

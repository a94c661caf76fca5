#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mucond/graph.hpp"

namespace mucond {

struct BruteResult {
  double phi = 0.0;
  std::vector<index_t> argmin;    // sorted member list
  long long feasible_count = 0;   // subsets inside the volume window
  long long visited_count = 0;    // nonempty proper subsets enumerated
};

// Exact mu-conductance by subset enumeration in Gray-code order with O(deg)
// incremental cut/volume updates. Window mu*Vol <= Vol(S) <= Vol/2 with 1e-12
// relative slack; ties broken by lexicographically smallest member list.
// Errors: n > 24, disconnected graph, empty feasible window.
BruteResult brute_mu_conductance(const Graph& g, double mu);

// Same enumeration with only the Vol(S) <= Vol/2 side enforced.
BruteResult brute_min_conductance(const Graph& g);

struct DenseSpectrum {
  std::vector<double> values;   // ascending
  std::vector<double> vectors;  // n*n row-major; column j is eigenvector j
};

// Full spectrum of a dense symmetric matrix (row-major). Hard cap n <= 64:
// this is a reference for tests, not a production path.
DenseSpectrum dense_eig_reference(std::span<const double> sym, index_t n);

DenseSpectrum dense_laplacian_spectrum(const Graph& g);
// Spectrum of D^{-1/2} L D^{-1/2}; equals the generalized (L, D) spectrum.
DenseSpectrum dense_normalized_spectrum(const Graph& g);

}  // namespace mucond

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mucond/graph.hpp"

namespace mucond {

// Matrix-free symmetric operator.
struct SymOperator {
  index_t n = 0;
  std::function<void(std::span<const double>, std::span<double>)> apply;
};

SymOperator laplacian_operator(const Graph& g);
// D^{-1/2} (D - A) D^{-1/2}; requires positive degrees.
SymOperator normalized_laplacian_operator(const Graph& g);

struct EigResult {
  double value = 0.0;
  std::vector<double> vector;
  double residual_norm = 0.0;  // ||A v - value v||_2, recomputed at return
  int iterations = 0;          // matvec count
  bool converged = false;
};

struct LanczosOptions {
  double tol = 1e-8;
  int max_iter = 0;       // 0: min(10 n, 5000)
  int max_subspace = 48;  // Krylov dimension per restart cycle
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
};

// Smallest eigenpair by restarted Lanczos with full reorthogonalization.
// Iterates are kept orthogonal to the (orthonormal) deflation vectors, so the
// result is the smallest eigenpair of the operator restricted to their
// complement. Returns converged=false with the best Ritz pair if the matvec
// budget runs out.
EigResult smallest_eigenpair(const SymOperator& op, const LanczosOptions& opts = {},
                             std::span<const std::vector<double>> deflation = {});

struct GeneralizedEigs {
  std::vector<double> values;               // ascending, length k
  std::vector<std::vector<double>> vectors; // x_j^T D x_j = 1, x_j^T d = 0
};

// k smallest nonzero eigenpairs of L x = lambda D x on a connected graph,
// via the normalized Laplacian with the trivial eigenvector deflated and
// sequential deflation of found pairs (handles multiplicities). Errors when
// a second near-zero eigenvalue shows up (disconnected input) or k >= n.
GeneralizedEigs smallest_k_nonzero_generalized(const Graph& g, int k,
                                               const LanczosOptions& opts = {});

// lambda_2 / 2, the sweep-free spectral lower bound on conductance.
double lambda2_lower_bound_point(const Graph& g, const LanczosOptions& opts = {});

// Eigen-decomposition of a symmetric tridiagonal matrix by implicit-shift QL.
// diag has length m; off has length m-1. On return diag holds eigenvalues in
// ascending order and z (m*m, row-major, input identity or any basis to
// rotate) holds eigenvectors in its columns.
void tridiagonal_eig(std::vector<double>& diag, std::vector<double>& off,
                     std::vector<double>& z);

}  // namespace mucond

#pragma once

#include <span>
#include <utility>
#include <vector>

#include "mucond/eig.hpp"
#include "mucond/graph.hpp"
#include "mucond/lrsdp.hpp"

namespace mucond {

// Z = L - lambda D - beta d d^T - Diag(gamma), applied matrix-free (the
// rank-one term as d (d^T x)). gamma is copied; the graph must outlive the
// operator.
SymOperator dual_slack_operator(const Graph& g, double lambda, double beta,
                                std::span<const double> gamma);

struct ThetaResult {
  double theta = 0.0;      // max(0, -(lambda_min_estimate - residual)), residual-padded
  double theta_raw = 0.0;  // max(0, -lambda_min_estimate)
  double residual = 0.0;
  double lambda_min_estimate = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Smallest eigenvalue of z restricted to the complement of the (orthonormal)
// deflation vectors. certify_run deflates the degree direction: the
// multiplier on the redundant constraint ||Y^T d||^2 = 0 is free at feasible
// points, and its best admissible choice removes exactly that direction.
ThetaResult compute_theta(const SymOperator& z, const LanczosOptions& opts = {},
                          std::span<const std::vector<double>> deflation = {});

struct CertifiedBound {
  double mu = 0.0;
  int k = 0;
  double objective = 0.0;
  double theta = 0.0;
  double theta_raw = 0.0;
  double theta_residual = 0.0;
  double trace_cap = 0.0;  // min(1, (1-mu) n / (mu Vol))
  double bound = 0.0;      // (objective - theta * trace_cap) / 2
  bool certified = false;  // solver and eigensolver both converged
  bool solver_converged = false;
  bool eig_converged = false;
  double eig_lambda_min = 0.0;
  int eig_iterations = 0;
  int outer_iterations = 0;
  long long inner_iterations = 0;
  double sigma_final = 0.0;
  ResidualReport residuals;
  double alm_seconds = 0.0;
  double eigval_seconds = 0.0;
};

CertifiedBound theorem1_bound(const KktSolution& kkt, const ThetaResult& theta,
                              const MuProblem& p);

// Solve + certify in one call, with wall times filled in.
CertifiedBound certify_run(const Graph& g, double mu, int k, const AlmConfig& cfg,
                           const LanczosOptions& eig_opts = {});

struct ProfileLowerBound {
  std::vector<std::pair<double, double>> points;  // (mu, running-max bound)
  std::vector<double> raw_bounds;
};

// Running maximum over bounds listed by strictly increasing mu (valid since
// phi_mu is non-decreasing in mu). Duplicate mu values are an error.
ProfileLowerBound monotone_envelope(std::span<const std::pair<double, double>> mu_bounds);

}  // namespace mucond

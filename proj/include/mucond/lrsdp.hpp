#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mucond/graph.hpp"

namespace mucond {

// Rank-k factorized relaxation of the mu-conductance spectral program:
//   minimize Tr(Y^T L Y)
//   s.t.     Tr(Y^T D Y) = 1,  Y^T d = 0,
//            Diag(Y Y^T) + s = cap_hi * 1,  0 <= s <= s_hi,
// with cap_hi = (1-mu)/(mu Vol) and s_hi = (1-2mu)/(mu (1-mu) Vol).
// The degree orthogonality is kept as k linear constraints (one per column)
// rather than the single equation ||Y^T d||^2 = 0: the squared form has an
// identically vanishing gradient on its own feasible set, so no finite
// multiplier exists for it and first-order multiplier updates crawl.
struct MuProblem {
  const Graph* graph = nullptr;
  double mu = 0.0;
  int rank = 0;
  double cap_hi = 0.0;
  double s_hi = 0.0;

  static MuProblem make(const Graph& g, double mu, int rank);
};

struct AlmConfig {
  double sigma0 = 10.0;
  double sigma_growth = 10.0;
  double tol_stat = 1e-5;
  double tol_feas = 1e-5;
  int max_outer = 100;
  int max_inner = 20000;
  int lbfgs_memory = 10;
  std::uint64_t seed = 20240901;
};

AlmConfig alm_config_from_json(const std::string& text);
std::string alm_config_to_json(const AlmConfig& c);

// Primal iterate plus multiplier/penalty state. Y is row-major n x k;
// beta carries one multiplier per column of the Y^T d = 0 block.
struct LrsdpState {
  index_t n = 0;
  int k = 0;
  std::vector<double> Y;
  std::vector<double> s;
  double lambda = 0.0;
  std::vector<double> beta;
  std::vector<double> gamma;
  double sigma = 10.0;
};

struct ConstraintValues {
  double ce = 0.0;             // Tr(Y^T D Y) - 1
  std::vector<double> cf;      // Y^T d, one entry per column
  double cf_inf = 0.0;
  std::vector<double> cg;      // Diag(YY^T) + s - cap_hi
  double cg_inf = 0.0;
  double feas_inf = 0.0;       // max(|ce|, cf_inf, cg_inf)
};

ConstraintValues constraint_values(const LrsdpState& st, const MuProblem& p);

double augmented_lagrangian(const LrsdpState& st, const MuProblem& p);
// grad_Y is n*k row-major, grad_s length n.
void augmented_lagrangian_gradient(const LrsdpState& st, const MuProblem& p,
                                   std::span<double> grad_Y, std::span<double> grad_s);

struct InnerReport {
  double f = 0.0;
  double measure = 0.0;
  int iterations = 0;
  long long evaluations = 0;
  bool converged = false;
  bool line_search_failed = false;
};

// Minimizes the augmented Lagrangian over (Y, s in [0, s_hi]) at fixed
// multipliers/penalty, in place. The convergence measure blends the
// Frobenius stationarity of the Y block with the box-projected s gradient,
// matching the outer loop's reported stationarity.
InnerReport inner_solve(LrsdpState& st, const MuProblem& p, double inner_tol,
                        const AlmConfig& cfg);

struct ResidualReport {
  double stationarity = 0.0;    // max(stationarity_y, stationarity_s)
  double stationarity_y = 0.0;  // ||2(L - l*D - Diag(g*)) Y - d b*^T||_F / (2 + 2||Y||_F)
  double stationarity_s = 0.0;  // inf norm of box-projected s gradient
  double ce_abs = 0.0;
  double cf_inf = 0.0;
  double cg_inf = 0.0;
  double comp_lower = 0.0;      // sum g*_i s_i
  double comp_upper = 0.0;      // sum l*_i (s_hi - s_i)
};

struct KktSolution {
  index_t n = 0;
  int k = 0;
  std::vector<double> Y;
  std::vector<double> s;
  double lambda_eff = 0.0;
  std::vector<double> beta_eff;
  std::vector<double> gamma_eff;
  std::vector<double> g_box;  // multipliers for s >= 0
  std::vector<double> l_box;  // multipliers for s <= s_hi
  double objective = 0.0;     // Tr(Y^T L Y)
  ResidualReport residuals;
  bool converged = false;
  int outer_iterations = 0;
  long long inner_iterations = 0;
  double sigma_final = 0.0;
};

// Effective multipliers, box multipliers and the full residual report for an
// iterate; this is what alm_solve returns and what the certificate consumes.
KktSolution make_kkt_solution(const LrsdpState& st, const MuProblem& p);

// Eigenvector warm start: Y0 = (1/sqrt(k)) [x_1 ... x_k] from the k smallest
// nonzero generalized eigenpairs, s0 = clamp(cap_hi - Diag(Y0 Y0^T), 0, s_hi),
// zero multipliers, sigma = sigma0.
LrsdpState initialize(const MuProblem& p, const AlmConfig& cfg);

// Full augmented-Lagrangian loop: inner solves, multiplier updates while the
// feasibility norm keeps contracting, penalty growth (capped at 1e12) when it
// stalls. Always returns the best iterate found; converged=false marks a
// heuristic (uncertified) point.
KktSolution alm_solve(const MuProblem& p, const AlmConfig& cfg);

}  // namespace mucond

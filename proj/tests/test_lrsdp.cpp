#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "mucond/lrsdp.hpp"
#include "mucond/rng.hpp"

using namespace mucond;

namespace {

Graph complete(index_t n) {
  std::vector<std::tuple<index_t, index_t, double>> e;
  for (index_t u = 0; u < n; ++u)
    for (index_t v = u + 1; v < n; ++v) e.emplace_back(u, v, 1.0);
  return Graph::from_edges(n, e);
}

Graph barbell() {
  std::vector<std::tuple<index_t, index_t, double>> e;
  for (index_t u = 0; u < 4; ++u)
    for (index_t v = u + 1; v < 4; ++v) {
      e.emplace_back(u, v, 1.0);
      e.emplace_back(u + 4, v + 4, 1.0);
    }
  e.emplace_back(3, 4, 1.0);
  return Graph::from_edges(8, e);
}

// Independent dense route for the augmented Lagrangian value, built from
// explicit Eigen matrices instead of CSR matvecs and fused loops.
double dense_al(const LrsdpState& st, const MuProblem& p) {
  const Graph& g = *p.graph;
  const index_t n = g.num_vertices();
  const int k = st.k;
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd d(n);
  for (index_t v = 0; v < n; ++v) {
    d[v] = g.degree(v);
    L(v, v) = d[v];
    auto nb = g.neighbors(v);
    auto w = g.weights(v);
    for (std::size_t i = 0; i < nb.size(); ++i) L(v, nb[i]) -= w[i];
  }
  Eigen::MatrixXd Y(n, k);
  for (index_t v = 0; v < n; ++v)
    for (int c = 0; c < k; ++c) Y(v, c) = st.Y[v * k + c];

  double obj = (Y.transpose() * L * Y).trace();
  double ce = (Y.transpose() * d.asDiagonal() * Y).trace() - 1.0;
  Eigen::VectorXd w = Y.transpose() * d;
  Eigen::VectorXd cg = (Y * Y.transpose()).diagonal();
  for (index_t v = 0; v < n; ++v) cg[v] += st.s[v] - p.cap_hi;
  double gdot = 0.0, cg_sq = 0.0;
  for (index_t v = 0; v < n; ++v) {
    gdot += st.gamma[v] * cg[v];
    cg_sq += cg[v] * cg[v];
  }
  double bdot = 0.0;
  for (int c = 0; c < k; ++c) bdot += st.beta[c] * w[c];
  return obj - st.lambda * ce - bdot - gdot +
         0.5 * st.sigma * (ce * ce + w.squaredNorm() + cg_sq);
}

LrsdpState random_state(const MuProblem& p, std::uint64_t seed) {
  const index_t n = p.graph->num_vertices();
  Rng rng(seed);
  LrsdpState st;
  st.n = n;
  st.k = p.rank;
  st.Y.resize(n * p.rank);
  for (double& y : st.Y) y = 0.3 * rng.normal();
  st.s.resize(n);
  for (double& v : st.s) v = p.s_hi * rng.uniform01();
  st.gamma.resize(n);
  for (double& v : st.gamma) v = rng.normal();
  st.lambda = rng.normal();
  st.beta.resize(p.rank);
  for (double& v : st.beta) v = rng.normal();
  st.sigma = 2.0 + 8.0 * rng.uniform01();
  return st;
}

}  // namespace

TEST_SUITE("lrsdp") {

TEST_CASE("problem constants") {
  Graph k4 = complete(4);  // Vol = 12
  MuProblem p = MuProblem::make(k4, 0.25, 2);
  CHECK(p.cap_hi == doctest::Approx(0.75 / (0.25 * 12.0)));
  CHECK(p.s_hi == doctest::Approx(0.5 / (0.25 * 0.75 * 12.0)));
  MuProblem half = MuProblem::make(k4, 0.5, 2);
  CHECK(half.cap_hi == doctest::Approx(1.0 / 12.0));
  CHECK(half.s_hi == 0.0);

  CHECK_THROWS_AS(MuProblem::make(k4, 0.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(MuProblem::make(k4, 0.6, 2), std::invalid_argument);
  CHECK_THROWS_AS(MuProblem::make(k4, -0.1, 2), std::invalid_argument);
  CHECK_THROWS_AS(MuProblem::make(k4, 0.3, 0), std::invalid_argument);
}

TEST_CASE("constraint values on a handcrafted state") {
  Graph k4 = complete(4);
  MuProblem p = MuProblem::make(k4, 0.25, 1);
  LrsdpState st;
  st.n = 4;
  st.k = 1;
  st.Y = {0.5, -0.5, 0.5, -0.5};
  st.s = {0.0, 0.1, 0.2, 0.0};
  st.beta.assign(1, 0.0);
  st.gamma.assign(4, 0.0);
  ConstraintValues cv = constraint_values(st, p);
  // Tr(Y^T D Y) = 3 * (4 * 0.25) = 3; Y^T d = 0 by the sign pattern.
  CHECK(cv.ce == doctest::Approx(2.0));
  REQUIRE(cv.cf.size() == 1);
  CHECK(cv.cf[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(cv.cf_inf == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(cv.cg[0] == doctest::Approx(0.25 + 0.0 - 0.25));
  CHECK(cv.cg[1] == doctest::Approx(0.25 + 0.1 - 0.25));
  CHECK(cv.cg_inf == doctest::Approx(0.2));
  CHECK(cv.feas_inf == doctest::Approx(2.0));
}

TEST_CASE("augmented lagrangian matches the dense oracle") {
  for (auto [graph, mu, k] : {std::tuple<int, double, int>{0, 0.25, 3},
                              {0, 0.5, 2},
                              {1, 0.1, 4},
                              {1, 0.37, 1}}) {
    Graph g = graph == 0 ? complete(4) : barbell();
    MuProblem p = MuProblem::make(g, mu, k);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      LrsdpState st = random_state(p, seed);
      CHECK(augmented_lagrangian(st, p) ==
            doctest::Approx(dense_al(st, p)).epsilon(1e-11));
    }
  }
}

TEST_CASE("analytic gradient agrees with central differences") {
  Graph g = barbell();
  MuProblem p = MuProblem::make(g, 0.2, 3);
  const index_t n = g.num_vertices();
  const double h = 1e-6;
  for (std::uint64_t seed : {11u, 12u}) {
    LrsdpState st = random_state(p, seed);
    std::vector<double> gy(n * p.rank), gs(n);
    augmented_lagrangian_gradient(st, p, gy, gs);
    Rng pick(seed * 977);
    for (int probe = 0; probe < 12; ++probe) {
      std::size_t i = pick.below(st.Y.size());
      double keep = st.Y[i];
      st.Y[i] = keep + h;
      double fp = augmented_lagrangian(st, p);
      st.Y[i] = keep - h;
      double fm = augmented_lagrangian(st, p);
      st.Y[i] = keep;
      double fd = (fp - fm) / (2.0 * h);
      CHECK(std::fabs(fd - gy[i]) <= 1e-6 * (1.0 + std::fabs(gy[i])));
    }
    for (int probe = 0; probe < 6; ++probe) {
      std::size_t i = pick.below(st.s.size());
      double keep = st.s[i];
      st.s[i] = keep + h;
      double fp = augmented_lagrangian(st, p);
      st.s[i] = keep - h;
      double fm = augmented_lagrangian(st, p);
      st.s[i] = keep;
      double fd = (fp - fm) / (2.0 * h);
      CHECK(std::fabs(fd - gs[i]) <= 1e-6 * (1.0 + std::fabs(gs[i])));
    }
  }
}

TEST_CASE("state validation") {
  Graph k4 = complete(4);
  MuProblem p = MuProblem::make(k4, 0.25, 2);
  LrsdpState st = random_state(p, 1);
  st.s.pop_back();
  CHECK_THROWS_AS(augmented_lagrangian(st, p), std::invalid_argument);
  LrsdpState wrong = random_state(MuProblem::make(k4, 0.25, 3), 1);
  CHECK_THROWS_AS(augmented_lagrangian(wrong, p), std::invalid_argument);
}

TEST_CASE("initialize is feasible up to the cap constraint") {
  Graph b = barbell();
  MuProblem p = MuProblem::make(b, 0.15, 3);
  AlmConfig cfg;
  LrsdpState st = initialize(p, cfg);
  ConstraintValues cv = constraint_values(st, p);
  CHECK(cv.ce == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(cv.cf_inf == doctest::Approx(0.0).epsilon(1e-10));
  for (index_t v = 0; v < b.num_vertices(); ++v) {
    CHECK(st.s[v] >= 0.0);
    CHECK(st.s[v] <= p.s_hi + 1e-15);
  }
  CHECK(st.sigma == cfg.sigma0);
  CHECK_THROWS_AS(initialize(MuProblem::make(complete(3), 0.2, 3), cfg),
                  std::invalid_argument);
}

TEST_CASE("inner solve descends and meets its tolerance") {
  Graph b = barbell();
  MuProblem p = MuProblem::make(b, 0.2, 2);
  AlmConfig cfg;
  LrsdpState st = random_state(p, 42);
  st.gamma.assign(st.gamma.size(), 0.0);
  st.lambda = 0.0;
  st.beta.assign(st.beta.size(), 0.0);
  st.sigma = 10.0;
  double before = augmented_lagrangian(st, p);
  InnerReport ir = inner_solve(st, p, 1e-6, cfg);
  CHECK(ir.converged);
  CHECK(ir.measure <= 1e-6);
  CHECK(ir.f < before);
  CHECK(augmented_lagrangian(st, p) == doctest::Approx(ir.f).epsilon(1e-12));
  for (index_t v = 0; v < b.num_vertices(); ++v) {
    CHECK(st.s[v] >= 0.0);
    CHECK(st.s[v] <= p.s_hi + 1e-15);
  }
}

TEST_CASE("alm on K4 at mu = 1/2 recovers the bisection solution") {
  Graph k4 = complete(4);
  MuProblem p = MuProblem::make(k4, 0.5, 3);
  AlmConfig cfg;
  cfg.tol_stat = 1e-7;
  cfg.tol_feas = 1e-7;
  KktSolution sol = alm_solve(p, cfg);
  CHECK(sol.converged);
  // lambda_mu(K4, 1/2) = lambda_2 = 4/3; the certified bound halves it.
  CHECK(sol.objective == doctest::Approx(4.0 / 3.0).epsilon(1e-5));
  CHECK(sol.residuals.ce_abs <= 1e-7);
  CHECK(sol.residuals.cf_inf <= 1e-7);
  CHECK(sol.residuals.cg_inf <= 1e-7);
  // s_hi = 0 forces s = 0 and Diag(YY^T) = 1/Vol exactly at feasibility.
  for (index_t v = 0; v < 4; ++v) {
    CHECK(std::fabs(sol.s[v]) <= 1e-8);
    double rs = 0.0;
    for (int c = 0; c < sol.k; ++c) rs += sol.Y[v * sol.k + c] * sol.Y[v * sol.k + c];
    CHECK(rs == doctest::Approx(1.0 / 12.0).epsilon(1e-5));
  }
}

TEST_CASE("alm at tiny mu reproduces the spectral relaxation") {
  Graph k4 = complete(4);
  MuProblem p = MuProblem::make(k4, 1e-6, 1);
  AlmConfig cfg;
  cfg.tol_stat = 1e-8;
  cfg.tol_feas = 1e-8;
  KktSolution sol = alm_solve(p, cfg);
  CHECK(sol.converged);
  CHECK(sol.objective == doctest::Approx(4.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("kkt report: box multipliers and complementarity") {
  Graph b = barbell();
  MuProblem p = MuProblem::make(b, 0.3, 3);
  AlmConfig cfg;
  KktSolution sol = alm_solve(p, cfg);
  CHECK(sol.converged);
  REQUIRE(sol.g_box.size() == sol.s.size());
  for (std::size_t i = 0; i < sol.s.size(); ++i) {
    CHECK(sol.g_box[i] >= 0.0);
    CHECK(sol.l_box[i] >= 0.0);
  }
  CHECK(sol.residuals.comp_lower <= 1e-4);
  CHECK(sol.residuals.comp_upper <= 1e-4);
  CHECK(sol.residuals.stationarity ==
        doctest::Approx(std::max(sol.residuals.stationarity_y,
                                 sol.residuals.stationarity_s)));
  CHECK(sol.residuals.stationarity <= cfg.tol_stat);
}

TEST_CASE("alm is deterministic for a fixed seed") {
  Graph b = barbell();
  MuProblem p = MuProblem::make(b, 0.25, 2);
  AlmConfig cfg;
  KktSolution a = alm_solve(p, cfg);
  KktSolution c = alm_solve(p, cfg);
  CHECK(a.objective == c.objective);
  CHECK(a.Y == c.Y);
  CHECK(a.s == c.s);
  CHECK(a.outer_iterations == c.outer_iterations);
}

TEST_CASE("alm rejects a disconnected graph") {
  Graph disc = Graph::from_edges(
      4, std::vector<std::tuple<index_t, index_t, double>>{{0, 1, 1.0}, {2, 3, 1.0}});
  MuProblem p = MuProblem::make(disc, 0.3, 2);
  CHECK_THROWS_AS(alm_solve(p, AlmConfig{}), std::invalid_argument);
}

TEST_CASE("config json round trip and validation") {
  AlmConfig c;
  c.sigma0 = 5.5;
  c.sigma_growth = 3.0;
  c.tol_stat = 2e-6;
  c.tol_feas = 3e-7;
  c.max_outer = 42;
  c.max_inner = 999;
  c.lbfgs_memory = 9;
  c.seed = 123456789ULL;
  AlmConfig r = alm_config_from_json(alm_config_to_json(c));
  CHECK(r.sigma0 == c.sigma0);
  CHECK(r.sigma_growth == c.sigma_growth);
  CHECK(r.tol_stat == c.tol_stat);
  CHECK(r.tol_feas == c.tol_feas);
  CHECK(r.max_outer == c.max_outer);
  CHECK(r.max_inner == c.max_inner);
  CHECK(r.lbfgs_memory == c.lbfgs_memory);
  CHECK(r.seed == c.seed);

  // Partial objects keep defaults for the rest.
  AlmConfig partial = alm_config_from_json("{\"tol_stat\": 1e-7}");
  CHECK(partial.tol_stat == 1e-7);
  CHECK(partial.sigma0 == AlmConfig{}.sigma0);

  CHECK_THROWS_AS(alm_config_from_json("{\"typo\": 1}"), std::runtime_error);
  CHECK_THROWS_AS(alm_config_from_json("{\"sigma0\": -1}"), std::runtime_error);
  CHECK_THROWS_AS(alm_config_from_json("[1, 2]"), std::runtime_error);
}

}  // TEST_SUITE("lrsdp")

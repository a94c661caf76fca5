#include "mucond/lrsdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "mucond/eig.hpp"
#include "mucond/lbfgsb.hpp"

namespace mucond {

MuProblem MuProblem::make(const Graph& g, double mu, int rank) {
  if (!(mu > 0.0) || mu > 0.5)
    throw std::invalid_argument("lrsdp: mu must be in (0, 1/2]");
  if (rank < 1) throw std::invalid_argument("lrsdp: rank must be >= 1");
  if (g.num_vertices() < 2) throw std::invalid_argument("lrsdp: graph too small");
  if (g.has_isolated_vertex())
    throw std::invalid_argument("lrsdp: graph has a zero-degree vertex");
  MuProblem p;
  p.graph = &g;
  p.mu = mu;
  p.rank = rank;
  const double vol = g.volume();
  p.cap_hi = (1.0 - mu) / (mu * vol);
  p.s_hi = (1.0 - 2.0 * mu) / (mu * (1.0 - mu) * vol);
  return p;
}

namespace {

// One fused pass: objective, constraints and (optionally) gradients.
// grad_Y/grad_s may be empty spans to skip gradient work.
struct EvalWork {
  std::vector<double> ly;      // n*k
  std::vector<double> w;       // k, Y^T d
  std::vector<double> be;      // k, effective beta
  std::vector<double> rowsq;   // n
  std::vector<double> cg;      // n
};

double eval_core(const MuProblem& p, std::span<const double> Y, std::span<const double> s,
                 double lambda, std::span<const double> beta, std::span<const double> gamma,
                 double sigma, std::span<double> grad_Y, std::span<double> grad_s, EvalWork& wk,
                 ConstraintValues* cv_out, double* obj_out) {
  const Graph& g = *p.graph;
  const index_t n = g.num_vertices();
  const int k = p.rank;

  wk.ly.resize(n * k);
  wk.w.assign(k, 0.0);
  wk.rowsq.resize(n);
  wk.cg.resize(n);

  for (index_t v = 0; v < n; ++v) {
    const double* yv = Y.data() + v * k;
    double* lv = wk.ly.data() + v * k;
    const double dv = g.degree(v);
    for (int c = 0; c < k; ++c) lv[c] = dv * yv[c];
    auto nb = g.neighbors(v);
    auto ws = g.weights(v);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      const double* yu = Y.data() + nb[i] * k;
      const double wvu = ws[i];
      for (int c = 0; c < k; ++c) lv[c] -= wvu * yu[c];
    }
    double rs = 0.0;
    for (int c = 0; c < k; ++c) {
      rs += yv[c] * yv[c];
      wk.w[c] += dv * yv[c];
    }
    wk.rowsq[v] = rs;
  }

  double obj = 0.0, trd = 0.0, cg_sq = 0.0, cg_inf = 0.0, gdot = 0.0;
  for (index_t v = 0; v < n; ++v) {
    const double* yv = Y.data() + v * k;
    const double* lv = wk.ly.data() + v * k;
    for (int c = 0; c < k; ++c) obj += yv[c] * lv[c];
    trd += g.degree(v) * wk.rowsq[v];
    const double cgv = wk.rowsq[v] + s[v] - p.cap_hi;
    wk.cg[v] = cgv;
    cg_sq += cgv * cgv;
    cg_inf = std::max(cg_inf, std::fabs(cgv));
    gdot += gamma[v] * cgv;
  }
  const double ce = trd - 1.0;
  double bdot = 0.0, cf_sq = 0.0, cf_inf = 0.0;
  for (int c = 0; c < k; ++c) {
    bdot += beta[c] * wk.w[c];
    cf_sq += wk.w[c] * wk.w[c];
    cf_inf = std::max(cf_inf, std::fabs(wk.w[c]));
  }

  const double f = obj - lambda * ce - bdot - gdot +
                   0.5 * sigma * (ce * ce + cf_sq + cg_sq);

  if (!grad_Y.empty()) {
    const double le = lambda - sigma * ce;   // effective multiplier for (e)
    wk.be.resize(k);
    for (int c = 0; c < k; ++c) wk.be[c] = beta[c] - sigma * wk.w[c];
    for (index_t v = 0; v < n; ++v) {
      const double* yv = Y.data() + v * k;
      const double* lv = wk.ly.data() + v * k;
      double* gv = grad_Y.data() + v * k;
      const double dv = g.degree(v);
      const double ge = gamma[v] - sigma * wk.cg[v];
      for (int c = 0; c < k; ++c)
        gv[c] = 2.0 * (lv[c] - le * dv * yv[c] - ge * yv[c]) - wk.be[c] * dv;
    }
  }
  if (!grad_s.empty()) {
    for (index_t v = 0; v < n; ++v) grad_s[v] = -gamma[v] + sigma * wk.cg[v];
  }
  if (cv_out) {
    cv_out->ce = ce;
    cv_out->cf.assign(wk.w.begin(), wk.w.end());
    cv_out->cf_inf = cf_inf;
    cv_out->cg.assign(wk.cg.begin(), wk.cg.end());
    cv_out->cg_inf = cg_inf;
    cv_out->feas_inf = std::max({std::fabs(ce), cf_inf, cg_inf});
  }
  if (obj_out) *obj_out = obj;
  return f;
}

void check_state(const LrsdpState& st, const MuProblem& p) {
  const index_t n = p.graph->num_vertices();
  if (st.n != n || st.k != p.rank)
    throw std::invalid_argument("lrsdp: state does not match problem dimensions");
  if (static_cast<index_t>(st.Y.size()) != n * p.rank ||
      static_cast<index_t>(st.s.size()) != n ||
      static_cast<int>(st.beta.size()) != p.rank ||
      static_cast<index_t>(st.gamma.size()) != n)
    throw std::invalid_argument("lrsdp: state buffer sizes are inconsistent");
}

}  // namespace

ConstraintValues constraint_values(const LrsdpState& st, const MuProblem& p) {
  check_state(st, p);
  EvalWork wk;
  ConstraintValues cv;
  eval_core(p, st.Y, st.s, st.lambda, st.beta, st.gamma, st.sigma, {}, {}, wk, &cv, nullptr);
  return cv;
}

double augmented_lagrangian(const LrsdpState& st, const MuProblem& p) {
  check_state(st, p);
  EvalWork wk;
  return eval_core(p, st.Y, st.s, st.lambda, st.beta, st.gamma, st.sigma, {}, {}, wk, nullptr,
                   nullptr);
}

void augmented_lagrangian_gradient(const LrsdpState& st, const MuProblem& p,
                                   std::span<double> grad_Y, std::span<double> grad_s) {
  check_state(st, p);
  const index_t n = st.n;
  if (static_cast<index_t>(grad_Y.size()) != n * st.k ||
      static_cast<index_t>(grad_s.size()) != n)
    throw std::invalid_argument("lrsdp: gradient buffer sizes");
  EvalWork wk;
  eval_core(p, st.Y, st.s, st.lambda, st.beta, st.gamma, st.sigma, grad_Y, grad_s, wk, nullptr,
            nullptr);
}

InnerReport inner_solve(LrsdpState& st, const MuProblem& p, double inner_tol,
                        const AlmConfig& cfg) {
  check_state(st, p);
  const index_t n = st.n;
  const int k = st.k;
  const std::size_t nk = static_cast<std::size_t>(n) * k;

  std::vector<double> x(nk + n);
  std::copy(st.Y.begin(), st.Y.end(), x.begin());
  std::copy(st.s.begin(), st.s.end(), x.begin() + nk);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> lo(nk + n, -inf), hi(nk + n, inf);
  for (index_t v = 0; v < n; ++v) {
    lo[nk + v] = 0.0;
    hi[nk + v] = p.s_hi;
  }

  EvalWork wk;
  auto fg = [&](std::span<const double> z, std::span<double> grad) {
    return eval_core(p, z.subspan(0, nk), z.subspan(nk, n), st.lambda, st.beta, st.gamma,
                     st.sigma, grad.subspan(0, nk), grad.subspan(nk, n), wk, nullptr, nullptr);
  };
  // Match the outer loop's stationarity: Frobenius norm of the Y gradient
  // over 2(1+||Y||_F), plus the box-projected s residual.
  auto measure = [&](std::span<const double> z, std::span<const double> grad,
                     std::span<const double> pg) {
    double gy = 0.0, yn = 0.0;
    for (std::size_t i = 0; i < nk; ++i) {
      gy += grad[i] * grad[i];
      yn += z[i] * z[i];
    }
    double stat_y = 0.5 * std::sqrt(gy) / (1.0 + std::sqrt(yn));
    double stat_s = 0.0;
    for (std::size_t i = nk; i < pg.size(); ++i) stat_s = std::max(stat_s, std::fabs(pg[i]));
    return std::max(stat_y, stat_s);
  };

  BoxLbfgsOptions opts;
  opts.memory = cfg.lbfgs_memory;
  opts.max_iterations = cfg.max_inner;
  opts.tol = inner_tol;
  opts.measure = measure;
  BoxLbfgsReport r = minimize_box_lbfgs(fg, x, lo, hi, opts);

  std::copy(x.begin(), x.begin() + nk, st.Y.begin());
  std::copy(x.begin() + nk, x.end(), st.s.begin());

  InnerReport out;
  out.f = r.f;
  out.measure = r.measure;
  out.iterations = r.iterations;
  out.evaluations = r.evaluations;
  out.converged = r.converged;
  out.line_search_failed = r.line_search_failed;
  return out;
}

KktSolution make_kkt_solution(const LrsdpState& st, const MuProblem& p) {
  check_state(st, p);
  const index_t n = st.n;
  const int k = st.k;

  EvalWork wk;
  ConstraintValues cv;
  double obj = 0.0;
  std::vector<double> gy(n * k), gs(n);
  eval_core(p, st.Y, st.s, st.lambda, st.beta, st.gamma, st.sigma, gy, gs, wk, &cv, &obj);

  KktSolution sol;
  sol.n = n;
  sol.k = k;
  sol.Y = st.Y;
  sol.s = st.s;
  sol.lambda_eff = st.lambda - st.sigma * cv.ce;
  sol.beta_eff.resize(k);
  for (int c = 0; c < k; ++c) sol.beta_eff[c] = st.beta[c] - st.sigma * cv.cf[c];
  sol.gamma_eff.resize(n);
  for (index_t v = 0; v < n; ++v) sol.gamma_eff[v] = st.gamma[v] - st.sigma * cv.cg[v];
  sol.objective = obj;

  double yfro = 0.0;
  for (double y : st.Y) yfro += y * y;
  yfro = std::sqrt(yfro);
  double gy_fro = 0.0;
  for (double v : gy) gy_fro += v * v;
  gy_fro = std::sqrt(gy_fro);

  ResidualReport& rr = sol.residuals;
  rr.stationarity_y = 0.5 * gy_fro / (1.0 + yfro);
  rr.stationarity_s = 0.0;
  for (index_t v = 0; v < n; ++v) {
    // True-Lagrangian s gradient is -gamma_eff; box-projected residual.
    double step = st.s[v] + sol.gamma_eff[v];
    double proj = std::min(std::max(step, 0.0), p.s_hi);
    rr.stationarity_s = std::max(rr.stationarity_s, std::fabs(st.s[v] - proj));
  }
  rr.stationarity = std::max(rr.stationarity_y, rr.stationarity_s);
  rr.ce_abs = std::fabs(cv.ce);
  rr.cf_inf = cv.cf_inf;
  rr.cg_inf = cv.cg_inf;

  sol.g_box.assign(n, 0.0);
  sol.l_box.assign(n, 0.0);
  rr.comp_lower = 0.0;
  rr.comp_upper = 0.0;
  for (index_t v = 0; v < n; ++v) {
    if (st.s[v] <= 0.0) sol.g_box[v] = std::max(0.0, -sol.gamma_eff[v]);
    if (st.s[v] >= p.s_hi) sol.l_box[v] = std::max(0.0, sol.gamma_eff[v]);
    rr.comp_lower += sol.g_box[v] * st.s[v];
    rr.comp_upper += sol.l_box[v] * (p.s_hi - st.s[v]);
  }
  sol.sigma_final = st.sigma;
  return sol;
}

LrsdpState initialize(const MuProblem& p, const AlmConfig& cfg) {
  const Graph& g = *p.graph;
  const index_t n = g.num_vertices();
  const int k = p.rank;
  if (static_cast<index_t>(k) >= n)
    throw std::invalid_argument("lrsdp: rank must be below the vertex count");

  LanczosOptions lo;
  lo.tol = 1e-9;
  lo.seed = cfg.seed;
  GeneralizedEigs ge = smallest_k_nonzero_generalized(g, k, lo);

  LrsdpState st;
  st.n = n;
  st.k = k;
  st.Y.assign(n * k, 0.0);
  const double inv_sqrt_k = 1.0 / std::sqrt(static_cast<double>(k));
  for (int j = 0; j < k; ++j)
    for (index_t v = 0; v < n; ++v) st.Y[v * k + j] = inv_sqrt_k * ge.vectors[j][v];
  st.s.resize(n);
  for (index_t v = 0; v < n; ++v) {
    double rs = 0.0;
    for (int j = 0; j < k; ++j) rs += st.Y[v * k + j] * st.Y[v * k + j];
    st.s[v] = std::min(std::max(p.cap_hi - rs, 0.0), p.s_hi);
  }
  st.gamma.assign(n, 0.0);
  st.lambda = 0.0;
  st.beta.assign(k, 0.0);
  st.sigma = cfg.sigma0;
  return st;
}

KktSolution alm_solve(const MuProblem& p, const AlmConfig& cfg) {
  const Graph& g = *p.graph;
  if (!g.connected())
    throw std::invalid_argument(
        "lrsdp: graph is disconnected; extract the largest connected component first");

  LrsdpState st = initialize(p, cfg);

  double inner_tol = std::max(1e-3, cfg.tol_stat);
  double eta_prev = std::numeric_limits<double>::infinity();
  const double sigma_floor = std::min(cfg.sigma0, 1.0);
  long long inner_total = 0;

  KktSolution best;
  double best_score = std::numeric_limits<double>::infinity();

  for (int outer = 1; outer <= cfg.max_outer; ++outer) {
    InnerReport ir = inner_solve(st, p, inner_tol, cfg);
    inner_total += ir.iterations;

    KktSolution cand = make_kkt_solution(st, p);
    cand.outer_iterations = outer;
    cand.inner_iterations = inner_total;

    const double feas = std::max({cand.residuals.ce_abs, cand.residuals.cf_inf,
                                  cand.residuals.cg_inf});
    const double stat = cand.residuals.stationarity;
    const double score = std::max(feas / cfg.tol_feas, stat / cfg.tol_stat);
    if (score < best_score) {
      best_score = score;
      best = cand;
    }
    if (feas <= cfg.tol_feas && stat <= cfg.tol_stat) {
      cand.converged = true;
      return cand;
    }

    ConstraintValues cv = constraint_values(st, p);
    const bool inner_clean = ir.converged || ir.measure <= 10.0 * inner_tol;
    if (feas <= cfg.tol_feas && !inner_clean && st.sigma > sigma_floor) {
      // Feasibility is already inside tolerance but the subproblem is too
      // stiff for the inner solver to resolve stationarity (typically right
      // after a large sigma broke through a degenerate active set). Updating
      // multipliers here would shift them by sigma * (constraint noise)
      // every round — a drift that keeps stationarity pinned near that very
      // level — so back the penalty off instead and leave the multipliers,
      // which are essentially converged, alone.
      st.sigma = std::max(st.sigma / cfg.sigma_growth, sigma_floor);
    } else if (feas <= std::max(cfg.tol_feas, 0.9 * eta_prev) || !inner_clean) {
      // First-order multiplier update. The bar for "progress" is mild on
      // purpose: even a feasibility sequence contracting at 0.9 per round
      // converges under repeated updates at fixed sigma well within the
      // outer budget, whereas growing sigma raises the subproblem
      // conditioning with it until the inner solver hits its precision floor
      // and stationarity stalls — and when the slow phase comes from the
      // box-constraint active set settling, a larger sigma barely speeds
      // feasibility anyway. For the same reason penalty growth is reserved
      // for feasibility stalls diagnosed at a cleanly solved subproblem;
      // when the inner solver is already struggling at this sigma, a larger
      // one can only make the iteration worse. The inner tolerance floor
      // sits one decade below the outer target; pushing it further buys
      // nothing once the line search can no longer resolve the descent in
      // double precision.
      st.lambda -= st.sigma * cv.ce;
      for (int c = 0; c < st.k; ++c) st.beta[c] -= st.sigma * cv.cf[c];
      for (index_t v = 0; v < st.n; ++v) st.gamma[v] -= st.sigma * cv.cg[v];
      eta_prev = std::min(eta_prev, feas);
      inner_tol = std::max(inner_tol * 0.1, 0.1 * cfg.tol_stat);
    } else {
      st.sigma = std::min(st.sigma * cfg.sigma_growth, 1e12);
    }
  }
  best.converged = false;
  return best;
}

AlmConfig alm_config_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.is_object()) throw std::runtime_error("alm config: expected a JSON object");
  AlmConfig c;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key == "sigma0") c.sigma0 = it.value().get<double>();
    else if (key == "sigma_growth") c.sigma_growth = it.value().get<double>();
    else if (key == "tol_stat") c.tol_stat = it.value().get<double>();
    else if (key == "tol_feas") c.tol_feas = it.value().get<double>();
    else if (key == "max_outer") c.max_outer = it.value().get<int>();
    else if (key == "max_inner") c.max_inner = it.value().get<int>();
    else if (key == "lbfgs_memory") c.lbfgs_memory = it.value().get<int>();
    else if (key == "seed") c.seed = it.value().get<std::uint64_t>();
    else throw std::runtime_error("alm config: unknown key '" + key + "'");
  }
  if (!(c.sigma0 > 0) || !(c.sigma_growth > 1) || !(c.tol_stat > 0) || !(c.tol_feas > 0) ||
      c.max_outer < 1 || c.max_inner < 1 || c.lbfgs_memory < 1)
    throw std::runtime_error("alm config: invalid parameter value");
  return c;
}

std::string alm_config_to_json(const AlmConfig& c) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "{\"sigma0\": %.17g, \"sigma_growth\": %.17g, \"tol_stat\": %.17g, "
                "\"tol_feas\": %.17g, \"max_outer\": %d, \"max_inner\": %d, "
                "\"lbfgs_memory\": %d, \"seed\": %llu}",
                c.sigma0, c.sigma_growth, c.tol_stat, c.tol_feas, c.max_outer, c.max_inner,
                c.lbfgs_memory, static_cast<unsigned long long>(c.seed));
  return buf;
}

}  // namespace mucond

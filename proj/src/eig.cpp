#include "mucond/eig.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <stdexcept>

#include "mucond/rng.hpp"

namespace mucond {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scale(std::span<double> x, double a) {
  for (double& v : x) v *= a;
}

}  // namespace

SymOperator laplacian_operator(const Graph& g) {
  SymOperator op;
  op.n = g.num_vertices();
  const Graph* gp = &g;
  op.apply = [gp](std::span<const double> x, std::span<double> out) {
    gp->laplacian_matvec(x, out);
  };
  return op;
}

SymOperator normalized_laplacian_operator(const Graph& g) {
  if (g.has_isolated_vertex())
    throw std::invalid_argument("normalized Laplacian: graph has a zero-degree vertex");
  index_t n = g.num_vertices();
  auto dinv_sqrt = std::make_shared<std::vector<double>>(n);
  for (index_t v = 0; v < n; ++v) (*dinv_sqrt)[v] = 1.0 / std::sqrt(g.degree(v));
  auto buf = std::make_shared<std::vector<double>>(n);
  const Graph* gp = &g;
  SymOperator op;
  op.n = n;
  op.apply = [gp, dinv_sqrt, buf](std::span<const double> x, std::span<double> out) {
    auto& t = *buf;
    const auto& dis = *dinv_sqrt;
    index_t n = gp->num_vertices();
    for (index_t v = 0; v < n; ++v) t[v] = dis[v] * x[v];
    gp->laplacian_matvec(t, out);
    for (index_t v = 0; v < n; ++v) out[v] *= dis[v];
  };
  return op;
}

void tridiagonal_eig(std::vector<double>& d, std::vector<double>& off,
                     std::vector<double>& z) {
  const std::size_t m = d.size();
  if (m == 0) return;
  if (off.size() + 1 != m) throw std::invalid_argument("tridiagonal_eig: off size");
  if (z.size() != m * m) throw std::invalid_argument("tridiagonal_eig: z size");
  std::vector<double> e(m, 0.0);
  std::copy(off.begin(), off.end(), e.begin());

  const double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t l = 0; l < m; ++l) {
    int iter = 0;
    std::size_t mm;
    do {
      for (mm = l; mm + 1 < m; ++mm) {
        double dd = std::fabs(d[mm]) + std::fabs(d[mm + 1]);
        if (std::fabs(e[mm]) <= eps * dd) break;
      }
      if (mm != l) {
        if (iter++ == 60) throw std::runtime_error("tridiagonal_eig: no convergence");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[mm] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (std::size_t ii = mm; ii-- > l;) {
          double f = s * e[ii];
          double b = c * e[ii];
          r = std::hypot(f, g);
          e[ii + 1] = r;
          if (r == 0.0) {
            d[ii + 1] -= p;
            e[mm] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[ii + 1] - p;
          r = (d[ii] - g) * s + 2.0 * c * b;
          p = s * r;
          d[ii + 1] = g + p;
          g = c * r - b;
          for (std::size_t k = 0; k < m; ++k) {
            f = z[k * m + ii + 1];
            z[k * m + ii + 1] = s * z[k * m + ii] + c * f;
            z[k * m + ii] = c * z[k * m + ii] - s * f;
          }
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[mm] = 0.0;
      }
    } while (mm != l);
  }

  // Sort ascending, permuting eigenvector columns alongside.
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  std::vector<double> d2(m);
  std::vector<double> z2(m * m);
  for (std::size_t j = 0; j < m; ++j) {
    d2[j] = d[order[j]];
    for (std::size_t i = 0; i < m; ++i) z2[i * m + j] = z[i * m + order[j]];
  }
  d.swap(d2);
  z.swap(z2);
}

EigResult smallest_eigenpair(const SymOperator& op, const LanczosOptions& opts,
                             std::span<const std::vector<double>> deflation) {
  const index_t n = op.n;
  if (n <= 0) throw std::invalid_argument("smallest_eigenpair: empty operator");
  const index_t n_eff = n - static_cast<index_t>(deflation.size());
  if (n_eff <= 0)
    throw std::invalid_argument("smallest_eigenpair: deflation space exhausts dimension");
  const int max_iter =
      opts.max_iter > 0 ? opts.max_iter
                        : static_cast<int>(std::min<index_t>(10 * n, 5000));
  const index_t m_cap_base = std::min<index_t>(std::max(2, opts.max_subspace), n_eff);

  // Ritz pairs other than the smallest that converge along the way are locked
  // here and deflated from later cycles. Single-vector restarts stall when
  // several eigenvalues cluster near the bottom of the spectrum; removing
  // directions that are already resolved restores progress. The final answer
  // takes the smallest value over the locked pairs and the last Krylov cycle,
  // which together cover the whole deflation complement.
  constexpr std::size_t kMaxLocked = 8;
  std::vector<std::vector<double>> locked;
  std::vector<double> locked_values;
  std::vector<double> locked_res;

  auto reorth = [&](std::vector<double>& w, const std::vector<std::vector<double>>& basis) {
    for (const auto& q : deflation) axpy(-dot(q, w), q, w);
    for (const auto& q : locked) axpy(-dot(q, w), q, w);
    for (const auto& u : basis) axpy(-dot(u, w), u, w);
  };

  Rng rng(opts.seed);
  std::vector<double> v(n);
  {
    double nv = 0.0;
    for (int attempt = 0; attempt < 16; ++attempt) {
      for (double& x : v) x = rng.normal();
      std::vector<std::vector<double>> empty;
      reorth(v, empty);
      reorth(v, empty);
      nv = norm2(v);
      if (nv > 1e-8) break;
    }
    if (nv <= 1e-8)
      throw std::runtime_error("smallest_eigenpair: could not find start vector");
    scale(v, 1.0 / nv);
  }

  EigResult best;
  best.residual_norm = std::numeric_limits<double>::infinity();
  int total_mv = 0;
  std::vector<double> w(n), Ay(n);
  std::vector<std::vector<double>> V;
  std::vector<double> alphas, betas;
  double anorm = 1.0;

  while (true) {
    V.clear();
    alphas.clear();
    betas.clear();
    V.push_back(v);
    bool exhausted = false;
    double beta_next = 0.0;
    const index_t n_free = n_eff - static_cast<index_t>(locked.size());
    const index_t m_cap = std::min<index_t>(m_cap_base, n_free);
    while (static_cast<index_t>(alphas.size()) < m_cap && total_mv < max_iter) {
      const auto& vj = V.back();
      op.apply(vj, w);
      ++total_mv;
      double alpha = dot(vj, w);
      axpy(-alpha, vj, w);
      if (!betas.empty()) axpy(-betas.back(), V[V.size() - 2], w);
      reorth(w, V);
      reorth(w, V);
      alphas.push_back(alpha);
      anorm = std::max({anorm, std::fabs(alpha) + (betas.empty() ? 0.0 : betas.back())});
      double beta = norm2(w);
      beta_next = beta;
      if (beta <= 1e-14 * anorm || static_cast<index_t>(V.size()) >= n_free) {
        exhausted = true;
        break;
      }
      if (static_cast<index_t>(alphas.size()) >= m_cap) break;
      betas.push_back(beta);
      scale(w, 1.0 / beta);
      V.push_back(w);
    }
    const std::size_t m = alphas.size();
    if (m == 0) break;

    std::vector<double> rd = alphas;
    std::vector<double> re(betas.begin(), betas.begin() + (m - 1));
    std::vector<double> z(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) z[i * m + i] = 1.0;
    tridiagonal_eig(rd, re, z);

    // Assemble the smallest Ritz vector and measure its true residual. The
    // object being diagonalized is the compression P A P to the deflation
    // complement, so A y is projected back onto that complement first; the
    // ambient residual would otherwise stall at the coupling |q^T A y| when a
    // deflation vector is not invariant under A.
    std::vector<double> y(n, 0.0);
    for (std::size_t j = 0; j < m; ++j) axpy(z[j * m + 0], V[j], y);
    {
      std::vector<std::vector<double>> empty;
      reorth(y, empty);
      double ny = norm2(y);
      if (ny <= 1e-12) {
        // Degenerate restart; reseed randomly.
        for (double& x : y) x = rng.normal();
        reorth(y, empty);
        ny = norm2(y);
      }
      scale(y, 1.0 / ny);
    }
    op.apply(y, Ay);
    ++total_mv;
    for (const auto& q : deflation) axpy(-dot(q, Ay), q, Ay);
    double lam = dot(y, Ay);
    axpy(-lam, y, Ay);
    double res = norm2(Ay);

    if (res < best.residual_norm) {
      best.value = lam;
      best.vector = y;
      best.residual_norm = res;
    }
    best.iterations = total_mv;

    auto finish = [&](bool conv) {
      // The locked pairs are exact to within opts.tol; if one of them sits
      // below the smallest value found in the remaining complement, it is the
      // answer.
      for (std::size_t j = 0; j < locked.size(); ++j) {
        if (locked_values[j] < best.value) {
          best.value = locked_values[j];
          best.vector = locked[j];
          best.residual_norm = locked_res[j];
        }
      }
      best.iterations = total_mv;
      best.converged = conv;
      return best;
    };

    // Lock any other Ritz pair whose projected residual estimate
    // beta_m |z_{m,j}| already meets the tolerance, after confirming with a
    // true residual. Locked directions leave the search space.
    bool locked_now = false;
    if (m >= 2 && res > opts.tol) {
      for (std::size_t j = 1; j < m; ++j) {
        if (locked.size() >= kMaxLocked) break;
        if (static_cast<index_t>(locked.size()) + 1 >= n_eff) break;
        if (total_mv >= max_iter) break;
        if (beta_next * std::fabs(z[(m - 1) * m + j]) > opts.tol) continue;
        std::vector<double> u(n, 0.0);
        for (std::size_t i = 0; i < m; ++i) axpy(z[i * m + j], V[i], u);
        std::vector<std::vector<double>> empty;
        reorth(u, empty);
        double nu = norm2(u);
        if (nu <= 1e-8) continue;
        scale(u, 1.0 / nu);
        op.apply(u, Ay);
        ++total_mv;
        for (const auto& q : deflation) axpy(-dot(q, Ay), q, Ay);
        double lu = dot(u, Ay);
        axpy(-lu, u, Ay);
        double ru = norm2(Ay);
        if (ru > opts.tol) continue;
        locked_values.push_back(lu);
        locked_res.push_back(ru);
        locked.push_back(std::move(u));
        locked_now = true;
      }
    }

    if (res <= opts.tol) return finish(true);
    if (total_mv >= max_iter) return finish(false);
    if (locked_now || (exhausted && res > opts.tol)) {
      if (exhausted && !locked_now) {
        // Invariant subspace hit without convergence: blend in fresh noise.
        for (double& x : y) x += 1e-3 * rng.normal();
      }
      std::vector<std::vector<double>> empty;
      reorth(y, empty);
      double ny = norm2(y);
      if (ny <= 1e-12) throw std::runtime_error("smallest_eigenpair: restart degenerated");
      scale(y, 1.0 / ny);
    }
    v = y;
  }
  return best;
}

GeneralizedEigs smallest_k_nonzero_generalized(const Graph& g, int k,
                                               const LanczosOptions& opts) {
  const index_t n = g.num_vertices();
  if (k < 1 || static_cast<index_t>(k) >= n)
    throw std::invalid_argument("smallest_k_nonzero_generalized: need 1 <= k < n");
  if (g.has_isolated_vertex() || !g.connected())
    throw std::runtime_error(
        "smallest_k_nonzero_generalized: graph is disconnected; extract the "
        "largest connected component first");

  SymOperator nop = normalized_laplacian_operator(g);
  std::vector<double> q0(n);
  for (index_t v = 0; v < n; ++v) q0[v] = std::sqrt(g.degree(v));
  scale(q0, 1.0 / norm2(q0));

  std::vector<std::vector<double>> defl{q0};
  std::vector<std::pair<double, std::vector<double>>> found;
  for (int j = 0; j < k; ++j) {
    LanczosOptions o = opts;
    o.seed = opts.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(j + 1);
    EigResult r = smallest_eigenpair(nop, o, defl);
    if (!r.converged)
      throw std::runtime_error("smallest_k_nonzero_generalized: eigensolver did not converge");
    if (r.value < 1e-10)
      throw std::runtime_error(
          "smallest_k_nonzero_generalized: second near-zero eigenvalue; graph "
          "effectively disconnected");
    defl.push_back(r.vector);
    // Map back x = D^{-1/2} v, normalized so x^T D x = 1 and sign-canonical.
    std::vector<double> x(n);
    for (index_t v = 0; v < n; ++v) x[v] = r.vector[v] / std::sqrt(g.degree(v));
    for (index_t v = 0; v < n; ++v) {
      if (std::fabs(x[v]) > 1e-10) {
        if (x[v] < 0) scale(x, -1.0);
        break;
      }
    }
    found.emplace_back(r.value, std::move(x));
  }
  std::stable_sort(found.begin(), found.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  GeneralizedEigs out;
  for (auto& [val, vec] : found) {
    out.values.push_back(val);
    out.vectors.push_back(std::move(vec));
  }
  return out;
}

double lambda2_lower_bound_point(const Graph& g, const LanczosOptions& opts) {
  return 0.5 * smallest_k_nonzero_generalized(g, 1, opts).values[0];
}

}  // namespace mucond

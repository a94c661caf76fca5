#include "mucond/lbfgsb.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <stdexcept>

namespace mucond {

namespace {

double clip(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

struct Pair {
  std::vector<double> s, y;
  double rho;
};

}  // namespace

BoxLbfgsReport minimize_box_lbfgs(const ObjectiveFn& fg, std::vector<double>& x,
                                  std::span<const double> lower, std::span<const double> upper,
                                  const BoxLbfgsOptions& opts) {
  const std::size_t n = x.size();
  if (lower.size() != n || upper.size() != n)
    throw std::invalid_argument("box lbfgs: bound size mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (lower[i] > upper[i]) throw std::invalid_argument("box lbfgs: empty box");
    x[i] = clip(x[i], lower[i], upper[i]);
  }

  BoxLbfgsReport rep;
  std::vector<double> g(n), pg(n), d(n), xnew(n), gnew(n), gm(n), q(n);
  std::deque<Pair> hist;

  rep.f = fg(x, g);
  ++rep.evaluations;

  const double c1 = 1e-4;
  double h0 = 1.0;
  int stall = 0;
  double stall_measure = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    rep.iterations = iter;

    double pg_inf = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      pg[i] = x[i] - clip(x[i] - g[i], lower[i], upper[i]);
      pg_inf = std::max(pg_inf, std::fabs(pg[i]));
    }
    rep.pg_inf = pg_inf;
    rep.measure = opts.measure ? opts.measure(x, g, pg) : pg_inf;
    if (rep.measure <= opts.tol) {
      rep.converged = true;
      return rep;
    }

    // Freeze variables sitting on a bound with the gradient pushing outward.
    std::vector<std::uint8_t> frozen(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      frozen[i] = (x[i] <= lower[i] && g[i] > 0.0) || (x[i] >= upper[i] && g[i] < 0.0);
      gm[i] = frozen[i] ? 0.0 : g[i];
    }

    // Two-loop recursion on the masked gradient.
    q = gm;
    std::vector<double> alpha_memo(hist.size());
    for (std::size_t h = hist.size(); h-- > 0;) {
      const Pair& p = hist[h];
      double a = 0.0;
      for (std::size_t i = 0; i < n; ++i) a += p.s[i] * q[i];
      a *= p.rho;
      alpha_memo[h] = a;
      for (std::size_t i = 0; i < n; ++i) q[i] -= a * p.y[i];
    }
    for (std::size_t i = 0; i < n; ++i) q[i] *= h0;
    for (std::size_t h = 0; h < hist.size(); ++h) {
      const Pair& p = hist[h];
      double b = 0.0;
      for (std::size_t i = 0; i < n; ++i) b += p.y[i] * q[i];
      b *= p.rho;
      for (std::size_t i = 0; i < n; ++i) q[i] += (alpha_memo[h] - b) * p.s[i];
    }
    double dg = 0.0, dn = 0.0, gn = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d[i] = frozen[i] ? 0.0 : -q[i];
      dg += d[i] * g[i];
      dn += d[i] * d[i];
      gn += gm[i] * gm[i];
    }
    if (!(dg < -1e-12 * std::sqrt(dn) * std::sqrt(gn)) || !std::isfinite(dg)) {
      // Not a descent direction; drop the memory and fall back to steepest.
      hist.clear();
      double sc = h0;
      dg = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        d[i] = -sc * gm[i];
        dg += d[i] * g[i];
      }
      if (dg >= 0.0) {
        // All free gradient mass vanished; pg says we are not done, so the
        // remaining motion is pure projection.
        for (std::size_t i = 0; i < n; ++i) d[i] = -pg[i];
        dg = 0.0;
        for (std::size_t i = 0; i < n; ++i) dg += d[i] * g[i];
        if (dg >= 0.0) {
          rep.line_search_failed = true;
          return rep;
        }
      }
    }

    // Projected backtracking line search.
    double step = 1.0;
    double fnew = rep.f;
    bool accepted = false;
    for (int ls = 0; ls < opts.max_line_search; ++ls) {
      double dir_term = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        xnew[i] = clip(x[i] + step * d[i], lower[i], upper[i]);
        dir_term += g[i] * (xnew[i] - x[i]);
      }
      fnew = fg(xnew, gnew);
      ++rep.evaluations;
      if (std::isfinite(fnew) && fnew <= rep.f + c1 * dir_term) {
        accepted = true;
        break;
      }
      step *= 0.5;
      if (step < 1e-20) break;
    }
    if (!accepted) {
      rep.line_search_failed = true;
      return rep;
    }

    // Curvature update.
    double sy = 0.0, ss = 0.0, yy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double si = xnew[i] - x[i];
      double yi = gnew[i] - g[i];
      sy += si * yi;
      ss += si * si;
      yy += yi * yi;
    }
    if (ss == 0.0) {
      // Projected step collapsed to the current point.
      rep.line_search_failed = true;
      return rep;
    }
    if (sy > 1e-10 * std::sqrt(ss) * std::sqrt(yy) && sy > 0.0) {
      Pair p;
      p.s.resize(n);
      p.y.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        p.s[i] = xnew[i] - x[i];
        p.y[i] = gnew[i] - g[i];
      }
      p.rho = 1.0 / sy;
      hist.push_back(std::move(p));
      if (static_cast<int>(hist.size()) > std::max(1, opts.memory)) hist.pop_front();
      h0 = sy / yy;
    }

    double fdrop = rep.f - fnew;
    x.swap(xnew);
    g.swap(gnew);
    rep.f = fnew;

    // Stagnation guard. Near a stiff minimum the per-step f drop sinks below
    // the eps floor of |f| while the gradient — whose differences still carry
    // full precision into the curvature pairs — keeps shrinking, so progress
    // is judged on the convergence measure as well, not on f alone.
    if (fdrop <= 16.0 * std::numeric_limits<double>::epsilon() *
                     std::max({std::fabs(rep.f), std::fabs(fnew), 1.0})) {
      if (rep.measure < 0.9 * stall_measure) {
        stall = 0;
        stall_measure = rep.measure;
      } else if (++stall >= 20) {
        return rep;
      }
    } else {
      stall = 0;
      stall_measure = rep.measure;
    }
  }
  rep.iterations = opts.max_iterations;
  return rep;
}

}  // namespace mucond

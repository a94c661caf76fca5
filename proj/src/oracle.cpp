#include "mucond/oracle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mucond {

namespace {

BruteResult brute_enumerate(const Graph& g, double mu, bool enforce_lower) {
  const index_t n = g.num_vertices();
  if (n < 2) throw std::invalid_argument("brute force: need at least 2 vertices");
  if (n > 24) throw std::invalid_argument("brute force: n > 24 is not supported");
  if (!g.connected())
    throw std::invalid_argument("brute force: graph must be connected");

  const double vol = g.volume();
  const double lo = enforce_lower ? mu * vol * (1.0 - 1e-12) : 0.0;
  const double hi = 0.5 * vol * (1.0 + 1e-12);

  std::vector<std::uint8_t> in(n, 0);
  double vol_s = 0.0, cut = 0.0;
  long long feasible = 0, visited = 0;

  bool have_best = false;
  double best_phi = 0.0;
  std::uint32_t best_mask_bits = 0;

  auto exact_eval = [&](std::uint32_t bits, double& phi_out) {
    // Fresh cut/volume for a candidate; the incremental values can drift over
    // millions of Gray steps.
    double vs = 0.0, c = 0.0;
    for (index_t v = 0; v < n; ++v) {
      if (!(bits >> v & 1u)) continue;
      vs += g.degree(v);
      auto nb = g.neighbors(v);
      auto ws = g.weights(v);
      for (std::size_t i = 0; i < nb.size(); ++i)
        if (!(bits >> nb[i] & 1u)) c += ws[i];
    }
    double denom = std::min(vs, vol - vs);
    phi_out = c / denom;
    return vs;
  };

  auto lex_smaller = [&](std::uint32_t a, std::uint32_t b) {
    // Compare member lists of two masks lexicographically.
    for (index_t v = 0; v < n; ++v) {
      bool ia = a >> v & 1u, ib = b >> v & 1u;
      if (ia == ib) continue;
      if (ia) return true;  // a's next member is v, b's (if any) is larger
      // b holds v; a is smaller only if it has no members beyond v (prefix).
      return (a & ~((1u << (v + 1)) - 1u)) == 0;
    }
    return false;
  };

  const std::uint64_t total = 1ull << n;
  std::uint32_t bits = 0;
  for (std::uint64_t it = 1; it < total; ++it) {
    // Gray code: flip the lowest set bit of the counter.
    std::uint64_t gray_prev = (it - 1) ^ ((it - 1) >> 1);
    std::uint64_t gray = it ^ (it >> 1);
    int flip = __builtin_ctzll(gray ^ gray_prev);
    double dv = g.degree(flip);
    double win = 0.0;  // weight from flip into the current set (excl. itself)
    auto nb = g.neighbors(flip);
    auto ws = g.weights(flip);
    for (std::size_t i = 0; i < nb.size(); ++i)
      if (in[nb[i]]) win += ws[i];
    if (!in[flip]) {
      in[flip] = 1;
      bits |= 1u << flip;
      vol_s += dv;
      cut += dv - 2.0 * win;
    } else {
      in[flip] = 0;
      bits &= ~(1u << flip);
      vol_s -= dv;
      cut -= dv - 2.0 * win;
    }
    if (bits == 0 || bits == (total - 1)) continue;
    ++visited;
    if (vol_s < lo || vol_s > hi) continue;
    ++feasible;
    double denom = std::min(vol_s, vol - vol_s);
    double phi = cut / denom;
    if (!have_best || phi <= best_phi * (1.0 + 1e-12) + 1e-300) {
      double exact_phi;
      exact_eval(bits, exact_phi);
      if (!have_best || exact_phi < best_phi) {
        best_phi = exact_phi;
        best_mask_bits = bits;
        have_best = true;
      } else if (exact_phi == best_phi && lex_smaller(bits, best_mask_bits)) {
        best_mask_bits = bits;
      }
    }
  }

  if (!have_best) throw std::runtime_error("brute force: empty feasible window");
  BruteResult r;
  r.phi = best_phi;
  r.feasible_count = feasible;
  r.visited_count = visited;
  for (index_t v = 0; v < n; ++v)
    if (best_mask_bits >> v & 1u) r.argmin.push_back(v);
  return r;
}

}  // namespace

BruteResult brute_mu_conductance(const Graph& g, double mu) {
  if (!(mu > 0.0) || mu > 0.5)
    throw std::invalid_argument("brute force: mu must be in (0, 1/2]");
  return brute_enumerate(g, mu, true);
}

BruteResult brute_min_conductance(const Graph& g) { return brute_enumerate(g, 0.0, false); }

DenseSpectrum dense_eig_reference(std::span<const double> sym, index_t n) {
  if (n < 1 || n > 64) throw std::invalid_argument("dense_eig_reference: need 1 <= n <= 64");
  if (static_cast<index_t>(sym.size()) != n * n)
    throw std::invalid_argument("dense_eig_reference: size mismatch");
  Eigen::MatrixXd a(n, n);
  for (index_t i = 0; i < n; ++i)
    for (index_t j = 0; j < n; ++j) a(i, j) = sym[i * n + j];
  double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * (1.0 + a.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("dense_eig_reference: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (a + a.transpose()));
  if (es.info() != Eigen::Success)
    throw std::runtime_error("dense_eig_reference: eigensolver failed");
  DenseSpectrum out;
  out.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
  out.vectors.resize(n * n);
  for (index_t i = 0; i < n; ++i)
    for (index_t j = 0; j < n; ++j) out.vectors[i * n + j] = es.eigenvectors()(i, j);
  return out;
}

namespace {

std::vector<double> dense_laplacian(const Graph& g) {
  index_t n = g.num_vertices();
  std::vector<double> l(n * n, 0.0);
  for (index_t v = 0; v < n; ++v) {
    l[v * n + v] = g.degree(v);
    auto nb = g.neighbors(v);
    auto ws = g.weights(v);
    for (std::size_t i = 0; i < nb.size(); ++i) l[v * n + nb[i]] -= ws[i];
  }
  return l;
}

}  // namespace

DenseSpectrum dense_laplacian_spectrum(const Graph& g) {
  index_t n = g.num_vertices();
  auto l = dense_laplacian(g);
  return dense_eig_reference(l, n);
}

DenseSpectrum dense_normalized_spectrum(const Graph& g) {
  index_t n = g.num_vertices();
  if (g.has_isolated_vertex())
    throw std::invalid_argument("dense_normalized_spectrum: zero-degree vertex");
  auto l = dense_laplacian(g);
  for (index_t i = 0; i < n; ++i)
    for (index_t j = 0; j < n; ++j)
      l[i * n + j] /= std::sqrt(g.degree(i)) * std::sqrt(g.degree(j));
  return dense_eig_reference(l, n);
}

}  // namespace mucond

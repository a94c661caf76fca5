#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "mucond/eig.hpp"
#include "mucond/oracle.hpp"
#include "mucond/rng.hpp"

using namespace mucond;

namespace {

SymOperator dense_operator(std::vector<double> sym, index_t n) {
  auto m = std::make_shared<std::vector<double>>(std::move(sym));
  SymOperator op;
  op.n = n;
  op.apply = [m, n](std::span<const double> x, std::span<double> out) {
    for (index_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (index_t j = 0; j < n; ++j) s += (*m)[i * n + j] * x[j];
      out[i] = s;
    }
  };
  return op;
}

// Random symmetric matrix with a prescribed spectrum: Q diag(vals) Q^T where
// Q comes from Gram-Schmidt on a seeded Gaussian matrix.
std::vector<double> with_spectrum(const std::vector<double>& vals, std::uint64_t seed) {
  const index_t n = static_cast<index_t>(vals.size());
  Rng rng(seed);
  std::vector<std::vector<double>> q(n, std::vector<double>(n));
  for (auto& col : q) {
    for (double& x : col) x = rng.normal();
  }
  for (index_t j = 0; j < n; ++j) {
    for (index_t i = 0; i < j; ++i) {
      double d = 0.0;
      for (index_t r = 0; r < n; ++r) d += q[i][r] * q[j][r];
      for (index_t r = 0; r < n; ++r) q[j][r] -= d * q[i][r];
    }
    double nrm = 0.0;
    for (double x : q[j]) nrm += x * x;
    nrm = std::sqrt(nrm);
    for (double& x : q[j]) x /= nrm;
  }
  std::vector<double> a(n * n, 0.0);
  for (index_t k = 0; k < n; ++k)
    for (index_t i = 0; i < n; ++i)
      for (index_t j = 0; j < n; ++j) a[i * n + j] += vals[k] * q[k][i] * q[k][j];
  return a;
}

Graph cycle(index_t n) {
  std::vector<std::tuple<index_t, index_t, double>> e;
  for (index_t v = 0; v < n; ++v) e.emplace_back(v, (v + 1) % n, 1.0);
  return Graph::from_edges(n, e);
}

Graph complete(index_t n) {
  std::vector<std::tuple<index_t, index_t, double>> e;
  for (index_t u = 0; u < n; ++u)
    for (index_t v = u + 1; v < n; ++v) e.emplace_back(u, v, 1.0);
  return Graph::from_edges(n, e);
}

}  // namespace

TEST_SUITE("eig") {

TEST_CASE("tridiagonal_eig: 2x2 closed form") {
  // [[2, 1], [1, 2]] has eigenvalues 1 and 3 with (1, -1)/sqrt2, (1, 1)/sqrt2.
  std::vector<double> d{2.0, 2.0}, off{1.0}, z{1.0, 0.0, 0.0, 1.0};
  tridiagonal_eig(d, off, z);
  CHECK(d[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(d[1] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(std::fabs(z[0 * 2 + 0]) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(z[0 * 2 + 0] * z[1 * 2 + 0] < 0.0);   // opposite signs in column 0
  CHECK(z[0 * 2 + 1] * z[1 * 2 + 1] > 0.0);   // same sign in column 1
}

TEST_CASE("tridiagonal_eig: path Laplacian eigenvalues 2 - 2cos(k pi / n)") {
  const std::size_t n = 9;
  std::vector<double> d(n, 2.0), off(n - 1, -1.0), z(n * n, 0.0);
  d.front() = d.back() = 1.0;
  for (std::size_t i = 0; i < n; ++i) z[i * n + i] = 1.0;
  tridiagonal_eig(d, off, z);
  for (std::size_t k = 0; k < n; ++k) {
    double expect = 2.0 - 2.0 * std::cos(std::numbers::pi * double(k) / double(n));
    CHECK(d[k] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("tridiagonal_eig matches the dense reference on random input") {
  const index_t n = 24;
  Rng rng(11);
  std::vector<double> d(n), off(n - 1);
  for (double& x : d) x = rng.normal();
  for (double& x : off) x = rng.normal();
  std::vector<double> full(n * n, 0.0);
  for (index_t i = 0; i < n; ++i) full[i * n + i] = d[i];
  for (index_t i = 0; i + 1 < n; ++i)
    full[i * n + i + 1] = full[(i + 1) * n + i] = off[i];
  DenseSpectrum ref = dense_eig_reference(full, n);

  std::vector<double> z(n * n, 0.0);
  for (index_t i = 0; i < n; ++i) z[i * n + i] = 1.0;
  tridiagonal_eig(d, off, z);
  for (index_t k = 0; k < n; ++k) {
    CHECK(d[k] == doctest::Approx(ref.values[k]).epsilon(1e-10));
    CHECK(d[k] >= (k ? d[k - 1] : -1e300));
  }
  // Columns stay orthonormal through the rotations.
  for (index_t a = 0; a < 3; ++a)
    for (index_t b = a; b < 3; ++b) {
      double dot = 0.0;
      for (index_t i = 0; i < n; ++i) dot += z[i * n + a] * z[i * n + b];
      CHECK(dot == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-10));
    }
}

TEST_CASE("tridiagonal_eig rejects inconsistent shapes") {
  std::vector<double> d{1.0, 2.0}, off{1.0, 1.0}, z(4, 0.0);
  CHECK_THROWS_AS(tridiagonal_eig(d, off, z), std::invalid_argument);
  std::vector<double> off1{1.0}, zbad(3, 0.0);
  CHECK_THROWS_AS(tridiagonal_eig(d, off1, zbad), std::invalid_argument);
}

TEST_CASE("smallest_eigenpair agrees with the dense reference") {
  const index_t n = 40;
  Rng rng(5);
  std::vector<double> a(n * n);
  for (index_t i = 0; i < n; ++i)
    for (index_t j = 0; j <= i; ++j) a[i * n + j] = a[j * n + i] = rng.normal();
  DenseSpectrum ref = dense_eig_reference(a, n);

  LanczosOptions o;
  o.tol = 1e-10;
  EigResult r = smallest_eigenpair(dense_operator(a, n), o);
  CHECK(r.converged);
  CHECK(r.residual_norm <= 1e-10);
  CHECK(r.value == doctest::Approx(ref.values[0]).epsilon(1e-9));

  // Deflating the found eigenvector exposes the second smallest.
  std::vector<std::vector<double>> defl{r.vector};
  EigResult r2 = smallest_eigenpair(dense_operator(a, n), o, defl);
  CHECK(r2.converged);
  CHECK(r2.value == doctest::Approx(ref.values[1]).epsilon(1e-8));
}

TEST_CASE("smallest_eigenpair resolves a cluster at the bottom of the spectrum") {
  // Five eigenvalues packed at the bottom (spacing 1e-3) far below a bulk
  // starting at 0.5, with a restart subspace smaller than the cluster:
  // progress must survive restarts, which takes ~1000 matvecs here, five
  // times the default budget for n = 20.
  std::vector<double> vals{1e-6, 1e-3, 2e-3, 3e-3, 4e-3, 0.5, 0.7, 0.9, 1.1,
                           1.3,  1.5,  1.7,  1.9,  2.1,  2.3, 2.5, 2.7, 2.9, 3.1, 3.3};
  std::vector<double> a = with_spectrum(vals, 17);
  const index_t n = static_cast<index_t>(vals.size());
  LanczosOptions o;
  o.tol = 1e-9;
  o.max_subspace = 6;
  o.max_iter = 2000;
  EigResult r = smallest_eigenpair(dense_operator(a, n), o);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(1e-6).epsilon(1e-3));
  CHECK(r.residual_norm <= 1e-9);
  CHECK(r.iterations > 200);  // not reachable within the default budget
}

TEST_CASE("smallest_eigenpair reports a budget miss honestly") {
  std::vector<double> a = with_spectrum({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8}, 3);
  LanczosOptions o;
  o.tol = 1e-14;
  o.max_iter = 3;
  EigResult r = smallest_eigenpair(dense_operator(a, 8), o);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations <= 4);  // budget plus the final residual matvec
  CHECK(r.residual_norm > 0.0);
}

TEST_CASE("operator wrappers match direct formulas") {
  Graph g = cycle(6);
  SymOperator lap = laplacian_operator(g);
  std::vector<double> x{0.3, -1.0, 2.0, 0.0, 1.5, -0.7}, got(6), want(6);
  lap.apply(x, got);
  g.laplacian_matvec(x, want);
  for (int i = 0; i < 6; ++i) CHECK(got[i] == want[i]);

  SymOperator nop = normalized_laplacian_operator(g);
  nop.apply(x, got);
  // Degrees are all 2, so the normalized operator is L/2 here.
  for (int i = 0; i < 6; ++i) CHECK(got[i] == doctest::Approx(want[i] / 2.0));

  Graph iso = Graph::from_edges(3, std::vector<std::tuple<index_t, index_t, double>>{{0, 1, 1.0}});
  CHECK_THROWS_AS(normalized_laplacian_operator(iso), std::invalid_argument);
}

TEST_CASE("generalized eigenvalues: closed-form graphs") {
  // K_n: lambda_2 = n/(n-1); K2 gives 2 exactly.
  CHECK(smallest_k_nonzero_generalized(complete(4), 1).values[0] ==
        doctest::Approx(4.0 / 3.0).epsilon(1e-10));
  CHECK(smallest_k_nonzero_generalized(complete(2), 1).values[0] ==
        doctest::Approx(2.0).epsilon(1e-10));
  // Cycles: lambda_2 = 1 - cos(2 pi / n).
  for (index_t n : {4, 6, 8}) {
    double expect = 1.0 - std::cos(2.0 * std::numbers::pi / double(n));
    CHECK(smallest_k_nonzero_generalized(cycle(n), 1).values[0] ==
          doctest::Approx(expect).epsilon(1e-10));
  }
  CHECK(lambda2_lower_bound_point(complete(4)) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("generalized eigenvalues: multiplicity and normalization") {
  // C6 spectrum: 0, 1/2, 1/2, 3/2, 3/2, 2.
  Graph g = cycle(6);
  GeneralizedEigs e = smallest_k_nonzero_generalized(g, 3);
  CHECK(e.values[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(e.values[1] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(e.values[2] == doctest::Approx(1.5).epsilon(1e-9));
  for (const auto& x : e.vectors) {
    double xd = 0.0, xdx = 0.0;
    for (index_t v = 0; v < 6; ++v) {
      xd += x[v] * g.degree(v);
      xdx += x[v] * x[v] * g.degree(v);
    }
    CHECK(xd == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(xdx == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("generalized eigenvalues match the dense normalized spectrum") {
  // Random connected graph on 30 vertices: ring plus seeded chords.
  std::vector<std::tuple<index_t, index_t, double>> e;
  for (index_t v = 0; v < 30; ++v) e.emplace_back(v, (v + 1) % 30, 1.0);
  Rng rng(23);
  for (int t = 0; t < 25; ++t) {
    index_t u = static_cast<index_t>(rng.below(30));
    index_t v = static_cast<index_t>(rng.below(30));
    if (u != v) e.emplace_back(std::min(u, v), std::max(u, v), 1.0);
  }
  Graph g = Graph::from_edges(30, e);
  REQUIRE(g.connected());
  DenseSpectrum ref = dense_normalized_spectrum(g);
  GeneralizedEigs got = smallest_k_nonzero_generalized(g, 4);
  for (int j = 0; j < 4; ++j)
    CHECK(got.values[j] == doctest::Approx(ref.values[j + 1]).epsilon(1e-8));
}

TEST_CASE("generalized eigenvalues: error paths") {
  Graph disc = Graph::from_edges(
      4, std::vector<std::tuple<index_t, index_t, double>>{{0, 1, 1.0}, {2, 3, 1.0}});
  CHECK_THROWS_AS(smallest_k_nonzero_generalized(disc, 1), std::runtime_error);
  CHECK_THROWS_AS(smallest_k_nonzero_generalized(complete(3), 3), std::invalid_argument);
  CHECK_THROWS_AS(smallest_k_nonzero_generalized(complete(3), 0), std::invalid_argument);
}

}  // TEST_SUITE("eig")

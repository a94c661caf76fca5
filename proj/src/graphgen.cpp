#include "mucond/graphgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <tuple>

#include "mucond/rng.hpp"

namespace mucond {

CoreDecomposition core_numbers(const Graph& g) {
  const index_t n = g.num_vertices();
  CoreDecomposition out;
  out.core_number.assign(n, 0);
  if (n == 0) return out;

  std::vector<index_t> deg(n);
  index_t max_deg = 0;
  for (index_t v = 0; v < n; ++v) {
    deg[v] = g.neighbor_count(v);
    max_deg = std::max(max_deg, deg[v]);
  }
  // Batagelj-Zaversnik bucket ordering.
  std::vector<index_t> bin(max_deg + 2, 0);
  for (index_t v = 0; v < n; ++v) ++bin[deg[v]];
  index_t start = 0;
  for (index_t d = 0; d <= max_deg; ++d) {
    index_t cnt = bin[d];
    bin[d] = start;
    start += cnt;
  }
  std::vector<index_t> vert(n), pos(n);
  for (index_t v = 0; v < n; ++v) {
    pos[v] = bin[deg[v]];
    vert[pos[v]] = v;
    ++bin[deg[v]];
  }
  for (index_t d = max_deg; d > 0; --d) bin[d] = bin[d - 1];
  bin[0] = 0;

  std::vector<index_t> cur(deg);
  for (index_t i = 0; i < n; ++i) {
    const index_t v = vert[i];
    out.core_number[v] = static_cast<int>(cur[v]);
    for (index_t u : g.neighbors(v)) {
      if (cur[u] > cur[v]) {
        const index_t du = cur[u];
        const index_t pu = pos[u];
        const index_t pw = bin[du];
        const index_t w = vert[pw];
        if (u != w) {
          std::swap(vert[pu], vert[pw]);
          pos[u] = pw;
          pos[w] = pu;
        }
        ++bin[du];
        --cur[u];
      }
    }
  }
  for (int c : out.core_number) out.max_core = std::max(out.max_core, c);
  return out;
}

SubgraphResult k_core_subgraph(const Graph& g, int k) {
  if (k < 0) throw std::invalid_argument("k_core_subgraph: k must be >= 0");
  CoreDecomposition cd = core_numbers(g);
  std::vector<index_t> keep;
  for (index_t v = 0; v < g.num_vertices(); ++v)
    if (cd.core_number[v] >= k) keep.push_back(v);
  return induced_subgraph(g, keep);
}

SynthResult generate_core_periphery(const SynthConfig& cfg) {
  const index_t n = cfg.n;
  if (n < 2) throw std::invalid_argument("synth: need at least 2 points");
  if (cfg.dim < 1) throw std::invalid_argument("synth: dimension must be >= 1");
  if (cfg.neighbors < 1 || static_cast<index_t>(cfg.neighbors) >= n)
    throw std::invalid_argument("synth: neighbor count must be in [1, n)");
  if (!(cfg.core_fraction >= 0.0) || cfg.core_fraction > 1.0)
    throw std::invalid_argument("synth: core fraction must be in [0, 1]");

  Rng rng(cfg.seed);
  const int dim = cfg.dim;
  SynthResult out;
  out.coords.resize(n * dim);
  for (double& c : out.coords) c = rng.normal();

  // Uniform core subset via partial Fisher-Yates.
  const index_t core_count = static_cast<index_t>(std::llround(cfg.core_fraction * n));
  std::vector<index_t> perm(n);
  for (index_t i = 0; i < n; ++i) perm[i] = i;
  for (index_t i = 0; i < core_count; ++i) {
    index_t j = i + static_cast<index_t>(rng.below(n - i));
    std::swap(perm[i], perm[j]);
  }
  out.is_core.assign(n, 0);
  for (index_t i = 0; i < core_count; ++i) out.is_core[perm[i]] = 1;
  for (index_t v = 0; v < n; ++v) {
    const double sc = out.is_core[v] ? cfg.core_scale : cfg.periphery_scale;
    for (int d = 0; d < dim; ++d) out.coords[v * dim + d] *= sc;
  }

  // Exact all-pairs kNN; fine at this scale.
  // TODO: switch to a spatial index if n grows beyond a few thousand.
  auto dist2 = [&](index_t a, index_t b) {
    double acc = 0.0;
    for (int d = 0; d < dim; ++d) {
      double t = out.coords[a * dim + d] - out.coords[b * dim + d];
      acc += t * t;
    }
    return acc;
  };

  for (int attempt = 0;; ++attempt) {
    bool degenerate = false;
    std::vector<std::tuple<index_t, index_t, double>> edges;
    std::vector<std::pair<double, index_t>> cand(n - 1);
    for (index_t v = 0; v < n && !degenerate; ++v) {
      std::size_t m = 0;
      for (index_t u = 0; u < n; ++u) {
        if (u == v) continue;
        double d2 = dist2(v, u);
        if (d2 == 0.0) {
          degenerate = true;
          break;
        }
        cand[m++] = {d2, u};
      }
      if (degenerate) break;
      std::partial_sort(cand.begin(), cand.begin() + cfg.neighbors, cand.begin() + m);
      for (int i = 0; i < cfg.neighbors; ++i) {
        index_t u = cand[i].second;
        edges.emplace_back(std::min(v, u), std::max(v, u), 1.0);
      }
    }
    if (!degenerate) {
      // Deduplicate mutual pairs: keep each unordered pair once, weight 1.
      std::sort(edges.begin(), edges.end());
      edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
      out.graph = Graph::from_edges(n, edges);
      break;
    }
    if (attempt >= 8) throw std::runtime_error("synth: repeated coincident points");
    std::fprintf(stderr, "synth: coincident points, jittering and retrying\n");
    for (double& c : out.coords) c += 1e-9 * rng.normal();
  }
  return out;
}

}  // namespace mucond

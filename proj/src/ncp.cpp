#include "mucond/ncp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "mucond/rng.hpp"

namespace mucond {

PprResult ppr_push(const Graph& g, index_t seed, double alpha, double epsilon) {
  const index_t n = g.num_vertices();
  if (seed < 0 || seed >= n) throw std::invalid_argument("ppr_push: seed out of range");
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::invalid_argument("ppr_push: alpha must be in (0, 1)");
  if (!(epsilon > 0.0)) throw std::invalid_argument("ppr_push: epsilon must be positive");
  if (g.degree(seed) <= 0.0)
    throw std::invalid_argument("ppr_push: seed vertex has zero degree");

  std::vector<double> p(n, 0.0), r(n, 0.0);
  std::vector<std::uint8_t> queued(n, 0);
  std::deque<index_t> fifo;
  r[seed] = 1.0;
  long long pushes = 0;
  if (r[seed] >= epsilon * g.degree(seed)) {
    fifo.push_back(seed);
    queued[seed] = 1;
  }
  while (!fifo.empty()) {
    const index_t u = fifo.front();
    fifo.pop_front();
    queued[u] = 0;
    const double du = g.degree(u);
    const double ru = r[u];
    if (ru < epsilon * du) continue;  // drained below threshold since queueing
    p[u] += alpha * ru;
    r[u] = 0.0;
    const double spread = (1.0 - alpha) * ru / du;
    auto nb = g.neighbors(u);
    auto ws = g.weights(u);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      const index_t v = nb[i];
      r[v] += spread * ws[i];
      if (!queued[v] && r[v] >= epsilon * g.degree(v)) {
        fifo.push_back(v);
        queued[v] = 1;
      }
    }
    ++pushes;
  }

  PprResult out;
  out.pushes = pushes;
  for (index_t v = 0; v < n; ++v) {
    if (p[v] != 0.0) {
      out.p.ids.push_back(v);
      out.p.vals.push_back(p[v]);
    }
    if (r[v] != 0.0) {
      out.r.ids.push_back(v);
      out.r.vals.push_back(r[v]);
    }
  }
  return out;
}

std::vector<SweepSample> sweep_cut(const Graph& g, const SparseVec& vec,
                                   bool half_volume_only) {
  const index_t n = g.num_vertices();
  if (vec.ids.size() != vec.vals.size())
    throw std::invalid_argument("sweep_cut: ragged sparse vector");
  struct Entry {
    double ratio;
    index_t id;
  };
  std::vector<Entry> order;
  order.reserve(vec.ids.size());
  for (std::size_t i = 0; i < vec.ids.size(); ++i) {
    index_t v = vec.ids[i];
    if (v < 0 || v >= n) throw std::invalid_argument("sweep_cut: id out of range");
    if (vec.vals[i] == 0.0) continue;
    if (g.degree(v) <= 0.0) continue;  // isolated vertices cannot enter a cut
    order.push_back({vec.vals[i] / g.degree(v), v});
  }
  std::sort(order.begin(), order.end(), [](const Entry& a, const Entry& b) {
    return a.ratio != b.ratio ? a.ratio > b.ratio : a.id < b.id;
  });

  const double vol = g.volume();
  std::vector<std::uint8_t> in(n, 0);
  std::vector<SweepSample> samples;
  double vol_s = 0.0, cut = 0.0;
  for (std::size_t j = 0; j < order.size(); ++j) {
    const index_t v = order[j].id;
    double win = 0.0;
    auto nb = g.neighbors(v);
    auto ws = g.weights(v);
    for (std::size_t i = 0; i < nb.size(); ++i)
      if (in[nb[i]]) win += ws[i];
    in[v] = 1;
    vol_s += g.degree(v);
    cut += g.degree(v) - 2.0 * win;
    const double vol_c = vol - vol_s;
    if (vol_c <= 0.0) break;  // prefix swallowed the whole graph
    if (half_volume_only && vol_s > 0.5 * vol * (1.0 + 1e-12)) continue;
    SweepSample smp;
    smp.volume = std::min(vol_s, vol_c);
    smp.conductance = cut / smp.volume;
    smp.set_size = static_cast<index_t>(j + 1);
    samples.push_back(smp);
  }
  return samples;
}

std::vector<SweepSample> run_sweeps(const Graph& g, const SweepConfig& cfg) {
  const index_t n = g.num_vertices();
  if (n < 2) throw std::invalid_argument("run_sweeps: graph too small");
  if (cfg.epsilons.empty()) throw std::invalid_argument("run_sweeps: no epsilon values");

  std::vector<index_t> seeds;
  if (!cfg.explicit_seeds.empty()) {
    seeds = cfg.explicit_seeds;
    for (index_t v : seeds)
      if (v < 0 || v >= n || g.degree(v) <= 0.0)
        throw std::invalid_argument("run_sweeps: bad explicit seed");
  } else {
    std::vector<index_t> pool;
    for (index_t v = 0; v < n; ++v)
      if (g.degree(v) > 0.0) pool.push_back(v);
    if (pool.empty()) throw std::invalid_argument("run_sweeps: no usable seed vertices");
    const std::size_t m = std::min<std::size_t>(cfg.num_seeds, pool.size());
    Rng rng(cfg.rng_seed);
    for (std::size_t i = 0; i < m; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    seeds.assign(pool.begin(), pool.begin() + m);
  }

  std::vector<SweepSample> all;
  for (index_t seed : seeds) {
    for (double eps : cfg.epsilons) {
      PprResult pr = ppr_push(g, seed, cfg.alpha, eps);
      auto part = sweep_cut(g, pr.p, cfg.half_volume_only);
      for (auto& s : part) {
        s.seed = seed;
        s.epsilon = eps;
      }
      all.insert(all.end(), part.begin(), part.end());
    }
  }
  return all;
}

namespace {

int log_bin(double value, double hi, int bins) {
  // Bin index for log-spaced edges over [1, hi]; out-of-range clamps.
  if (!(value > 1.0)) return 0;
  int idx = static_cast<int>(std::floor(bins * std::log(value) / std::log(hi)));
  return std::min(std::max(idx, 0), bins - 1);
}

}  // namespace

std::vector<ProfileBin> build_profile(double graph_volume, std::span<const SweepSample> samples,
                                      int bins, bool cumulative) {
  if (bins < 1) throw std::invalid_argument("build_profile: bins must be positive");
  const double half = 0.5 * graph_volume;
  if (!(half > 1.0)) throw std::invalid_argument("build_profile: volume too small to bin");

  std::vector<ProfileBin> out(bins);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < bins; ++i) {
    out[i].vol_lo = std::pow(half, static_cast<double>(i) / bins);
    out[i].vol_hi = std::pow(half, static_cast<double>(i + 1) / bins);
    out[i].min_conductance = nan;
  }
  out.back().vol_hi = half;  // exact upper edge

  for (const SweepSample& s : samples) {
    int i = log_bin(s.volume, half, bins);
    ProfileBin& b = out[i];
    if (b.count == 0 || s.conductance < b.min_conductance)
      b.min_conductance = s.conductance;
    ++b.count;
  }
  if (cumulative) {
    double running = nan;
    for (ProfileBin& b : out) {
      if (b.count > 0 && (std::isnan(running) || b.min_conductance < running))
        running = b.min_conductance;
      b.min_conductance = running;
    }
  }
  return out;
}

Heatmap heatmap(double graph_volume, std::span<const SweepSample> samples, int vol_bins,
                int cond_bins) {
  if (vol_bins < 1 || cond_bins < 1) throw std::invalid_argument("heatmap: bad bin counts");
  if (samples.empty()) throw std::invalid_argument("heatmap: no samples");
  const double half = 0.5 * graph_volume;
  if (!(half > 1.0)) throw std::invalid_argument("heatmap: volume too small to bin");

  double cmin = std::numeric_limits<double>::infinity(), cmax = 0.0;
  for (const SweepSample& s : samples) {
    if (s.conductance > 0.0) cmin = std::min(cmin, s.conductance);
    cmax = std::max(cmax, s.conductance);
  }
  if (!std::isfinite(cmin)) throw std::invalid_argument("heatmap: no positive conductances");
  if (cmax <= cmin) cmax = cmin * (1.0 + 1e-9);

  Heatmap h;
  h.vol_edges.resize(vol_bins + 1);
  for (int i = 0; i <= vol_bins; ++i)
    h.vol_edges[i] = std::pow(half, static_cast<double>(i) / vol_bins);
  h.cond_edges.resize(cond_bins + 1);
  const double lc = std::log(cmin), hc = std::log(cmax);
  for (int i = 0; i <= cond_bins; ++i)
    h.cond_edges[i] = std::exp(lc + (hc - lc) * i / cond_bins);
  h.counts.assign(static_cast<std::size_t>(vol_bins) * cond_bins, 0);

  for (const SweepSample& s : samples) {
    int vi = log_bin(s.volume, half, vol_bins);
    int ci;
    if (!(s.conductance > 0.0)) {
      ci = 0;
    } else {
      ci = static_cast<int>(std::floor(cond_bins * (std::log(s.conductance) - lc) / (hc - lc)));
      ci = std::min(std::max(ci, 0), cond_bins - 1);
    }
    ++h.counts[static_cast<std::size_t>(vi) * cond_bins + ci];
  }
  return h;
}

std::vector<GapRow> gap_report(std::span<const ProfileBin> bins,
                               std::span<const EnvelopeRow> envelope, double graph_volume) {
  std::vector<GapRow> out;
  for (const EnvelopeRow& row : envelope) {
    const double target = row.mu * graph_volume * (1.0 - 1e-12);
    double upper = std::numeric_limits<double>::infinity();
    bool found = false;
    for (const ProfileBin& b : bins) {
      if (b.count == 0 || b.vol_lo < target) continue;
      upper = std::min(upper, b.min_conductance);
      found = true;
    }
    bool approx = false;
    if (!found) {
      // Fall back to bins that merely reach past the target volume.
      for (const ProfileBin& b : bins) {
        if (b.count == 0 || b.vol_hi < target) continue;
        upper = std::min(upper, b.min_conductance);
        found = true;
      }
      approx = true;
    }
    if (!found)
      throw std::runtime_error("gap_report: no sampled bin at or above mu*Vol");
    GapRow g;
    g.mu = row.mu;
    g.upper = upper;
    g.lower = row.bound;
    g.certified = row.certified;
    g.approx_upper = approx;
    g.ratio = row.bound > 0.0 ? upper / row.bound
                              : std::numeric_limits<double>::quiet_NaN();
    if (row.certified && !approx && upper < row.bound - 1e-12)
      throw std::runtime_error("gap_report: empirical envelope fell below a certified bound");
    out.push_back(g);
  }
  return out;
}

}  // namespace mucond

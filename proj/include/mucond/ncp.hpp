#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mucond/graph.hpp"

namespace mucond {

struct SparseVec {
  std::vector<index_t> ids;  // strictly increasing
  std::vector<double> vals;
};

struct PprResult {
  SparseVec p;
  SparseVec r;  // final residual
  long long pushes = 0;
};

// Personalized PageRank by residual push. A vertex u with r_u >= eps*d_u is
// pushed: p_u += alpha*r_u, each neighbor v gains (1-alpha)*r_u*w_uv/d_u, and
// r_u drops to zero. FIFO processing, deterministic. ||p||_1 + ||r||_1 stays
// exactly 1 through every push; at return r_u < eps*d_u for all u. eps large
// enough that the seed never fires (eps*d_seed > 1) returns p = 0.
PprResult ppr_push(const Graph& g, index_t seed, double alpha, double epsilon);

struct SweepSample {
  index_t seed = -1;
  double epsilon = 0.0;
  double volume = 0.0;       // min-side volume of the prefix cut
  double conductance = 0.0;
  index_t set_size = 0;
};

// Orders the support of vec by vec_i/d_i descending (ties by id ascending)
// and evaluates every prefix cut incrementally. volume records the smaller
// side. With half_volume_only (default) prefixes whose own volume exceeds
// Vol/2 are dropped; pass false to keep them (still min-side accounted).
// seed/epsilon fields are left for the caller to stamp.
std::vector<SweepSample> sweep_cut(const Graph& g, const SparseVec& vec,
                                   bool half_volume_only = true);

struct SweepConfig {
  double alpha = 0.85;
  std::vector<double> epsilons = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
  int num_seeds = 100;                  // sampled without replacement
  std::uint64_t rng_seed = 7;
  std::vector<index_t> explicit_seeds;  // overrides sampling when nonempty
  bool half_volume_only = true;
};

// PPR + sweep for every (seed, epsilon) pair; samples stamped accordingly.
std::vector<SweepSample> run_sweeps(const Graph& g, const SweepConfig& cfg);

struct ProfileBin {
  double vol_lo = 0.0, vol_hi = 0.0;
  double min_conductance = 0.0;  // NaN when count == 0
  long long count = 0;
};

// Log-spaced volume bins over [1, Vol/2]. cumulative=true turns per-bin
// minima into a running minimum from the left.
std::vector<ProfileBin> build_profile(double graph_volume, std::span<const SweepSample> samples,
                                      int bins = 60, bool cumulative = false);

struct Heatmap {
  std::vector<double> vol_edges;   // vol_bins + 1
  std::vector<double> cond_edges;  // cond_bins + 1
  std::vector<long long> counts;   // vol_bins x cond_bins, row-major
};

Heatmap heatmap(double graph_volume, std::span<const SweepSample> samples, int vol_bins = 60,
                int cond_bins = 40);

struct EnvelopeRow {
  double mu = 0.0;
  double bound = 0.0;
  bool certified = false;
};

struct GapRow {
  double mu = 0.0;
  double upper = 0.0;  // empirical envelope at volumes >= mu*Vol
  double lower = 0.0;
  double ratio = 0.0;  // upper/lower when lower > 0, else NaN
  bool certified = false;
  bool approx_upper = false;  // no fully contained bin; straddling bin used
};

// Upper value per mu from bins fully inside [mu*Vol, Vol/2]; rows falling
// back to a straddling bin are flagged approx and skipped by the soundness
// assertion (upper >= lower for certified rows), which otherwise throws.
std::vector<GapRow> gap_report(std::span<const ProfileBin> bins,
                               std::span<const EnvelopeRow> envelope, double graph_volume);

}  // namespace mucond

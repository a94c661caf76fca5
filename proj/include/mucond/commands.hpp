#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mucond/certify.hpp"
#include "mucond/graph.hpp"
#include "mucond/graphgen.hpp"
#include "mucond/lrsdp.hpp"
#include "mucond/ncp.hpp"

namespace mucond::cmd {

inline constexpr std::string_view kToolName = "mucond";
inline constexpr std::string_view kToolVersion = "0.1.0";

// Exit codes shared by all commands: 0 success, 2 partial results, 1 total
// failure / usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitTotalFailure = 1;
inline constexpr int kExitPartial = 2;

struct GraphArgs {
  std::string path;
  bool one_indexed = false;
  bool weighted = false;
  bool symmetric_arcs = false;
  bool lcc = false;  // extract largest connected component before any work
};

// Loads per GraphArgs; applies LCC when asked; original_ids maps final ids
// back to the input labels (composed through the LCC relabeling).
struct PreparedGraph {
  Graph graph;
  std::vector<index_t> original_ids;
  bool lcc_applied = false;
  index_t loaded_n = 0;  // before LCC
  std::string file_hash;
};
PreparedGraph prepare_graph(const GraphArgs& args);

std::vector<double> default_mu_grid();

struct BoundArgs {
  GraphArgs graph;
  std::vector<double> mu_list;  // empty: default_mu_grid()
  int rank = 5;
  AlmConfig alm;
  double eig_tol = 1e-8;
  bool include_heuristic = false;  // let uncertified bounds into the envelope
  std::string out_dir;
  int workers = 0;  // 0: $MUCOND_WORKERS or 1
};
int run_bound(const BoundArgs& args);

struct NcpArgs {
  GraphArgs graph;
  SweepConfig sweep;
  int profile_bins = 60;
  int heatmap_vol_bins = 60;
  int heatmap_cond_bins = 40;
  bool cumulative = false;
  std::string envelope_csv;  // optional: also emit gap.csv against these bounds
  std::string out_dir;
};
int run_ncp(const NcpArgs& args);

struct KcoreArgs {
  GraphArgs graph;
  std::vector<int> k_list;
  bool with_bound = true;
  bool with_ncp = true;
  std::vector<double> mu_list;
  int rank = 5;
  AlmConfig alm;
  double eig_tol = 1e-8;
  bool include_heuristic = false;
  SweepConfig sweep;
  std::string out_dir;
  int workers = 0;
};
int run_kcore(const KcoreArgs& args);

struct SynthArgs {
  SynthConfig config;
  std::string out_path;     // edge list
  std::string coords_path;  // optional coordinates CSV
};
int run_synth(const SynthArgs& args);

struct BruteArgs {
  GraphArgs graph;
  double mu = 0.1;
  bool min_conductance = false;  // ignore the lower volume window
  std::string json_path;         // optional
};
int run_brute(const BruteArgs& args);

struct Lambda2Args {
  GraphArgs graph;
  double eig_tol = 1e-8;
  std::string json_path;  // optional
};
int run_lambda2(const Lambda2Args& args);

// Envelope CSV row parser (mu, bound, certified), used by ncp --envelope and
// by tests reading result files back.
std::vector<EnvelopeRow> parse_envelope_csv(const std::string& text);

}  // namespace mucond::cmd

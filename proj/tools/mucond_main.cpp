#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mucond/commands.hpp"
#include "mucond/runio.hpp"

namespace {

using nlohmann::json;
using namespace mucond;
using namespace mucond::cmd;

void add_graph_flags(CLI::App* sub, GraphArgs& g) {
  sub->add_option("graph", g.path, "edge list file")->required();
  sub->add_flag("--one-indexed", g.one_indexed, "vertex ids start at 1");
  sub->add_flag("--weighted", g.weighted, "third column holds the edge weight");
  sub->add_flag("--symmetric-arcs", g.symmetric_arcs,
                "file lists every edge in both directions");
  sub->add_flag("--lcc", g.lcc, "restrict to the largest connected component");
}

// Config files merge under explicit flags: a JSON key is applied only when
// the matching flag was absent from the command line.
bool given(const CLI::App* sub, const std::string& flag) { return sub->count(flag) > 0; }

json load_config(const std::string& path) {
  json j = json::parse(read_file(path));
  if (!j.is_object()) throw std::runtime_error("config: expected a JSON object");
  return j;
}

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const char* what) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) ok = true;
    if (!ok)
      throw std::runtime_error(std::string(what) + ": unknown config key '" + it.key() + "'");
  }
}

void merge_alm(const json& j, AlmConfig& alm) {
  if (!j.contains("alm")) return;
  alm = alm_config_from_json(j.at("alm").dump());
}

void merge_bound_config(const json& j, const CLI::App* sub, BoundArgs& a) {
  reject_unknown(j,
                 {"mu_list", "rank", "eig_tol", "include_heuristic", "workers", "alm"},
                 "bound config");
  if (j.contains("mu_list") && !given(sub, "--mu-list"))
    a.mu_list = j.at("mu_list").get<std::vector<double>>();
  if (j.contains("rank") && !given(sub, "--k")) a.rank = j.at("rank").get<int>();
  if (j.contains("eig_tol") && !given(sub, "--eig-tol"))
    a.eig_tol = j.at("eig_tol").get<double>();
  if (j.contains("include_heuristic") && !given(sub, "--include-heuristic"))
    a.include_heuristic = j.at("include_heuristic").get<bool>();
  if (j.contains("workers") && !given(sub, "--workers"))
    a.workers = j.at("workers").get<int>();
  merge_alm(j, a.alm);
}

void merge_sweep_config(const json& j, const CLI::App* sub, SweepConfig& s) {
  if (j.contains("alpha") && !given(sub, "--alpha")) s.alpha = j.at("alpha").get<double>();
  if (j.contains("epsilons") && !given(sub, "--eps-list"))
    s.epsilons = j.at("epsilons").get<std::vector<double>>();
  if (j.contains("num_seeds") && !given(sub, "--seeds"))
    s.num_seeds = j.at("num_seeds").get<int>();
  if (j.contains("rng_seed") && !given(sub, "--rng-seed"))
    s.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  if (j.contains("seed_list") && !given(sub, "--seed-list"))
    s.explicit_seeds = j.at("seed_list").get<std::vector<index_t>>();
  if (j.contains("half_volume_only") && !given(sub, "--all-prefixes"))
    s.half_volume_only = j.at("half_volume_only").get<bool>();
}

void merge_ncp_config(const json& j, const CLI::App* sub, NcpArgs& a) {
  reject_unknown(j,
                 {"alpha", "epsilons", "num_seeds", "rng_seed", "seed_list",
                  "half_volume_only", "profile_bins", "heatmap_vol_bins",
                  "heatmap_cond_bins", "cumulative", "envelope_csv"},
                 "ncp config");
  merge_sweep_config(j, sub, a.sweep);
  if (j.contains("profile_bins") && !given(sub, "--profile-bins"))
    a.profile_bins = j.at("profile_bins").get<int>();
  if (j.contains("heatmap_vol_bins") && !given(sub, "--heatmap-vol-bins"))
    a.heatmap_vol_bins = j.at("heatmap_vol_bins").get<int>();
  if (j.contains("heatmap_cond_bins") && !given(sub, "--heatmap-cond-bins"))
    a.heatmap_cond_bins = j.at("heatmap_cond_bins").get<int>();
  if (j.contains("cumulative") && !given(sub, "--cumulative"))
    a.cumulative = j.at("cumulative").get<bool>();
  if (j.contains("envelope_csv") && !given(sub, "--envelope"))
    a.envelope_csv = j.at("envelope_csv").get<std::string>();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"certified mu-conductance lower bounds and empirical NCPs"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  // bound
  BoundArgs bound;
  std::string bound_config;
  CLI::App* sb = app.add_subcommand("bound", "certified lower bounds over a mu grid");
  add_graph_flags(sb, bound.graph);
  sb->add_option("--mu-list", bound.mu_list, "mu values in (0, 1/2] (default: built-in grid)");
  sb->add_option("--k", bound.rank, "factorization rank");
  sb->add_option("--eig-tol", bound.eig_tol, "certificate eigensolver tolerance");
  sb->add_flag("--include-heuristic", bound.include_heuristic,
               "let uncertified bounds into the envelope");
  sb->add_option("--workers", bound.workers, "worker threads (0: $MUCOND_WORKERS or 1)");
  sb->add_option("--config", bound_config, "JSON config merged under explicit flags");
  sb->add_option("--tol", [&bound](const std::vector<std::string>& v) {
      bound.alm.tol_stat = bound.alm.tol_feas = std::stod(v[0]);
      return true;
    }, "ALM stationarity and feasibility tolerance");
  sb->add_option("--alm-seed", bound.alm.seed, "ALM initialization seed");
  sb->add_option("--out-dir", bound.out_dir, "output directory")->required();

  // ncp
  NcpArgs ncp;
  std::string ncp_config;
  CLI::App* sn = app.add_subcommand("ncp", "empirical network community profile");
  add_graph_flags(sn, ncp.graph);
  sn->add_option("--seeds", ncp.sweep.num_seeds, "number of sampled seed vertices");
  sn->add_option("--seed-list", ncp.sweep.explicit_seeds,
                 "explicit seed vertices (input labels; overrides --seeds)");
  sn->add_option("--alpha", ncp.sweep.alpha, "PPR teleport probability");
  sn->add_option("--eps-list", ncp.sweep.epsilons, "PPR push tolerances");
  sn->add_option("--rng-seed", ncp.sweep.rng_seed, "seed sampling RNG");
  sn->add_flag("--all-prefixes", [&ncp](std::int64_t) { ncp.sweep.half_volume_only = false; },
               "keep sweep prefixes past half volume");
  sn->add_option("--profile-bins", ncp.profile_bins, "volume bins for profile.csv");
  sn->add_option("--heatmap-vol-bins", ncp.heatmap_vol_bins, "heatmap volume bins");
  sn->add_option("--heatmap-cond-bins", ncp.heatmap_cond_bins, "heatmap conductance bins");
  sn->add_flag("--cumulative", ncp.cumulative, "running-minimum profile");
  sn->add_option("--envelope", ncp.envelope_csv,
                 "envelope.csv from a bound run; also emit gap.csv");
  sn->add_option("--config", ncp_config, "JSON config merged under explicit flags");
  sn->add_option("--out-dir", ncp.out_dir, "output directory")->required();

  // kcore
  KcoreArgs kcore;
  std::string kcore_config;
  CLI::App* sk = app.add_subcommand("kcore", "bound + ncp pipelines on k-cores");
  add_graph_flags(sk, kcore.graph);
  sk->add_option("--k-list", kcore.k_list, "core orders to extract")->required();
  sk->add_flag("--no-bound", [&kcore](std::int64_t) { kcore.with_bound = false; },
               "skip the bound pipeline");
  sk->add_flag("--no-ncp", [&kcore](std::int64_t) { kcore.with_ncp = false; },
               "skip the ncp pipeline");
  sk->add_option("--mu-list", kcore.mu_list, "mu values for per-core bounds");
  sk->add_option("--k", kcore.rank, "factorization rank");
  sk->add_option("--eig-tol", kcore.eig_tol, "certificate eigensolver tolerance");
  sk->add_flag("--include-heuristic", kcore.include_heuristic,
               "let uncertified bounds into the envelope");
  sk->add_option("--seeds", kcore.sweep.num_seeds, "sampled seeds per core");
  sk->add_option("--alpha", kcore.sweep.alpha, "PPR teleport probability");
  sk->add_option("--eps-list", kcore.sweep.epsilons, "PPR push tolerances");
  sk->add_option("--rng-seed", kcore.sweep.rng_seed, "seed sampling RNG");
  sk->add_option("--workers", kcore.workers, "worker threads (0: $MUCOND_WORKERS or 1)");
  sk->add_option("--tol", [&kcore](const std::vector<std::string>& v) {
      kcore.alm.tol_stat = kcore.alm.tol_feas = std::stod(v[0]);
      return true;
    }, "ALM stationarity and feasibility tolerance");
  sk->add_option("--alm-seed", kcore.alm.seed, "ALM initialization seed");
  sk->add_option("--config", kcore_config,
                 "JSON config merged under explicit flags (bound keys + alm)");
  sk->add_option("--out-dir", kcore.out_dir, "output directory")->required();

  // synth
  SynthArgs synth;
  CLI::App* ss = app.add_subcommand("synth", "core-periphery kNN graph generator");
  ss->add_option("--n", synth.config.n, "number of points");
  ss->add_option("--dim", synth.config.dim, "ambient dimension");
  ss->add_option("--core-fraction", synth.config.core_fraction, "core point fraction");
  ss->add_option("--core-scale", synth.config.core_scale, "core shrink factor");
  ss->add_option("--periphery-scale", synth.config.periphery_scale,
                 "periphery spread factor");
  ss->add_option("--neighbors", synth.config.neighbors, "nearest neighbors per point");
  ss->add_option("--seed", synth.config.seed, "generator seed");
  ss->add_option("--coords", synth.coords_path, "also write point coordinates CSV");
  ss->add_option("--out", synth.out_path, "edge list output path")->required();

  // brute
  BruteArgs brute;
  CLI::App* sbr = app.add_subcommand("brute", "exact mu-conductance by enumeration (n <= 24)");
  add_graph_flags(sbr, brute.graph);
  sbr->add_option("--mu", brute.mu, "volume window parameter in (0, 1/2]");
  sbr->add_flag("--min-conductance", brute.min_conductance,
                "drop the lower volume cutoff");
  sbr->add_option("--json", brute.json_path, "also write the result as JSON");

  // lambda2
  Lambda2Args lambda2;
  CLI::App* sl = app.add_subcommand("lambda2", "Fiedler value and spectral bound point");
  add_graph_flags(sl, lambda2.graph);
  sl->add_option("--eig-tol", lambda2.eig_tol, "eigensolver tolerance");
  sl->add_option("--json", lambda2.json_path, "also write the result as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sb->parsed()) {
      if (!bound_config.empty()) merge_bound_config(load_config(bound_config), sb, bound);
      return run_bound(bound);
    }
    if (sn->parsed()) {
      if (!ncp_config.empty()) merge_ncp_config(load_config(ncp_config), sn, ncp);
      return run_ncp(ncp);
    }
    if (sk->parsed()) {
      if (!kcore_config.empty()) {
        json j = load_config(kcore_config);
        reject_unknown(j,
                       {"mu_list", "rank", "eig_tol", "include_heuristic", "workers", "alm",
                        "alpha", "epsilons", "num_seeds", "rng_seed", "half_volume_only"},
                       "kcore config");
        if (j.contains("mu_list") && !given(sk, "--mu-list"))
          kcore.mu_list = j.at("mu_list").get<std::vector<double>>();
        if (j.contains("rank") && !given(sk, "--k")) kcore.rank = j.at("rank").get<int>();
        if (j.contains("eig_tol") && !given(sk, "--eig-tol"))
          kcore.eig_tol = j.at("eig_tol").get<double>();
        if (j.contains("include_heuristic") && !given(sk, "--include-heuristic"))
          kcore.include_heuristic = j.at("include_heuristic").get<bool>();
        if (j.contains("workers") && !given(sk, "--workers"))
          kcore.workers = j.at("workers").get<int>();
        merge_sweep_config(j, sk, kcore.sweep);
        merge_alm(j, kcore.alm);
      }
      return run_kcore(kcore);
    }
    if (ss->parsed()) return run_synth(synth);
    if (sbr->parsed()) return run_brute(brute);
    if (sl->parsed()) return run_lambda2(lambda2);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitTotalFailure;
  }
  return kExitTotalFailure;
}

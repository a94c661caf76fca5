#include "mucond/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "mucond/oracle.hpp"
#include "mucond/runio.hpp"

namespace mucond::cmd {

namespace {

namespace fs = std::filesystem;
using clock_t_ = std::chrono::steady_clock;

double seconds_since(clock_t_::time_point t0) {
  return std::chrono::duration<double>(clock_t_::now() - t0).count();
}

std::string mu_tag(double mu) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", mu);
  return buf;
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MUCOND_WORKERS")) {
    int w = std::atoi(env);
    if (w > 0) return w;
  }
  return 1;
}

void append_alm_json(JsonWriter& w, const AlmConfig& c) {
  w.begin_object();
  w.key("sigma0");
  w.value(c.sigma0);
  w.key("sigma_growth");
  w.value(c.sigma_growth);
  w.key("tol_stat");
  w.value(c.tol_stat);
  w.key("tol_feas");
  w.value(c.tol_feas);
  w.key("max_outer");
  w.value_int(c.max_outer);
  w.key("max_inner");
  w.value_int(c.max_inner);
  w.key("lbfgs_memory");
  w.value_int(c.lbfgs_memory);
  w.key("seed");
  w.value_uint(c.seed);
  w.end_object();
}

void append_graph_json(JsonWriter& w, const GraphArgs& args, const PreparedGraph& pg) {
  w.begin_object();
  w.key("path");
  w.value(std::string_view(args.path));
  w.key("fnv1a64");
  w.value(std::string_view(pg.file_hash));
  w.key("loaded_n");
  w.value_int(pg.loaded_n);
  w.key("n");
  w.value_int(pg.graph.num_vertices());
  w.key("edges");
  w.value_int(pg.graph.num_edges());
  w.key("volume");
  w.value(pg.graph.volume());
  w.key("lcc_applied");
  w.value(pg.lcc_applied);
  w.key("one_indexed");
  w.value(args.one_indexed);
  w.key("weighted");
  w.value(args.weighted);
  w.key("symmetric_arcs");
  w.value(args.symmetric_arcs);
  w.end_object();
}

struct BoundRun {
  double mu = 0.0;
  bool ok = false;
  std::string error;
  CertifiedBound bound;
};

std::vector<BoundRun> bound_tasks(const Graph& g, const std::vector<double>& mu_list, int rank,
                                  const AlmConfig& alm, double eig_tol, int workers) {
  std::vector<BoundRun> runs(mu_list.size());
  for (std::size_t i = 0; i < mu_list.size(); ++i) runs[i].mu = mu_list[i];

  auto task = [&](std::size_t i) {
    LanczosOptions eo;
    eo.tol = eig_tol;
    try {
      runs[i].bound = certify_run(g, mu_list[i], rank, alm, eo);
      runs[i].ok = true;
    } catch (const std::exception& e) {
      runs[i].ok = false;
      runs[i].error = e.what();
    }
  };

  const int w = std::min<int>(workers, static_cast<int>(mu_list.size()));
  if (w <= 1) {
    for (std::size_t i = 0; i < mu_list.size(); ++i) task(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (int t = 0; t < w; ++t)
      pool.emplace_back([&] {
        for (;;) {
          std::size_t i = next.fetch_add(1);
          if (i >= runs.size()) return;
          task(i);
        }
      });
    for (auto& th : pool) th.join();
  }
  return runs;
}

std::string bound_json(const CertifiedBound& b) {
  JsonWriter w;
  w.begin_object();
  w.key("mu");
  w.value(b.mu);
  w.key("k");
  w.value_int(b.k);
  w.key("objective");
  w.value(b.objective);
  w.key("theta");
  w.value(b.theta);
  w.key("theta_raw");
  w.value(b.theta_raw);
  w.key("theta_residual");
  w.value(b.theta_residual);
  w.key("trace_cap");
  w.value(b.trace_cap);
  w.key("bound");
  w.value(b.bound);
  w.key("certified");
  w.value(b.certified);
  w.key("solver");
  w.begin_object();
  w.key("converged");
  w.value(b.solver_converged);
  w.key("outer_iterations");
  w.value_int(b.outer_iterations);
  w.key("inner_iterations");
  w.value_int(b.inner_iterations);
  w.key("sigma_final");
  w.value(b.sigma_final);
  w.key("residuals");
  w.begin_object();
  w.key("stationarity");
  w.value(b.residuals.stationarity);
  w.key("stationarity_y");
  w.value(b.residuals.stationarity_y);
  w.key("stationarity_s");
  w.value(b.residuals.stationarity_s);
  w.key("ce_abs");
  w.value(b.residuals.ce_abs);
  w.key("cf_inf");
  w.value(b.residuals.cf_inf);
  w.key("cg_inf");
  w.value(b.residuals.cg_inf);
  w.key("comp_lower");
  w.value(b.residuals.comp_lower);
  w.key("comp_upper");
  w.value(b.residuals.comp_upper);
  w.end_object();
  w.end_object();
  w.key("eig");
  w.begin_object();
  w.key("converged");
  w.value(b.eig_converged);
  w.key("iterations");
  w.value_int(b.eig_iterations);
  w.key("lambda_min_estimate");
  w.value(b.eig_lambda_min);
  w.key("residual");
  w.value(b.theta_residual);
  w.end_object();
  w.end_object();
  std::string s = w.str();
  s += '\n';
  return s;
}

std::string envelope_csv(const std::vector<BoundRun>& runs, bool include_heuristic) {
  // Monotone adjustment runs over the included subsequence only.
  std::vector<std::pair<double, double>> included;
  for (const BoundRun& r : runs)
    if (r.ok && (r.bound.certified || include_heuristic))
      included.emplace_back(r.mu, r.bound.bound);
  ProfileLowerBound env = monotone_envelope(included);

  std::string out = "# mucond.envelope.v1\nmu,bound,certified\n";
  std::size_t j = 0;
  for (const BoundRun& r : runs) {
    if (!r.ok) continue;
    double value = r.bound.bound;
    if (r.bound.certified || include_heuristic) {
      value = env.points[j].second;
      ++j;
    }
    out += format_double(r.mu);
    out += ',';
    out += format_double(value);
    out += ',';
    out += r.bound.certified ? '1' : '0';
    out += '\n';
  }
  return out;
}

void write_bound_manifest(const std::string& dir, const GraphArgs& gargs,
                          const PreparedGraph& pg, const BoundArgs& args,
                          const std::vector<double>& mu_list,
                          const std::vector<BoundRun>* runs, const std::string& status) {
  JsonWriter w;
  w.begin_object();
  w.key("tool");
  w.value(kToolName);
  w.key("version");
  w.value(kToolVersion);
  w.key("command");
  w.value(std::string_view("bound"));
  w.key("graph");
  append_graph_json(w, gargs, pg);
  w.key("parameters");
  w.begin_object();
  w.key("mu_list");
  w.begin_array();
  for (double mu : mu_list) w.value(mu);
  w.end_array();
  w.key("rank");
  w.value_int(args.rank);
  w.key("eig_tol");
  w.value(args.eig_tol);
  w.key("include_heuristic");
  w.value(args.include_heuristic);
  w.key("workers");
  w.value_int(resolve_workers(args.workers));
  w.key("alm");
  append_alm_json(w, args.alm);
  w.end_object();
  w.key("status");
  w.value(std::string_view(status));
  w.key("runs");
  w.begin_array();
  if (runs) {
    for (const BoundRun& r : *runs) {
      w.begin_object();
      w.key("mu");
      w.value(r.mu);
      w.key("k");
      w.value_int(args.rank);
      if (r.ok) {
        w.key("status");
        w.value(std::string_view(r.bound.certified ? "certified" : "heuristic"));
        w.key("bound");
        w.value(r.bound.bound);
        w.key("objective");
        w.value(r.bound.objective);
        w.key("theta");
        w.value(r.bound.theta);
        w.key("alm_seconds");
        w.value(r.bound.alm_seconds);
        w.key("eigval_seconds");
        w.value(r.bound.eigval_seconds);
        w.key("file");
        w.value(std::string_view("bound_mu" + mu_tag(r.mu) + "_k" +
                                 std::to_string(args.rank) + ".json"));
      } else {
        w.key("status");
        w.value(std::string_view("error"));
        w.key("error");
        w.value(std::string_view(r.error));
      }
      w.end_object();
    }
  }
  w.end_array();
  w.key("outputs");
  w.begin_array();
  w.value(std::string_view("envelope.csv"));
  w.end_array();
  w.end_object();
  std::string s = w.str();
  s += '\n';
  write_file(dir + "/manifest.json", s);
}

}  // namespace

PreparedGraph prepare_graph(const GraphArgs& args) {
  LoadOptions opts;
  opts.zero_indexed = !args.one_indexed;
  opts.weighted = args.weighted;
  opts.mode = args.symmetric_arcs ? EdgeListMode::SymmetricArcs : EdgeListMode::UndirectedEdges;

  std::string bytes = read_file(args.path);
  LoadedGraph lg = load_edge_list_text(bytes, opts);

  PreparedGraph out;
  out.file_hash = fnv1a64_hex(bytes);
  out.loaded_n = lg.graph.num_vertices();
  if (args.lcc) {
    SubgraphResult sub = largest_connected_component(lg.graph);
    out.original_ids.resize(sub.graph.num_vertices());
    for (index_t v = 0; v < sub.graph.num_vertices(); ++v)
      out.original_ids[v] = lg.original_ids[sub.new_to_old[v]];
    out.graph = std::move(sub.graph);
    out.lcc_applied = true;
  } else {
    out.graph = std::move(lg.graph);
    out.original_ids = std::move(lg.original_ids);
  }
  return out;
}

std::vector<double> default_mu_grid() {
  return {1e-6, 1e-4, 1e-3, 0.01, 0.03, 0.1, 0.2, 0.3, 0.4, 0.5};
}

int run_bound(const BoundArgs& args) {
  if (args.out_dir.empty()) throw std::invalid_argument("bound: --out-dir is required");
  PreparedGraph pg = prepare_graph(args.graph);
  const Graph& g = pg.graph;
  if (!g.connected())
    throw std::runtime_error(
        "bound: graph is disconnected; rerun with --lcc to use the largest "
        "connected component");

  std::vector<double> mu_list = args.mu_list.empty() ? default_mu_grid() : args.mu_list;
  std::sort(mu_list.begin(), mu_list.end());
  for (std::size_t i = 0; i < mu_list.size(); ++i) {
    if (!(mu_list[i] > 0.0) || mu_list[i] > 0.5)
      throw std::invalid_argument("bound: mu values must lie in (0, 1/2]");
    if (i > 0 && mu_list[i] == mu_list[i - 1])
      throw std::invalid_argument("bound: duplicate mu value");
  }
  if (args.rank < 1 || static_cast<index_t>(args.rank) >= g.num_vertices())
    throw std::invalid_argument("bound: rank must satisfy 1 <= k < n");

  ensure_directory(args.out_dir);
  write_bound_manifest(args.out_dir, args.graph, pg, args, mu_list, nullptr, "running");

  std::vector<BoundRun> runs = bound_tasks(g, mu_list, args.rank, args.alm, args.eig_tol,
                                           resolve_workers(args.workers));

  int n_ok = 0, n_cert = 0;
  for (const BoundRun& r : runs) {
    if (!r.ok) continue;
    ++n_ok;
    if (r.bound.certified) ++n_cert;
    std::string name = "bound_mu" + mu_tag(r.mu) + "_k" + std::to_string(args.rank) + ".json";
    write_file(args.out_dir + "/" + name, bound_json(r.bound));
  }
  write_file(args.out_dir + "/envelope.csv", envelope_csv(runs, args.include_heuristic));

  std::string status = n_ok == 0 ? "failed"
                       : n_cert == static_cast<int>(runs.size()) ? "complete"
                                                                 : "partial";
  write_bound_manifest(args.out_dir, args.graph, pg, args, mu_list, &runs, status);

  for (const BoundRun& r : runs) {
    if (r.ok)
      std::printf("mu=%s k=%d bound=%s %s\n", mu_tag(r.mu).c_str(), args.rank,
                  format_double(r.bound.bound).c_str(),
                  r.bound.certified ? "certified" : "heuristic");
    else
      std::printf("mu=%s k=%d error: %s\n", mu_tag(r.mu).c_str(), args.rank, r.error.c_str());
  }
  if (n_ok == 0) return kExitTotalFailure;
  if (n_cert < static_cast<int>(runs.size())) return kExitPartial;
  return kExitOk;
}

namespace {

std::string samples_csv(const std::vector<SweepSample>& samples,
                        const std::vector<index_t>& original_ids) {
  std::string out = "# mucond.samples.v1\nseed,epsilon,volume,size,conductance\n";
  for (const SweepSample& s : samples) {
    out += std::to_string(s.seed >= 0 ? original_ids[s.seed] : -1);
    out += ',';
    out += format_double(s.epsilon);
    out += ',';
    out += format_double(s.volume);
    out += ',';
    out += std::to_string(s.set_size);
    out += ',';
    out += format_double(s.conductance);
    out += '\n';
  }
  return out;
}

std::string profile_csv(const std::vector<ProfileBin>& bins) {
  std::string out = "# mucond.profile.v1\nvol_lo,vol_hi,min_conductance,count\n";
  for (const ProfileBin& b : bins) {
    out += format_double(b.vol_lo);
    out += ',';
    out += format_double(b.vol_hi);
    out += ',';
    out += format_double(b.min_conductance);
    out += ',';
    out += std::to_string(b.count);
    out += '\n';
  }
  return out;
}

std::string heatmap_csv(const Heatmap& h) {
  std::string out = "# mucond.heatmap.v1\nvol_lo,vol_hi,cond_lo,cond_hi,count\n";
  const std::size_t vb = h.vol_edges.size() - 1;
  const std::size_t cb = h.cond_edges.size() - 1;
  for (std::size_t i = 0; i < vb; ++i) {
    for (std::size_t j = 0; j < cb; ++j) {
      out += format_double(h.vol_edges[i]);
      out += ',';
      out += format_double(h.vol_edges[i + 1]);
      out += ',';
      out += format_double(h.cond_edges[j]);
      out += ',';
      out += format_double(h.cond_edges[j + 1]);
      out += ',';
      out += std::to_string(h.counts[i * cb + j]);
      out += '\n';
    }
  }
  return out;
}

std::string gap_csv(const std::vector<GapRow>& rows) {
  std::string out = "# mucond.gap.v1\nmu,upper,lower,ratio,certified,approx_upper\n";
  for (const GapRow& r : rows) {
    out += format_double(r.mu);
    out += ',';
    out += format_double(r.upper);
    out += ',';
    out += format_double(r.lower);
    out += ',';
    out += format_double(r.ratio);
    out += ',';
    out += r.certified ? '1' : '0';
    out += ',';
    out += r.approx_upper ? '1' : '0';
    out += '\n';
  }
  return out;
}

void write_ncp_manifest(const std::string& dir, const NcpArgs& args, const PreparedGraph& pg,
                        const std::string& status, long long n_samples, double sweep_seconds,
                        const std::vector<std::string>& outputs, const std::string& note) {
  JsonWriter w;
  w.begin_object();
  w.key("tool");
  w.value(kToolName);
  w.key("version");
  w.value(kToolVersion);
  w.key("command");
  w.value(std::string_view("ncp"));
  w.key("graph");
  append_graph_json(w, args.graph, pg);
  w.key("parameters");
  w.begin_object();
  w.key("alpha");
  w.value(args.sweep.alpha);
  w.key("epsilons");
  w.begin_array();
  for (double e : args.sweep.epsilons) w.value(e);
  w.end_array();
  w.key("num_seeds");
  w.value_int(args.sweep.num_seeds);
  w.key("rng_seed");
  w.value_uint(args.sweep.rng_seed);
  w.key("explicit_seeds");
  w.begin_array();
  for (index_t s : args.sweep.explicit_seeds) w.value_int(s);
  w.end_array();
  w.key("half_volume_only");
  w.value(args.sweep.half_volume_only);
  w.key("profile_bins");
  w.value_int(args.profile_bins);
  w.key("heatmap_vol_bins");
  w.value_int(args.heatmap_vol_bins);
  w.key("heatmap_cond_bins");
  w.value_int(args.heatmap_cond_bins);
  w.key("cumulative");
  w.value(args.cumulative);
  w.key("envelope_csv");
  w.value(std::string_view(args.envelope_csv));
  w.end_object();
  w.key("status");
  w.value(std::string_view(status));
  w.key("samples");
  w.value_int(n_samples);
  w.key("sweep_seconds");
  w.value(sweep_seconds);
  if (!note.empty()) {
    w.key("note");
    w.value(std::string_view(note));
  }
  w.key("outputs");
  w.begin_array();
  for (const std::string& o : outputs) w.value(std::string_view(o));
  w.end_array();
  w.end_object();
  std::string s = w.str();
  s += '\n';
  write_file(dir + "/manifest.json", s);
}

}  // namespace

std::vector<EnvelopeRow> parse_envelope_csv(const std::string& text) {
  std::vector<EnvelopeRow> rows;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "mu,bound,certified")
        throw std::runtime_error("envelope csv: unexpected header '" + line + "'");
      header_seen = true;
      continue;
    }
    std::istringstream ls(line);
    std::string mu_s, bound_s, cert_s;
    if (!std::getline(ls, mu_s, ',') || !std::getline(ls, bound_s, ',') ||
        !std::getline(ls, cert_s))
      throw std::runtime_error("envelope csv: malformed line " + std::to_string(line_no));
    EnvelopeRow r;
    r.mu = std::stod(mu_s);
    r.bound = std::stod(bound_s);
    r.certified = cert_s == "1" || cert_s == "true";
    rows.push_back(r);
  }
  if (!header_seen) throw std::runtime_error("envelope csv: missing header");
  return rows;
}

int run_ncp(const NcpArgs& args) {
  if (args.out_dir.empty()) throw std::invalid_argument("ncp: --out-dir is required");
  PreparedGraph pg = prepare_graph(args.graph);
  const Graph& g = pg.graph;

  // Explicit seeds arrive as input labels; run_sweeps wants internal ids.
  SweepConfig sweep = args.sweep;
  if (!sweep.explicit_seeds.empty()) {
    std::unordered_map<index_t, index_t> to_new;
    to_new.reserve(pg.original_ids.size());
    for (index_t v = 0; v < static_cast<index_t>(pg.original_ids.size()); ++v)
      to_new[pg.original_ids[v]] = v;
    for (index_t& s : sweep.explicit_seeds) {
      auto it = to_new.find(s);
      if (it == to_new.end())
        throw std::invalid_argument("ncp: seed label " + std::to_string(s) +
                                    " is not a vertex of the prepared graph");
      s = it->second;
    }
  }

  ensure_directory(args.out_dir);
  write_ncp_manifest(args.out_dir, args, pg, "running", 0, 0.0, {}, "");

  auto t0 = clock_t_::now();
  std::vector<SweepSample> samples = run_sweeps(g, sweep);
  double secs = seconds_since(t0);

  std::vector<std::string> outputs{"samples.csv"};
  write_file(args.out_dir + "/samples.csv", samples_csv(samples, pg.original_ids));

  std::string note;
  bool partial = false;
  if (samples.empty()) {
    note = "no sweep samples produced; profile and heatmap skipped";
    partial = true;
  } else {
    auto bins = build_profile(g.volume(), samples, args.profile_bins, args.cumulative);
    write_file(args.out_dir + "/profile.csv", profile_csv(bins));
    outputs.push_back("profile.csv");
    Heatmap hm = heatmap(g.volume(), samples, args.heatmap_vol_bins, args.heatmap_cond_bins);
    write_file(args.out_dir + "/heatmap.csv", heatmap_csv(hm));
    outputs.push_back("heatmap.csv");
    if (!args.envelope_csv.empty()) {
      try {
        auto envelope = parse_envelope_csv(read_file(args.envelope_csv));
        auto gaps = gap_report(bins, envelope, g.volume());
        write_file(args.out_dir + "/gap.csv", gap_csv(gaps));
        outputs.push_back("gap.csv");
      } catch (const std::exception& e) {
        note = std::string("gap.csv skipped: ") + e.what();
        partial = true;
      }
    }
  }

  write_ncp_manifest(args.out_dir, args, pg, partial ? "partial" : "complete",
                     static_cast<long long>(samples.size()), secs, outputs, note);
  std::printf("ncp: %zu samples from %s\n", samples.size(), args.graph.path.c_str());
  return partial ? kExitPartial : kExitOk;
}

int run_kcore(const KcoreArgs& args) {
  if (args.out_dir.empty()) throw std::invalid_argument("kcore: --out-dir is required");
  if (args.k_list.empty()) throw std::invalid_argument("kcore: --k-list is required");
  PreparedGraph pg = prepare_graph(args.graph);

  ensure_directory(args.out_dir);

  struct CoreStatus {
    int k;
    index_t core_n = 0, lcc_n = 0;
    std::string status;
    int bound_exit = -1, ncp_exit = -1;
  };
  std::vector<CoreStatus> statuses;

  CoreDecomposition cd = core_numbers(pg.graph);
  int n_ok = 0, n_fail = 0, n_partial = 0;
  for (int k : args.k_list) {
    CoreStatus cs;
    cs.k = k;
    try {
      SubgraphResult core = k_core_subgraph(pg.graph, k);
      cs.core_n = core.graph.num_vertices();
      if (cs.core_n == 0) {
        cs.status = "empty";
        ++n_ok;
        statuses.push_back(cs);
        continue;
      }
      SubgraphResult lcc = largest_connected_component(core.graph);
      cs.lcc_n = lcc.graph.num_vertices();

      // Write the core's LCC as an edge list (original input labels), then
      // chain the standard pipelines on that file so every sub-run gets its
      // own manifest.
      std::string core_dir = args.out_dir + "/core" + std::to_string(k);
      ensure_directory(core_dir);
      std::string edge_path = core_dir + "/core.txt";
      std::vector<index_t> label(lcc.graph.num_vertices());
      for (index_t v = 0; v < lcc.graph.num_vertices(); ++v)
        label[v] = pg.original_ids[core.new_to_old[lcc.new_to_old[v]]];
      std::string body = "# " + std::string(kToolName) + " k-core extract, k=" +
                         std::to_string(k) + "\n";
      for (index_t v = 0; v < lcc.graph.num_vertices(); ++v) {
        auto nb = lcc.graph.neighbors(v);
        auto ws = lcc.graph.weights(v);
        for (std::size_t i = 0; i < nb.size(); ++i) {
          if (nb[i] < v) continue;
          body += std::to_string(label[v]);
          body += ' ';
          body += std::to_string(label[nb[i]]);
          if (args.graph.weighted) {
            body += ' ';
            body += format_double(ws[i]);
          }
          body += '\n';
        }
      }
      write_file(edge_path, body);

      if (args.with_bound) {
        BoundArgs ba;
        ba.graph.path = edge_path;
        ba.graph.weighted = args.graph.weighted;
        ba.mu_list = args.mu_list;
        ba.rank = args.rank;
        ba.alm = args.alm;
        ba.eig_tol = args.eig_tol;
        ba.include_heuristic = args.include_heuristic;
        ba.out_dir = core_dir + "/bound";
        ba.workers = args.workers;
        cs.bound_exit = run_bound(ba);
      }
      if (args.with_ncp) {
        NcpArgs na;
        na.graph.path = edge_path;
        na.graph.weighted = args.graph.weighted;
        na.sweep = args.sweep;
        na.out_dir = core_dir + "/ncp";
        if (args.with_bound && cs.bound_exit != kExitTotalFailure)
          na.envelope_csv = core_dir + "/bound/envelope.csv";
        cs.ncp_exit = run_ncp(na);
      }
      bool bad = (args.with_bound && cs.bound_exit == kExitTotalFailure) ||
                 (args.with_ncp && cs.ncp_exit == kExitTotalFailure);
      bool part = cs.bound_exit == kExitPartial || cs.ncp_exit == kExitPartial;
      cs.status = bad ? "failed" : part ? "partial" : "done";
      bad ? ++n_fail : ++n_ok;
      if (part) ++n_partial;
    } catch (const std::exception& e) {
      cs.status = std::string("error: ") + e.what();
      ++n_fail;
    }
    statuses.push_back(cs);
  }

  JsonWriter w;
  w.begin_object();
  w.key("tool");
  w.value(kToolName);
  w.key("version");
  w.value(kToolVersion);
  w.key("command");
  w.value(std::string_view("kcore"));
  w.key("graph");
  append_graph_json(w, args.graph, pg);
  w.key("max_core");
  w.value_int(cd.max_core);
  w.key("cores");
  w.begin_array();
  for (const CoreStatus& cs : statuses) {
    w.begin_object();
    w.key("k");
    w.value_int(cs.k);
    w.key("core_n");
    w.value_int(cs.core_n);
    w.key("lcc_n");
    w.value_int(cs.lcc_n);
    w.key("status");
    w.value(std::string_view(cs.status));
    if (cs.bound_exit >= 0) {
      w.key("bound_exit");
      w.value_int(cs.bound_exit);
    }
    if (cs.ncp_exit >= 0) {
      w.key("ncp_exit");
      w.value_int(cs.ncp_exit);
    }
    w.end_object();
  }
  w.end_array();
  w.end_object();
  std::string s = w.str();
  s += '\n';
  write_file(args.out_dir + "/manifest.json", s);

  if (n_ok == 0) return kExitTotalFailure;
  if (n_fail > 0 || n_partial > 0) return kExitPartial;
  return kExitOk;
}

int run_synth(const SynthArgs& args) {
  if (args.out_path.empty()) throw std::invalid_argument("synth: --out is required");
  SynthResult r = generate_core_periphery(args.config);

  std::string body;
  body += "# " + std::string(kToolName) + " synth n=" + std::to_string(args.config.n) +
          " dim=" + std::to_string(args.config.dim) +
          " neighbors=" + std::to_string(args.config.neighbors) +
          " seed=" + std::to_string(args.config.seed) + "\n";
  const Graph& g = r.graph;
  for (index_t v = 0; v < g.num_vertices(); ++v) {
    for (index_t u : g.neighbors(v)) {
      if (u < v) continue;
      body += std::to_string(v);
      body += ' ';
      body += std::to_string(u);
      body += '\n';
    }
  }
  write_file(args.out_path, body);

  if (!args.coords_path.empty()) {
    std::string csv = "# mucond.coords.v1\nid,core";
    for (int d = 0; d < args.config.dim; ++d) csv += ",x" + std::to_string(d);
    csv += '\n';
    for (index_t v = 0; v < args.config.n; ++v) {
      csv += std::to_string(v);
      csv += ',';
      csv += r.is_core[v] ? '1' : '0';
      for (int d = 0; d < args.config.dim; ++d) {
        csv += ',';
        csv += format_double(r.coords[v * args.config.dim + d]);
      }
      csv += '\n';
    }
    write_file(args.coords_path, csv);
  }

  JsonWriter w;
  w.begin_object();
  w.key("tool");
  w.value(kToolName);
  w.key("version");
  w.value(kToolVersion);
  w.key("command");
  w.value(std::string_view("synth"));
  w.key("parameters");
  w.begin_object();
  w.key("n");
  w.value_int(args.config.n);
  w.key("dim");
  w.value_int(args.config.dim);
  w.key("core_fraction");
  w.value(args.config.core_fraction);
  w.key("core_scale");
  w.value(args.config.core_scale);
  w.key("periphery_scale");
  w.value(args.config.periphery_scale);
  w.key("neighbors");
  w.value_int(args.config.neighbors);
  w.key("seed");
  w.value_uint(args.config.seed);
  w.end_object();
  w.key("edges");
  w.value_int(g.num_edges());
  w.key("status");
  w.value(std::string_view("complete"));
  w.key("outputs");
  w.begin_array();
  w.value(std::string_view(args.out_path));
  if (!args.coords_path.empty()) w.value(std::string_view(args.coords_path));
  w.end_array();
  w.end_object();
  std::string ms = w.str();
  ms += '\n';
  write_file(args.out_path + ".manifest.json", ms);

  std::printf("synth: n=%lld edges=%lld -> %s\n",
              static_cast<long long>(g.num_vertices()),
              static_cast<long long>(g.num_edges()), args.out_path.c_str());
  return kExitOk;
}

int run_brute(const BruteArgs& args) {
  PreparedGraph pg = prepare_graph(args.graph);
  BruteResult r = args.min_conductance ? brute_min_conductance(pg.graph)
                                       : brute_mu_conductance(pg.graph, args.mu);

  std::string ids = "[";
  for (std::size_t i = 0; i < r.argmin.size(); ++i) {
    if (i) ids += ", ";
    ids += std::to_string(pg.original_ids[r.argmin[i]]);
  }
  ids += "]";

  if (args.min_conductance)
    std::printf("phi = %s\n", format_double(r.phi).c_str());
  else
    std::printf("phi_mu = %s (mu = %s)\n", format_double(r.phi).c_str(),
                format_double(args.mu).c_str());
  std::printf("argmin = %s\n", ids.c_str());
  std::printf("feasible_count = %lld\n", r.feasible_count);
  std::printf("visited_count = %lld\n", r.visited_count);

  if (!args.json_path.empty()) {
    JsonWriter w;
    w.begin_object();
    w.key("tool");
    w.value(kToolName);
    w.key("version");
    w.value(kToolVersion);
    w.key("command");
    w.value(std::string_view("brute"));
    w.key("graph_fnv1a64");
    w.value(std::string_view(pg.file_hash));
    w.key("mu");
    if (args.min_conductance)
      w.value_null();
    else
      w.value(args.mu);
    w.key("phi");
    w.value(r.phi);
    w.key("argmin");
    w.begin_array();
    for (index_t v : r.argmin) w.value_int(pg.original_ids[v]);
    w.end_array();
    w.key("feasible_count");
    w.value_int(r.feasible_count);
    w.key("visited_count");
    w.value_int(r.visited_count);
    w.end_object();
    std::string s = w.str();
    s += '\n';
    write_file(args.json_path, s);
  }
  return kExitOk;
}

int run_lambda2(const Lambda2Args& args) {
  PreparedGraph pg = prepare_graph(args.graph);
  LanczosOptions lo;
  lo.tol = args.eig_tol;
  double l2 = smallest_k_nonzero_generalized(pg.graph, 1, lo).values[0];
  std::printf("lambda2 = %s\n", format_double(l2).c_str());
  std::printf("lambda2_over_2 = %s\n", format_double(0.5 * l2).c_str());
  if (!args.json_path.empty()) {
    JsonWriter w;
    w.begin_object();
    w.key("tool");
    w.value(kToolName);
    w.key("version");
    w.value(kToolVersion);
    w.key("command");
    w.value(std::string_view("lambda2"));
    w.key("graph_fnv1a64");
    w.value(std::string_view(pg.file_hash));
    w.key("lambda2");
    w.value(l2);
    w.key("lambda2_over_2");
    w.value(0.5 * l2);
    w.end_object();
    std::string s = w.str();
    s += '\n';
    write_file(args.json_path, s);
  }
  return kExitOk;
}

}  // namespace mucond::cmd

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "mucond/commands.hpp"
#include "mucond/graph.hpp"
#include "mucond/oracle.hpp"
#include "mucond/runio.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mucond;
namespace cmd = mucond::cmd;

namespace {

// Fresh scratch directory per test; contents from earlier runs are discarded.
fs::path fresh_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("mucond_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string path_of(const fs::path& p) { return p.string(); }

// Two K4 cliques joined by the single edge 3-4. Vol = 26, min cut ratio 1/13.
const char* kBarbellText =
    "0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n"
    "3 4\n"
    "4 5\n4 6\n4 7\n5 6\n5 7\n6 7\n";

// K4 on {0,1,2,3} with a pendant chain 3-4-5. Degrees 3,3,3,4,2,1; Vol = 16.
const char* kCliqueChainText = "0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n3 4\n4 5\n";

const char* kK4Text = "0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n";

fs::path write_fixture(const fs::path& dir, const std::string& name, const std::string& body) {
  fs::path p = dir / name;
  write_file(p.string(), body);
  return p;
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (!line.empty() && line[0] != '#') out.push_back(line);
  }
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t c = line.find(',', pos);
    if (c == std::string::npos) {
      out.push_back(line.substr(pos));
      return out;
    }
    out.push_back(line.substr(pos, c - pos));
    pos = c + 1;
  }
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("prepare_graph composes lcc relabeling with input labels") {
  fs::path dir = fresh_dir("prepare");
  // Small component {8,9} plus a triangle; the triangle is the larger piece.
  fs::path file = write_fixture(dir, "two_comp.txt", "8 9\n1 2\n2 3\n3 1\n");

  cmd::GraphArgs args;
  args.path = path_of(file);

  cmd::PreparedGraph plain = cmd::prepare_graph(args);
  CHECK(plain.graph.num_vertices() == 5);
  CHECK(plain.loaded_n == 5);
  CHECK_FALSE(plain.lcc_applied);
  CHECK(plain.original_ids == std::vector<index_t>{8, 9, 1, 2, 3});
  CHECK(plain.file_hash == fnv1a64_hex("8 9\n1 2\n2 3\n3 1\n"));

  args.lcc = true;
  cmd::PreparedGraph pg = cmd::prepare_graph(args);
  CHECK(pg.graph.num_vertices() == 3);
  CHECK(pg.graph.num_edges() == 3);
  CHECK(pg.lcc_applied);
  CHECK(pg.loaded_n == 5);
  // original_ids maps through the LCC relabeling back to the input labels.
  std::vector<index_t> ids = pg.original_ids;
  std::sort(ids.begin(), ids.end());
  CHECK(ids == std::vector<index_t>{1, 2, 3});

  // symmetric_arcs passes through to the loader.
  fs::path arcs = write_fixture(dir, "arcs.txt", "0 1\n1 0\n1 2\n2 1\n");
  cmd::GraphArgs aa;
  aa.path = path_of(arcs);
  aa.symmetric_arcs = true;
  cmd::PreparedGraph pa = cmd::prepare_graph(aa);
  CHECK(pa.graph.num_edges() == 2);
  CHECK(pa.graph.volume() == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("default mu grid is sorted and inside (0, 1/2]") {
  std::vector<double> grid = cmd::default_mu_grid();
  CHECK(grid.size() == 10);
  CHECK(grid.front() == 1e-6);
  CHECK(grid.back() == 0.5);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(grid[i] > 0.0);
    CHECK(grid[i] <= 0.5);
    if (i) CHECK(grid[i] > grid[i - 1]);
  }
}

TEST_CASE("run_bound writes envelope, per-mu reports, and manifest") {
  fs::path dir = fresh_dir("bound");
  fs::path file = write_fixture(dir, "barbell.txt", kBarbellText);

  cmd::BoundArgs args;
  args.graph.path = path_of(file);
  args.mu_list = {0.1, 0.3};
  args.rank = 3;
  args.workers = 1;
  args.out_dir = path_of(dir / "out");

  int rc = cmd::run_bound(args);
  CHECK(rc == cmd::kExitOk);

  auto rows = cmd::parse_envelope_csv(read_file(args.out_dir + "/envelope.csv"));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].mu == 0.1);
  CHECK(rows[1].mu == 0.3);
  CHECK(rows[0].certified);
  CHECK(rows[1].certified);
  CHECK(rows[0].bound > 0.0);
  // The published envelope is monotone non-decreasing in mu.
  CHECK(rows[1].bound >= rows[0].bound);

  // Soundness against the exhaustive oracle on this small instance.
  Graph g = load_edge_list_text(kBarbellText, LoadOptions{}).graph;
  CHECK(rows[0].bound <= brute_mu_conductance(g, 0.1).phi + 1e-9);
  CHECK(rows[1].bound <= brute_mu_conductance(g, 0.3).phi + 1e-9);

  json report = json::parse(read_file(args.out_dir + "/bound_mu0.1_k3.json"));
  CHECK(report["mu"].get<double>() == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(report["k"].get<int>() == 3);
  CHECK(report["certified"].get<bool>());
  CHECK(report["theta"].get<double>() >= 0.0);
  CHECK(report["bound"].get<double>() <= report["objective"].get<double>() / 2 + 1e-12);
  CHECK(report["solver"]["converged"].get<bool>());
  CHECK(report["eig"]["converged"].get<bool>());

  json manifest = json::parse(read_file(args.out_dir + "/manifest.json"));
  CHECK(manifest["tool"].get<std::string>() == "mucond");
  CHECK(manifest["command"].get<std::string>() == "bound");
  CHECK(manifest["status"].get<std::string>() == "complete");
  CHECK(manifest["graph"]["n"].get<int>() == 8);
  CHECK(manifest["graph"]["edges"].get<int>() == 13);
  CHECK(manifest["graph"]["volume"].get<double>() == doctest::Approx(26.0).epsilon(1e-15));
  CHECK(manifest["parameters"]["workers"].get<int>() == 1);
  REQUIRE(manifest["runs"].size() == 2);
  CHECK(manifest["runs"][0]["status"].get<std::string>() == "certified");
  CHECK(manifest["runs"][0]["file"].get<std::string>() == "bound_mu0.1_k3.json");
}

TEST_CASE("run_bound reruns are byte-identical and worker-count independent") {
  fs::path dir = fresh_dir("bound_repeat");
  fs::path file = write_fixture(dir, "barbell.txt", kBarbellText);

  cmd::BoundArgs args;
  args.graph.path = path_of(file);
  args.mu_list = {0.1, 0.3};
  args.rank = 3;
  args.workers = 1;
  args.out_dir = path_of(dir / "a");
  REQUIRE(cmd::run_bound(args) == cmd::kExitOk);

  args.out_dir = path_of(dir / "b");
  args.workers = 2;  // per-mu tasks are independent, so results cannot differ
  REQUIRE(cmd::run_bound(args) == cmd::kExitOk);

  CHECK(read_file(path_of(dir / "a" / "envelope.csv")) ==
        read_file(path_of(dir / "b" / "envelope.csv")));
  CHECK(read_file(path_of(dir / "a" / "bound_mu0.1_k3.json")) ==
        read_file(path_of(dir / "b" / "bound_mu0.1_k3.json")));
  CHECK(read_file(path_of(dir / "a" / "bound_mu0.3_k3.json")) ==
        read_file(path_of(dir / "b" / "bound_mu0.3_k3.json")));
}

TEST_CASE("run_bound validates its arguments") {
  fs::path dir = fresh_dir("bound_args");
  fs::path file = write_fixture(dir, "k4.txt", kK4Text);

  cmd::BoundArgs args;
  args.graph.path = path_of(file);
  args.out_dir.clear();
  CHECK_THROWS_AS(cmd::run_bound(args), std::invalid_argument);

  args.out_dir = path_of(dir / "out");
  args.mu_list = {0.0};
  CHECK_THROWS_AS(cmd::run_bound(args), std::invalid_argument);
  args.mu_list = {0.6};
  CHECK_THROWS_AS(cmd::run_bound(args), std::invalid_argument);
  args.mu_list = {0.1, 0.1};
  CHECK_THROWS_AS(cmd::run_bound(args), std::invalid_argument);

  args.mu_list = {0.1};
  args.rank = 0;
  CHECK_THROWS_AS(cmd::run_bound(args), std::invalid_argument);
  args.rank = 4;  // n = 4 requires k < n
  CHECK_THROWS_AS(cmd::run_bound(args), std::invalid_argument);

  // Disconnected input is rejected with a pointer at --lcc.
  fs::path split = write_fixture(dir, "split.txt", "0 1\n2 3\n");
  cmd::BoundArgs bad;
  bad.graph.path = path_of(split);
  bad.mu_list = {0.25};
  bad.rank = 1;
  bad.out_dir = path_of(dir / "out2");
  try {
    cmd::run_bound(bad);
    FAIL("expected a runtime_error for the disconnected graph");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("--lcc") != std::string::npos);
  }
}

TEST_CASE("parse_envelope_csv round trip and validation") {
  std::string good =
      "# mucond.envelope.v1\n"
      "mu,bound,certified\n"
      "0.1,0.25,1\n"
      "0.2,0.3,0\n"
      "0.3,0.31,true\n";
  auto rows = cmd::parse_envelope_csv(good);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].mu == 0.1);
  CHECK(rows[0].bound == 0.25);
  CHECK(rows[0].certified);
  CHECK_FALSE(rows[1].certified);
  CHECK(rows[2].certified);

  CHECK_THROWS_WITH_AS(cmd::parse_envelope_csv(""), "envelope csv: missing header",
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(cmd::parse_envelope_csv("# only a comment\n"),
                       "envelope csv: missing header", std::runtime_error);
  CHECK_THROWS_WITH_AS(cmd::parse_envelope_csv("mu,bound\n0.1,0.2,1\n"),
                       "envelope csv: unexpected header 'mu,bound'", std::runtime_error);
  CHECK_THROWS_WITH_AS(cmd::parse_envelope_csv("mu,bound,certified\n0.1,0.2\n"),
                       "envelope csv: malformed line 2", std::runtime_error);
}

TEST_CASE("run_ncp writes samples, profile, and heatmap") {
  fs::path dir = fresh_dir("ncp");
  fs::path file = write_fixture(dir, "barbell.txt", kBarbellText);

  cmd::NcpArgs args;
  args.graph.path = path_of(file);
  args.sweep.epsilons = {1e-2, 1e-3, 1e-4};
  args.sweep.num_seeds = 6;
  args.out_dir = path_of(dir / "out");

  int rc = cmd::run_ncp(args);
  CHECK(rc == cmd::kExitOk);

  std::string samples = read_file(args.out_dir + "/samples.csv");
  CHECK(samples.rfind("# mucond.samples.v1\n", 0) == 0);
  auto lines = data_lines(samples);
  REQUIRE(lines.size() >= 2);
  CHECK(lines[0] == "seed,epsilon,volume,size,conductance");
  for (std::size_t i = 1; i < lines.size(); ++i) CHECK(split_csv(lines[i]).size() == 5);

  std::string profile = read_file(args.out_dir + "/profile.csv");
  CHECK(profile.rfind("# mucond.profile.v1\n", 0) == 0);
  CHECK(data_lines(profile)[0] == "vol_lo,vol_hi,min_conductance,count");

  std::string heat = read_file(args.out_dir + "/heatmap.csv");
  CHECK(heat.rfind("# mucond.heatmap.v1\n", 0) == 0);

  json manifest = json::parse(read_file(args.out_dir + "/manifest.json"));
  CHECK(manifest["command"].get<std::string>() == "ncp");
  CHECK(manifest["status"].get<std::string>() == "complete");
  CHECK(manifest["samples"].get<long long>() ==
        static_cast<long long>(lines.size()) - 1);
  CHECK(manifest["outputs"].size() == 3);

  // Rerunning reproduces the sample file byte for byte.
  cmd::NcpArgs again = args;
  again.out_dir = path_of(dir / "out2");
  REQUIRE(cmd::run_ncp(again) == cmd::kExitOk);
  CHECK(read_file(again.out_dir + "/samples.csv") == samples);
}

TEST_CASE("run_ncp resolves explicit seeds as input labels") {
  fs::path dir = fresh_dir("ncp_seeds");
  // Junk component {8,9}; the K4 survives LCC extraction.
  fs::path file = write_fixture(dir, "mix.txt", std::string("8 9\n") + kK4Text);

  cmd::NcpArgs args;
  args.graph.path = path_of(file);
  args.graph.lcc = true;
  args.sweep.epsilons = {1e-2, 1e-3};
  args.sweep.explicit_seeds = {2};
  args.out_dir = path_of(dir / "out");
  CHECK(cmd::run_ncp(args) == cmd::kExitOk);
  auto lines = data_lines(read_file(args.out_dir + "/samples.csv"));
  for (std::size_t i = 1; i < lines.size(); ++i) {
    // The seed column reports the input label, not the internal id.
    CHECK(split_csv(lines[i])[0] == "2");
  }

  // Label 8 was dropped with the small component; label 99 never existed.
  cmd::NcpArgs bad = args;
  bad.out_dir = path_of(dir / "out_bad");
  bad.sweep.explicit_seeds = {8};
  CHECK_THROWS_AS(cmd::run_ncp(bad), std::invalid_argument);
  bad.sweep.explicit_seeds = {99};
  try {
    cmd::run_ncp(bad);
    FAIL("expected an invalid_argument for the unknown seed label");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("seed label 99") != std::string::npos);
  }
}

TEST_CASE("run_ncp emits a gap report against a bound envelope") {
  fs::path dir = fresh_dir("ncp_gap");
  fs::path file = write_fixture(dir, "barbell.txt", kBarbellText);

  cmd::BoundArgs bargs;
  bargs.graph.path = path_of(file);
  bargs.mu_list = {0.1};
  bargs.rank = 3;
  bargs.workers = 1;
  bargs.out_dir = path_of(dir / "bound");
  REQUIRE(cmd::run_bound(bargs) == cmd::kExitOk);

  cmd::NcpArgs args;
  args.graph.path = path_of(file);
  args.envelope_csv = bargs.out_dir + "/envelope.csv";
  args.out_dir = path_of(dir / "ncp");
  int rc = cmd::run_ncp(args);
  CHECK(rc == cmd::kExitOk);

  std::string gap = read_file(args.out_dir + "/gap.csv");
  CHECK(gap.rfind("# mucond.gap.v1\n", 0) == 0);
  auto lines = data_lines(gap);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "mu,upper,lower,ratio,certified,approx_upper");
  auto f = split_csv(lines[1]);
  REQUIRE(f.size() == 6);
  CHECK(std::stod(f[0]) == 0.1);
  // The sweep recovers a clique side (phi = 1/13) above the volume target.
  CHECK(std::stod(f[1]) == doctest::Approx(1.0 / 13).epsilon(1e-12));
  double lower = std::stod(f[2]);
  CHECK(lower > 0.0);
  CHECK(lower <= std::stod(f[1]) + 1e-12);
  CHECK(std::stod(f[3]) == doctest::Approx(std::stod(f[1]) / lower).epsilon(1e-12));
  CHECK(f[4] == "1");
  CHECK(f[5] == "0");

  // A missing envelope file downgrades the run, it does not abort it.
  cmd::NcpArgs missing = args;
  missing.envelope_csv = path_of(dir / "nonexistent.csv");
  missing.out_dir = path_of(dir / "ncp_missing");
  CHECK(cmd::run_ncp(missing) == cmd::kExitPartial);
  json manifest = json::parse(read_file(missing.out_dir + "/manifest.json"));
  CHECK(manifest["status"].get<std::string>() == "partial");
  std::string note = manifest["note"].get<std::string>();
  CHECK(note.find("gap.csv skipped") != std::string::npos);
}

TEST_CASE("run_kcore chains extraction, bound, and ncp") {
  fs::path dir = fresh_dir("kcore");
  fs::path file = write_fixture(dir, "clique_chain.txt", kCliqueChainText);

  cmd::KcoreArgs args;
  args.graph.path = path_of(file);
  args.k_list = {1, 3, 7};
  args.mu_list = {0.1};
  args.rank = 2;
  args.workers = 1;
  args.sweep.epsilons = {1e-2, 1e-3, 1e-4};
  args.sweep.num_seeds = 6;
  args.out_dir = path_of(dir / "out");

  int rc = cmd::run_kcore(args);
  CHECK(rc == cmd::kExitOk);

  json manifest = json::parse(read_file(args.out_dir + "/manifest.json"));
  CHECK(manifest["command"].get<std::string>() == "kcore");
  CHECK(manifest["max_core"].get<int>() == 3);
  REQUIRE(manifest["cores"].size() == 3);

  CHECK(manifest["cores"][0]["k"].get<int>() == 1);
  CHECK(manifest["cores"][0]["core_n"].get<int>() == 6);
  CHECK(manifest["cores"][0]["lcc_n"].get<int>() == 6);
  CHECK(manifest["cores"][0]["status"].get<std::string>() == "done");
  CHECK(manifest["cores"][0]["bound_exit"].get<int>() == 0);
  CHECK(manifest["cores"][0]["ncp_exit"].get<int>() == 0);

  CHECK(manifest["cores"][1]["k"].get<int>() == 3);
  CHECK(manifest["cores"][1]["core_n"].get<int>() == 4);
  CHECK(manifest["cores"][1]["lcc_n"].get<int>() == 4);

  CHECK(manifest["cores"][2]["k"].get<int>() == 7);
  CHECK(manifest["cores"][2]["core_n"].get<int>() == 0);
  CHECK(manifest["cores"][2]["status"].get<std::string>() == "empty");

  // The 3-core is the K4; its extract keeps the original labels.
  std::string core = read_file(args.out_dir + "/core3/core.txt");
  CHECK(core.rfind("# mucond k-core extract, k=3\n", 0) == 0);
  auto lines = data_lines(core);
  CHECK(lines.size() == 6);
  CHECK(lines[0] == "0 1");
  CHECK(file_exists(args.out_dir + "/core3/bound/envelope.csv"));
  CHECK(file_exists(args.out_dir + "/core3/ncp/samples.csv"));
  CHECK(file_exists(args.out_dir + "/core3/ncp/gap.csv"));
  CHECK(file_exists(args.out_dir + "/core1/bound/envelope.csv"));

  // The chained bound really certifies the extracted core.
  auto rows = cmd::parse_envelope_csv(read_file(args.out_dir + "/core3/bound/envelope.csv"));
  REQUIRE(rows.size() == 1);
  Graph k4 = load_edge_list_text(kK4Text, LoadOptions{}).graph;
  CHECK(rows[0].certified);
  CHECK(rows[0].bound <= brute_mu_conductance(k4, 0.1).phi + 1e-9);

  cmd::KcoreArgs bad = args;
  bad.k_list.clear();
  CHECK_THROWS_AS(cmd::run_kcore(bad), std::invalid_argument);
  bad = args;
  bad.out_dir.clear();
  CHECK_THROWS_AS(cmd::run_kcore(bad), std::invalid_argument);
}

TEST_CASE("run_synth outputs are deterministic and reloadable") {
  fs::path dir = fresh_dir("synth");

  cmd::SynthArgs args;
  args.config.n = 60;
  args.config.dim = 2;
  args.config.neighbors = 4;
  args.config.seed = 9;
  args.out_path = path_of(dir / "synth.txt");
  args.coords_path = path_of(dir / "coords.csv");
  CHECK(cmd::run_synth(args) == cmd::kExitOk);

  cmd::GraphArgs ga;
  ga.path = args.out_path;
  cmd::PreparedGraph pg = cmd::prepare_graph(ga);
  CHECK(pg.graph.num_vertices() == 60);
  double dmin = 1e300;
  for (index_t v = 0; v < 60; ++v) dmin = std::min(dmin, pg.graph.degree(v));
  CHECK(dmin >= 4.0);

  std::string coords = read_file(args.coords_path);
  CHECK(coords.rfind("# mucond.coords.v1\n", 0) == 0);
  auto lines = data_lines(coords);
  REQUIRE(lines.size() == 61);
  CHECK(lines[0] == "id,core,x0,x1");
  CHECK(split_csv(lines[1]).size() == 4);

  json manifest = json::parse(read_file(args.out_path + ".manifest.json"));
  CHECK(manifest["command"].get<std::string>() == "synth");
  CHECK(manifest["parameters"]["n"].get<int>() == 60);
  CHECK(manifest["edges"].get<long long>() == pg.graph.num_edges());

  cmd::SynthArgs again = args;
  again.out_path = path_of(dir / "synth2.txt");
  again.coords_path = path_of(dir / "coords2.csv");
  CHECK(cmd::run_synth(again) == cmd::kExitOk);
  CHECK(read_file(again.out_path) == read_file(args.out_path));
  CHECK(read_file(again.coords_path) == coords);

  cmd::SynthArgs bad = args;
  bad.out_path.clear();
  CHECK_THROWS_AS(cmd::run_synth(bad), std::invalid_argument);
}

TEST_CASE("run_brute and run_lambda2 write json reports") {
  fs::path dir = fresh_dir("brute");
  fs::path file = write_fixture(dir, "k4.txt", kK4Text);

  cmd::BruteArgs args;
  args.graph.path = path_of(file);
  args.mu = 0.25;
  args.json_path = path_of(dir / "brute.json");
  CHECK(cmd::run_brute(args) == cmd::kExitOk);

  json b = json::parse(read_file(args.json_path));
  CHECK(b["command"].get<std::string>() == "brute");
  CHECK(b["mu"].get<double>() == 0.25);
  CHECK(b["phi"].get<double>() == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(b["argmin"].size() == 2);
  CHECK(b["feasible_count"].get<long long>() == 10);
  CHECK(b["visited_count"].get<long long>() == 14);

  cmd::BruteArgs global = args;
  global.min_conductance = true;
  global.json_path = path_of(dir / "brute_min.json");
  CHECK(cmd::run_brute(global) == cmd::kExitOk);
  json bm = json::parse(read_file(global.json_path));
  CHECK(bm["mu"].is_null());
  CHECK(bm["phi"].get<double>() == doctest::Approx(2.0 / 3).epsilon(1e-12));

  cmd::Lambda2Args largs;
  largs.graph.path = path_of(file);
  largs.json_path = path_of(dir / "lambda2.json");
  CHECK(cmd::run_lambda2(largs) == cmd::kExitOk);
  json l = json::parse(read_file(largs.json_path));
  CHECK(l["lambda2"].get<double>() == doctest::Approx(4.0 / 3).epsilon(1e-8));
  CHECK(l["lambda2_over_2"].get<double>() == doctest::Approx(2.0 / 3).epsilon(1e-8));
  CHECK(l["graph_fnv1a64"].get<std::string>() == fnv1a64_hex(kK4Text));
}

}  // TEST_SUITE("cli")

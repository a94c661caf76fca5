#include "mucond/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace mucond {

namespace {

struct ArcRec {
  index_t u, v;
  double w;
};

}  // namespace

Graph Graph::from_edges(index_t n,
                        std::span<const std::tuple<index_t, index_t, double>> edges) {
  if (n < 0) throw std::invalid_argument("graph: negative vertex count");
  std::vector<ArcRec> arcs;
  arcs.reserve(edges.size());
  for (const auto& [u, v, w] : edges) {
    if (u < 0 || u >= n || v < 0 || v >= n)
      throw std::invalid_argument("graph: vertex id out of range");
    if (u == v) throw std::invalid_argument("graph: self-loop not allowed");
    if (!(w > 0.0)) throw std::invalid_argument("graph: edge weight must be positive");
    arcs.push_back({std::min(u, v), std::max(u, v), w});
  }
  // Sort canonical pairs and merge duplicates; summation order is the sorted
  // order, so the build is deterministic for any input permutation of pairs.
  std::stable_sort(arcs.begin(), arcs.end(), [](const ArcRec& a, const ArcRec& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  std::vector<ArcRec> merged;
  merged.reserve(arcs.size());
  for (std::size_t i = 0; i < arcs.size();) {
    std::size_t j = i;
    double w = 0.0;
    while (j < arcs.size() && arcs[j].u == arcs[i].u && arcs[j].v == arcs[i].v) {
      w += arcs[j].w;
      ++j;
    }
    merged.push_back({arcs[i].u, arcs[i].v, w});
    i = j;
  }

  Graph g;
  g.n_ = n;
  g.row_ptr_.assign(n + 1, 0);
  for (const ArcRec& e : merged) {
    ++g.row_ptr_[e.u + 1];
    ++g.row_ptr_[e.v + 1];
  }
  for (index_t v = 0; v < n; ++v) g.row_ptr_[v + 1] += g.row_ptr_[v];
  g.col_.resize(g.row_ptr_[n]);
  g.wgt_.resize(g.row_ptr_[n]);
  std::vector<index_t> cursor(g.row_ptr_.begin(), g.row_ptr_.end() - 1);
  for (const ArcRec& e : merged) {
    g.col_[cursor[e.u]] = e.v;
    g.wgt_[cursor[e.u]++] = e.w;
    g.col_[cursor[e.v]] = e.u;
    g.wgt_[cursor[e.v]++] = e.w;
  }
  for (index_t v = 0; v < n; ++v) {
    index_t b = g.row_ptr_[v], e = g.row_ptr_[v + 1];
    std::vector<std::pair<index_t, double>> row;
    row.reserve(e - b);
    for (index_t i = b; i < e; ++i) row.emplace_back(g.col_[i], g.wgt_[i]);
    std::sort(row.begin(), row.end());
    for (index_t i = b; i < e; ++i) {
      g.col_[i] = row[i - b].first;
      g.wgt_[i] = row[i - b].second;
    }
  }
  g.degree_.assign(n, 0.0);
  for (index_t v = 0; v < n; ++v) {
    double d = 0.0;
    for (double w : g.weights(v)) d += w;
    g.degree_[v] = d;
  }
  g.volume_ = 0.0;
  for (double d : g.degree_) g.volume_ += d;
  return g;
}

bool Graph::connected() const {
  if (n_ == 0) return false;
  std::vector<std::uint8_t> seen(n_, 0);
  std::vector<index_t> stack{0};
  seen[0] = 1;
  index_t count = 1;
  while (!stack.empty()) {
    index_t v = stack.back();
    stack.pop_back();
    for (index_t u : neighbors(v)) {
      if (!seen[u]) {
        seen[u] = 1;
        ++count;
        stack.push_back(u);
      }
    }
  }
  return count == n_;
}

bool Graph::has_isolated_vertex() const {
  for (index_t v = 0; v < n_; ++v)
    if (row_ptr_[v + 1] == row_ptr_[v]) return true;
  return false;
}

void Graph::laplacian_matvec(std::span<const double> x, std::span<double> out) const {
  if (static_cast<index_t>(x.size()) != n_ || static_cast<index_t>(out.size()) != n_)
    throw std::invalid_argument("laplacian_matvec: size mismatch");
  for (index_t v = 0; v < n_; ++v) {
    double acc = 0.0;
    for (index_t i = row_ptr_[v]; i < row_ptr_[v + 1]; ++i) acc += wgt_[i] * x[col_[i]];
    out[v] = degree_[v] * x[v] - acc;
  }
}

void Graph::adjacency_matvec(std::span<const double> x, std::span<double> out) const {
  if (static_cast<index_t>(x.size()) != n_ || static_cast<index_t>(out.size()) != n_)
    throw std::invalid_argument("adjacency_matvec: size mismatch");
  for (index_t v = 0; v < n_; ++v) {
    double acc = 0.0;
    for (index_t i = row_ptr_[v]; i < row_ptr_[v + 1]; ++i) acc += wgt_[i] * x[col_[i]];
    out[v] = acc;
  }
}

double Graph::quadratic_form(std::span<const double> x) const {
  if (static_cast<index_t>(x.size()) != n_)
    throw std::invalid_argument("quadratic_form: size mismatch");
  // Edge-difference form: exactly zero on constants and never negative,
  // unlike accumulating x^T (L x).
  double acc = 0.0;
  for (index_t v = 0; v < n_; ++v) {
    for (index_t i = row_ptr_[v]; i < row_ptr_[v + 1]; ++i) {
      const index_t u = col_[i];
      if (u <= v) continue;
      const double diff = x[v] - x[u];
      acc += wgt_[i] * diff * diff;
    }
  }
  return acc;
}

VertexSet VertexSet::make(const Graph& g, std::vector<index_t> members) {
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (members[i] < 0 || members[i] >= g.num_vertices())
      throw std::invalid_argument("vertex set: id out of range");
    if (i > 0 && members[i] <= members[i - 1])
      throw std::invalid_argument("vertex set: ids must be strictly increasing");
  }
  VertexSet s;
  s.members = std::move(members);
  s.volume = 0.0;
  for (index_t v : s.members) s.volume += g.degree(v);
  return s;
}

VertexSet VertexSet::from_mask(const Graph& g, std::span<const std::uint8_t> mask) {
  if (static_cast<index_t>(mask.size()) != g.num_vertices())
    throw std::invalid_argument("vertex set: mask size mismatch");
  std::vector<index_t> members;
  for (index_t v = 0; v < g.num_vertices(); ++v)
    if (mask[v]) members.push_back(v);
  return make(g, std::move(members));
}

std::vector<std::uint8_t> VertexSet::mask(index_t n) const {
  std::vector<std::uint8_t> m(n, 0);
  for (index_t v : members) m[v] = 1;
  return m;
}

namespace {

bool is_comment_or_blank(std::string_view line, const std::string& prefixes) {
  for (char c : line) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    return prefixes.find(c) != std::string::npos;
  }
  return true;  // blank
}

}  // namespace

LoadedGraph load_edge_list_text(std::string_view text, const LoadOptions& opts) {
  std::unordered_map<long long, index_t> id_map;
  std::vector<index_t> original_ids;
  auto intern = [&](long long raw) -> index_t {
    auto it = id_map.find(raw);
    if (it != id_map.end()) return it->second;
    index_t id = static_cast<index_t>(original_ids.size());
    id_map.emplace(raw, id);
    original_ids.push_back(raw);
    return id;
  };

  std::vector<std::tuple<index_t, index_t, double>> raw_edges;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (is_comment_or_blank(line, opts.comment_prefixes)) continue;

    std::istringstream ls{std::string(line)};
    long long u_raw, v_raw;
    if (!(ls >> u_raw >> v_raw))
      throw std::runtime_error("edge list: malformed line " + std::to_string(line_no));
    double w = 1.0;
    if (opts.weighted) {
      if (!(ls >> w)) {
        ls.clear();
        w = 1.0;
      }
    }
    std::string trailing;
    if (!opts.weighted && (ls >> trailing)) {
      // Unweighted load tolerates (and ignores) a weight column.
    }
    if (w < 0.0)
      throw std::runtime_error("edge list: negative weight on line " + std::to_string(line_no));
    if (!opts.zero_indexed) {
      if (u_raw < 1 || v_raw < 1)
        throw std::runtime_error("edge list: id below 1 in one-indexed input, line " +
                                 std::to_string(line_no));
      --u_raw;
      --v_raw;
    }
    if (u_raw < 0 || v_raw < 0)
      throw std::runtime_error("edge list: negative vertex id on line " + std::to_string(line_no));
    index_t u = intern(u_raw);
    index_t v = intern(v_raw);
    if (u == v) continue;  // self-loop dropped, id already registered
    if (w == 0.0) continue;
    raw_edges.emplace_back(u, v, w);
  }

  index_t n = static_cast<index_t>(original_ids.size());
  LoadedGraph out;
  if (opts.mode == EdgeListMode::SymmetricArcs) {
    // Sum per unordered pair, then halve.
    std::vector<std::tuple<index_t, index_t, double>> canon;
    canon.reserve(raw_edges.size());
    for (auto& [u, v, w] : raw_edges)
      canon.emplace_back(std::min(u, v), std::max(u, v), w);
    std::stable_sort(canon.begin(), canon.end(), [](const auto& a, const auto& b) {
      return std::get<0>(a) != std::get<0>(b) ? std::get<0>(a) < std::get<0>(b)
                                              : std::get<1>(a) < std::get<1>(b);
    });
    std::vector<std::tuple<index_t, index_t, double>> halved;
    for (std::size_t i = 0; i < canon.size();) {
      std::size_t j = i;
      double w = 0.0;
      while (j < canon.size() && std::get<0>(canon[j]) == std::get<0>(canon[i]) &&
             std::get<1>(canon[j]) == std::get<1>(canon[i])) {
        w += std::get<2>(canon[j]);
        ++j;
      }
      halved.emplace_back(std::get<0>(canon[i]), std::get<1>(canon[i]), 0.5 * w);
      i = j;
    }
    out.graph = Graph::from_edges(n, halved);
  } else {
    out.graph = Graph::from_edges(n, raw_edges);
  }
  out.original_ids = std::move(original_ids);
  return out;
}

LoadedGraph load_edge_list(const std::string& path, const LoadOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("edge list: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_edge_list_text(buf.str(), opts);
}

SubgraphResult induced_subgraph(const Graph& g, std::span<const index_t> keep) {
  index_t n = g.num_vertices();
  SubgraphResult r;
  r.old_to_new.assign(n, -1);
  r.new_to_old.assign(keep.begin(), keep.end());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    index_t v = keep[i];
    if (v < 0 || v >= n) throw std::invalid_argument("induced_subgraph: id out of range");
    if (i > 0 && keep[i] <= keep[i - 1])
      throw std::invalid_argument("induced_subgraph: ids must be strictly increasing");
    r.old_to_new[v] = static_cast<index_t>(i);
  }
  std::vector<std::tuple<index_t, index_t, double>> edges;
  for (index_t v : keep) {
    auto nbrs = g.neighbors(v);
    auto ws = g.weights(v);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      index_t u = nbrs[i];
      if (u > v && r.old_to_new[u] >= 0)
        edges.emplace_back(r.old_to_new[v], r.old_to_new[u], ws[i]);
    }
  }
  r.graph = Graph::from_edges(static_cast<index_t>(keep.size()), edges);
  return r;
}

SubgraphResult largest_connected_component(const Graph& g) {
  index_t n = g.num_vertices();
  if (n == 0) throw std::invalid_argument("largest_connected_component: empty graph");
  std::vector<index_t> comp(n, -1);
  index_t num_comp = 0;
  std::vector<index_t> comp_size;
  std::vector<index_t> stack;
  for (index_t s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    index_t c = num_comp++;
    comp_size.push_back(0);
    comp[s] = c;
    stack.assign(1, s);
    while (!stack.empty()) {
      index_t v = stack.back();
      stack.pop_back();
      ++comp_size[c];
      for (index_t u : g.neighbors(v)) {
        if (comp[u] < 0) {
          comp[u] = c;
          stack.push_back(u);
        }
      }
    }
  }
  // Largest size; first-found wins ties, and components are discovered in
  // order of their smallest vertex id.
  index_t best = 0;
  for (index_t c = 1; c < num_comp; ++c)
    if (comp_size[c] > comp_size[best]) best = c;
  std::vector<index_t> keep;
  keep.reserve(comp_size[best]);
  for (index_t v = 0; v < n; ++v)
    if (comp[v] == best) keep.push_back(v);
  return induced_subgraph(g, keep);
}

double boundary_weight(const Graph& g, const VertexSet& s) {
  index_t n = g.num_vertices();
  auto mask = s.mask(n);
  // Iterate arcs out of the smaller side; the cut is symmetric.
  bool use_complement = static_cast<index_t>(s.members.size()) > n / 2;
  double cut = 0.0;
  if (!use_complement) {
    for (index_t v : s.members) {
      auto nbrs = g.neighbors(v);
      auto ws = g.weights(v);
      for (std::size_t i = 0; i < nbrs.size(); ++i)
        if (!mask[nbrs[i]]) cut += ws[i];
    }
  } else {
    for (index_t v = 0; v < n; ++v) {
      if (mask[v]) continue;
      auto nbrs = g.neighbors(v);
      auto ws = g.weights(v);
      for (std::size_t i = 0; i < nbrs.size(); ++i)
        if (mask[nbrs[i]]) cut += ws[i];
    }
  }
  return cut;
}

double conductance(const Graph& g, const VertexSet& s) {
  if (s.members.empty()) throw std::domain_error("conductance: empty set");
  if (static_cast<index_t>(s.members.size()) == g.num_vertices())
    throw std::domain_error("conductance: full vertex set");
  double vol_s = s.volume;
  double vol_c = g.volume() - vol_s;
  double denom = std::min(vol_s, vol_c);
  if (denom <= 0.0) throw std::domain_error("conductance: zero-volume side");
  return boundary_weight(g, s) / denom;
}

std::vector<double> psi_vector(const Graph& g, const VertexSet& s) {
  if (s.members.empty() || static_cast<index_t>(s.members.size()) == g.num_vertices())
    throw std::domain_error("psi_vector: set must be nonempty and proper");
  double vol = g.volume();
  double vs = s.volume;
  double vc = vol - vs;
  if (vs <= 0.0 || vc <= 0.0) throw std::domain_error("psi_vector: zero-volume side");
  double scale = std::sqrt(vol / (vs * vc));
  double shift = vs / vol;
  std::vector<double> psi(g.num_vertices(), -scale * shift);
  for (index_t v : s.members) psi[v] = scale * (1.0 - shift);
  return psi;
}

}  // namespace mucond

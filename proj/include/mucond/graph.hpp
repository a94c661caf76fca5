#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace mucond {

using index_t = std::int64_t;

// Immutable undirected weighted graph in CSR form. Each undirected edge is
// stored as two directed arcs with identical weight; neighbor lists are
// sorted by target id. No self-loops, all weights strictly positive.
// Safe to share across threads once built.
class Graph {
 public:
  Graph() = default;

  // Builds from undirected edge triples (u, v, w). Requires 0 <= u,v < n,
  // u != v, w > 0. Duplicate unordered pairs have their weights summed.
  static Graph from_edges(index_t n,
                          std::span<const std::tuple<index_t, index_t, double>> edges);

  index_t num_vertices() const { return n_; }
  index_t num_arcs() const { return static_cast<index_t>(col_.size()); }
  index_t num_edges() const { return num_arcs() / 2; }

  double degree(index_t v) const { return degree_[v]; }
  std::span<const double> degrees() const { return degree_; }
  // Number of neighbors, ignoring weights.
  index_t neighbor_count(index_t v) const { return row_ptr_[v + 1] - row_ptr_[v]; }
  double volume() const { return volume_; }

  std::span<const index_t> neighbors(index_t v) const {
    return {col_.data() + row_ptr_[v], static_cast<std::size_t>(row_ptr_[v + 1] - row_ptr_[v])};
  }
  std::span<const double> weights(index_t v) const {
    return {wgt_.data() + row_ptr_[v], static_cast<std::size_t>(row_ptr_[v + 1] - row_ptr_[v])};
  }

  bool connected() const;
  bool has_isolated_vertex() const;

  // out = (D - A) x
  void laplacian_matvec(std::span<const double> x, std::span<double> out) const;
  // out = A x
  void adjacency_matvec(std::span<const double> x, std::span<double> out) const;
  // x^T L x, computed as x . (L x); exact zero on constant vectors.
  double quadratic_form(std::span<const double> x) const;

 private:
  index_t n_ = 0;
  std::vector<index_t> row_ptr_;
  std::vector<index_t> col_;
  std::vector<double> wgt_;
  std::vector<double> degree_;
  double volume_ = 0.0;
};

// A subset of vertices with cached weighted volume. Members are strictly
// increasing and validated against the graph they were built from.
struct VertexSet {
  std::vector<index_t> members;
  double volume = 0.0;

  static VertexSet make(const Graph& g, std::vector<index_t> members);
  static VertexSet from_mask(const Graph& g, std::span<const std::uint8_t> mask);
  std::vector<std::uint8_t> mask(index_t n) const;
};

// How duplicate lines in an edge list are interpreted.
//  UndirectedEdges: every line is an undirected edge; duplicate unordered
//    pairs sum ("0 1" plus "1 0" gives weight 2).
//  SymmetricArcs: the file stores each edge in both directions; the summed
//    weight of an unordered pair is halved ("0 1" plus "1 0" gives weight 1).
enum class EdgeListMode { UndirectedEdges, SymmetricArcs };

struct LoadOptions {
  bool zero_indexed = true;
  bool weighted = false;
  std::string comment_prefixes = "#%";
  EdgeListMode mode = EdgeListMode::UndirectedEdges;
};

struct LoadedGraph {
  Graph graph;
  std::vector<index_t> original_ids;  // new id -> id as written in the input
};

// Whitespace-separated "u v [w]" lines. Vertices are relabeled densely in
// order of first appearance; self-loops are dropped (their endpoints still
// get ids); zero-weight lines are skipped; negative weights, malformed lines
// and (with zero_indexed=false) ids < 1 raise std::runtime_error with the
// offending line number.
LoadedGraph load_edge_list(const std::string& path, const LoadOptions& opts = {});
LoadedGraph load_edge_list_text(std::string_view text, const LoadOptions& opts = {});

struct SubgraphResult {
  Graph graph;
  std::vector<index_t> old_to_new;  // -1 where dropped
  std::vector<index_t> new_to_old;
};

// Induced subgraph on a strictly increasing vertex list.
SubgraphResult induced_subgraph(const Graph& g, std::span<const index_t> keep);

// Largest connected component; ties broken toward the component containing
// the smallest vertex id. Errors on an empty graph.
SubgraphResult largest_connected_component(const Graph& g);

// Total weight of arcs leaving S.
double boundary_weight(const Graph& g, const VertexSet& s);

// cut(S) / min(Vol(S), Vol(V\S)). Errors if S is empty or the full set.
double conductance(const Graph& g, const VertexSet& s);

// psi_S = sqrt(Vol/(Vol(S) Vol(S^c))) * (1_S - Vol(S)/Vol * 1); satisfies
// psi^T d = 0, psi^T D psi = 1, psi^T L psi = cut(S) Vol / (Vol(S) Vol(S^c)).
std::vector<double> psi_vector(const Graph& g, const VertexSet& s);

}  // namespace mucond

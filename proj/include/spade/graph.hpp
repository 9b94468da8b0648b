#pragma once

// Undirected unit-weight graphs in compressed adjacency form, plus the
// matrix-free Laplacian and the combinatorial queries built on it.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <queue>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "spade/error.hpp"
#include "spade/matrix_io.hpp"

namespace spade {

using NodeId = std::uint32_t;

enum class DistanceMetric { resistance, geodesic };

struct Edge {
  NodeId u;
  NodeId v;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Immutable simple graph. Edges are stored with u < v in ascending
/// lexicographic order; neighbor lists are sorted ascending.
class Graph {
 public:
  Graph() = default;

  /// Builds a graph from an arbitrary edge list. Orientation and duplicates are
  /// normalized away; self-loops and out-of-range endpoints are rejected.
  static Graph from_edges(std::size_t n, std::vector<Edge> edges) {
    for (auto& e : edges) {
      if (e.u >= n || e.v >= n) {
        throw Error(ErrorKind::InvalidArgument,
                    "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                        ") out of range for n=" + std::to_string(n));
      }
      if (e.u == e.v) {
        throw Error(ErrorKind::InvalidArgument, "self-loop on node " + std::to_string(e.u));
      }
      if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    Graph g;
    g.n_ = n;
    g.edges_ = std::move(edges);
    g.offsets_.assign(n + 1, 0);
    for (const auto& e : g.edges_) {
      ++g.offsets_[e.u + 1];
      ++g.offsets_[e.v + 1];
    }
    std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
    g.neighbors_.resize(2 * g.edges_.size());
    std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    // Sorted (u, v) order fills every list ascending: entries below i arrive
    // from edges (u, i) before any edge (i, w).
    for (const auto& e : g.edges_) {
      g.neighbors_[cursor[e.u]++] = e.v;
      g.neighbors_[cursor[e.v]++] = e.u;
    }
    return g;
  }

  std::size_t num_nodes() const noexcept { return n_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const NodeId> neighbors(std::size_t i) const noexcept {
    return std::span<const NodeId>(neighbors_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
  }
  std::size_t degree(std::size_t i) const noexcept { return offsets_[i + 1] - offsets_[i]; }
  bool has_edge(NodeId u, NodeId v) const {
    const auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  friend bool operator==(const Graph& a, const Graph& b) { return a.n_ == b.n_ && a.edges_ == b.edges_; }

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> neighbors_;
};

/// Indicator vector of a node subset S (1 = in S). Must be a proper cut.
class CutSpec {
 public:
  explicit CutSpec(std::vector<std::uint8_t> z) : z_(std::move(z)) {
    bool has_zero = false;
    bool has_one = false;
    for (auto& b : z_) {
      if (b > 1) throw Error(ErrorKind::ImproperCut, "cut indicator entries must be 0 or 1");
      (b ? has_one : has_zero) = true;
    }
    if (!has_zero || !has_one) {
      throw Error(ErrorKind::ImproperCut, "cut must contain at least one 0 and one 1");
    }
  }

  std::size_t size() const noexcept { return z_.size(); }
  bool in_set(std::size_t i) const noexcept { return z_[i] != 0; }
  std::span<const std::uint8_t> indicator() const noexcept { return z_; }

  CutSpec complement() const {
    std::vector<std::uint8_t> c(z_.size());
    std::transform(z_.begin(), z_.end(), c.begin(), [](std::uint8_t b) { return std::uint8_t(1 - b); });
    return CutSpec(std::move(c));
  }

 private:
  std::vector<std::uint8_t> z_;
};

inline void check_length(const Graph& g, std::size_t len, const char* what) {
  if (len != g.num_nodes()) {
    throw Error(ErrorKind::InvalidArgument, std::string(what) + " has length " + std::to_string(len) +
                                                ", graph has " + std::to_string(g.num_nodes()) + " nodes");
  }
}

/// out = (D - A) v, never forming L.
inline void laplacian_apply(const Graph& g, std::span<const double> v, std::span<double> out) {
  check_length(g, v.size(), "vector");
  check_length(g, out.size(), "output vector");
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    double acc = static_cast<double>(g.degree(i)) * v[i];
    for (const NodeId j : g.neighbors(i)) acc -= v[j];
    out[i] = acc;
  }
}

inline std::vector<double> laplacian_apply(const Graph& g, std::span<const double> v) {
  std::vector<double> out(g.num_nodes());
  laplacian_apply(g, v, out);
  return out;
}

/// xᵀ L x = Σ_(u,v)∈E (x_u − x_v)².
inline double laplacian_quadratic_form(const Graph& g, std::span<const double> x) {
  check_length(g, x.size(), "vector");
  double acc = 0.0;
  for (const auto& e : g.edges()) {
    const double d = x[e.u] - x[e.v];
    acc += d * d;
  }
  return acc;
}

/// Component labels 0..c-1 assigned in BFS discovery order from ascending ids.
inline std::vector<int> connected_components(const Graph& g) {
  std::vector<int> label(g.num_nodes(), -1);
  int next = 0;
  std::queue<NodeId> frontier;
  for (std::size_t s = 0; s < g.num_nodes(); ++s) {
    if (label[s] != -1) continue;
    label[s] = next;
    frontier.push(static_cast<NodeId>(s));
    while (!frontier.empty()) {
      const NodeId u = frontier.front();
      frontier.pop();
      for (const NodeId w : g.neighbors(u)) {
        if (label[w] == -1) {
          label[w] = next;
          frontier.push(w);
        }
      }
    }
    ++next;
  }
  return label;
}

inline std::size_t component_count(const Graph& g) {
  const auto labels = connected_components(g);
  return labels.empty() ? 0 : static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end()) + 1);
}

inline bool is_connected(const Graph& g) { return component_count(g) <= 1; }

inline void require_connected(const Graph& g, const char* which = "graph") {
  const auto c = component_count(g);
  if (c > 1) {
    throw Error(ErrorKind::Disconnected,
                std::string(which) + " is not connected (components=" + std::to_string(c) + ")");
  }
}

/// Hop distances from `source`; -1 marks unreachable nodes.
inline std::vector<int> bfs_distances(const Graph& g, NodeId source) {
  if (source >= g.num_nodes()) throw Error(ErrorKind::InvalidArgument, "source node out of range");
  std::vector<int> dist(g.num_nodes(), -1);
  std::queue<NodeId> frontier;
  dist[source] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop();
    for (const NodeId w : g.neighbors(u)) {
      if (dist[w] == -1) {
        dist[w] = dist[u] + 1;
        frontier.push(w);
      }
    }
  }
  return dist;
}

inline std::size_t geodesic_distance(const Graph& g, NodeId p, NodeId q) {
  if (p >= g.num_nodes() || q >= g.num_nodes()) throw Error(ErrorKind::InvalidArgument, "node out of range");
  if (p == q) return 0;
  const int d = bfs_distances(g, p)[q];
  if (d < 0) {
    throw Error(ErrorKind::Unreachable,
                "no path between " + std::to_string(p) + " and " + std::to_string(q));
  }
  return static_cast<std::size_t>(d);
}

/// Number of edges with exactly one endpoint in S.
inline std::size_t cut_size(const Graph& g, const CutSpec& s) {
  check_length(g, s.size(), "cut indicator");
  std::size_t crossing = 0;
  for (const auto& e : g.edges()) crossing += s.in_set(e.u) != s.in_set(e.v);
  return crossing;
}

/// Subgraph induced by `nodes` (renumbered in the given order).
inline Graph induced_subgraph(const Graph& g, std::span<const NodeId> nodes) {
  std::vector<std::int64_t> remap(g.num_nodes(), -1);
  for (std::size_t i = 0; i < nodes.size(); ++i) remap[nodes[i]] = static_cast<std::int64_t>(i);
  std::vector<Edge> kept;
  for (const auto& e : g.edges()) {
    if (remap[e.u] >= 0 && remap[e.v] >= 0) {
      kept.push_back({static_cast<NodeId>(remap[e.u]), static_cast<NodeId>(remap[e.v])});
    }
  }
  return Graph::from_edges(nodes.size(), std::move(kept));
}

// ---------------------------------------------------------------------------
// SPGR text format: "SPGR <N> <M>" followed by M lines "<u> <v>", u < v,
// ascending lexicographic order.

inline std::string to_spgr(const Graph& g) {
  std::string out = "SPGR " + std::to_string(g.num_nodes()) + " " + std::to_string(g.num_edges()) + "\n";
  for (const auto& e : g.edges()) {
    out += std::to_string(e.u);
    out += ' ';
    out += std::to_string(e.v);
    out += '\n';
  }
  return out;
}

inline Graph parse_spgr(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;

  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!detail::trim(line).empty()) return true;
    }
    return false;
  };

  if (!next_line()) throw Error(ErrorKind::EmptyInput, "empty SPGR input");
  std::istringstream header(line);
  std::string magic;
  long long n = -1;
  long long m = -1;
  if (!(header >> magic >> n >> m) || magic != "SPGR" || n < 0 || m < 0) {
    throw Error(ErrorKind::BadFormat, "expected 'SPGR <N> <M>' header", SourcePos{line_no, 0});
  }

  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long i = 0; i < m; ++i) {
    if (!next_line()) throw Error(ErrorKind::BadFormat, "expected " + std::to_string(m) + " edge lines");
    std::istringstream row(line);
    long long u = -1;
    long long v = -1;
    std::string rest;
    if (!(row >> u >> v) || (row >> rest) || u < 0 || v < 0) {
      throw Error(ErrorKind::BadFormat, "malformed edge line", SourcePos{line_no, 0});
    }
    if (u >= v || v >= n) {
      throw Error(ErrorKind::BadFormat, "edge must satisfy u < v < N", SourcePos{line_no, 0});
    }
    const Edge e{static_cast<NodeId>(u), static_cast<NodeId>(v)};
    if (!edges.empty() && !(edges.back() < e)) {
      throw Error(ErrorKind::BadFormat, "edges must be strictly ascending", SourcePos{line_no, 0});
    }
    edges.push_back(e);
  }
  if (next_line()) throw Error(ErrorKind::BadFormat, "trailing content after edge list", SourcePos{line_no, 0});
  return Graph::from_edges(static_cast<std::size_t>(n), std::move(edges));
}

inline Graph load_graph(const std::filesystem::path& path) { return parse_spgr(detail::read_file(path)); }

inline void save_graph(const Graph& g, const std::filesystem::path& path) {
  detail::write_file(path, to_spgr(g));
}

}  // namespace spade

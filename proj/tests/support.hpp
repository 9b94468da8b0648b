#pragma once

// Random instance generators and hand-built fixtures shared by the unit and
// acceptance suites.

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "spade/graph.hpp"
#include "spade/knn.hpp"
#include "spade/matrix_io.hpp"

namespace spade::testing {

using Rng = std::mt19937_64;

inline DenseMatrix random_points(std::size_t n, std::size_t d, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> data(n * d);
  for (double& x : data) x = normal(rng);
  return DenseMatrix(n, d, std::move(data));
}

/// Two-layer tanh network with random Gaussian weights: a smooth, moderately
/// non-linear stand-in for a trained model.
inline DenseMatrix random_network(const DenseMatrix& x, std::size_t hidden, std::size_t out_dim, double gain,
                                  Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t d = x.cols();
  std::vector<double> w1(hidden * d), w2(out_dim * hidden);
  for (double& w : w1) w = normal(rng) * gain / std::sqrt(static_cast<double>(d));
  for (double& w : w2) w = normal(rng) / std::sqrt(static_cast<double>(hidden));
  std::vector<double> y(x.rows() * out_dim);
  std::vector<double> h(hidden);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t a = 0; a < hidden; ++a) {
      double acc = 0.0;
      for (std::size_t b = 0; b < d; ++b) acc += w1[a * d + b] * x(i, b);
      h[a] = std::tanh(acc);
    }
    for (std::size_t c = 0; c < out_dim; ++c) {
      double acc = 0.0;
      for (std::size_t a = 0; a < hidden; ++a) acc += w2[c * hidden + a] * h[a];
      y[i * out_dim + c] = acc;
    }
  }
  return DenseMatrix(x.rows(), out_dim, std::move(y));
}

struct GraphPair {
  Graph gx;
  Graph gy;
};

/// kNN pencil over random points and a random network's outputs. Resamples
/// until both graphs are connected.
inline GraphPair random_knn_pair(std::size_t n, std::size_t k, Rng& rng, std::size_t in_dim = 8,
                                 std::size_t out_dim = 4, double gain = 2.0) {
  KnnParams params;
  params.k = k;
  while (true) {
    const auto x = random_points(n, in_dim, rng);
    const auto y = random_network(x, 32, out_dim, gain, rng);
    auto gx = build_knn(x, params);
    auto gy = build_knn(y, params);
    if (is_connected(gx) && is_connected(gy)) return {std::move(gx), std::move(gy)};
  }
}

/// Erdős–Rényi G(n, p), resampled until connected.
inline Graph random_connected_graph(std::size_t n, double p, Rng& rng) {
  std::bernoulli_distribution coin(p);
  while (true) {
    std::vector<Edge> edges;
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId v = u + 1; v < n; ++v) {
        if (coin(rng)) edges.push_back({u, v});
      }
    }
    auto g = Graph::from_edges(n, std::move(edges));
    if (is_connected(g)) return g;
  }
}

/// Random recursive tree: node i attaches to a uniform earlier node.
inline Graph random_tree(std::size_t n, Rng& rng) {
  std::vector<Edge> edges;
  for (NodeId i = 1; i < n; ++i) {
    std::uniform_int_distribution<NodeId> parent(0, i - 1);
    edges.push_back({parent(rng), i});
  }
  return Graph::from_edges(n, std::move(edges));
}

/// Connected graph that is guaranteed to contain a cycle: a random tree plus
/// `extra` random non-tree edges.
inline Graph random_cyclic_graph(std::size_t n, std::size_t extra, Rng& rng) {
  const Graph tree = random_tree(n, rng);
  std::vector<Edge> edges(tree.edges().begin(), tree.edges().end());
  std::uniform_int_distribution<NodeId> node(0, static_cast<NodeId>(n - 1));
  std::size_t added = 0;
  while (added < extra) {
    const NodeId u = node(rng);
    const NodeId v = node(rng);
    if (u == v || tree.has_edge(u, v)) continue;
    edges.push_back({std::min(u, v), std::max(u, v)});
    ++added;
  }
  return Graph::from_edges(n, std::move(edges));
}

inline Graph path_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (NodeId i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  return Graph::from_edges(n, std::move(edges));
}

inline Graph complete_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) edges.push_back({u, v});
  }
  return Graph::from_edges(n, std::move(edges));
}

inline Graph star_graph(std::size_t leaves) {
  std::vector<Edge> edges;
  for (NodeId i = 1; i <= leaves; ++i) edges.push_back({0, i});
  return Graph::from_edges(leaves + 1, std::move(edges));
}

/// Twelve-node pair with S = {0..5}. Both sides of the cut are paths
/// (0–…–5 and 6–…–11). The input graph joins them with the six rungs (i, i+6);
/// the output graph keeps only rung (2, 8). Nodes 0 and 6 are adjacent in the
/// input graph but five hops apart in the output graph.
struct CutFixture {
  Graph gx;
  Graph gy;
  CutSpec s;
  NodeId p;
  NodeId q;
};

inline CutFixture cut_fixture() {
  std::vector<Edge> sides;
  for (NodeId i = 0; i < 5; ++i) {
    sides.push_back({i, i + 1});
    sides.push_back({i + 6, i + 7});
  }
  std::vector<Edge> ex = sides;
  for (NodeId i = 0; i < 6; ++i) ex.push_back({i, i + 6});
  std::vector<Edge> ey = sides;
  ey.push_back({2, 8});
  std::vector<std::uint8_t> z(12, 0);
  for (std::size_t i = 0; i < 6; ++i) z[i] = 1;
  return {Graph::from_edges(12, ex), Graph::from_edges(12, ey), CutSpec(z), 0, 6};
}

/// One building block of an eigen-aligned pencil. The input graph holds an
/// edge (p, q) that the output graph drops; what remains between p and q in
/// the output graph is either a single path of `length` hops or `length`
/// parallel two-hop paths.
struct AlignedGadget {
  enum class Shape { path, parallel } shape;
  std::size_t length;
};

struct AlignedPencil {
  Graph gx;
  Graph gy;
  std::vector<Edge> aligned;  // the dropped (p, q) edge of each gadget
};

/// Gadgets hang off a spine of bridges joining their p nodes, so a current
/// injected across one gadget's (p, q) never enters another gadget. Each
/// e_pq is then an exact eigenvector of L_X L_Y⁺ with eigenvalue 1 + d_Y(p,q);
/// every other pencil eigenvalue equals 1.
inline AlignedPencil aligned_pencil(const std::vector<AlignedGadget>& gadgets) {
  std::vector<Edge> shared;
  AlignedPencil out;
  NodeId next = 0;
  NodeId previous_p = 0;
  for (std::size_t gi = 0; gi < gadgets.size(); ++gi) {
    const NodeId p = next++;
    const NodeId q = next++;
    if (gi > 0) shared.push_back({previous_p, p});
    previous_p = p;
    const auto& gadget = gadgets[gi];
    if (gadget.shape == AlignedGadget::Shape::path) {
      NodeId prev = p;
      for (std::size_t s = 1; s < gadget.length; ++s) {
        const NodeId mid = next++;
        shared.push_back({prev, mid});
        prev = mid;
      }
      shared.push_back({prev, q});
    } else {
      for (std::size_t s = 0; s < gadget.length; ++s) {
        const NodeId mid = next++;
        shared.push_back({p, mid});
        shared.push_back({mid, q});
      }
    }
    out.aligned.push_back({p, q});
  }
  std::vector<Edge> ex = shared;
  ex.insert(ex.end(), out.aligned.begin(), out.aligned.end());
  out.gx = Graph::from_edges(next, ex);
  out.gy = Graph::from_edges(next, shared);
  return out;
}

/// Points uniform in the unit square, mapped by the identity except that the
/// first coordinate is stretched by `stretch` inside a slab of width `width`
/// around 0.5. Input neighbours straddling the slab end up far apart.
struct PlantedStretch {
  DenseMatrix x;
  DenseMatrix y;
};

inline PlantedStretch planted_stretch(std::size_t n, double stretch, double width, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> x(n * 2), y(n * 2);
  const double lo = 0.5 - width / 2.0;
  const double hi = 0.5 + width / 2.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = unit(rng);
    const double b = unit(rng);
    x[2 * i] = a;
    x[2 * i + 1] = b;
    y[2 * i] = a + (stretch - 1.0) * (std::clamp(a, lo, hi) - lo);
    y[2 * i + 1] = b;
  }
  return {DenseMatrix(n, 2, std::move(x)), DenseMatrix(n, 2, std::move(y))};
}

/// kNN graph pair for a planted stretch, each side grown until connected.
inline GraphPair planted_stretch_graphs(const PlantedStretch& data, std::size_t k) {
  KnnParams params;
  params.k = k;
  return {ensure_connected(build_knn(data.x, params), data.x, params, ConnectPolicy::grow_k).first,
          ensure_connected(build_knn(data.y, params), data.y, params, ConnectPolicy::grow_k).first};
}

/// Nested rewiring of a graph: a fixed random order of its edges and, for
/// each, a random replacement endpoint. Level f moves the first f·|E| edges
/// (u, v) to (u, w), so higher levels contain every lower level's moves.
class Rewiring {
 public:
  Rewiring(const Graph& g, Rng& rng) : n_(g.num_nodes()), order_(g.edges().begin(), g.edges().end()) {
    std::shuffle(order_.begin(), order_.end(), rng);
    std::uniform_int_distribution<NodeId> node(0, static_cast<NodeId>(n_ - 1));
    target_.resize(order_.size());
    for (auto& t : target_) t = node(rng);
  }

  Graph at(double fraction) const {
    const auto moved = static_cast<std::size_t>(fraction * static_cast<double>(order_.size()));
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < order_.size(); ++i) {
      if (i >= moved) {
        edges.push_back(order_[i]);
      } else if (target_[i] != order_[i].u) {
        edges.push_back({order_[i].u, target_[i]});
      }
    }
    return Graph::from_edges(n_, std::move(edges));
  }

 private:
  std::size_t n_;
  std::vector<Edge> order_;
  std::vector<NodeId> target_;
};

}  // namespace spade::testing

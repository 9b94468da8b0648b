#pragma once

// Pairwise distances on the graph manifolds and the robustness scores built
// from them: distance and cut mapping distortions, the weighted spectral
// embedding, and per-edge / per-node scores.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "spade/error.hpp"
#include "spade/graph.hpp"
#include "spade/lap_solve.hpp"
#include "spade/spectral.hpp"

namespace spade {

inline void check_node(const Graph& g, NodeId p) {
  if (p >= g.num_nodes()) {
    throw Error(ErrorKind::InvalidArgument,
                "node " + std::to_string(p) + " out of range (n=" + std::to_string(g.num_nodes()) + ")");
  }
}

/// e_pqᵀ L⁺ e_pq via a single Laplacian solve.
inline double effective_resistance(const LaplacianSolver& solver, NodeId p, NodeId q) {
  const Graph& g = solver.graph();
  check_node(g, p);
  check_node(g, q);
  if (p == q) return 0.0;
  std::vector<double> b(g.num_nodes(), 0.0);
  b[p] = 1.0;
  b[q] = -1.0;
  const auto x = solver.solve(b).x;
  return std::max(0.0, x[p] - x[q]);
}

inline double effective_resistance(const Graph& g, NodeId p, NodeId q, const SolveParams& params = {}) {
  return effective_resistance(LaplacianSolver(g, params), p, q);
}

/// Johnson–Lindenstrauss sketch of all-pairs effective resistance. Holds
/// Z = Q B L⁺ (Q: t × m Rademacher scaled by 1/√t, B: edge incidence) so
/// that ‖Z (e_p − e_q)‖² ≈ e_pqᵀ L⁺ e_pq.
class ResistanceSketch {
 public:
  static std::size_t projection_count(std::size_t n, double epsilon) {
    return static_cast<std::size_t>(std::ceil(24.0 * std::log(static_cast<double>(n)) / (epsilon * epsilon)));
  }

  ResistanceSketch(const Graph& g, double epsilon, std::uint64_t seed, const SolveParams& params = {})
      : n_(g.num_nodes()), epsilon_(epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorKind::InvalidArgument, "epsilon must lie in (0, 1)");
    if (n_ < 2) throw Error(ErrorKind::InvalidArgument, "sketch needs at least two nodes");
    t_ = projection_count(n_, epsilon);
    const LaplacianSolver solver(g, params);
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    const double scale = 1.0 / std::sqrt(static_cast<double>(t_));

    coords_.assign(n_ * t_, 0.0);
    std::vector<double> rhs(n_);
    for (std::size_t j = 0; j < t_; ++j) {
      std::fill(rhs.begin(), rhs.end(), 0.0);
      for (const auto& e : g.edges()) {
        const double s = coin(rng) ? scale : -scale;
        rhs[e.u] += s;
        rhs[e.v] -= s;
      }
      const auto z = solver.solve(rhs).x;
      for (std::size_t i = 0; i < n_; ++i) coords_[i * t_ + j] = z[i];
    }
  }

  std::size_t projections() const noexcept { return t_; }
  double epsilon() const noexcept { return epsilon_; }

  double query(NodeId p, NodeId q) const {
    if (p >= n_ || q >= n_) throw Error(ErrorKind::InvalidArgument, "node out of range");
    if (p == q) return 0.0;
    const double* a = coords_.data() + static_cast<std::size_t>(p) * t_;
    const double* b = coords_.data() + static_cast<std::size_t>(q) * t_;
    double acc = 0.0;
    for (std::size_t j = 0; j < t_; ++j) {
      const double d = a[j] - b[j];
      acc += d * d;
    }
    return acc;
  }

 private:
  std::size_t n_;
  double epsilon_;
  std::size_t t_ = 0;
  std::vector<double> coords_;  // n × t, node-major
};

inline double graph_distance(const Graph& g, NodeId p, NodeId q, DistanceMetric metric,
                             const SolveParams& params = {}) {
  return metric == DistanceMetric::resistance ? effective_resistance(g, p, q, params)
                                              : static_cast<double>(geodesic_distance(g, p, q));
}

/// Distance mapping distortion d_Y(p,q) / d_X(p,q).
inline double dmd_pair(const Graph& gx, const Graph& gy, NodeId p, NodeId q,
                       DistanceMetric metric = DistanceMetric::resistance, const SolveParams& params = {}) {
  if (gx.num_nodes() != gy.num_nodes()) throw Error(ErrorKind::InvalidArgument, "graph node counts differ");
  if (p == q) throw Error(ErrorKind::InvalidArgument, "DMD is undefined for p == q");
  const double dx = graph_distance(gx, p, q, metric, params);
  if (!(dx > 0.0)) throw Error(ErrorKind::InvalidArgument, "zero input distance");
  return graph_distance(gy, p, q, metric, params) / dx;
}

/// Node coordinates V_r = [v_1√λ_1, …, v_r√λ_r], stored row-major (n × r).
struct Embedding {
  std::size_t n = 0;
  std::size_t r = 0;
  std::vector<double> coords;
  std::vector<double> lambdas;

  std::span<const double> row(std::size_t i) const { return std::span<const double>(coords).subspan(i * r, r); }
  double operator()(std::size_t i, std::size_t j) const { return coords[i * r + j]; }
};

inline Embedding embed(const EigenPairs& pairs) {
  if (pairs.size() == 0) throw Error(ErrorKind::InvalidArgument, "no eigenpairs to embed");
  Embedding e;
  e.n = pairs.dimension();
  e.r = pairs.size();
  e.lambdas = pairs.lambdas;
  e.coords.resize(e.n * e.r);
  for (std::size_t j = 0; j < e.r; ++j) {
    const double lambda = pairs.lambdas[j];
    if (!(lambda > 0.0)) {
      throw Error(ErrorKind::NonPositiveEigenvalue, "eigenvalue " + std::to_string(j + 1) + " is not positive");
    }
    const double w = std::sqrt(lambda);
    for (std::size_t i = 0; i < e.n; ++i) e.coords[i * e.r + j] = pairs.vectors[j][i] * w;
  }
  return e;
}

/// ‖V_rᵀ e_pq‖² = Σ λᵢ (vᵢ(p) − vᵢ(q))².
inline double edge_spade(const Embedding& emb, NodeId p, NodeId q) {
  if (p >= emb.n || q >= emb.n) throw Error(ErrorKind::InvalidArgument, "node out of range for embedding");
  double acc = 0.0;
  for (std::size_t j = 0; j < emb.r; ++j) {
    const double d = emb(p, j) - emb(q, j);
    acc += d * d;
  }
  return acc;
}

/// Scores for every input-graph edge, aligned with gx.edges().
inline std::vector<double> edge_spade_all(const Embedding& emb, const Graph& gx) {
  if (emb.n != gx.num_nodes()) throw Error(ErrorKind::InvalidArgument, "embedding size does not match graph");
  std::vector<double> out;
  out.reserve(gx.num_edges());
  for (const auto& e : gx.edges()) out.push_back(edge_spade(emb, e.u, e.v));
  return out;
}

/// Mean edge score over each node's input-graph neighbours.
inline std::vector<double> node_spade(const Embedding& emb, const Graph& gx) {
  if (emb.n != gx.num_nodes()) throw Error(ErrorKind::InvalidArgument, "embedding size does not match graph");
  std::vector<double> out(gx.num_nodes(), 0.0);
  for (std::size_t p = 0; p < gx.num_nodes(); ++p) {
    const auto nb = gx.neighbors(p);
    if (nb.empty()) continue;
    double acc = 0.0;
    for (const NodeId q : nb) acc += edge_spade(emb, static_cast<NodeId>(p), q);
    out[p] = acc / static_cast<double>(nb.size());
  }
  return out;
}

/// Cut mapping distortion cut_Y(S) / cut_X(S).
inline double cmd(const Graph& gx, const Graph& gy, const CutSpec& s) {
  if (gx.num_nodes() != gy.num_nodes()) throw Error(ErrorKind::InvalidArgument, "graph node counts differ");
  const auto cx = cut_size(gx, s);
  if (cx == 0) throw Error(ErrorKind::ImproperCut, "no input-graph edge crosses the cut");
  return static_cast<double>(cut_size(gy, s)) / static_cast<double>(cx);
}

/// Indices of the top_k largest scores, descending; ties go to the lower index.
inline std::vector<NodeId> rank_nodes(std::span<const double> scores, std::size_t top_k) {
  if (top_k > scores.size()) {
    throw Error(ErrorKind::InvalidArgument,
                "top_k=" + std::to_string(top_k) + " exceeds " + std::to_string(scores.size()) + " scores");
  }
  std::vector<NodeId> idx(scores.size());
  std::iota(idx.begin(), idx.end(), NodeId{0});
  const auto by_score = [&](NodeId a, NodeId b) { return scores[a] > scores[b] || (scores[a] == scores[b] && a < b); };
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(top_k), idx.end(), by_score);
  idx.resize(top_k);
  return idx;
}

struct ScoreReport {
  double model_score = 0.0;
  std::vector<double> node_scores;
  std::map<Edge, double> edge_scores;
  /// All nodes, by descending node score.
  std::vector<NodeId> ranking;
};

inline ScoreReport make_score_report(const Graph& gx, const EigenPairs& pairs) {
  const auto emb = embed(pairs);
  ScoreReport report;
  report.model_score = pairs.lambdas.front();
  report.node_scores = node_spade(emb, gx);
  const auto per_edge = edge_spade_all(emb, gx);
  for (std::size_t i = 0; i < per_edge.size(); ++i) report.edge_scores.emplace(gx.edges()[i], per_edge[i]);
  report.ranking = rank_nodes(report.node_scores, report.node_scores.size());
  return report;
}

inline ScoreReport score_report(const Graph& gx, const Graph& gy, const EigenSolverParams& params) {
  const auto pairs = top_generalized_eigenpairs(gx, gy, params);
  detail::require_converged(pairs);
  return make_score_report(gx, pairs);
}

}  // namespace spade

#pragma once

// kNN graph construction over the rows of a DenseMatrix. Exact mode is a
// brute-force scan; approximate mode queries a layered proximity graph
// (greedy descent through geometrically sized layers, in the HNSW family).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <span>
#include <unordered_set>
#include <utility>
#include <vector>

#include "spade/error.hpp"
#include "spade/graph.hpp"
#include "spade/matrix_io.hpp"

namespace spade {

enum class KnnMode { exact, approximate };
enum class Metric { euclidean };

struct KnnParams {
  std::size_t k = 10;
  Metric metric = Metric::euclidean;
  KnnMode mode = KnnMode::exact;
  std::size_t approx_ef = 64;
  std::uint64_t seed = 0;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

inline void validate(const KnnParams& params, std::size_t n) {
  if (params.k < 1) throw Error(ErrorKind::InvalidArgument, "k must be at least 1");
  if (params.k >= n) {
    throw Error(ErrorKind::InvalidArgument,
                "k=" + std::to_string(params.k) + " must be smaller than N=" + std::to_string(n));
  }
  if (params.mode == KnnMode::approximate && params.approx_ef < params.k) {
    throw Error(ErrorKind::InvalidArgument, "approx_ef must be >= k");
  }
}

namespace detail {

// (squared distance, node) ordered so ties go to the lower node index.
using Candidate = std::pair<double, NodeId>;

inline std::vector<std::vector<NodeId>> exact_neighbor_lists(const DenseMatrix& x, std::size_t k) {
  const std::size_t n = x.rows();
  std::vector<std::vector<NodeId>> lists(n);
  std::vector<Candidate> cand;
  cand.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    cand.clear();
    const auto xi = x.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) cand.emplace_back(squared_distance(xi, x.row(j)), static_cast<NodeId>(j));
    }
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end());
    lists[i].reserve(k);
    for (std::size_t t = 0; t < k; ++t) lists[i].push_back(cand[t].second);
  }
  return lists;
}

/// Layered proximity graph. Built single-threaded in row order; `search` is
/// const and may be called concurrently once construction is done.
class LayeredIndex {
 public:
  LayeredIndex(const DenseMatrix& x, std::size_t max_degree, std::size_t ef_construction, std::uint64_t seed)
      : x_(x), max_degree_(std::max<std::size_t>(max_degree, 2)), ef_construction_(ef_construction) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t n = x.rows();
    levels_.resize(n);
    links_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      // P(level >= l) = e^{-l}
      const double u = 1.0 - unit(rng);
      levels_[i] = static_cast<int>(std::floor(-std::log(u)));
      links_[i].resize(static_cast<std::size_t>(levels_[i]) + 1);
      insert(static_cast<NodeId>(i));
    }
  }

  /// Up to `count` nearest indexed rows to `query`, nearest first.
  std::vector<Candidate> search(std::span<const double> query, std::size_t count, std::size_t ef) const {
    NodeId cur = entry_;
    double cur_d = squared_distance(query, x_.row(cur));
    for (int level = top_level_; level > 0; --level) greedy_step(query, level, cur, cur_d);
    auto found = search_layer(query, {{cur_d, cur}}, std::max(ef, count), 0);
    if (found.size() > count) found.resize(count);
    return found;
  }

 private:
  void greedy_step(std::span<const double> query, int level, NodeId& cur, double& cur_d) const {
    bool moved = true;
    while (moved) {
      moved = false;
      for (const NodeId w : links_[cur][static_cast<std::size_t>(level)]) {
        const double d = squared_distance(query, x_.row(w));
        if (Candidate{d, w} < Candidate{cur_d, cur}) {
          cur = w;
          cur_d = d;
          moved = true;
        }
      }
    }
  }

  std::vector<Candidate> search_layer(std::span<const double> query, std::vector<Candidate> entries,
                                      std::size_t ef, int level) const {
    std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> frontier;
    std::priority_queue<Candidate> best;
    std::unordered_set<NodeId> visited;
    for (const auto& e : entries) {
      visited.insert(e.second);
      frontier.push(e);
      best.push(e);
    }
    while (!frontier.empty()) {
      const auto c = frontier.top();
      if (best.size() >= ef && c > best.top()) break;
      frontier.pop();
      for (const NodeId w : links_[c.second][static_cast<std::size_t>(level)]) {
        if (!visited.insert(w).second) continue;
        const Candidate cw{squared_distance(query, x_.row(w)), w};
        if (best.size() < ef || cw < best.top()) {
          frontier.push(cw);
          best.push(cw);
          if (best.size() > ef) best.pop();
        }
      }
    }
    std::vector<Candidate> out(best.size());
    for (auto it = out.rbegin(); it != out.rend(); ++it) {
      *it = best.top();
      best.pop();
    }
    return out;
  }

  std::size_t capacity(int level) const { return level == 0 ? 2 * max_degree_ : max_degree_; }

  void shrink(NodeId node, int level) {
    auto& adj = links_[node][static_cast<std::size_t>(level)];
    if (adj.size() <= capacity(level)) return;
    std::vector<Candidate> scored;
    scored.reserve(adj.size());
    for (const NodeId w : adj) scored.emplace_back(squared_distance(x_.row(node), x_.row(w)), w);
    std::sort(scored.begin(), scored.end());
    adj.clear();
    for (std::size_t t = 0; t < capacity(level); ++t) adj.push_back(scored[t].second);
  }

  void insert(NodeId node) {
    const int level = levels_[node];
    if (node == 0) {
      entry_ = 0;
      top_level_ = level;
      return;
    }
    const auto query = x_.row(node);
    NodeId cur = entry_;
    double cur_d = squared_distance(query, x_.row(cur));
    for (int l = top_level_; l > level; --l) greedy_step(query, l, cur, cur_d);

    std::vector<Candidate> entries{{cur_d, cur}};
    for (int l = std::min(level, top_level_); l >= 0; --l) {
      auto found = search_layer(query, entries, ef_construction_, l);
      const std::size_t keep = std::min(max_degree_, found.size());
      auto& adj = links_[node][static_cast<std::size_t>(l)];
      for (std::size_t t = 0; t < keep; ++t) {
        adj.push_back(found[t].second);
        links_[found[t].second][static_cast<std::size_t>(l)].push_back(node);
        shrink(found[t].second, l);
      }
      entries = std::move(found);
    }
    if (level > top_level_) {
      top_level_ = level;
      entry_ = node;
    }
  }

  const DenseMatrix& x_;
  std::size_t max_degree_;
  std::size_t ef_construction_;
  std::vector<int> levels_;
  std::vector<std::vector<std::vector<NodeId>>> links_;
  NodeId entry_ = 0;
  int top_level_ = 0;
};

inline std::vector<std::vector<NodeId>> approximate_neighbor_lists(const DenseMatrix& x, const KnnParams& params) {
  const LayeredIndex index(x, std::max<std::size_t>(params.k, 16), params.approx_ef, params.seed);
  std::vector<std::vector<NodeId>> lists(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto found = index.search(x.row(i), params.k + 1, params.approx_ef);
    for (const auto& [d, j] : found) {
      if (j != i && lists[i].size() < params.k) lists[i].push_back(j);
    }
  }
  return lists;
}

}  // namespace detail

/// Union-symmetrized kNN graph: (i, j) is an edge iff j is among i's k nearest
/// rows or i among j's. Distance ties go to the lower row index.
inline Graph build_knn(const DenseMatrix& x, const KnnParams& params) {
  validate(params, x.rows());
  const auto lists = params.mode == KnnMode::exact ? detail::exact_neighbor_lists(x, params.k)
                                                   : detail::approximate_neighbor_lists(x, params);
  std::vector<Edge> edges;
  edges.reserve(x.rows() * params.k);
  for (std::size_t i = 0; i < lists.size(); ++i) {
    for (const NodeId j : lists[i]) edges.push_back({static_cast<NodeId>(i), j});
  }
  return Graph::from_edges(x.rows(), std::move(edges));
}

enum class ConnectPolicy { error, grow_k, giant_component };

struct ComponentReport {
  std::size_t initial_components = 1;
  std::size_t final_k = 0;
  /// Original ids of the nodes kept, in new-id order (identity unless the
  /// giant_component policy dropped nodes).
  std::vector<NodeId> retained;
};

/// Applies a connectivity policy to a kNN graph built from `x` with `params`.
/// With giant_component the caller must restrict the paired graph to
/// `report.retained` as well.
inline std::pair<Graph, ComponentReport> ensure_connected(Graph g, const DenseMatrix& x, const KnnParams& params,
                                                          ConnectPolicy policy) {
  const auto labels = connected_components(g);
  const std::size_t components =
      labels.empty() ? 0 : static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end()) + 1);

  ComponentReport report;
  report.initial_components = components;
  report.final_k = params.k;
  if (components <= 1) {
    report.retained.resize(g.num_nodes());
    std::iota(report.retained.begin(), report.retained.end(), NodeId{0});
    return {std::move(g), std::move(report)};
  }

  switch (policy) {
    case ConnectPolicy::error:
      throw Error(ErrorKind::Disconnected,
                  "kNN graph is not connected (components=" + std::to_string(components) + ")");

    case ConnectPolicy::grow_k: {
      const std::size_t cap = x.rows() - 1;
      KnnParams grown = params;
      while (grown.k < cap) {
        grown.k = std::min(grown.k * 2, cap);
        grown.approx_ef = std::max(grown.approx_ef, grown.k);
        Graph rebuilt = build_knn(x, grown);
        if (is_connected(rebuilt)) {
          report.final_k = grown.k;
          report.retained.resize(rebuilt.num_nodes());
          std::iota(report.retained.begin(), report.retained.end(), NodeId{0});
          return {std::move(rebuilt), std::move(report)};
        }
      }
      throw Error(ErrorKind::Disconnected, "graph still disconnected at k cap " + std::to_string(cap));
    }

    case ConnectPolicy::giant_component: {
      std::vector<std::size_t> sizes(components, 0);
      for (const int l : labels) ++sizes[static_cast<std::size_t>(l)];
      // max_element returns the first maximum, i.e. the lowest label on ties.
      const auto giant = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == giant) report.retained.push_back(static_cast<NodeId>(i));
      }
      Graph sub = induced_subgraph(g, report.retained);
      return {std::move(sub), std::move(report)};
    }
  }
  throw Error(ErrorKind::InvalidArgument, "unknown connect policy");
}

}  // namespace spade

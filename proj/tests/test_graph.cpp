#include <gtest/gtest.h>

#include <numeric>

#include "spade/graph.hpp"
#include "spade/oracle.hpp"
#include "support.hpp"

using namespace spade;
using namespace spade::testing;

namespace {

// Union-find component count, independent of the BFS labelling.
std::size_t union_find_components(const Graph& g) {
  std::vector<std::size_t> parent(g.num_nodes());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t count = g.num_nodes();
  for (const auto& e : g.edges()) {
    const auto a = find(e.u);
    const auto b = find(e.v);
    if (a != b) {
      parent[a] = b;
      --count;
    }
  }
  return count;
}

}  // namespace

TEST(Graph, NormalizesEdges) {
  const auto g = Graph::from_edges(4, {{2, 1}, {0, 3}, {1, 2}, {3, 0}, {0, 1}});
  ASSERT_EQ(g.num_edges(), 3u);
  EXPECT_EQ(g.edges()[0], (Edge{0, 1}));
  EXPECT_EQ(g.edges()[1], (Edge{0, 3}));
  EXPECT_EQ(g.edges()[2], (Edge{1, 2}));
  std::size_t degree_sum = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    degree_sum += g.degree(i);
    EXPECT_TRUE(std::is_sorted(g.neighbors(i).begin(), g.neighbors(i).end()));
  }
  EXPECT_EQ(degree_sum, 2 * g.num_edges());
}

TEST(Graph, RejectsSelfLoopsAndOutOfRange) {
  EXPECT_THROW(Graph::from_edges(3, {{1, 1}}), Error);
  EXPECT_THROW(Graph::from_edges(3, {{0, 3}}), Error);
}

TEST(LaplacianApply, OnesAreInNullspace) {
  Rng rng(1);
  const auto g = random_connected_graph(20, 0.3, rng);
  const std::vector<double> ones(20, 1.0);
  for (double x : laplacian_apply(g, ones)) EXPECT_EQ(x, 0.0);
}

TEST(LaplacianApply, PathByHand) {
  const auto out = laplacian_apply(path_graph(3), std::vector<double>{1, 0, 0});
  EXPECT_EQ(out, (std::vector<double>{1, -1, 0}));
}

TEST(LaplacianApply, MatchesDenseLaplacian) {
  Rng rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 10; ++t) {
    const auto g = random_connected_graph(10, 0.4, rng);
    Eigen::VectorXd v(10);
    for (auto& x : v) x = u(rng);
    const Eigen::VectorXd dense = oracle::dense_laplacian(g) * v;
    const auto mf = laplacian_apply(g, std::span<const double>(v.data(), 10));
    for (int i = 0; i < 10; ++i) EXPECT_NEAR(mf[i], dense(i), 1e-12);
  }
}

TEST(LaplacianApply, LengthMismatch) {
  EXPECT_THROW(laplacian_apply(path_graph(3), std::vector<double>{1, 2}), Error);
}

TEST(LaplacianApply, PositiveSemidefinite) {
  Rng rng(3);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 50; ++t) {
    const auto g = random_connected_graph(15, 0.25, rng);
    std::vector<double> v(15);
    for (double& x : v) x = normal(rng);
    const auto lv = laplacian_apply(g, v);
    EXPECT_GE(std::inner_product(v.begin(), v.end(), lv.begin(), 0.0), -1e-12);
  }
}

TEST(Components, Examples) {
  EXPECT_EQ(connected_components(path_graph(3)), (std::vector<int>{0, 0, 0}));
  const auto two = Graph::from_edges(4, {{0, 1}, {2, 3}});
  EXPECT_EQ(connected_components(two), (std::vector<int>{0, 0, 1, 1}));
  EXPECT_EQ(connected_components(Graph::from_edges(3, {{1, 2}})), (std::vector<int>{0, 1, 1}));
}

TEST(Components, AgreeWithUnionFind) {
  Rng rng(4);
  for (int t = 0; t < 40; ++t) {
    std::bernoulli_distribution coin(0.08);
    std::vector<Edge> edges;
    for (NodeId u = 0; u < 30; ++u) {
      for (NodeId v = u + 1; v < 30; ++v) {
        if (coin(rng)) edges.push_back({u, v});
      }
    }
    const auto g = Graph::from_edges(30, edges);
    EXPECT_EQ(component_count(g), union_find_components(g));
  }
}

TEST(Geodesic, Examples) {
  const auto p3 = path_graph(3);
  EXPECT_EQ(geodesic_distance(p3, 0, 2), 2u);
  EXPECT_EQ(geodesic_distance(p3, 1, 1), 0u);
  const auto fx = cut_fixture();
  EXPECT_EQ(geodesic_distance(fx.gx, fx.p, fx.q), 1u);
  EXPECT_EQ(geodesic_distance(fx.gy, fx.p, fx.q), 5u);
}

TEST(Geodesic, UnreachablePair) {
  try {
    geodesic_distance(Graph::from_edges(4, {{0, 1}, {2, 3}}), 0, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Unreachable);
  }
}

TEST(CutSize, Examples) {
  const CutSpec z({1, 0, 0});
  EXPECT_EQ(cut_size(complete_graph(3), z), 2u);
  EXPECT_EQ(cut_size(complete_graph(3), z.complement()), 2u);
  const auto fx = cut_fixture();
  EXPECT_EQ(cut_size(fx.gx, fx.s), 6u);
  EXPECT_EQ(cut_size(fx.gy, fx.s), 1u);
}

TEST(CutSize, ImproperCutRejected) {
  EXPECT_THROW(CutSpec({1, 1, 1}), Error);
  EXPECT_THROW(CutSpec({0, 0}), Error);
  EXPECT_THROW(CutSpec({0, 2}), Error);
}

// Property: edge-crossing count equals zᵀ L z computed through laplacian_apply.
TEST(CutSize, EqualsQuadraticForm) {
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    const auto g = random_connected_graph(14, 0.3, rng);
    std::vector<std::uint8_t> bits(14);
    do {
      for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1U);
    } while (std::all_of(bits.begin(), bits.end(), [&](auto b) { return b == bits[0]; }));
    const CutSpec s(bits);
    const std::vector<double> z(bits.begin(), bits.end());
    const auto lz = laplacian_apply(g, z);
    EXPECT_DOUBLE_EQ(std::inner_product(z.begin(), z.end(), lz.begin(), 0.0), static_cast<double>(cut_size(g, s)));
  }
}

TEST(Spgr, TextLayout) {
  const auto g = Graph::from_edges(3, {{2, 1}, {1, 0}});
  EXPECT_EQ(to_spgr(g), "SPGR 3 2\n0 1\n1 2\n");
  EXPECT_EQ(parse_spgr(to_spgr(g)), g);
}

TEST(Spgr, RejectsMalformedInput) {
  EXPECT_THROW(parse_spgr("SPGX 3 1\n0 1\n"), Error);
  EXPECT_THROW(parse_spgr("SPGR 3 2\n0 1\n"), Error);
  EXPECT_THROW(parse_spgr("SPGR 3 1\n1 0\n"), Error);
  EXPECT_THROW(parse_spgr("SPGR 3 2\n1 2\n0 1\n"), Error);
  EXPECT_THROW(parse_spgr("SPGR 3 1\n0 3\n"), Error);
  EXPECT_THROW(parse_spgr(""), Error);
}

TEST(Spgr, RoundTripRandom) {
  Rng rng(6);
  for (int t = 0; t < 10; ++t) {
    const auto g = random_connected_graph(25, 0.2, rng);
    EXPECT_EQ(parse_spgr(to_spgr(g)), g);
  }
}

TEST(InducedSubgraph, RenumbersNodes) {
  const auto g = Graph::from_edges(5, {{0, 1}, {1, 2}, {3, 4}});
  const std::vector<NodeId> keep{0, 1, 2};
  const auto sub = induced_subgraph(g, keep);
  EXPECT_EQ(sub, path_graph(3));
}

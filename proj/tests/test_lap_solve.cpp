#include <gtest/gtest.h>

#include <numeric>

#include "spade/lap_solve.hpp"
#include "spade/oracle.hpp"
#include "support.hpp"

using namespace spade;
using namespace spade::testing;

TEST(SolveLaplacian, PathResistance) {
  const auto x = solve_laplacian(path_graph(3), std::vector<double>{1, 0, -1});
  EXPECT_NEAR(x[0] - x[2], 2.0, 1e-10);
}

TEST(SolveLaplacian, ConstantRightHandSideGivesZero) {
  Rng rng(21);
  const auto g = random_connected_graph(30, 0.2, rng);
  for (double v : solve_laplacian(g, std::vector<double>(30, 1.0))) EXPECT_EQ(v, 0.0);
}

TEST(SolveLaplacian, MatchesDensePseudoinverse) {
  Rng rng(22);
  std::normal_distribution<double> normal;
  for (auto pre : {Preconditioner::jacobi, Preconditioner::none}) {
    for (int t = 0; t < 5; ++t) {
      const auto g = random_connected_graph(50, 0.1, rng);
      Eigen::VectorXd b(50);
      for (auto& v : b) v = normal(rng);
      const Eigen::VectorXd expected = oracle::dense_pseudoinverse(g) * b;
      SolveParams params;
      params.preconditioner = pre;
      const auto x = solve_laplacian(g, std::span<const double>(b.data(), 50), params);
      for (int i = 0; i < 50; ++i) EXPECT_NEAR(x[i], expected(i), 1e-6);
    }
  }
}

// Properties: x ⊥ 1, the residual contract holds, and repeated solves agree bit for bit.
TEST(SolveLaplacian, ContractProperties) {
  Rng rng(23);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 30; ++t) {
    const auto g = random_cyclic_graph(80, 40, rng);
    std::vector<double> b(80);
    for (double& v : b) v = normal(rng);
    SolveParams params;
    params.tol = 1e-9;
    const LaplacianSolver solver(g, params);
    const auto result = solver.solve(b);

    const double sum = std::accumulate(result.x.begin(), result.x.end(), 0.0);
    EXPECT_LE(std::abs(sum), 1e-10 * detail::norm2(result.x) * std::sqrt(80.0));

    std::vector<double> rhs = b;
    detail::remove_mean(rhs);
    const auto lx = laplacian_apply(g, result.x);
    std::vector<double> r(80);
    for (int i = 0; i < 80; ++i) r[i] = lx[i] - rhs[i];
    EXPECT_LE(detail::norm2(r), params.tol * detail::norm2(rhs));
    EXPECT_LE(result.relative_residual, params.tol);

    EXPECT_EQ(solver.solve(b).x, result.x);
  }
}

TEST(SolveLaplacian, DisconnectedGraphIsRejected) {
  try {
    solve_laplacian(Graph::from_edges(4, {{0, 1}, {2, 3}}), std::vector<double>{1, 0, 0, -1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Disconnected);
  }
}

TEST(SolveLaplacian, NonConvergenceReportsResidual) {
  Rng rng(24);
  const auto g = random_connected_graph(60, 0.08, rng);
  std::vector<double> b(60, 0.0);
  b[0] = 1;
  b[59] = -1;
  SolveParams params;
  params.max_iter = 1;
  try {
    solve_laplacian(g, b, params);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonConvergence);
    EXPECT_NE(std::string(e.what()).find("relative residual"), std::string::npos);
  }
}

TEST(SolveLaplacian, InvalidParameters) {
  SolveParams params;
  params.tol = 0.0;
  EXPECT_THROW(LaplacianSolver(path_graph(3), params), Error);
  params.tol = 1.0;
  EXPECT_THROW(LaplacianSolver(path_graph(3), params), Error);
  EXPECT_THROW(solve_laplacian(path_graph(3), std::vector<double>{1, 2}), Error);
}

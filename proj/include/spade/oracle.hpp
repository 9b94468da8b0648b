#pragma once

// Dense brute-force references for small graphs. Every routine here enforces
// a node-count cap and exists to cross-check the scalable code paths.

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "spade/error.hpp"
#include "spade/graph.hpp"

namespace spade::oracle {

inline constexpr std::size_t kPseudoinverseCap = 2000;
inline constexpr std::size_t kPencilCap = 500;
inline constexpr std::size_t kCutEnumerationCap = 16;

inline void check_cap(std::size_t n, std::size_t cap, const char* what) {
  if (n > cap) {
    throw Error(ErrorKind::SizeCapExceeded,
                std::string(what) + " is limited to n <= " + std::to_string(cap) + " (got " + std::to_string(n) + ")");
  }
}

inline Eigen::MatrixXd dense_laplacian(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : g.edges()) {
    l(e.u, e.u) += 1.0;
    l(e.v, e.v) += 1.0;
    l(e.u, e.v) -= 1.0;
    l(e.v, e.u) -= 1.0;
  }
  return l;
}

/// Full eigendecomposition of one Laplacian.
struct DenseSpectrum {
  Eigen::VectorXd sigmas;  // ascending, sigmas(0) = 0
  Eigen::MatrixXd u;       // orthonormal eigenvectors as columns
  /// [u_2/√σ_2, …, u_N/√σ_N]; ‖U_Nᵀ e_pq‖² is the effective resistance.
  Eigen::MatrixXd weighted_nontrivial;
};

inline DenseSpectrum dense_spectrum(const Graph& g) {
  check_cap(g.num_nodes(), kPseudoinverseCap, "dense_spectrum");
  require_connected(g);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense_laplacian(g));
  DenseSpectrum s;
  s.sigmas = eig.eigenvalues();
  s.sigmas(0) = 0.0;
  s.u = eig.eigenvectors();
  const Eigen::Index n = s.u.cols();
  s.weighted_nontrivial.resize(s.u.rows(), n - 1);
  for (Eigen::Index i = 1; i < n; ++i) {
    s.weighted_nontrivial.col(i - 1) = s.u.col(i) / std::sqrt(s.sigmas(i));
  }
  return s;
}

/// L⁺ = Σ_{i≥2} uᵢuᵢᵀ/σᵢ.
inline Eigen::MatrixXd dense_pseudoinverse(const Graph& g) {
  const auto s = dense_spectrum(g);
  return s.weighted_nontrivial * s.weighted_nontrivial.transpose();
}

inline double resistance_from_pinv(const Eigen::MatrixXd& pinv, std::size_t p, std::size_t q) {
  const auto ip = static_cast<Eigen::Index>(p);
  const auto iq = static_cast<Eigen::Index>(q);
  return pinv(ip, ip) + pinv(iq, iq) - 2.0 * pinv(ip, iq);
}

/// Orthonormal basis of the complement of the all-ones vector (n × n−1).
inline Eigen::MatrixXd mean_free_basis(std::size_t n) {
  const auto nn = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd seed = Eigen::MatrixXd::Identity(nn, nn);
  seed.col(0).setOnes();
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(seed);
  const Eigen::MatrixXd q = qr.householderQ();
  return q.rightCols(nn - 1);
}

/// All n−1 nontrivial eigenpairs of L_Y⁺ L_X, largest first. Vectors are
/// mean-free and L_Y-orthonormal, matching the iterative solver's convention.
struct PencilSpectrum {
  Eigen::VectorXd lambdas;
  Eigen::MatrixXd vectors;
};

inline PencilSpectrum dense_generalized_eigen(const Graph& gx, const Graph& gy) {
  if (gx.num_nodes() != gy.num_nodes()) throw Error(ErrorKind::InvalidArgument, "pencil node counts differ");
  check_cap(gx.num_nodes(), kPencilCap, "dense_generalized_eigen");
  require_connected(gx, "input graph");
  require_connected(gy, "output graph");

  const Eigen::MatrixXd q = mean_free_basis(gx.num_nodes());
  const Eigen::MatrixXd a = q.transpose() * dense_laplacian(gx) * q;
  const Eigen::MatrixXd b = q.transpose() * dense_laplacian(gy) * q;
  const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, b);

  const Eigen::Index m = a.rows();
  PencilSpectrum out;
  out.lambdas.resize(m);
  out.vectors.resize(q.rows(), m);
  for (Eigen::Index i = 0; i < m; ++i) {
    out.lambdas(i) = eig.eigenvalues()(m - 1 - i);
    out.vectors.col(i) = q * eig.eigenvectors().col(m - 1 - i);
  }
  return out;
}

struct GammaMax {
  double gamma = 0.0;
  std::pair<NodeId, NodeId> pair{0, 0};
};

/// Exhaustive max over unordered pairs of d_Y(p,q)/d_X(p,q). The first pair in
/// lexicographic order wins ties.
inline GammaMax gamma_max_bruteforce(const Graph& gx, const Graph& gy, DistanceMetric metric) {
  if (gx.num_nodes() != gy.num_nodes()) throw Error(ErrorKind::InvalidArgument, "pencil node counts differ");
  check_cap(gx.num_nodes(), kPencilCap, "gamma_max_bruteforce");
  const std::size_t n = gx.num_nodes();
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "need at least two nodes");

  GammaMax best;
  best.gamma = -std::numeric_limits<double>::infinity();
  auto consider = [&](std::size_t p, std::size_t q, double dx, double dy) {
    const double gamma = dy / dx;
    if (gamma > best.gamma) best = {gamma, {static_cast<NodeId>(p), static_cast<NodeId>(q)}};
  };

  if (metric == DistanceMetric::resistance) {
    const Eigen::MatrixXd px = dense_pseudoinverse(gx);
    const Eigen::MatrixXd py = dense_pseudoinverse(gy);
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) consider(p, q, resistance_from_pinv(px, p, q), resistance_from_pinv(py, p, q));
    }
  } else {
    require_connected(gx, "input graph");
    require_connected(gy, "output graph");
    for (std::size_t p = 0; p < n; ++p) {
      const auto dx = bfs_distances(gx, static_cast<NodeId>(p));
      const auto dy = bfs_distances(gy, static_cast<NodeId>(p));
      for (std::size_t q = p + 1; q < n; ++q) consider(p, q, dx[q], dy[q]);
    }
  }
  return best;
}

struct MinCmd {
  double zeta = 0.0;
  CutSpec cut;
};

/// Exact minimum of cut_Y(S)/cut_X(S) over all 2^{n−1}−1 proper cuts. The last
/// node is pinned outside S so each cut is visited once; the first minimum in
/// enumeration order wins.
inline MinCmd min_cmd_exhaustive(const Graph& gx, const Graph& gy) {
  if (gx.num_nodes() != gy.num_nodes()) throw Error(ErrorKind::InvalidArgument, "pencil node counts differ");
  check_cap(gx.num_nodes(), kCutEnumerationCap, "min_cmd_exhaustive");
  require_connected(gx, "input graph");
  const std::size_t n = gx.num_nodes();
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "need at least two nodes");

  auto crossing = [](const Graph& g, std::uint32_t mask) {
    std::size_t c = 0;
    for (const auto& e : g.edges()) c += ((mask >> e.u) & 1U) != ((mask >> e.v) & 1U);
    return c;
  };

  double best = std::numeric_limits<double>::infinity();
  std::uint32_t best_mask = 1;
  const std::uint32_t limit = 1U << (n - 1);
  for (std::uint32_t mask = 1; mask < limit; ++mask) {
    const double zeta = static_cast<double>(crossing(gy, mask)) / static_cast<double>(crossing(gx, mask));
    if (zeta < best) {
      best = zeta;
      best_mask = mask;
    }
  }
  std::vector<std::uint8_t> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = static_cast<std::uint8_t>((best_mask >> i) & 1U);
  return {best, CutSpec(std::move(z))};
}

}  // namespace spade::oracle

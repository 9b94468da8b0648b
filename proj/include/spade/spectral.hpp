#pragma once

// Dominant generalized eigenpairs of the Laplacian pencil (L_X, L_Y), i.e. the
// largest eigenvalues of L_Y⁺ L_X, and the scalar scores derived from them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "spade/error.hpp"
#include "spade/graph.hpp"
#include "spade/lap_solve.hpp"

namespace spade {

struct EigenSolverParams {
  std::size_t r = 1;
  /// Stopping threshold for both the relative eigenvalue change between
  /// iterations and the relative generalized residual (relaxed to √tol once
  /// the eigenvalue has been stable for a long run).
  double tol = 1e-6;
  std::size_t max_iter = 1000;
  std::uint64_t seed = 0;
  /// Relative residual target of the inner L_Y solves.
  double inner_tol = 1e-10;
};

/// Generalized eigenpairs L_X v = λ L_Y v, largest λ first. Vectors are
/// mean-free and L_Y-orthonormal (vᵢᵀ L_Y vⱼ = δᵢⱼ).
struct EigenPairs {
  std::vector<double> lambdas;
  std::vector<std::vector<double>> vectors;
  /// ‖L_X v − λ L_Y v‖ / ‖L_X v‖ per pair.
  std::vector<double> residuals;
  std::vector<std::size_t> iterations;
  std::vector<bool> converged;
  /// Set on pairs whose eigenvalue lies within tol of a neighbour's.
  std::vector<bool> degenerate;

  std::size_t size() const noexcept { return lambdas.size(); }
  std::size_t dimension() const noexcept { return vectors.empty() ? 0 : vectors.front().size(); }
  bool all_converged() const noexcept {
    return std::all_of(converged.begin(), converged.end(), [](bool c) { return c; });
  }
};

namespace detail {

inline constexpr double kPolishFactor = 1e-2;
inline constexpr std::size_t kStableWindow = 100;

inline void check_pencil(const Graph& gx, const Graph& gy) {
  if (gx.num_nodes() != gy.num_nodes()) {
    throw Error(ErrorKind::InvalidArgument, "input and output graphs have different node counts (" +
                                                std::to_string(gx.num_nodes()) + " vs " +
                                                std::to_string(gy.num_nodes()) + ")");
  }
  require_connected(gx, "input graph");
  require_connected(gy, "output graph");
}

inline void scale(std::span<double> v, double s) {
  for (double& x : v) x *= s;
}

inline double generalized_residual(const Graph& gx, const Graph& gy, std::span<const double> v, double lambda) {
  const auto lx = laplacian_apply(gx, v);
  const auto ly = laplacian_apply(gy, v);
  double num = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = lx[i] - lambda * ly[i];
    num += d * d;
  }
  const double den = norm2(lx);
  return den > 0.0 ? std::sqrt(num) / den : std::sqrt(num);
}

}  // namespace detail

/// Deflated power iteration on v ↦ L_Y⁺ L_X v. Pairs are found one at a time;
/// each iterate is L_Y-orthogonalized against the pairs already accepted.
/// A pair that fails to converge within max_iter is returned with
/// converged=false and the search stops there.
inline EigenPairs top_generalized_eigenpairs(const Graph& gx, const Graph& gy, const EigenSolverParams& params) {
  detail::check_pencil(gx, gy);
  const std::size_t n = gx.num_nodes();
  if (params.r < 1 || params.r + 1 > n) {
    throw Error(ErrorKind::InvalidArgument,
                "r=" + std::to_string(params.r) + " must satisfy 1 <= r <= n-1 (n=" + std::to_string(n) + ")");
  }
  if (!(params.tol > 0.0 && params.tol < 1.0)) throw Error(ErrorKind::InvalidArgument, "tol must lie in (0, 1)");

  SolveParams inner;
  inner.tol = params.inner_tol;
  inner.max_iter = std::max<std::size_t>(20 * n, 1000);
  const LaplacianSolver solve_y(gy, inner);

  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  EigenPairs out;
  std::vector<std::vector<double>> ly_basis;  // L_Y v_j for accepted pairs

  std::vector<double> v(n), lxv(n);

  // v ← v − Σ (v_jᵀ L_Y v) v_j, twice for numerical safety; then L_Y-normalize.
  auto orthonormalize = [&](std::vector<double>& w) {
    detail::remove_mean(w);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < ly_basis.size(); ++j) {
        const double c = detail::dot(ly_basis[j], w);
        for (std::size_t i = 0; i < n; ++i) w[i] -= c * out.vectors[j][i];
      }
    }
    const double norm_y = std::sqrt(laplacian_quadratic_form(gy, w));
    if (norm_y > 0.0) detail::scale(w, 1.0 / norm_y);
    return norm_y;
  };

  for (std::size_t pair = 0; pair < params.r; ++pair) {
    for (double& x : v) x = unit(rng);
    if (orthonormalize(v) == 0.0) {
      throw Error(ErrorKind::InvalidArgument, "random start vector collapsed to zero");
    }

    double lambda = laplacian_quadratic_form(gx, v);
    double residual = 1.0;
    bool converged = false;
    std::size_t it = 0;
    std::size_t polish_until = 0;
    std::size_t stable = 0;  // consecutive iterations with λ change within tol
    while (it < params.max_iter) {
      ++it;
      laplacian_apply(gx, v, lxv);
      auto next = solve_y.solve(lxv).x;
      if (orthonormalize(next) == 0.0) {
        // L_X v vanished inside the deflated subspace: remaining spectrum is 0.
        lambda = 0.0;
        residual = 0.0;
        converged = true;
        break;
      }
      v.swap(next);
      // v is L_Y-normalized, so the Rayleigh quotient is vᵀ L_X v.
      const double updated = laplacian_quadratic_form(gx, v);
      const double change = std::abs(updated - lambda);
      lambda = updated;
      if (converged) {
        if (it >= polish_until) break;
        residual = detail::generalized_residual(gx, gy, v, lambda);
        if (residual <= detail::kPolishFactor * params.tol) break;
      } else if (change > params.tol * std::abs(lambda)) {
        stable = 0;
      } else {
        ++stable;
        residual = detail::generalized_residual(gx, gy, v, lambda);
        // Inside a tight eigenvalue cluster the vector settles far more slowly
        // than the Rayleigh quotient; a long run of stable λ with a √tol
        // residual is accepted there.
        if (residual <= params.tol ||
            (stable >= detail::kStableWindow && residual <= std::sqrt(params.tol))) {
          // Later pairs are deflated against this vector, and its error leaks
          // into their residuals, so keep iterating for up to as many steps
          // again to push the residual well below tol.
          converged = true;
          polish_until = std::min(params.max_iter, 2 * it);
        }
      }
    }
    if (!converged || it == polish_until) residual = detail::generalized_residual(gx, gy, v, lambda);

    ly_basis.push_back(laplacian_apply(gy, v));
    out.lambdas.push_back(lambda);
    out.vectors.push_back(v);
    out.residuals.push_back(residual);
    out.iterations.push_back(it);
    out.converged.push_back(converged);
    if (!converged) break;
  }

  out.degenerate.assign(out.size(), false);
  for (std::size_t i = 1; i < out.size(); ++i) {
    const double gap = std::abs(out.lambdas[i - 1] - out.lambdas[i]);
    if (gap <= params.tol * std::max(std::abs(out.lambdas[i - 1]), std::abs(out.lambdas[i]))) {
      out.degenerate[i - 1] = true;
      out.degenerate[i] = true;
    }
  }
  return out;
}

inline EigenPairs top_generalized_eigenpairs(const Graph& gx, const Graph& gy, std::size_t r, double tol = 1e-6,
                                             std::size_t max_iter = 1000, std::uint64_t seed = 0) {
  EigenSolverParams params;
  params.r = r;
  params.tol = tol;
  params.max_iter = max_iter;
  params.seed = seed;
  return top_generalized_eigenpairs(gx, gy, params);
}

namespace detail {

inline void require_converged(const EigenPairs& pairs) {
  if (!pairs.all_converged()) {
    const std::size_t last = pairs.size() - 1;
    throw Error(ErrorKind::NonConvergence,
                "eigenpair " + std::to_string(last + 1) + " did not converge after " +
                    std::to_string(pairs.iterations[last]) + " iterations (lambda=" +
                    std::to_string(pairs.lambdas[last]) + ", residual=" + std::to_string(pairs.residuals[last]) +
                    ")");
  }
}

}  // namespace detail

/// Model score λ_max(L_Y⁺ L_X). Also serves as the bi-Lipschitz constant κ of
/// the input-to-output manifold mapping.
inline double model_spade(const Graph& gx, const Graph& gy, double tol = 1e-6, std::uint64_t seed = 0) {
  const auto pairs = top_generalized_eigenpairs(gx, gy, 1, tol, 1000, seed);
  detail::require_converged(pairs);
  return pairs.lambdas.front();
}

/// √(Σ log² λᵢ) over the m largest pencil eigenvalues.
inline double riemannian_distance(const Graph& gx, const Graph& gy, std::size_t m = 10, double tol = 1e-6,
                                  std::uint64_t seed = 0) {
  if (m < 1 || m + 1 > gx.num_nodes()) {
    throw Error(ErrorKind::InvalidArgument, "m must satisfy 1 <= m <= n-1");
  }
  const auto pairs = top_generalized_eigenpairs(gx, gy, m, tol, 1000, seed);
  detail::require_converged(pairs);
  double acc = 0.0;
  for (const double lambda : pairs.lambdas) {
    if (!(lambda > 0.0)) throw Error(ErrorKind::NonPositiveEigenvalue, "pencil eigenvalue is not positive");
    const double l = std::log(lambda);
    acc += l * l;
  }
  return std::sqrt(acc);
}

}  // namespace spade

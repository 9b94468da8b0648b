#pragma once

// Laplacian systems L x = b on connected graphs, solved on the complement of
// the constant vector with Jacobi-preconditioned conjugate gradients.

#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "spade/error.hpp"
#include "spade/graph.hpp"

namespace spade {

enum class Preconditioner { jacobi, none };

struct SolveParams {
  double tol = 1e-8;
  /// 0 selects the default of 10·n.
  std::size_t max_iter = 0;
  Preconditioner preconditioner = Preconditioner::jacobi;
};

struct SolveResult {
  std::vector<double> x;
  std::size_t iterations = 0;
  double relative_residual = 0.0;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline void remove_mean(std::span<double> v) {
  if (v.empty()) return;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  for (double& x : v) x -= mean;
}

}  // namespace detail

/// Reusable solver bound to one connected graph. Connectivity is checked once
/// at construction; `solve` is const and safe to call from several threads.
class LaplacianSolver {
 public:
  explicit LaplacianSolver(const Graph& g, SolveParams params = {}) : g_(g), params_(params) {
    if (!(params_.tol > 0.0 && params_.tol < 1.0)) {
      throw Error(ErrorKind::InvalidArgument, "solver tol must lie in (0, 1)");
    }
    if (params_.max_iter == 0) params_.max_iter = std::max<std::size_t>(10 * g.num_nodes(), 1);
    require_connected(g_, "Laplacian graph");
    inv_diag_.resize(g.num_nodes(), 1.0);
    if (params_.preconditioner == Preconditioner::jacobi) {
      for (std::size_t i = 0; i < g.num_nodes(); ++i) {
        if (g.degree(i) > 0) inv_diag_[i] = 1.0 / static_cast<double>(g.degree(i));
      }
    }
  }

  const Graph& graph() const noexcept { return g_; }
  const SolveParams& params() const noexcept { return params_; }

  /// Returns x ⊥ 1 with ‖L x − b̂‖ ≤ tol·‖b̂‖, where b̂ = b − mean(b)·1.
  SolveResult solve(std::span<const double> b) const {
    check_length(g_, b.size(), "right-hand side");
    const std::size_t n = g_.num_nodes();
    std::vector<double> rhs(b.begin(), b.end());
    detail::remove_mean(rhs);

    SolveResult result;
    result.x.assign(n, 0.0);
    const double rhs_norm = detail::norm2(rhs);
    if (rhs_norm == 0.0) return result;

    std::vector<double> r = rhs;
    std::vector<double> z(n), p(n), ap(n);
    double residual = rhs_norm;

    // Each pass is a fresh CG run seeded with the true residual; a pass ends
    // when the recurrence residual meets tol, after which the true residual is
    // re-measured to guard against drift.
    while (result.iterations < params_.max_iter) {
      precondition(r, z);
      p = z;
      double rz = detail::dot(r, z);
      while (result.iterations < params_.max_iter) {
        ++result.iterations;
        laplacian_apply(g_, p, ap);
        const double pap = detail::dot(p, ap);
        if (!(pap > 0.0)) break;
        const double alpha = rz / pap;
        for (std::size_t i = 0; i < n; ++i) {
          result.x[i] += alpha * p[i];
          r[i] -= alpha * ap[i];
        }
        if (detail::norm2(r) <= params_.tol * rhs_norm) break;
        precondition(r, z);
        const double rz_next = detail::dot(r, z);
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
      }

      detail::remove_mean(result.x);
      laplacian_apply(g_, result.x, ap);
      for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - ap[i];
      residual = detail::norm2(r);
      if (residual <= params_.tol * rhs_norm) {
        result.relative_residual = residual / rhs_norm;
        return result;
      }
    }
    throw Error(ErrorKind::NonConvergence,
                "Laplacian solve stopped after " + std::to_string(result.iterations) +
                    " iterations with relative residual " + std::to_string(residual / rhs_norm));
  }

 private:
  void precondition(std::span<const double> r, std::span<double> z) const {
    for (std::size_t i = 0; i < r.size(); ++i) z[i] = inv_diag_[i] * r[i];
    detail::remove_mean(z);
  }

  const Graph& g_;
  SolveParams params_;
  std::vector<double> inv_diag_;
};

inline std::vector<double> solve_laplacian(const Graph& g, std::span<const double> b, const SolveParams& params = {}) {
  return LaplacianSolver(g, params).solve(b).x;
}

}  // namespace spade

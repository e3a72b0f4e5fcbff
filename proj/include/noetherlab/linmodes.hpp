#ifndef NOETHERLAB_LINMODES_HPP
#define NOETHERLAB_LINMODES_HPP

// Equilibria, quadratic approximation and characteristic oscillations.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "noetherlab/mechsys.hpp"

namespace noetherlab {

/// Classification by the Hessian Omega of V at the equilibrium: negative
/// definite is unstable, positive definite stable, singular degenerate,
/// indefinite a saddle.
enum class Stability { stable, unstable, degenerate, saddle };

const char* to_string(Stability s);

/// eig_tol = 1e-8 * ||omega|| decides which eigenvalues count as zero.
Stability classify(const Mat& omega, double eig_rel_tol = 1e-8);

struct Equilibrium {
  Vec q0;
  double grad_norm = 0.0;
  Stability classification = Stability::degenerate;
  int iterations = 0;
};

struct EquilibriumOptions {
  double newton_tol = 1e-10;
  int max_iter = 100;
  double eig_rel_tol = 1e-8;
};

/// Newton on grad V = 0; a singular Hessian falls back to gradient steps.
Equilibrium find_equilibrium(const LagrangianSystem& sys, const Vec& guess,
                             const EquilibriumOptions& options = {});

struct QuadraticApprox {
  Mat alpha;  ///< velocity Hessian of L at (q0, 0)
  Mat omega;  ///< Hessian of V at q0
};

/// Throws DegeneracyError if alpha is not positive definite.
QuadraticApprox quadratic_approx(const LagrangianSystem& sys, const Vec& q0);

enum class ModeKind { oscillating, runaway, uniform };

struct ModeSet {
  Mat alpha;
  Mat omega_mat;
  Vec eigenvalues;   ///< ascending
  Mat eigenvectors;  ///< columns, alpha-orthonormal
  std::vector<ModeKind> kinds;
  double zero_tol = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }
  /// sqrt(lambda_k) for oscillating modes.
  std::optional<double> frequency(std::size_t k) const;
};

/// Solves omega xi = lambda alpha xi by Cholesky whitening of alpha. Each
/// eigenvector is signed so its largest-magnitude component is positive.
ModeSet normal_modes(const Mat& alpha, const Mat& omega, double eig_rel_tol = 1e-8);

/// Exact solution of the linearized equations from (q, qdot) at t = 0.
Vec mode_solution(const ModeSet& modes, const Vec& q_init, const Vec& qdot_init, double t);

/// mode,lambda,omega,xi_1..xi_n
void write_modes_csv(std::ostream& os, const ModeSet& modes);

}  // namespace noetherlab

#endif  // NOETHERLAB_LINMODES_HPP

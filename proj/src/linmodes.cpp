#include "noetherlab/linmodes.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "noetherlab/csv.hpp"

namespace noetherlab {

const char* to_string(Stability s) {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::unstable: return "unstable";
    case Stability::degenerate: return "degenerate";
    case Stability::saddle: return "saddle";
  }
  return "?";
}

namespace {

double spectral_norm_symmetric(const Vec& eigenvalues) {
  return eigenvalues.size() ? eigenvalues.cwiseAbs().maxCoeff() : 0.0;
}

}  // namespace

Stability classify(const Mat& omega, double eig_rel_tol) {
  const Eigen::SelfAdjointEigenSolver<Mat> es(omega, Eigen::EigenvaluesOnly);
  const Vec& lambda = es.eigenvalues();
  const double tol = eig_rel_tol * spectral_norm_symmetric(lambda);
  bool pos = false, neg = false;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (std::abs(lambda[i]) <= tol) return Stability::degenerate;
    (lambda[i] > 0 ? pos : neg) = true;
  }
  if (pos && !neg) return Stability::stable;
  if (neg && !pos) return Stability::unstable;
  return Stability::saddle;
}

Equilibrium find_equilibrium(const LagrangianSystem& sys, const Vec& guess,
                             const EquilibriumOptions& options) {
  const std::size_t n = sys.dim();
  Vec q = guess;
  auto grad_hess = [&](const Vec& x, Vec& g, Mat& h) {
    const SecondOrderJet jet = sys.potential_jet(x);
    g.resize(n);
    h.resize(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = jet.gradient(i);
      for (std::size_t j = 0; j < n; ++j) h(i, j) = jet.hessian(i, j);
    }
  };
  Vec g;
  Mat h;
  for (int iter = 0; iter <= options.max_iter; ++iter) {
    grad_hess(q, g, h);
    const double norm = g.norm();
    if (norm <= options.newton_tol) {
      return {q, norm, classify(h, options.eig_rel_tol), iter};
    }
    if (iter == options.max_iter) break;
    const Eigen::FullPivLU<Mat> lu(h);
    const double det = h.determinant();
    if (lu.isInvertible() && det != 0.0 && std::abs(det) >= det_tolerance(h)) {
      q -= lu.solve(g);
    } else {
      // Steepest descent with a step sized by the Hessian scale.
      const double scale = std::max(h.cwiseAbs().maxCoeff(), 1.0);
      q -= g / scale;
    }
    if (!q.allFinite()) break;
  }
  throw ConvergenceError("find_equilibrium: Newton did not converge", g.norm());
}

QuadraticApprox quadratic_approx(const LagrangianSystem& sys, const Vec& q0) {
  const std::size_t n = sys.dim();
  const SecondOrderJet l = sys.lagrangian_jet(q0, Vec::Zero(n));
  const SecondOrderJet v = sys.potential_jet(q0);
  QuadraticApprox out{Mat(n, n), Mat(n, n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out.alpha(i, j) = l.hessian(n + i, n + j);
      out.omega(i, j) = sys.kinetic() == LagrangianSystem::Kinetic::general
                            ? -l.hessian(i, j)
                            : v.hessian(i, j);
    }
  }
  const Eigen::LLT<Mat> llt(out.alpha);
  if (llt.info() != Eigen::Success)
    throw DegeneracyError("kinetic matrix at the equilibrium is not positive definite");
  return out;
}

std::optional<double> ModeSet::frequency(std::size_t k) const {
  if (kinds[k] != ModeKind::oscillating) return std::nullopt;
  return std::sqrt(eigenvalues[static_cast<Eigen::Index>(k)]);
}

ModeSet normal_modes(const Mat& alpha, const Mat& omega, double eig_rel_tol) {
  if (alpha.rows() != alpha.cols() || omega.rows() != omega.cols() || alpha.rows() != omega.rows())
    throw std::invalid_argument("alpha and omega must be square and of equal size");
  const Eigen::LLT<Mat> llt(alpha);
  if (llt.info() != Eigen::Success) throw DegeneracyError("alpha is not positive definite");
  // A = C^{-1} Omega C^{-T}
  const Mat cinv_omega = llt.matrixL().solve(omega);
  const Mat a = llt.matrixL().solve(cinv_omega.transpose()).transpose();
  const Mat sym = 0.5 * (a + a.transpose());
  const Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");

  ModeSet out;
  out.alpha = alpha;
  out.omega_mat = omega;
  out.eigenvalues = es.eigenvalues();
  out.eigenvectors = llt.matrixU().solve(es.eigenvectors());  // C^{-T} U
  const Eigen::SelfAdjointEigenSolver<Mat> omega_es(omega, Eigen::EigenvaluesOnly);
  out.zero_tol = eig_rel_tol * spectral_norm_symmetric(omega_es.eigenvalues());
  for (Eigen::Index k = 0; k < out.eigenvectors.cols(); ++k) {
    auto col = out.eigenvectors.col(k);
    const double biggest = col.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (std::abs(col[i]) >= biggest * (1.0 - 1e-9)) {
        if (col[i] < 0) col = -col;
        break;
      }
    }
    const double lambda = out.eigenvalues[k];
    out.kinds.push_back(std::abs(lambda) <= out.zero_tol ? ModeKind::uniform
                        : lambda > 0                     ? ModeKind::oscillating
                                                         : ModeKind::runaway);
  }
  return out;
}

Vec mode_solution(const ModeSet& modes, const Vec& q_init, const Vec& qdot_init, double t) {
  const Mat proj = modes.eigenvectors.transpose() * modes.alpha;
  const Vec Q = proj * q_init;
  const Vec Qdot = proj * qdot_init;
  Vec out = Vec::Zero(q_init.size());
  for (std::size_t k = 0; k < modes.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    const double lambda = modes.eigenvalues[i];
    double amp = 0.0;
    switch (modes.kinds[k]) {
      case ModeKind::oscillating: {
        const double w = std::sqrt(lambda);
        amp = Q[i] * std::cos(w * t) + Qdot[i] / w * std::sin(w * t);
        break;
      }
      case ModeKind::runaway: {
        const double kappa = std::sqrt(-lambda);
        amp = Q[i] * std::cosh(kappa * t) + Qdot[i] / kappa * std::sinh(kappa * t);
        break;
      }
      case ModeKind::uniform: amp = Q[i] + Qdot[i] * t; break;
    }
    out += amp * modes.eigenvectors.col(i);
  }
  return out;
}

void write_modes_csv(std::ostream& os, const ModeSet& modes) {
  std::vector<std::string> header{"mode", "lambda", "omega"};
  for (Eigen::Index i = 0; i < modes.eigenvectors.rows(); ++i)
    header.push_back("xi_" + std::to_string(i + 1));
  CsvWriter csv(os, header);
  for (std::size_t k = 0; k < modes.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    std::vector<double> row{modes.eigenvalues[i],
                            modes.frequency(k).value_or(std::numeric_limits<double>::quiet_NaN())};
    for (Eigen::Index j = 0; j < modes.eigenvectors.rows(); ++j) row.push_back(modes.eigenvectors(j, i));
    csv.row(std::to_string(k + 1), row);
  }
}

}  // namespace noetherlab

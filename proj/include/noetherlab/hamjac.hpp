#ifndef NOETHERLAB_HAMJAC_HPP
#define NOETHERLAB_HAMJAC_HPP

// Hamilton-Jacobi solution families and the planar two-centre problem in
// confocal elliptic coordinates.

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "noetherlab/integrate.hpp"
#include "noetherlab/mechsys.hpp"

namespace noetherlab {

/// n-parameter family S(x, u). dS_dx is mandatory; the rest may be empty and
/// are then derived (mixed partials by central differences in u).
struct HJFamily {
  std::string label;
  std::size_t dim = 0;
  std::function<double(const Vec& x, const Vec& u)> value;
  std::function<Vec(const Vec& x, const Vec& u)> dS_dx;
  std::function<Vec(const Vec& x, const Vec& u)> dS_du;
  /// (i, j) = d^2 S / dx^i du^j
  std::function<Mat(const Vec& x, const Vec& u)> mixed;

  /// S as an expression in x names and u names; all derivatives exact.
  static HJFamily from_expr(const std::string& text, std::vector<std::string> x_names,
                            std::vector<std::string> u_names, Binding params = {});
};

using PhaseFunction = std::function<double(const Vec& q, const Vec& p)>;

struct HJResidual {
  double max = 0.0;   ///< max over u of the spread of H(x, dS) over x
  double mean = 0.0;  ///< mean of that spread over u
  std::size_t evaluated = 0;
  std::size_t skipped = 0;  ///< grid points where dS or H failed
};

HJResidual hj_residual(const PhaseFunction& h, const HJFamily& family,
                       const std::vector<Vec>& x_grid, const std::vector<Vec>& u_grid);
HJResidual hj_residual(const LagrangianSystem& sys, const HJFamily& family,
                       const std::vector<Vec>& x_grid, const std::vector<Vec>& u_grid);

Mat mixed_partials(const HJFamily& family, const Vec& x, const Vec& u, double h = 1e-6);

/// min |det d^2 S/dx du| over the (x, u) pairs.
double family_nondegeneracy(const HJFamily& family,
                            const std::vector<std::pair<Vec, Vec>>& points);

/// Solves dS/du(x, u) = a + t grad H~(u) for x by Newton, starting at x_guess.
Vec reconstruct_motion(const HJFamily& family, const std::function<Vec(const Vec&)>& grad_htilde,
                       const Vec& u, const Vec& a, double t, const Vec& x_guess);

/// Planar Kepler in (r, phi) with u = (E, L); S = L phi + int_{r_anchor}^r sqrt(2(E + M/r) - L^2/r^2).
HJFamily kepler_radial_family(double M, double r_anchor);
LagrangianSystem kepler_polar_system(double M);

// Confocal elliptic coordinates with foci (+-c, 0).

struct EllipticPoint {
  double xi = 0.0;
  double eta = 0.0;
};

/// Off the x axis and the foci (margin 1e-8).
EllipticPoint elliptic_coords(double x, double y, double c);
/// upper selects y > 0.
std::pair<double, double> elliptic_inverse(double xi, double eta, double c, bool upper = true);
/// Diagonal metric coefficients (g_xixi, g_etaeta).
std::pair<double, double> elliptic_metric(double xi, double eta, double c);

struct EllipticPhase {
  double xi, eta, p_xi, p_eta;
};

/// Cotangent lift of the chart change.
EllipticPhase to_elliptic_phase(double x, double y, double px, double py, double c);

double two_center_hamiltonian(const EllipticPhase& s, double c, double k);
/// 1/2 |p|^2 - k/r1 - k/r2 in Cartesian variables.
double two_center_cartesian_hamiltonian(double x, double y, double px, double py, double c, double k);
/// Unit-mass Cartesian system in (x, y) with the foci guarded.
LagrangianSystem two_center_system(double c, double k, double r_guard = 1e-6);
/// (xi, eta) system with the elliptic metric.
LagrangianSystem two_center_elliptic_system(double c, double k);

struct TwoCenterConfig {
  double c = 1.0;
  double k = 1.0;
  double quad_tol = 1e-9;
};

/// S = int_{2c}^{xi} sqrt((c1 + C xi^2 + 4k xi) / (2(xi^2 - 4c^2)))
///   + int_0^{eta} sqrt((-c1 - C eta^2) / (2(4c^2 - eta^2))).
/// Throws ForbiddenRegionError when a radicand turns negative on a leg.
double two_center_action(double xi, double eta, double C, double c1, const TwoCenterConfig& cfg);
/// u = (C, c1).
HJFamily two_center_family(const TwoCenterConfig& cfg);

struct SeparationTrace {
  std::vector<double> t;
  std::vector<double> C;
  std::vector<double> c1;
  bool truncated = false;
};

/// c1 = 2 p_xi^2 (xi^2 - 4c^2) - 4k xi - C xi^2 along a Cartesian trajectory.
SeparationTrace separation_constants(const Trajectory& traj, double c, double k);

/// t,C,c1
void write_separation_csv(std::ostream& os, const SeparationTrace& trace);

}  // namespace noetherlab

#endif  // NOETHERLAB_HAMJAC_HPP

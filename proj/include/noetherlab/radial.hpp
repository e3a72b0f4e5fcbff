#ifndef NOETHERLAB_RADIAL_HPP
#define NOETHERLAB_RADIAL_HPP

// Unit-mass motion in radial potentials V(r): effective potential, turning
// points, Kepler elements, and the quadratures t(r), phi(r).

#include <optional>
#include <string>
#include <vector>

#include "noetherlab/expr.hpp"
#include "noetherlab/integrate.hpp"

namespace noetherlab {

/// V as an expression in the single coordinate r.
class RadialPotential {
 public:
  RadialPotential(const std::string& text, Binding params);

  static RadialPotential newton(double M);
  static RadialPotential harmonic(double k);

  const Expr& expr() const { return expr_; }
  const Binding& params() const { return params_; }

  double value(double r) const;
  double derivative(double r) const;

 private:
  Expr expr_;
  Binding params_;
};

/// V(r) + L^2 / (2 r^2).
double v_eff(const RadialPotential& V, double L, double r);

struct KeplerProfile {
  double r0 = 0.0;     ///< zero of V_eff
  double r_min = 0.0;  ///< location of the minimum
  double f_min = 0.0;  ///< minimum value
};

KeplerProfile kepler_profile(double M, double L);

struct Bracket {
  double lo = 1e-6;
  double hi = 1e6;
};

struct TurningPointOptions {
  double root_tol = 1e-12;  ///< relative
  int scan_points = 4000;
  /// |E - V_eff| at an extremum of V_eff below which it counts as a tangent root.
  double tangent_tol = 1e-10;
};

/// Sorted radii in the bracket where V_eff(r) = E.
std::vector<double> turning_points(const RadialPotential& V, double L, double E,
                                   const Bracket& bracket, const TurningPointOptions& options = {});

enum class OrbitClass { bounded, unbounded, circular, collision, forbidden };

const char* to_string(OrbitClass c);

struct EffectiveProfile {
  double L = 0.0;
  double E = 0.0;
  std::vector<double> turning_points;
  OrbitClass classification = OrbitClass::forbidden;
};

EffectiveProfile effective_profile(const RadialPotential& V, double L, double E,
                                   const Bracket& bracket, const TurningPointOptions& options = {});

struct KeplerElements {
  double M = 0.0;
  double L = 0.0;
  double E = 0.0;
  double p = 0.0;    ///< L^2 / M
  double eps = 0.0;  ///< eccentricity
  double r_per = 0.0;
  /// Infinite for E >= 0; so are a, b, c and T.
  double r_aph = 0.0;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double T = 0.0;

  bool bound() const { return E < 0.0; }
};

class InfeasibleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Throws InfeasibleError for E below the circular-orbit energy.
KeplerElements kepler_elements(double M, double L, double E);

/// 2 pi a^{3/2} / sqrt(M).
double kepler_period(double M, double a);

struct OrbitSample {
  double phi;
  double r;
  double x;
  double y;
};

struct OrbitTrace {
  std::vector<OrbitSample> samples;
  std::vector<double> skipped;  ///< angles with eps cos(phi) <= -1
};

/// r(phi) = p / (1 + eps cos phi).
OrbitTrace orbit_trace(const KeplerElements& elements, const std::vector<double>& phis);

struct QuadratureOptions {
  double quad_tol = 1e-9;
  /// Collision legs stop here; the remainder to r = 0 is dropped.
  double r_guard = 1e-6;
};

/// Time to move from r_a to r_b along a monotone leg.
double t_of_r(const RadialPotential& V, double L, double E, double r_a, double r_b,
              const QuadratureOptions& options = {});

/// Angle swept from r_a to r_b along a monotone leg.
double phi_of_r(const RadialPotential& V, double L, double E, double r_a, double r_b,
                const QuadratureOptions& options = {});

/// Area swept by the position vector, from chords between samples.
class SweptArea {
 public:
  explicit SweptArea(const Trajectory& traj);

  double operator()(double t0, double t1) const { return at(t1) - at(t0); }
  double total() const { return cumulative_.back(); }

 private:
  double at(double t) const;

  std::vector<double> t_;
  std::vector<double> cumulative_;
};

SweptArea swept_area(const Trajectory& traj);

/// Time between the first two passages of the same kind through a radial
/// turning point (sign change of dr/dt). Nullopt when fewer than two are seen.
std::optional<double> measure_period(const Trajectory& traj, const LagrangianSystem& sys);

/// Location of the minimum of V_eff from a bisection on V_eff'.
double minimize_v_eff(const RadialPotential& V, double L, const Bracket& bracket);

}  // namespace noetherlab

#endif  // NOETHERLAB_RADIAL_HPP

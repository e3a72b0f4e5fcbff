#ifndef NOETHERLAB_MECHSYS_HPP
#define NOETHERLAB_MECHSYS_HPP

// Mechanical systems L(q, qdot) = 1/2 g_q(qdot, qdot) - V(q) on a single
// coordinate chart of R^n, and the Legendre correspondence between velocity
// and momentum descriptions.

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "noetherlab/expr.hpp"

namespace noetherlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline std::span<const double> as_span(const Vec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

class DegeneracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InadmissibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Excluded set of the chart: balls of radius min_distance around singular
/// points (the origin for Newton's potential, the foci for two centres).
struct Guard {
  std::vector<Vec> singular_points;
  double min_distance = 0.0;
  std::string description;

  static Guard none() { return {}; }
  static Guard around_origin(std::size_t dim, double r_guard);

  bool admits(const Vec& q) const;
};

/// |det| threshold for degeneracy verdicts: 1e-10 * ||m||_inf^n.
double det_tolerance(const Mat& m);

struct VelocityState {
  Vec q;
  Vec qdot;
};

struct PhaseState {
  Vec q;
  Vec p;
};

class LagrangianSystem {
 public:
  enum class Kinetic { euclidean, metric, general };

  /// 1/2 m |qdot|^2 - V.
  static LagrangianSystem euclidean(std::vector<std::string> coordinates, double mass,
                                    const std::string& potential, Binding params = {},
                                    Guard guard = {});
  /// 1/2 sum g_ij qdot^i qdot^j - V with metric entries given row-major (n*n
  /// strings; the lower triangle must mirror the upper one).
  static LagrangianSystem with_metric(std::vector<std::string> coordinates,
                                      const std::vector<std::string>& metric,
                                      const std::string& potential, Binding params = {},
                                      Guard guard = {});
  /// Arbitrary L in the coordinates and their velocities <name>dot.
  static LagrangianSystem general(std::vector<std::string> coordinates,
                                  const std::string& lagrangian, Binding params = {},
                                  Guard guard = {});

  std::size_t dim() const { return coordinates_.size(); }
  Kinetic kinetic() const { return kinetic_; }
  double mass() const { return mass_; }
  const std::vector<std::string>& coordinates() const { return coordinates_; }
  const std::vector<std::string>& velocities() const { return velocities_; }
  /// Coordinates followed by velocities; the variable order of lagrangian jets.
  const std::vector<std::string>& jet_variables() const { return jet_vars_; }
  const Binding& params() const { return params_; }
  const Expr& potential() const { return potential_; }
  const Expr& lagrangian() const { return lagrangian_; }
  const Guard& guard() const { return guard_; }

  bool has_metric() const { return kinetic_ != Kinetic::general; }
  bool has_constant_metric() const;

  /// Same system with some parameters rebound.
  LagrangianSystem with_params(const Binding& overrides) const;

  bool admissible(const Vec& q) const { return guard_.admits(q); }

  Mat metric(const Vec& q) const;
  /// d g / d q^k for every k.
  std::vector<Mat> metric_derivatives(const Vec& q) const;
  SecondOrderJet potential_jet(const Vec& q, bool with_hessian = true) const;
  /// Jet of L in the variables (q, qdot).
  SecondOrderJet lagrangian_jet(const Vec& q, const Vec& qdot, bool with_hessian = true) const;

  std::string fingerprint() const;

 private:
  LagrangianSystem() = default;
  void finish();

  Kinetic kinetic_ = Kinetic::euclidean;
  double mass_ = 1.0;
  std::vector<std::string> coordinates_;
  std::vector<std::string> velocities_;
  std::vector<std::string> jet_vars_;
  std::vector<Expr> metric_;  // row-major, empty for euclidean/general
  Expr potential_;
  Expr lagrangian_;
  Binding params_;
  Guard guard_;
};

/// Gamma^l_jk, symmetric in (j, k) by storage.
class Christoffel {
 public:
  explicit Christoffel(std::size_t n) : n_(n), data_(n * n * (n + 1) / 2, 0.0) {}
  std::size_t dim() const { return n_; }
  double operator()(std::size_t l, std::size_t j, std::size_t k) const { return data_[index(l, j, k)]; }
  double& at(std::size_t l, std::size_t j, std::size_t k) { return data_[index(l, j, k)]; }

 private:
  std::size_t index(std::size_t l, std::size_t j, std::size_t k) const {
    if (j > k) std::swap(j, k);
    return l * n_ * (n_ + 1) / 2 + j * n_ - j * (j + 1) / 2 + k;
  }
  std::size_t n_;
  std::vector<double> data_;
};

Christoffel christoffel(const LagrangianSystem& sys, const Vec& q);

double lagrangian_value(const LagrangianSystem& sys, const VelocityState& s);

/// sum qdot^i dL/dqdot^i - L.
double energy(const LagrangianSystem& sys, const VelocityState& s);

/// p = dL/dqdot.
PhaseState to_momenta(const LagrangianSystem& sys, const VelocityState& s);

/// Inverse of to_momenta: g^{-1} p for metric systems, Newton otherwise.
VelocityState to_velocities(const LagrangianSystem& sys, const PhaseState& s);

double hamiltonian(const LagrangianSystem& sys, const PhaseState& s);

struct NondegeneracyReport {
  bool invertible = false;
  double det = 0.0;
  double condition = 0.0;
};

/// Verdict on the Hessian of L in the velocities.
NondegeneracyReport nondegeneracy_report(const LagrangianSystem& sys, const VelocityState& s);

/// Scalar function with value, gradient and Hessian at a point.
using JetFunction = std::function<SecondOrderJet(std::span<const double>)>;

struct LegendreOptions {
  double tolerance = 1e-10;
  int max_iter = 50;
};

struct LegendreResult {
  Vec x_star;
  double f_tilde = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

/// Solves grad f(x) = y by damped Newton and returns <y, x*> - f(x*).
LegendreResult legendre_transform(const JetFunction& f, const Vec& y, const Vec& x_guess,
                                  const LegendreOptions& options = {});
LegendreResult legendre_transform(const Expr& f, const std::vector<std::string>& vars,
                                  const Binding& params, const Vec& y, const Vec& x_guess,
                                  const LegendreOptions& options = {});

/// The transform as a JetFunction of y: value f~(y), gradient x*(y),
/// Hessian (Hess f(x*))^{-1}.
JetFunction legendre_dual(JetFunction f, Vec x_guess, LegendreOptions options = {});

JetFunction as_jet_function(const Expr& f, std::vector<std::string> vars, Binding params);

}  // namespace noetherlab

#endif  // NOETHERLAB_MECHSYS_HPP

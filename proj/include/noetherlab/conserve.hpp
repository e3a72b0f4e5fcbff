#ifndef NOETHERLAB_CONSERVE_HPP
#define NOETHERLAB_CONSERVE_HPP

// Noether charges of symmetry vector fields and conservation audits along
// trajectories.

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "noetherlab/integrate.hpp"
#include "noetherlab/mechsys.hpp"

namespace noetherlab {

/// Vector field X = X^i(q) d/dq^i on the configuration chart.
class SymmetryField {
 public:
  SymmetryField(const LagrangianSystem& sys, const std::vector<std::string>& components,
                std::string label);

  const std::string& label() const { return label_; }
  const std::vector<Expr>& components() const { return components_; }

  Vec value(const LagrangianSystem& sys, const Vec& q) const;
  /// dX^i/dq^j.
  Mat jacobian(const LagrangianSystem& sys, const Vec& q) const;

 private:
  std::vector<Expr> components_;
  std::string label_;
};

/// sum X^i(q) dL/dqdot^i.
double noether_charge(const LagrangianSystem& sys, const SymmetryField& field,
                      const VelocityState& s);

struct KillingResidual {
  double metric = 0.0;     ///< max ||(L_X g)_jk||_inf over the samples
  double potential = 0.0;  ///< max |X(V)|
  bool is_killing(double tol = 1e-7) const { return metric <= tol; }
  bool is_symmetry(double tol = 1e-7) const { return metric <= tol && potential <= tol; }
};

/// Lie derivative of the metric from central differences of g (h = 1e-5)
/// and exact derivatives of X.
KillingResidual killing_residual(const LagrangianSystem& sys, const SymmetryField& field,
                                 const std::vector<Vec>& sample_points, double h = 1e-5);

struct Monitor {
  std::string label;
  std::function<double(const PhaseState&)> evaluate;
};

struct DriftReport {
  std::string label;
  double initial = 0.0;
  double max_drift = 0.0;
  double t_at_max = 0.0;
  /// max_drift / max(|initial|, 1).
  double relative_drift = 0.0;
  bool valid = true;
  std::string error;
};

std::vector<DriftReport> audit(const Trajectory& traj, const std::vector<Monitor>& monitors);

Monitor energy_monitor(const LagrangianSystem& sys);
std::vector<Monitor> momentum_monitors(const LagrangianSystem& sys);
/// q x p components; needs n = 3.
std::vector<Monitor> angular_momentum_monitors(const LagrangianSystem& sys);
/// v x (q x v) - M q / r for unit mass, v = dH/dp.
std::vector<Monitor> runge_lenz_monitors(const LagrangianSystem& sys, double M);
Monitor charge_monitor(const LagrangianSystem& sys, SymmetryField field);

/// Energy, momenta, and for n = 3 angular momentum.
std::vector<Monitor> builtin_monitors(const LagrangianSystem& sys);

/// charge,initial,max_drift,t_at_max,relative_drift
void write_audit_csv(std::ostream& os, const std::vector<DriftReport>& reports);

}  // namespace noetherlab

#endif  // NOETHERLAB_CONSERVE_HPP

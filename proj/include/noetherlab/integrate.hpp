#ifndef NOETHERLAB_INTEGRATE_HPP
#define NOETHERLAB_INTEGRATE_HPP

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "noetherlab/mechsys.hpp"

namespace noetherlab {

enum class Method { rk4, verlet };
enum class Formulation { hamilton, euler_lagrange };

const char* to_string(Method m);

struct IntegratorSpec {
  Method method = Method::rk4;
  double dt = 1e-3;
  std::size_t steps = 1;
  /// euler_lagrange integrates (q, qdot) with el_rhs and stores the momenta.
  Formulation formulation = Formulation::hamilton;
  /// Overrides the system's own guard when set.
  std::optional<Guard> guard;

  /// Throws std::invalid_argument for dt <= 0, steps == 0, non-finite
  /// dt*steps, or verlet on a position-dependent metric.
  void validate(const LagrangianSystem& sys) const;
};

struct TrajectoryMeta {
  std::string integrator;
  double dt = 0.0;
  std::string fingerprint;
};

/// Motion samples in phase space. Every step is stored.
struct Trajectory {
  std::vector<double> t;
  std::vector<PhaseState> states;
  TrajectoryMeta meta;
  bool truncated = false;
  std::string stop_reason;

  std::size_t size() const { return t.size(); }
  std::vector<VelocityState> velocities(const LagrangianSystem& sys) const;
};

/// Acceleration from the Euler-Lagrange equations.
Vec el_rhs(const LagrangianSystem& sys, const VelocityState& s);

struct PhaseRate {
  Vec qdot;
  Vec pdot;
};

/// (dH/dp, -dH/dq).
PhaseRate hamilton_rhs(const LagrangianSystem& sys, const PhaseState& s);

Trajectory run(const LagrangianSystem& sys, const PhaseState& s0, const IntegratorSpec& spec);

/// Header t,q1..qn,p1..pn,E; 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const LagrangianSystem& sys);

}  // namespace noetherlab

#endif  // NOETHERLAB_INTEGRATE_HPP

#include "noetherlab/integrate.hpp"

#include <cmath>

#include "noetherlab/csv.hpp"

namespace noetherlab {

const char* to_string(Method m) { return m == Method::rk4 ? "rk4" : "verlet"; }

void IntegratorSpec::validate(const LagrangianSystem& sys) const {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (steps == 0) throw std::invalid_argument("steps must be positive");
  if (!std::isfinite(dt * static_cast<double>(steps)))
    throw std::invalid_argument("dt * steps is not finite");
  if (method == Method::verlet) {
    if (!sys.has_constant_metric())
      throw std::invalid_argument("verlet needs a constant metric (separable Hamiltonian)");
    if (formulation != Formulation::hamilton)
      throw std::invalid_argument("verlet integrates the Hamiltonian formulation only");
  }
}

std::vector<VelocityState> Trajectory::velocities(const LagrangianSystem& sys) const {
  std::vector<VelocityState> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(to_velocities(sys, s));
  return out;
}

namespace {

Vec potential_gradient(const LagrangianSystem& sys, const Vec& q) {
  const SecondOrderJet jet = sys.potential_jet(q, false);
  Vec g(sys.dim());
  for (std::size_t i = 0; i < sys.dim(); ++i) g[i] = jet.gradient(i);
  return g;
}

}  // namespace

Vec el_rhs(const LagrangianSystem& sys, const VelocityState& s) {
  const std::size_t n = sys.dim();
  if (!sys.admissible(s.q)) throw InadmissibleError("state outside the admissible set");
  if (sys.kinetic() == LagrangianSystem::Kinetic::euclidean)
    return -potential_gradient(sys, s.q) / sys.mass();
  if (sys.has_metric()) {
    const Christoffel gamma = christoffel(sys, s.q);
    const Mat g = sys.metric(s.q);
    Vec acc = -g.partialPivLu().solve(potential_gradient(sys, s.q));
    for (std::size_t l = 0; l < n; ++l) {
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) sum += gamma(l, j, k) * s.qdot[j] * s.qdot[k];
      acc[l] -= sum;
    }
    return acc;
  }
  // d/dt dL/dqdot = dL/dq  =>  L_vv a = L_q - L_vq qdot.
  const SecondOrderJet jet = sys.lagrangian_jet(s.q, s.qdot);
  Mat hvv(n, n);
  Vec rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    rhs[i] = jet.gradient(i);
    for (std::size_t j = 0; j < n; ++j) {
      hvv(i, j) = jet.hessian(n + i, n + j);
      rhs[i] -= jet.hessian(n + i, j) * s.qdot[j];
    }
  }
  const double det = hvv.determinant();
  if (det == 0.0 || std::abs(det) < det_tolerance(hvv))
    throw DegeneracyError("Lagrangian Hessian in the velocities is singular");
  return hvv.partialPivLu().solve(rhs);
}

PhaseRate hamilton_rhs(const LagrangianSystem& sys, const PhaseState& s) {
  const std::size_t n = sys.dim();
  if (sys.kinetic() == LagrangianSystem::Kinetic::euclidean) {
    if (!sys.admissible(s.q)) throw InadmissibleError("state outside the admissible set");
    return {s.p / sys.mass(), -potential_gradient(sys, s.q)};
  }
  // qdot = dH/dp is the inverse Legendre map; -dH/dq = dL/dq at (q, qdot).
  const VelocityState v = to_velocities(sys, s);
  const SecondOrderJet jet = sys.lagrangian_jet(v.q, v.qdot, false);
  Vec pdot(n);
  for (std::size_t i = 0; i < n; ++i) pdot[i] = jet.gradient(i);
  return {v.qdot, pdot};
}

namespace {

struct Pair {
  Vec a;
  Vec b;
};

template <typename Rhs>
Pair rk4_step(const Pair& y, double dt, Rhs&& rhs) {
  const Pair k1 = rhs(y);
  const Pair k2 = rhs(Pair{y.a + 0.5 * dt * k1.a, y.b + 0.5 * dt * k1.b});
  const Pair k3 = rhs(Pair{y.a + 0.5 * dt * k2.a, y.b + 0.5 * dt * k2.b});
  const Pair k4 = rhs(Pair{y.a + dt * k3.a, y.b + dt * k3.b});
  return {y.a + dt / 6.0 * (k1.a + 2.0 * k2.a + 2.0 * k3.a + k4.a),
          y.b + dt / 6.0 * (k1.b + 2.0 * k2.b + 2.0 * k3.b + k4.b)};
}

}  // namespace

Trajectory run(const LagrangianSystem& sys, const PhaseState& s0, const IntegratorSpec& spec) {
  spec.validate(sys);
  const Guard& guard = spec.guard ? *spec.guard : sys.guard();
  if (static_cast<std::size_t>(s0.q.size()) != sys.dim() ||
      static_cast<std::size_t>(s0.p.size()) != sys.dim())
    throw std::invalid_argument("initial state dimension does not match the system");
  if (!guard.admits(s0.q) || !s0.p.allFinite())
    throw InadmissibleError("initial state outside the admissible set");

  Trajectory traj;
  traj.meta = {std::string(to_string(spec.method)) +
                   (spec.formulation == Formulation::euler_lagrange ? "/euler-lagrange" : ""),
               spec.dt, sys.fingerprint()};
  traj.t.reserve(spec.steps + 1);
  traj.states.reserve(spec.steps + 1);
  traj.t.push_back(0.0);
  traj.states.push_back(s0);

  const double dt = spec.dt;
  Mat inverse_mass;
  if (spec.method == Method::verlet) inverse_mass = sys.metric(s0.q).inverse();

  Pair y;
  if (spec.formulation == Formulation::euler_lagrange) {
    const VelocityState v = to_velocities(sys, s0);
    y = {v.q, v.qdot};
  } else {
    y = {s0.q, s0.p};
  }

  for (std::size_t step = 1; step <= spec.steps; ++step) {
    Pair next;
    PhaseState state;
    try {
      if (spec.method == Method::verlet) {
        const Vec half = y.b - 0.5 * dt * potential_gradient(sys, y.a);
        const Vec q = y.a + dt * (inverse_mass * half);
        if (!guard.admits(q)) throw InadmissibleError("guard tripped");
        next = {q, half - 0.5 * dt * potential_gradient(sys, q)};
        state = {next.a, next.b};
      } else if (spec.formulation == Formulation::euler_lagrange) {
        next = rk4_step(y, dt, [&](const Pair& s) {
          if (!guard.admits(s.a)) throw InadmissibleError("guard tripped");
          return Pair{s.b, el_rhs(sys, VelocityState{s.a, s.b})};
        });
        if (!guard.admits(next.a)) throw InadmissibleError("guard tripped");
        state = to_momenta(sys, VelocityState{next.a, next.b});
      } else {
        next = rk4_step(y, dt, [&](const Pair& s) {
          if (!guard.admits(s.a)) throw InadmissibleError("guard tripped");
          PhaseRate r = hamilton_rhs(sys, PhaseState{s.a, s.b});
          return Pair{std::move(r.qdot), std::move(r.pdot)};
        });
        if (!guard.admits(next.a)) throw InadmissibleError("guard tripped");
        state = {next.a, next.b};
      }
    } catch (const InadmissibleError& e) {
      traj.truncated = true;
      traj.stop_reason = guard.description.empty() ? std::string(e.what())
                                                   : std::string(e.what()) + " (" + guard.description + ")";
      break;
    } catch (const std::runtime_error& e) {
      traj.truncated = true;
      traj.stop_reason = e.what();
      break;
    }
    if (!state.q.allFinite() || !state.p.allFinite()) {
      traj.truncated = true;
      traj.stop_reason = "non-finite state";
      break;
    }
    y = std::move(next);
    traj.t.push_back(static_cast<double>(step) * dt);
    traj.states.push_back(std::move(state));
  }
  return traj;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const LagrangianSystem& sys) {
  const std::size_t n = sys.dim();
  std::vector<std::string> header{"t"};
  for (std::size_t i = 1; i <= n; ++i) header.push_back("q" + std::to_string(i));
  for (std::size_t i = 1; i <= n; ++i) header.push_back("p" + std::to_string(i));
  header.push_back("E");
  CsvWriter csv(os, header);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const PhaseState& s = traj.states[k];
    std::vector<double> row{traj.t[k]};
    for (std::size_t i = 0; i < n; ++i) row.push_back(s.q[i]);
    for (std::size_t i = 0; i < n; ++i) row.push_back(s.p[i]);
    row.push_back(hamiltonian(sys, s));
    csv.row(row);
  }
}

}  // namespace noetherlab

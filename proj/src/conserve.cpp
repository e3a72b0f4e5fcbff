#include "noetherlab/conserve.hpp"

#include <cmath>

#include "noetherlab/csv.hpp"

namespace noetherlab {

namespace {

std::vector<std::string> param_names(const LagrangianSystem& sys) {
  std::vector<std::string> out;
  for (const auto& [k, v] : sys.params()) out.push_back(k);
  return out;
}

}  // namespace

SymmetryField::SymmetryField(const LagrangianSystem& sys, const std::vector<std::string>& components,
                             std::string label)
    : label_(std::move(label)) {
  if (components.size() != sys.dim())
    throw std::invalid_argument("symmetry field '" + label_ + "' needs " +
                                std::to_string(sys.dim()) + " components");
  const NameSet names{sys.coordinates(), param_names(sys)};
  for (const auto& c : components) components_.push_back(parse_expression(c, names));
}

Vec SymmetryField::value(const LagrangianSystem& sys, const Vec& q) const {
  Vec out(sys.dim());
  for (std::size_t i = 0; i < sys.dim(); ++i)
    out[i] = jet2(components_[i], sys.coordinates(), as_span(q), sys.params(), false).value();
  return out;
}

Mat SymmetryField::jacobian(const LagrangianSystem& sys, const Vec& q) const {
  const std::size_t n = sys.dim();
  Mat out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const SecondOrderJet jet = jet2(components_[i], sys.coordinates(), as_span(q), sys.params(), false);
    for (std::size_t j = 0; j < n; ++j) out(i, j) = jet.gradient(j);
  }
  return out;
}

double noether_charge(const LagrangianSystem& sys, const SymmetryField& field,
                      const VelocityState& s) {
  const PhaseState p = to_momenta(sys, s);
  return field.value(sys, s.q).dot(p.p);
}

KillingResidual killing_residual(const LagrangianSystem& sys, const SymmetryField& field,
                                 const std::vector<Vec>& sample_points, double h) {
  const std::size_t n = sys.dim();
  KillingResidual out;
  for (const Vec& q : sample_points) {
    const Mat g = sys.metric(q);
    std::vector<Mat> dg(n);
    for (std::size_t m = 0; m < n; ++m) {
      Vec qp = q, qm = q;
      qp[m] += h;
      qm[m] -= h;
      dg[m] = (sys.metric(qp) - sys.metric(qm)) / (2.0 * h);
    }
    const Vec x = field.value(sys, q);
    const Mat dx = field.jacobian(sys, q);  // dx(m, j) = d_j X^m
    // (L_X g)_jk = X^m d_m g_jk + g_mk d_j X^m + g_jm d_k X^m
    Mat lie = Mat::Zero(n, n);
    for (std::size_t m = 0; m < n; ++m) lie += x[m] * dg[m];
    lie += dx.transpose() * g + g * dx;
    out.metric = std::max(out.metric, lie.cwiseAbs().maxCoeff());

    const SecondOrderJet v = sys.potential_jet(q, false);
    double xv = 0.0;
    for (std::size_t i = 0; i < n; ++i) xv += x[i] * v.gradient(i);
    out.potential = std::max(out.potential, std::abs(xv));
  }
  return out;
}

std::vector<DriftReport> audit(const Trajectory& traj, const std::vector<Monitor>& monitors) {
  if (traj.size() == 0) throw std::invalid_argument("audit needs a non-empty trajectory");
  std::vector<DriftReport> out;
  out.reserve(monitors.size());
  for (const Monitor& m : monitors) {
    DriftReport r;
    r.label = m.label;
    try {
      r.initial = m.evaluate(traj.states.front());
      for (std::size_t k = 0; k < traj.size(); ++k) {
        const double f = m.evaluate(traj.states[k]);
        const double d = std::abs(f - r.initial);
        if (!std::isfinite(f)) throw std::runtime_error("non-finite value at t = " + format_double(traj.t[k]));
        if (d > r.max_drift) {
          r.max_drift = d;
          r.t_at_max = traj.t[k];
        }
      }
      r.t_at_max = r.max_drift == 0.0 ? traj.t.front() : r.t_at_max;
      r.relative_drift = r.max_drift / std::max(std::abs(r.initial), 1.0);
    } catch (const std::exception& e) {
      r.valid = false;
      r.error = e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

Monitor energy_monitor(const LagrangianSystem& sys) {
  return {"energy", [sys](const PhaseState& s) { return hamiltonian(sys, s); }};
}

std::vector<Monitor> momentum_monitors(const LagrangianSystem& sys) {
  std::vector<Monitor> out;
  for (std::size_t i = 0; i < sys.dim(); ++i)
    out.push_back({"p_" + sys.coordinates()[i], [i](const PhaseState& s) { return s.p[i]; }});
  return out;
}

std::vector<Monitor> angular_momentum_monitors(const LagrangianSystem& sys) {
  if (sys.dim() != 3) throw std::invalid_argument("angular momentum monitors need n = 3");
  std::vector<Monitor> out;
  const char* names[] = {"L_1", "L_2", "L_3"};
  for (int c = 0; c < 3; ++c) {
    out.push_back({names[c], [c](const PhaseState& s) {
                     const Eigen::Vector3d q = s.q.head<3>();
                     const Eigen::Vector3d p = s.p.head<3>();
                     return q.cross(p)[c];
                   }});
  }
  return out;
}

std::vector<Monitor> runge_lenz_monitors(const LagrangianSystem& sys, double M) {
  if (sys.dim() != 3) throw std::invalid_argument("Runge-Lenz monitors need n = 3");
  std::vector<Monitor> out;
  const char* names[] = {"R_1", "R_2", "R_3"};
  for (int c = 0; c < 3; ++c) {
    out.push_back({names[c], [sys, M, c](const PhaseState& s) {
                     const Eigen::Vector3d q = s.q.head<3>();
                     const Eigen::Vector3d v = to_velocities(sys, s).qdot.head<3>();
                     const Eigen::Vector3d r = v.cross(q.cross(v)) - M / q.norm() * q;
                     return r[c];
                   }});
  }
  return out;
}

Monitor charge_monitor(const LagrangianSystem& sys, SymmetryField field) {
  std::string label = field.label();
  return {label, [sys, field = std::move(field)](const PhaseState& s) {
            return field.value(sys, s.q).dot(s.p);
          }};
}

std::vector<Monitor> builtin_monitors(const LagrangianSystem& sys) {
  std::vector<Monitor> out{energy_monitor(sys)};
  for (auto& m : momentum_monitors(sys)) out.push_back(std::move(m));
  if (sys.dim() == 3 && sys.kinetic() == LagrangianSystem::Kinetic::euclidean)
    for (auto& m : angular_momentum_monitors(sys)) out.push_back(std::move(m));
  return out;
}

void write_audit_csv(std::ostream& os, const std::vector<DriftReport>& reports) {
  CsvWriter csv(os, {"charge", "initial", "max_drift", "t_at_max", "relative_drift"});
  for (const auto& r : reports) {
    if (r.valid) {
      const double row[] = {r.initial, r.max_drift, r.t_at_max, r.relative_drift};
      csv.row(r.label, row);
    } else {
      os << r.label << ",nan,nan,nan,nan\n";
    }
  }
}

}  // namespace noetherlab

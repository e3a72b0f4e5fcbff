#include "noetherlab/hamjac.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "noetherlab/csv.hpp"
#include "noetherlab/quadrature.hpp"

namespace noetherlab {

HJFamily HJFamily::from_expr(const std::string& text, std::vector<std::string> x_names,
                             std::vector<std::string> u_names, Binding params) {
  std::vector<std::string> vars = x_names;
  vars.insert(vars.end(), u_names.begin(), u_names.end());
  std::vector<std::string> pnames;
  for (const auto& [k, v] : params) pnames.push_back(k);
  const Expr s = parse_expression(text, NameSet{vars, pnames});
  const std::size_t n = x_names.size();
  if (u_names.size() != n) throw std::invalid_argument("family needs as many parameters as coordinates");

  auto jet_at = [s, vars, params, n](const Vec& x, const Vec& u, bool hess) {
    std::vector<double> point(x.data(), x.data() + n);
    point.insert(point.end(), u.data(), u.data() + n);
    return jet2(s, vars, point, params, hess);
  };
  HJFamily f;
  f.label = text;
  f.dim = n;
  f.value = [jet_at](const Vec& x, const Vec& u) { return jet_at(x, u, false).value(); };
  f.dS_dx = [jet_at, n](const Vec& x, const Vec& u) {
    const SecondOrderJet j = jet_at(x, u, false);
    Vec g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = j.gradient(i);
    return g;
  };
  f.dS_du = [jet_at, n](const Vec& x, const Vec& u) {
    const SecondOrderJet j = jet_at(x, u, false);
    Vec g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = j.gradient(n + i);
    return g;
  };
  f.mixed = [jet_at, n](const Vec& x, const Vec& u) {
    const SecondOrderJet j = jet_at(x, u, true);
    Mat m(n, n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) m(a, b) = j.hessian(a, n + b);
    return m;
  };
  return f;
}

HJResidual hj_residual(const PhaseFunction& h, const HJFamily& family,
                       const std::vector<Vec>& x_grid, const std::vector<Vec>& u_grid) {
  HJResidual out;
  std::size_t rows = 0;
  for (const Vec& u : u_grid) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const Vec& x : x_grid) {
      double value = std::numeric_limits<double>::quiet_NaN();
      try {
        value = h(x, family.dS_dx(x, u));
      } catch (const std::exception&) {
      }
      if (!std::isfinite(value)) {
        ++out.skipped;
        continue;
      }
      ++out.evaluated;
      lo = std::min(lo, value);
      hi = std::max(hi, value);
    }
    if (hi < lo) continue;
    out.max = std::max(out.max, hi - lo);
    out.mean += hi - lo;
    ++rows;
  }
  if (rows) out.mean /= static_cast<double>(rows);
  return out;
}

HJResidual hj_residual(const LagrangianSystem& sys, const HJFamily& family,
                       const std::vector<Vec>& x_grid, const std::vector<Vec>& u_grid) {
  return hj_residual([&sys](const Vec& q, const Vec& p) { return hamiltonian(sys, PhaseState{q, p}); },
                     family, x_grid, u_grid);
}

Mat mixed_partials(const HJFamily& family, const Vec& x, const Vec& u, double h) {
  if (family.mixed) return family.mixed(x, u);
  const auto n = static_cast<Eigen::Index>(family.dim);
  Mat out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double step = h * std::max(1.0, std::abs(u[j]));
    Vec up = u, um = u;
    up[j] += step;
    um[j] -= step;
    out.col(j) = (family.dS_dx(x, up) - family.dS_dx(x, um)) / (2.0 * step);
  }
  return out;
}

double family_nondegeneracy(const HJFamily& family,
                            const std::vector<std::pair<Vec, Vec>>& points) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [x, u] : points) best = std::min(best, std::abs(mixed_partials(family, x, u).determinant()));
  return best;
}

Vec reconstruct_motion(const HJFamily& family, const std::function<Vec(const Vec&)>& grad_htilde,
                       const Vec& u, const Vec& a, double t, const Vec& x_guess) {
  if (!family.dS_du) throw std::invalid_argument("reconstruct_motion needs dS/du");
  const Vec target = a + t * grad_htilde(u);
  Vec x = x_guess;
  double residual = 0.0;
  for (int iter = 0; iter < 50; ++iter) {
    const Vec f = family.dS_du(x, u) - target;
    residual = f.norm();
    if (residual <= 1e-14 * std::max(1.0, target.norm())) return x;
    const Mat jac = mixed_partials(family, x, u).transpose();
    x -= jac.fullPivLu().solve(f);
  }
  throw ConvergenceError("reconstruct_motion: Newton did not converge", residual);
}

HJFamily kepler_radial_family(double M, double r_anchor) {
  auto radicand = [M](double r, const Vec& u) { return 2.0 * (u[0] + M / r) - u[1] * u[1] / (r * r); };
  HJFamily f;
  f.label = "kepler-radial";
  f.dim = 2;
  f.dS_dx = [radicand](const Vec& x, const Vec& u) {
    const double g = radicand(x[0], u);
    if (!(g >= 0.0)) throw ForbiddenRegionError("radial momentum is imaginary", x[0], x[0]);
    Vec out(2);
    out << std::sqrt(g), u[1];
    return out;
  };
  f.value = [radicand, r_anchor](const Vec& x, const Vec& u) {
    const double lo = std::min(r_anchor, x[0]), hi = std::max(r_anchor, x[0]);
    for (int i = 0; i <= 8; ++i) {
      const double r = lo + (hi - lo) * i / 8.0;
      if (radicand(r, u) < 0.0) throw ForbiddenRegionError("radial leg leaves the allowed region", lo, hi);
    }
    const double leg = adaptive_simpson([&](double r) { return std::sqrt(std::max(0.0, radicand(r, u))); },
                                        r_anchor, x[0], 1e-11);
    return u[1] * x[1] + leg;
  };
  return f;
}

LagrangianSystem kepler_polar_system(double M) {
  return LagrangianSystem::with_metric({"r", "phi"}, {"1", "0", "0", "r^2"}, "-M/r", {{"M", M}},
                                       Guard::around_origin(1, 1e-6));
}

namespace {

constexpr double axis_margin = 1e-8;

void check_elliptic_domain(double xi, double eta, double c) {
  if (!(c > 0.0)) throw std::domain_error("focal half-distance must be positive");
  if (!(xi > 2.0 * c) || !(std::abs(eta) < 2.0 * c))
    throw std::domain_error("outside the elliptic chart: need xi > 2c and |eta| < 2c");
}

}  // namespace

EllipticPoint elliptic_coords(double x, double y, double c) {
  if (!(c > 0.0)) throw std::domain_error("focal half-distance must be positive");
  const double r1 = std::hypot(x - c, y);
  const double r2 = std::hypot(x + c, y);
  if (!(std::abs(y) > axis_margin) || r1 <= axis_margin || r2 <= axis_margin)
    throw std::domain_error("point lies on the focal axis");
  return {r1 + r2, r1 - r2};
}

std::pair<double, double> elliptic_inverse(double xi, double eta, double c, bool upper) {
  check_elliptic_domain(xi, eta, c);
  const double r1 = 0.5 * (xi + eta);
  const double x = -xi * eta / (4.0 * c);
  const double y = std::sqrt(std::max(0.0, r1 * r1 - (x - c) * (x - c)));
  return {x, upper ? y : -y};
}

std::pair<double, double> elliptic_metric(double xi, double eta, double c) {
  check_elliptic_domain(xi, eta, c);
  const double num = xi * xi - eta * eta;
  return {num / (4.0 * (xi * xi - 4.0 * c * c)), num / (4.0 * (4.0 * c * c - eta * eta))};
}

EllipticPhase to_elliptic_phase(double x, double y, double px, double py, double c) {
  const EllipticPoint e = elliptic_coords(x, y, c);
  const double r1 = std::hypot(x - c, y);
  const double r2 = std::hypot(x + c, y);
  Eigen::Matrix2d jac;  // rows d(xi), d(eta); columns x, y
  jac << (x - c) / r1 + (x + c) / r2, y / r1 + y / r2,
         (x - c) / r1 - (x + c) / r2, y / r1 - y / r2;
  const Eigen::Vector2d p = jac.transpose().partialPivLu().solve(Eigen::Vector2d(px, py));
  return {e.xi, e.eta, p[0], p[1]};
}

double two_center_hamiltonian(const EllipticPhase& s, double c, double k) {
  check_elliptic_domain(s.xi, s.eta, c);
  const double d = s.xi * s.xi - s.eta * s.eta;
  const double c2 = 4.0 * c * c;
  return (2.0 * s.p_xi * s.p_xi * (s.xi * s.xi - c2) + 2.0 * s.p_eta * s.p_eta * (c2 - s.eta * s.eta) -
          4.0 * k * s.xi) / d;
}

double two_center_cartesian_hamiltonian(double x, double y, double px, double py, double c, double k) {
  return 0.5 * (px * px + py * py) - k / std::hypot(x - c, y) - k / std::hypot(x + c, y);
}

LagrangianSystem two_center_system(double c, double k, double r_guard) {
  Guard guard;
  guard.singular_points = {Vec::Zero(2), Vec::Zero(2)};
  guard.singular_points[0][0] = c;
  guard.singular_points[1][0] = -c;
  guard.min_distance = r_guard;
  guard.description = "away from both centres";
  return LagrangianSystem::euclidean({"x", "y"}, 1.0, "-k/sqrt((x-c)^2+y^2) - k/sqrt((x+c)^2+y^2)",
                                     {{"c", c}, {"k", k}}, guard);
}

LagrangianSystem two_center_elliptic_system(double c, double k) {
  return LagrangianSystem::with_metric(
      {"xi", "eta"}, {"(xi^2-eta^2)/(4*(xi^2-4*c^2))", "0", "0", "(xi^2-eta^2)/(4*(4*c^2-eta^2))"},
      "-4*k*xi/(xi^2-eta^2)", {{"c", c}, {"k", k}});
}

namespace {

double xi_numerator(double xi, double C, double c1, double k) { return c1 + C * xi * xi + 4.0 * k * xi; }
double eta_numerator(double eta, double C, double c1) { return -c1 - C * eta * eta; }

void require_allowed(const std::function<double(double)>& numerator, double a, double b) {
  for (int i = 0; i <= 16; ++i) {
    const double s = a + (b - a) * i / 16.0;
    if (numerator(s) < 0.0)
      throw ForbiddenRegionError("separated radicand is negative on the leg", std::min(a, b), std::max(a, b));
  }
}

}  // namespace

double two_center_action(double xi, double eta, double C, double c1, const TwoCenterConfig& cfg) {
  const double c = cfg.c, k = cfg.k;
  check_elliptic_domain(xi, eta, c);
  auto nxi = [&](double s) { return xi_numerator(s, C, c1, k); };
  auto neta = [&](double s) { return eta_numerator(s, C, c1); };
  require_allowed(nxi, 2.0 * c, xi);
  require_allowed(neta, 0.0, eta);
  // xi = 2c + s^2 removes the inverse square root at the anchor.
  const double xi_leg = adaptive_simpson(
      [&](double s) {
        const double z = 2.0 * c + s * s;
        return 2.0 * std::sqrt(std::max(0.0, nxi(z)) / (2.0 * (z + 2.0 * c)));
      },
      0.0, std::sqrt(xi - 2.0 * c), cfg.quad_tol);
  const double eta_leg = adaptive_simpson(
      [&](double z) { return std::sqrt(std::max(0.0, neta(z)) / (2.0 * (4.0 * c * c - z * z))); }, 0.0,
      eta, cfg.quad_tol);
  return xi_leg + eta_leg;
}

HJFamily two_center_family(const TwoCenterConfig& cfg) {
  HJFamily f;
  f.label = "two-center";
  f.dim = 2;
  f.value = [cfg](const Vec& x, const Vec& u) { return two_center_action(x[0], x[1], u[0], u[1], cfg); };
  f.dS_dx = [cfg](const Vec& x, const Vec& u) {
    const double c = cfg.c;
    check_elliptic_domain(x[0], x[1], c);
    const double a = xi_numerator(x[0], u[0], u[1], cfg.k);
    const double b = eta_numerator(x[1], u[0], u[1]);
    if (a < 0.0 || b < 0.0) throw ForbiddenRegionError("separated radicand is negative", x[0], x[1]);
    Vec out(2);
    out << std::sqrt(a / (2.0 * (x[0] * x[0] - 4.0 * c * c))),
           std::sqrt(b / (2.0 * (4.0 * c * c - x[1] * x[1])));
    return out;
  };
  return f;
}

SeparationTrace separation_constants(const Trajectory& traj, double c, double k) {
  SeparationTrace out;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const PhaseState& s = traj.states[i];
    EllipticPhase e{};
    try {
      e = to_elliptic_phase(s.q[0], s.q[1], s.p[0], s.p[1], c);
    } catch (const std::domain_error&) {
      out.truncated = true;
      break;
    }
    const double C = two_center_hamiltonian(e, c, k);
    out.t.push_back(traj.t[i]);
    out.C.push_back(C);
    out.c1.push_back(2.0 * e.p_xi * e.p_xi * (e.xi * e.xi - 4.0 * c * c) - 4.0 * k * e.xi - C * e.xi * e.xi);
  }
  return out;
}

void write_separation_csv(std::ostream& os, const SeparationTrace& trace) {
  CsvWriter csv(os, {"t", "C", "c1"});
  for (std::size_t i = 0; i < trace.t.size(); ++i) {
    const double row[] = {trace.t[i], trace.C[i], trace.c1[i]};
    csv.row(row);
  }
}

}  // namespace noetherlab

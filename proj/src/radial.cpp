#include "noetherlab/radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "noetherlab/quadrature.hpp"

namespace noetherlab {

namespace {

const std::vector<std::string> kRadialVar{"r"};

std::vector<std::string> keys_of(const Binding& b) {
  std::vector<std::string> out;
  for (const auto& [k, v] : b) out.push_back(k);
  return out;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

RadialPotential::RadialPotential(const std::string& text, Binding params)
    : expr_(parse_expression(text, NameSet{kRadialVar, keys_of(params)})), params_(std::move(params)) {}

RadialPotential RadialPotential::newton(double M) { return RadialPotential("-M/r", {{"M", M}}); }

RadialPotential RadialPotential::harmonic(double k) { return RadialPotential("0.5*k*r^2", {{"k", k}}); }

double RadialPotential::value(double r) const {
  const double point[] = {r};
  return jet2(expr_, kRadialVar, point, params_, false).value();
}

double RadialPotential::derivative(double r) const {
  const double point[] = {r};
  return jet2(expr_, kRadialVar, point, params_, false).gradient(0);
}

double v_eff(const RadialPotential& V, double L, double r) {
  if (!(r > 0.0)) throw std::domain_error("v_eff needs r > 0");
  return V.value(r) + L * L / (2.0 * r * r);
}

namespace {

double v_eff_derivative(const RadialPotential& V, double L, double r) {
  return V.derivative(r) - L * L / (r * r * r);
}

// E - V_eff, the kinetic radial energy; positive in allowed regions.
double allowed(const RadialPotential& V, double L, double E, double r) {
  return E - V.value(r) - L * L / (2.0 * r * r);
}

template <typename F>
double bisect(F&& f, double lo, double hi, double rel_tol) {
  double flo = f(lo);
  for (int i = 0; i < 300 && hi - lo > rel_tol * std::abs(0.5 * (lo + hi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> log_grid(const Bracket& b, int n) {
  std::vector<double> r(n);
  const double llo = std::log(b.lo), lhi = std::log(b.hi);
  for (int i = 0; i < n; ++i) r[i] = std::exp(llo + (lhi - llo) * i / (n - 1));
  r.front() = b.lo;
  r.back() = b.hi;
  return r;
}

}  // namespace

KeplerProfile kepler_profile(double M, double L) {
  if (!(M > 0.0) || !(L > 0.0)) throw std::domain_error("kepler_profile needs M, L > 0");
  return {L * L / (2.0 * M), L * L / M, -M * M / (2.0 * L * L)};
}

std::vector<double> turning_points(const RadialPotential& V, double L, double E,
                                   const Bracket& bracket, const TurningPointOptions& options) {
  if (!(bracket.lo > 0.0) || !(bracket.hi > bracket.lo))
    throw std::domain_error("turning_points needs 0 < lo < hi");
  const std::vector<double> r = log_grid(bracket, options.scan_points);
  std::vector<double> g(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) g[i] = allowed(V, L, E, r[i]);

  auto f = [&](double x) { return allowed(V, L, E, x); };
  auto df = [&](double x) { return -v_eff_derivative(V, L, x); };

  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    if (g[i] == 0.0) {
      roots.push_back(r[i]);
      continue;
    }
    if ((g[i] > 0.0 && g[i + 1] < 0.0) || (g[i] < 0.0 && g[i + 1] > 0.0))
      roots.push_back(bisect(f, r[i], r[i + 1], options.root_tol));
  }
  if (g.back() == 0.0) roots.push_back(r.back());

  // Tangent roots: interior extrema of E - V_eff that just touch zero.
  const double tangent = options.tangent_tol * std::max(1.0, std::abs(E));
  for (std::size_t i = 1; i + 1 < r.size(); ++i) {
    const bool peak = g[i] >= g[i - 1] && g[i] >= g[i + 1] && g[i] <= 0.0;
    const bool dip = g[i] <= g[i - 1] && g[i] <= g[i + 1] && g[i] >= 0.0;
    if (!peak && !dip) continue;
    const double lo = r[i - 1], hi = r[i + 1];
    if ((df(lo) > 0) == (df(hi) > 0)) continue;
    const double x = bisect(df, lo, hi, options.root_tol);
    if (std::abs(f(x)) <= tangent) roots.push_back(x);
  }

  std::sort(roots.begin(), roots.end());
  std::vector<double> out;
  for (double x : roots)
    if (out.empty() || x - out.back() > 1e-9 * x) out.push_back(x);
  return out;
}

const char* to_string(OrbitClass c) {
  switch (c) {
    case OrbitClass::bounded: return "bounded";
    case OrbitClass::unbounded: return "unbounded";
    case OrbitClass::circular: return "circular";
    case OrbitClass::collision: return "collision";
    case OrbitClass::forbidden: return "forbidden";
  }
  return "?";
}

EffectiveProfile effective_profile(const RadialPotential& V, double L, double E,
                                   const Bracket& bracket, const TurningPointOptions& options) {
  EffectiveProfile out;
  out.L = L;
  out.E = E;
  out.turning_points = turning_points(V, L, E, bracket, options);
  std::vector<double> edges{bracket.lo};
  edges.insert(edges.end(), out.turning_points.begin(), out.turning_points.end());
  edges.push_back(bracket.hi);

  bool enclosed = false, low_open = false, high_open = false;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (edges[i + 1] <= edges[i]) continue;
    const double mid = std::sqrt(edges[i] * edges[i + 1]);
    if (!(allowed(V, L, E, mid) > 0.0)) continue;
    const bool left_root = i > 0, right_root = i + 2 < edges.size();
    if (left_root && right_root) enclosed = true;
    if (!left_root) low_open = true;
    if (!right_root) high_open = true;
  }
  if (enclosed)
    out.classification = OrbitClass::bounded;
  else if (low_open)
    out.classification = OrbitClass::collision;
  else if (high_open)
    out.classification = OrbitClass::unbounded;
  else if (!out.turning_points.empty())
    out.classification = OrbitClass::circular;
  else
    out.classification = OrbitClass::forbidden;
  return out;
}

KeplerElements kepler_elements(double M, double L, double E) {
  const KeplerProfile prof = kepler_profile(M, L);
  const double slack = 1e-14 * std::abs(prof.f_min);
  if (E < prof.f_min - slack)
    throw InfeasibleError("energy below the circular-orbit minimum " + std::to_string(prof.f_min));
  KeplerElements k;
  k.M = M;
  k.L = L;
  k.E = E;
  k.p = L * L / M;
  // Positive roots of r^2 + (M/E) r - L^2/(2E) = 0.
  const double disc = std::sqrt(std::max(0.0, 1.0 + 2.0 * L * L * E / (M * M)));
  if (E < 0.0) {
    k.r_per = M / (2.0 * std::abs(E)) * (1.0 - disc);
    k.r_aph = M / (2.0 * std::abs(E)) * (1.0 + disc);
  } else if (E > 0.0) {
    k.r_per = M / (2.0 * E) * (-1.0 + disc);
    k.r_aph = kInf;
  } else {
    k.r_per = L * L / (2.0 * M);
    k.r_aph = kInf;
  }
  k.eps = std::max(0.0, k.p / k.r_per - 1.0);
  if (k.bound()) {
    const double one_minus = 1.0 - k.eps * k.eps;
    k.a = k.p / one_minus;
    k.b = k.p / std::sqrt(one_minus);
    k.c = k.a * k.eps;
    k.T = kepler_period(M, k.a);
  } else {
    k.a = k.b = k.c = k.T = kInf;
  }
  return k;
}

double kepler_period(double M, double a) {
  return 2.0 * std::numbers::pi * std::pow(a, 1.5) / std::sqrt(M);
}

OrbitTrace orbit_trace(const KeplerElements& elements, const std::vector<double>& phis) {
  OrbitTrace out;
  for (double phi : phis) {
    const double denom = 1.0 + elements.eps * std::cos(phi);
    if (!(denom > 0.0)) {
      out.skipped.push_back(phi);
      continue;
    }
    const double r = elements.p / denom;
    out.samples.push_back({phi, r, r * std::cos(phi), r * std::sin(phi)});
  }
  return out;
}

namespace {

double radial_quadrature(const RadialPotential& V, double L, double E, double r_a, double r_b,
                         const QuadratureOptions& options, bool angle) {
  if (r_a == r_b) return 0.0;
  if (angle && L == 0.0) return 0.0;
  const double lo = std::max(std::min(r_a, r_b), options.r_guard);
  const double hi = std::max(r_a, r_b);
  if (!(hi > lo)) return 0.0;
  const Radicand g = [&](double r) {
    return std::pair{2.0 * allowed(V, L, E, r), -2.0 * v_eff_derivative(V, L, r)};
  };
  const auto h = [&](double r) { return angle ? L / (r * r) : 1.0; };
  return integrate_over_sqrt(h, g, lo, hi, options.quad_tol);
}

}  // namespace

double t_of_r(const RadialPotential& V, double L, double E, double r_a, double r_b,
              const QuadratureOptions& options) {
  return radial_quadrature(V, L, E, r_a, r_b, options, false);
}

double phi_of_r(const RadialPotential& V, double L, double E, double r_a, double r_b,
                const QuadratureOptions& options) {
  return radial_quadrature(V, L, E, r_a, r_b, options, true);
}

SweptArea::SweptArea(const Trajectory& traj) : t_(traj.t), cumulative_(traj.size(), 0.0) {
  if (traj.size() == 0) throw std::invalid_argument("swept_area needs a non-empty trajectory");
  auto position = [&](std::size_t k) {
    Eigen::Vector3d v = Eigen::Vector3d::Zero();
    const Vec& q = traj.states[k].q;
    for (Eigen::Index i = 0; i < std::min<Eigen::Index>(3, q.size()); ++i) v[i] = q[i];
    return v;
  };
  Eigen::Vector3d prev = position(0);
  if (prev.norm() == 0.0) throw std::domain_error("trajectory passes through the origin");
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const Eigen::Vector3d cur = position(k);
    if (cur.norm() == 0.0) throw std::domain_error("trajectory passes through the origin");
    cumulative_[k] = cumulative_[k - 1] + 0.5 * prev.cross(cur).norm();
    prev = cur;
  }
}

double SweptArea::at(double t) const {
  if (t <= t_.front()) return cumulative_.front();
  if (t >= t_.back()) return cumulative_.back();
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - t_.begin());
  const double w = (t - t_[k - 1]) / (t_[k] - t_[k - 1]);
  return cumulative_[k - 1] + w * (cumulative_[k] - cumulative_[k - 1]);
}

SweptArea swept_area(const Trajectory& traj) { return SweptArea(traj); }

std::optional<double> measure_period(const Trajectory& traj, const LagrangianSystem& sys) {
  if (traj.size() < 3) return std::nullopt;
  std::vector<double> rdot(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const VelocityState v = to_velocities(sys, traj.states[k]);
    rdot[k] = v.q.dot(v.qdot) / v.q.norm();
  }
  // Event times of sign changes of dr/dt; kind +1 for - to +, -1 for + to -.
  std::vector<std::pair<int, double>> events;
  const double speed = to_velocities(sys, traj.states[0]).qdot.norm();
  if (std::abs(rdot[0]) <= 1e-14 * std::max(speed, 1.0) && rdot[1] != 0.0)
    events.emplace_back(rdot[1] > 0 ? 1 : -1, traj.t[0]);
  for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
    const double a = rdot[k], b = rdot[k + 1];
    if ((a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0)) {
      if (k == 0 && !events.empty()) continue;
      const double w = a / (a - b);
      events.emplace_back(a < 0.0 ? 1 : -1, traj.t[k] + w * (traj.t[k + 1] - traj.t[k]));
    }
  }
  for (std::size_t i = 0; i < events.size(); ++i)
    for (std::size_t j = i + 1; j < events.size(); ++j)
      if (events[j].first == events[i].first) return events[j].second - events[i].second;
  return std::nullopt;
}

double minimize_v_eff(const RadialPotential& V, double L, const Bracket& bracket) {
  const std::vector<double> r = log_grid(bracket, 2000);
  auto d = [&](double x) { return v_eff_derivative(V, L, x); };
  double prev = d(r[0]);
  for (std::size_t i = 1; i < r.size(); ++i) {
    const double cur = d(r[i]);
    if (prev < 0.0 && cur >= 0.0) return bisect(d, r[i - 1], r[i], 1e-15);
    prev = cur;
  }
  throw std::domain_error("V_eff has no minimum in the bracket");
}

}  // namespace noetherlab

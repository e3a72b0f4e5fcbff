#include "noetherlab/mechsys.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace noetherlab {

Guard Guard::around_origin(std::size_t dim, double r_guard) {
  Guard g;
  g.singular_points.push_back(Vec::Zero(static_cast<Eigen::Index>(dim)));
  g.min_distance = r_guard;
  char buf[64];
  std::snprintf(buf, sizeof buf, "r > %g", r_guard);
  g.description = buf;
  return g;
}

bool Guard::admits(const Vec& q) const {
  if (!q.allFinite()) return false;
  for (const Vec& c : singular_points)
    if ((q - c).norm() < min_distance) return false;
  return true;
}

double det_tolerance(const Mat& m) {
  const double norm = m.rows() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff();
  return 1e-10 * std::pow(norm, static_cast<double>(m.rows()));
}

namespace {

std::vector<std::string> velocity_names(const std::vector<std::string>& coordinates) {
  std::vector<std::string> out;
  out.reserve(coordinates.size());
  for (const auto& c : coordinates) out.push_back(c + "dot");
  return out;
}

std::vector<std::string> keys_of(const Binding& b) {
  std::vector<std::string> out;
  for (const auto& [k, v] : b) out.push_back(k);
  return out;
}

}  // namespace

void LagrangianSystem::finish() {
  velocities_ = velocity_names(coordinates_);
  jet_vars_ = coordinates_;
  jet_vars_.insert(jet_vars_.end(), velocities_.begin(), velocities_.end());
}

LagrangianSystem LagrangianSystem::euclidean(std::vector<std::string> coordinates, double mass,
                                             const std::string& potential, Binding params,
                                             Guard guard) {
  if (!(mass > 0.0)) throw std::invalid_argument("mass must be positive");
  LagrangianSystem sys;
  sys.kinetic_ = Kinetic::euclidean;
  sys.mass_ = mass;
  sys.coordinates_ = std::move(coordinates);
  sys.params_ = std::move(params);
  sys.guard_ = std::move(guard);
  sys.finish();
  const NameSet names{sys.coordinates_, keys_of(sys.params_)};
  sys.potential_ = parse_expression(potential, names);
  Expr kinetic;
  for (std::size_t i = 0; i < sys.dim(); ++i) {
    Expr sq = Expr::binary(BinaryOp::pow, Expr::variable(sys.velocities_[i]), Expr::literal(2.0));
    kinetic = i == 0 ? sq : kinetic + sq;
  }
  sys.lagrangian_ = Expr::literal(0.5 * mass) * kinetic - sys.potential_;
  return sys;
}

LagrangianSystem LagrangianSystem::with_metric(std::vector<std::string> coordinates,
                                               const std::vector<std::string>& metric,
                                               const std::string& potential, Binding params,
                                               Guard guard) {
  LagrangianSystem sys;
  sys.kinetic_ = Kinetic::metric;
  sys.coordinates_ = std::move(coordinates);
  sys.params_ = std::move(params);
  sys.guard_ = std::move(guard);
  sys.finish();
  const std::size_t n = sys.dim();
  if (metric.size() != n * n)
    throw std::invalid_argument("metric needs " + std::to_string(n * n) + " entries");
  const NameSet names{sys.coordinates_, keys_of(sys.params_)};
  for (const auto& text : metric) sys.metric_.push_back(parse_expression(text, names));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (!sys.metric_[i * n + j].structurally_equal(sys.metric_[j * n + i]))
        throw std::invalid_argument("metric entries g" + std::to_string(i + 1) +
                                    std::to_string(j + 1) + " and g" + std::to_string(j + 1) +
                                    std::to_string(i + 1) + " differ");
  sys.potential_ = parse_expression(potential, names);
  Expr kinetic;
  bool first = true;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      Expr term = sys.metric_[i * n + j] * Expr::variable(sys.velocities_[i]) *
                  Expr::variable(sys.velocities_[j]);
      if (i != j) term = Expr::literal(2.0) * term;
      kinetic = first ? term : kinetic + term;
      first = false;
    }
  }
  sys.lagrangian_ = Expr::literal(0.5) * kinetic - sys.potential_;
  return sys;
}

LagrangianSystem LagrangianSystem::general(std::vector<std::string> coordinates,
                                           const std::string& lagrangian, Binding params,
                                           Guard guard) {
  LagrangianSystem sys;
  sys.kinetic_ = Kinetic::general;
  sys.coordinates_ = std::move(coordinates);
  sys.params_ = std::move(params);
  sys.guard_ = std::move(guard);
  sys.finish();
  const NameSet names{sys.jet_vars_, keys_of(sys.params_)};
  sys.lagrangian_ = parse_expression(lagrangian, names);
  return sys;
}

bool LagrangianSystem::has_constant_metric() const {
  switch (kinetic_) {
    case Kinetic::euclidean: return true;
    case Kinetic::metric:
      for (const auto& g : metric_)
        if (!g.is_constant_in(coordinates_)) return false;
      return true;
    case Kinetic::general: return false;
  }
  return false;
}

LagrangianSystem LagrangianSystem::with_params(const Binding& overrides) const {
  LagrangianSystem copy = *this;
  for (const auto& [k, v] : overrides) {
    if (copy.params_.find(k) == copy.params_.end())
      throw std::invalid_argument("unknown parameter '" + k + "'");
    copy.params_[k] = v;
  }
  return copy;
}

Mat LagrangianSystem::metric(const Vec& q) const {
  const auto n = static_cast<Eigen::Index>(dim());
  switch (kinetic_) {
    case Kinetic::euclidean: return mass_ * Mat::Identity(n, n);
    case Kinetic::metric: {
      Binding b = params_;
      for (Eigen::Index i = 0; i < n; ++i) b[coordinates_[i]] = q[i];
      Mat g(n, n);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) g(i, j) = g(j, i) = eval(metric_[i * n + j], b);
      return g;
    }
    case Kinetic::general: {
      const SecondOrderJet jet = lagrangian_jet(q, Vec::Zero(n));
      Mat g(n, n);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) g(i, j) = jet.hessian(n + i, n + j);
      return g;
    }
  }
  return {};
}

std::vector<Mat> LagrangianSystem::metric_derivatives(const Vec& q) const {
  const auto n = static_cast<Eigen::Index>(dim());
  std::vector<Mat> out(dim(), Mat::Zero(n, n));
  if (kinetic_ == Kinetic::euclidean) return out;
  if (kinetic_ == Kinetic::general)
    throw std::logic_error("metric derivatives need a metric system");
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const SecondOrderJet jet = jet2(metric_[i * n + j], coordinates_, as_span(q), params_, false);
      for (Eigen::Index k = 0; k < n; ++k) out[k](i, j) = out[k](j, i) = jet.gradient(k);
    }
  }
  return out;
}

SecondOrderJet LagrangianSystem::potential_jet(const Vec& q, bool with_hessian) const {
  return jet2(potential_, coordinates_, as_span(q), params_, with_hessian);
}

SecondOrderJet LagrangianSystem::lagrangian_jet(const Vec& q, const Vec& qdot,
                                                bool with_hessian) const {
  Vec point(q.size() + qdot.size());
  point << q, qdot;
  return jet2(lagrangian_, jet_vars_, as_span(point), params_, with_hessian);
}

std::string LagrangianSystem::fingerprint() const {
  std::ostringstream os;
  os << (kinetic_ == Kinetic::euclidean ? "euclidean" : kinetic_ == Kinetic::metric ? "metric" : "general")
     << " n=" << dim() << " L=" << lagrangian_.to_string();
  for (const auto& [k, v] : params_) os << ' ' << k << '=' << v;
  return os.str();
}

// ---------------------------------------------------------------------------

namespace {

void require_admissible(const LagrangianSystem& sys, const Vec& q) {
  if (static_cast<std::size_t>(q.size()) != sys.dim())
    throw std::invalid_argument("state dimension does not match the system");
  if (!sys.admissible(q)) throw InadmissibleError("state outside the admissible set");
}

Mat checked_metric(const LagrangianSystem& sys, const Vec& q) {
  Mat g = sys.metric(q);
  const double det = g.determinant();
  if (!(std::abs(det) >= det_tolerance(g)) || det == 0.0)
    throw DegeneracyError("metric is singular at q (det = " + std::to_string(det) + ")");
  return g;
}

Mat velocity_hessian(const SecondOrderJet& jet, std::size_t n) {
  Mat h(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h(i, j) = jet.hessian(n + i, n + j);
  return h;
}

}  // namespace

Christoffel christoffel(const LagrangianSystem& sys, const Vec& q) {
  require_admissible(sys, q);
  const std::size_t n = sys.dim();
  Christoffel gamma(n);
  if (sys.kinetic() == LagrangianSystem::Kinetic::euclidean) return gamma;
  const Mat g = checked_metric(sys, q);
  const Mat ginv = g.inverse();
  const std::vector<Mat> dg = sys.metric_derivatives(q);
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = j; k < n; ++k) {
        double sum = 0.0;
        for (std::size_t m = 0; m < n; ++m)
          sum += ginv(l, m) * (dg[j](m, k) + dg[k](m, j) - dg[m](j, k));
        gamma.at(l, j, k) = 0.5 * sum;
      }
    }
  }
  return gamma;
}

double lagrangian_value(const LagrangianSystem& sys, const VelocityState& s) {
  require_admissible(sys, s.q);
  return sys.lagrangian_jet(s.q, s.qdot, false).value();
}

double energy(const LagrangianSystem& sys, const VelocityState& s) {
  require_admissible(sys, s.q);
  const SecondOrderJet jet = sys.lagrangian_jet(s.q, s.qdot, false);
  const std::size_t n = sys.dim();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += s.qdot[i] * jet.gradient(n + i);
  return sum - jet.value();
}

PhaseState to_momenta(const LagrangianSystem& sys, const VelocityState& s) {
  require_admissible(sys, s.q);
  const SecondOrderJet jet = sys.lagrangian_jet(s.q, s.qdot, false);
  const std::size_t n = sys.dim();
  PhaseState out{s.q, Vec(n)};
  for (std::size_t i = 0; i < n; ++i) out.p[i] = jet.gradient(n + i);
  return out;
}

VelocityState to_velocities(const LagrangianSystem& sys, const PhaseState& s) {
  require_admissible(sys, s.q);
  const std::size_t n = sys.dim();
  if (sys.kinetic() == LagrangianSystem::Kinetic::euclidean) return {s.q, s.p / sys.mass()};
  if (sys.has_metric()) {
    const Mat g = checked_metric(sys, s.q);
    return {s.q, g.partialPivLu().solve(s.p)};
  }
  // General Lagrangian: Newton on dL/dqdot(q, v) = p.
  Vec v = Vec::Zero(n);
  const double scale = std::max(1.0, s.p.lpNorm<Eigen::Infinity>());
  double residual = 0.0;
  for (int iter = 0; iter < 50; ++iter) {
    const SecondOrderJet jet = sys.lagrangian_jet(s.q, v);
    Vec f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = jet.gradient(n + i) - s.p[i];
    residual = f.lpNorm<Eigen::Infinity>();
    if (residual <= 1e-13 * scale) return {s.q, v};
    const Mat h = velocity_hessian(jet, n);
    const double det = h.determinant();
    if (det == 0.0 || std::abs(det) < det_tolerance(h))
      throw DegeneracyError("Lagrangian Hessian in the velocities is singular");
    v -= h.partialPivLu().solve(f);
  }
  throw ConvergenceError("velocity inversion did not converge", residual);
}

double hamiltonian(const LagrangianSystem& sys, const PhaseState& s) {
  require_admissible(sys, s.q);
  if (sys.has_metric()) {
    const Mat g = checked_metric(sys, s.q);
    const Vec v = sys.kinetic() == LagrangianSystem::Kinetic::euclidean
                      ? Vec(s.p / sys.mass())
                      : Vec(g.partialPivLu().solve(s.p));
    return 0.5 * s.p.dot(v) + sys.potential_jet(s.q, false).value();
  }
  return energy(sys, to_velocities(sys, s));
}

NondegeneracyReport nondegeneracy_report(const LagrangianSystem& sys, const VelocityState& s) {
  const std::size_t n = sys.dim();
  const Mat h = velocity_hessian(sys.lagrangian_jet(s.q, s.qdot), n);
  NondegeneracyReport r;
  r.det = h.determinant();
  r.invertible = r.det != 0.0 && std::abs(r.det) >= det_tolerance(h);
  const Eigen::JacobiSVD<Mat> svd(h);
  const Vec sv = svd.singularValues();
  const double smin = sv.size() ? sv[sv.size() - 1] : 0.0;
  r.condition = smin > 0.0 ? sv[0] / smin : std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace noetherlab

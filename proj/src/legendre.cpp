#include <cmath>

#include "noetherlab/mechsys.hpp"

namespace noetherlab {

namespace {

Mat hessian_of(const SecondOrderJet& jet) {
  const std::size_t n = jet.dim();
  Mat h(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h(i, j) = jet.hessian(i, j);
  return h;
}

Vec gradient_of(const SecondOrderJet& jet) {
  Vec g(jet.dim());
  for (std::size_t i = 0; i < jet.dim(); ++i) g[i] = jet.gradient(i);
  return g;
}

}  // namespace

LegendreResult legendre_transform(const JetFunction& f, const Vec& y, const Vec& x_guess,
                                  const LegendreOptions& options) {
  if (y.size() != x_guess.size()) throw std::invalid_argument("legendre_transform: dimension mismatch");
  // Newton on the convex merit phi(x) = f(x) - <y, x>, whose gradient is the
  // residual grad f(x) - y.
  const double scale = std::max(1.0, y.lpNorm<Eigen::Infinity>());
  Vec x = x_guess;
  SecondOrderJet jet = f(as_span(x));
  double residual = 0.0;
  for (int iter = 0; iter <= options.max_iter; ++iter) {
    const Vec g = gradient_of(jet) - y;
    residual = g.lpNorm<Eigen::Infinity>();
    if (residual <= options.tolerance * scale) {
      return {x, y.dot(x) - jet.value(), iter, residual};
    }
    if (iter == options.max_iter) break;
    const Mat h = hessian_of(jet);
    const Eigen::LLT<Mat> llt(h);
    if (llt.info() != Eigen::Success)
      throw DomainError("legendre_transform: Hessian is not positive definite");
    const Vec step = -llt.solve(g);
    const double phi0 = jet.value() - y.dot(x);
    const double slope = g.dot(step);
    double alpha = 1.0;
    SecondOrderJet trial = f(as_span(Vec(x + step)));
    while (alpha > 1e-10) {
      const Vec xt = x + alpha * step;
      if (alpha != 1.0) trial = f(as_span(xt));
      const double phi = trial.value() - y.dot(xt);
      if (std::isfinite(phi) && phi <= phi0 + 1e-4 * alpha * slope) break;
      alpha *= 0.5;
    }
    // Near the solution the merit is flat to round-off; take the full step.
    if (alpha <= 1e-10) {
      alpha = 1.0;
      trial = f(as_span(Vec(x + step)));
    }
    x += alpha * step;
    jet = std::move(trial);
  }
  throw ConvergenceError("legendre_transform: Newton did not converge (residual " +
                             std::to_string(residual) + ")",
                         residual);
}

JetFunction as_jet_function(const Expr& f, std::vector<std::string> vars, Binding params) {
  return [f, vars = std::move(vars), params = std::move(params)](std::span<const double> x) {
    return jet2(f, vars, x, params);
  };
}

LegendreResult legendre_transform(const Expr& f, const std::vector<std::string>& vars,
                                  const Binding& params, const Vec& y, const Vec& x_guess,
                                  const LegendreOptions& options) {
  return legendre_transform(as_jet_function(f, vars, params), y, x_guess, options);
}

JetFunction legendre_dual(JetFunction f, Vec x_guess, LegendreOptions options) {
  return [f = std::move(f), x_guess = std::move(x_guess), options](std::span<const double> ys) {
    const Vec y = Eigen::Map<const Vec>(ys.data(), static_cast<Eigen::Index>(ys.size()));
    const LegendreResult r = legendre_transform(f, y, x_guess, options);
    const Mat hinv = hessian_of(f(as_span(r.x_star))).inverse();
    const std::size_t n = ys.size();
    SecondOrderJet out(n, r.f_tilde);
    for (std::size_t i = 0; i < n; ++i) {
      out.gradient()[i] = r.x_star[i];
      for (std::size_t j = i; j < n; ++j) out.set_hessian(i, j, 0.5 * (hinv(i, j) + hinv(j, i)));
    }
    return out;
  };
}

}  // namespace noetherlab

#include "noetherlab/quadrature.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace noetherlab {

namespace {

struct Simpson {
  const std::function<double(double)>& f;
  mutable long budget = 4'000'000;

  double recurse(double a, double b, double fa, double fm, double fb, double whole, double tol,
                 int depth) const {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    budget -= 2;
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || budget <= 0 || !std::isfinite(delta) || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
  }
};

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, int max_depth) {
  if (a == b) return 0.0;
  // A coarse composite pass sets the absolute scale for the tolerance.
  constexpr int panels = 16;
  const double h = (b - a) / panels;
  std::vector<double> fx(2 * panels + 1);
  for (int i = 0; i <= 2 * panels; ++i) fx[i] = f(a + 0.5 * h * i);
  double scale = 0.0;
  for (int i = 0; i < panels; ++i)
    scale += std::abs(h / 6.0 * (fx[2 * i] + 4.0 * fx[2 * i + 1] + fx[2 * i + 2]));
  const double tol = rel_tol * std::max(scale, 1e-300) / panels;
  Simpson s{f};
  double total = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double lo = a + h * i;
    const double whole = h / 6.0 * (fx[2 * i] + 4.0 * fx[2 * i + 1] + fx[2 * i + 2]);
    total += s.recurse(lo, lo + h, fx[2 * i], fx[2 * i + 1], fx[2 * i + 2], whole, tol, max_depth);
  }
  return total;
}

double integrate_over_sqrt(const std::function<double(double)>& h, const Radicand& g, double a,
                           double b, double rel_tol) {
  if (a == b) return 0.0;
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  const double width = b - a;
  const double mid = 0.5 * (a + b);

  // A radicand within round-off of zero at an endpoint marks a turning point;
  // its residual value is subtracted so the zero is exact.
  const double interior = std::abs(g(mid).first);
  auto endpoint_offset = [&](double r) {
    const auto [value, slope] = g(r);
    const double scale = std::max(std::min(std::abs(slope) * width, interior), 1e-300);
    return std::abs(value) <= 1e-9 * scale ? value : 0.0;
  };
  const double offset_a = endpoint_offset(a);
  const double offset_b = endpoint_offset(b);

  for (int i = 1; i < 8; ++i) {
    const double r = a + width * i / 8.0;
    const double v = g(r).first;
    if (!(v > 0.0))
      throw ForbiddenRegionError("radicand is not positive at r = " + std::to_string(r), a, b);
  }

  // Half-interval from an endpoint e toward mid: r = e + dir * u^2.
  auto leg = [&](double e, double dir, double offset) {
    const double umax = std::sqrt(std::abs(mid - e));
    const auto [g0, slope0] = g(e);
    const bool turning = offset != 0.0 || g0 == 0.0;
    const double d_dir = dir * slope0;  // derivative of G along the leg
    const double small = 1e-9 * width;
    auto integrand = [&, e, dir, offset, turning, d_dir](double u) {
      const double u2 = u * u;
      if (turning) {
        if (u2 <= small) {
          if (!(d_dir > 0.0)) return std::numeric_limits<double>::quiet_NaN();
          return 2.0 * h(e) / std::sqrt(d_dir);
        }
        const double r = e + dir * u2;
        const double gv = g(r).first - offset;
        return 2.0 * u * h(r) / std::sqrt(gv);
      }
      if (u == 0.0) return 0.0;
      const double r = e + dir * u2;
      return 2.0 * u * h(r) / std::sqrt(g(r).first);
    };
    const double value = adaptive_simpson(integrand, 0.0, umax, rel_tol);
    if (!std::isfinite(value))
      throw ForbiddenRegionError("integrand is not finite near r = " + std::to_string(e), a, b);
    return value;
  };

  return sign * (leg(a, 1.0, offset_a) + leg(b, -1.0, offset_b));
}

}  // namespace noetherlab

#ifndef NOETHERLAB_QUADRATURE_HPP
#define NOETHERLAB_QUADRATURE_HPP

#include <functional>
#include <stdexcept>
#include <utility>

namespace noetherlab {

/// The radicand of an endpoint-singular integral went negative inside the
/// interval.
class ForbiddenRegionError : public std::domain_error {
 public:
  ForbiddenRegionError(const std::string& what, double a, double b)
      : std::domain_error(what), a_(a), b_(b) {}
  double lower() const { return a_; }
  double upper() const { return b_; }

 private:
  double a_;
  double b_;
};

/// Adaptive Simpson with Richardson acceptance, relative tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, int max_depth = 48);

/// Value and first derivative of a radicand G(r).
using Radicand = std::function<std::pair<double, double>(double)>;

/// Integral of h(r) / sqrt(G(r)) over [a, b] where G may have simple zeros
/// at either endpoint. Each half of the interval is mapped through
/// r = endpoint +- u^2, which removes the inverse square root.
double integrate_over_sqrt(const std::function<double(double)>& h, const Radicand& g, double a,
                           double b, double rel_tol);

}  // namespace noetherlab

#endif  // NOETHERLAB_QUADRATURE_HPP

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "noetherlab/hamjac.hpp"
#include "noetherlab/quadrature.hpp"

using namespace noetherlab;

namespace {

Vec v(std::initializer_list<double> xs) {
  Vec out(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) out[i++] = x;
  return out;
}

double free_h(const Vec&, const Vec& p) { return 0.5 * p.squaredNorm(); }

// Points with C = -0.5, c1 = -0.5 in the allowed region.
std::vector<Vec> two_center_grid() {
  std::vector<Vec> out;
  for (double xi : {2.3, 2.8, 3.4})
    for (double eta : {-0.6, 0.1, 0.5}) out.push_back(v({xi, eta}));
  return out;
}

}  // namespace

TEST_SUITE("hamjac") {

TEST_CASE("plane waves solve the free equation") {
  const HJFamily f = HJFamily::from_expr("a*x + b*y", {"x", "y"}, {"a", "b"});
  std::vector<Vec> xs, us;
  for (double x : {-1.0, 0.0, 2.0})
    for (double y : {-0.5, 1.5}) xs.push_back(v({x, y}));
  us = {v({1, 0}), v({0.3, -2})};
  const HJResidual r = hj_residual(free_h, f, xs, us);
  CHECK(r.max <= 1e-14);
  CHECK(r.evaluated == xs.size() * us.size());
  CHECK(r.skipped == 0);
  CHECK(f.dS_dx(v({3, 4}), v({0.3, -2})).isApprox(v({0.3, -2})));
  CHECK(f.dS_du(v({3, 4}), v({0.3, -2})).isApprox(v({3, 4})));
  CHECK(f.mixed(v({3, 4}), v({0.3, -2})).isApprox(Mat::Identity(2, 2)));
}

TEST_CASE("a family that is not a solution has a spread") {
  const HJFamily f = HJFamily::from_expr("a*x^2", {"x"}, {"a"});
  const HJResidual r = hj_residual(free_h, f, {v({1}), v({2})}, {v({1})});
  CHECK(r.max == doctest::Approx(6.0));
}

TEST_CASE("system overload agrees with the hamiltonian") {
  const auto sys = LagrangianSystem::euclidean({"x", "y"}, 1.0, "0");
  const HJFamily f = HJFamily::from_expr("a*x + b*y", {"x", "y"}, {"a", "b"});
  CHECK(hj_residual(sys, f, {v({0, 0}), v({1, 1})}, {v({1, 2})}).max <= 1e-14);
}

TEST_CASE("mixed partials by differences") {
  const HJFamily exact = HJFamily::from_expr("sin(x)*u + x*u^2", {"x"}, {"u"});
  HJFamily numeric = exact;
  numeric.mixed = nullptr;
  const Vec x = v({0.4}), u = v({1.3});
  CHECK(std::abs(mixed_partials(numeric, x, u)(0, 0) - exact.mixed(x, u)(0, 0)) <= 1e-7);
  CHECK(mixed_partials(exact, x, u)(0, 0) == exact.mixed(x, u)(0, 0));
}

TEST_CASE("nondegeneracy is the smallest determinant magnitude") {
  const HJFamily f = HJFamily::from_expr("a*x + b*y", {"x", "y"}, {"a", "b"});
  CHECK(family_nondegeneracy(f, {{v({0, 0}), v({1, 1})}}) == doctest::Approx(1.0));
  const HJFamily g = HJFamily::from_expr("a*x + a*y", {"x", "y"}, {"a", "b"});
  CHECK(family_nondegeneracy(g, {{v({0, 0}), v({1, 1})}}) == doctest::Approx(0.0));
}

TEST_CASE("free particle motion from the family") {
  const HJFamily f = HJFamily::from_expr("a*x + b*y", {"x", "y"}, {"a", "b"});
  // H~(u) = |u|^2 / 2, so x(t) = a + u t.
  const auto grad = [](const Vec& u) { return u; };
  const Vec x = reconstruct_motion(f, grad, v({0.5, -1}), v({1, 2}), 3.0, v({0, 0}));
  CHECK((x - v({2.5, -1})).norm() <= 1e-10);
}

TEST_CASE("kepler radial family") {
  const HJFamily f = kepler_radial_family(1.0, 1.0);
  const auto sys = kepler_polar_system(1.0);
  std::vector<Vec> xs;
  for (double r : {1.2, 1.6, 2.5})
    for (double phi : {0.0, 1.0}) xs.push_back(v({r, phi}));
  const HJResidual r = hj_residual(sys, f, xs, {v({-0.25, 1.0}), v({-0.3, 0.9})});
  CHECK(r.max <= 1e-12);
  CHECK(r.skipped == 0);
  // Outside the allowed region the point is skipped, not fatal.
  const HJResidual s = hj_residual(sys, f, {v({10.0, 0.0}), v({1.5, 0.0})}, {v({-0.25, 1.0})});
  CHECK(s.skipped == 1);
  CHECK(f.value(v({1.0, 0.7}), v({-0.25, 1.0})) == doctest::Approx(0.7));
}

TEST_CASE("elliptic coordinates round trip") {
  const double c = 1.0;
  for (auto [x, y] : {std::pair{0.3, 0.8}, std::pair{-2.0, 1.5}, std::pair{0.0, 0.2}, std::pair{1.7, -0.4}}) {
    const EllipticPoint e = elliptic_coords(x, y, c);
    CHECK(e.xi >= 2 * c);
    CHECK(std::abs(e.eta) <= 2 * c);
    const auto [xb, yb] = elliptic_inverse(e.xi, e.eta, c, y > 0);
    CHECK(std::abs(xb - x) <= 1e-12);
    CHECK(std::abs(yb - y) <= 1e-12);
  }
  CHECK_THROWS(elliptic_coords(0.5, 0.0, c));
  CHECK_THROWS(elliptic_coords(1.0, 0.0, c));
  CHECK_THROWS(elliptic_coords(0.5, 0.5, 0.0));
}

TEST_CASE("elliptic metric matches the pulled back euclidean metric") {
  const double c = 1.3, xi = 3.1, eta = 0.7, h = 1e-6;
  const auto [gxx, gee] = elliptic_metric(xi, eta, c);
  const auto d = [&](double dxi, double deta) {
    const auto [xp, yp] = elliptic_inverse(xi + dxi, eta + deta, c);
    const auto [xm, ym] = elliptic_inverse(xi - dxi, eta - deta, c);
    return std::pair{(xp - xm) / (2 * h), (yp - ym) / (2 * h)};
  };
  const auto [x_xi, y_xi] = d(h, 0);
  const auto [x_eta, y_eta] = d(0, h);
  CHECK(std::abs(x_xi * x_xi + y_xi * y_xi - gxx) <= 1e-8);
  CHECK(std::abs(x_eta * x_eta + y_eta * y_eta - gee) <= 1e-8);
  CHECK(std::abs(x_xi * x_eta + y_xi * y_eta) <= 1e-8);
}

TEST_CASE("two-center hamiltonian in both charts") {
  const double c = 1.0, k = 1.0;
  const double x = 0.2, y = 2.0, px = 0.6, py = 0.1;
  const EllipticPhase s = to_elliptic_phase(x, y, px, py, c);
  CHECK(std::abs(two_center_hamiltonian(s, c, k) - two_center_cartesian_hamiltonian(x, y, px, py, c, k)) <= 1e-12);
  const auto ell = two_center_elliptic_system(c, k);
  CHECK(std::abs(hamiltonian(ell, {v({s.xi, s.eta}), v({s.p_xi, s.p_eta})}) - two_center_hamiltonian(s, c, k)) <=
        1e-12);
  const auto cart = two_center_system(c, k);
  CHECK(std::abs(hamiltonian(cart, {v({x, y}), v({px, py})}) -
                 two_center_cartesian_hamiltonian(x, y, px, py, c, k)) <= 1e-12);
  CHECK_FALSE(cart.admissible(v({1.0, 0.0})));
}

TEST_CASE("two-center family solves the separated equation") {
  const TwoCenterConfig cfg;
  const HJFamily f = two_center_family(cfg);
  const auto ell = two_center_elliptic_system(cfg.c, cfg.k);
  const HJResidual r = hj_residual(ell, f, two_center_grid(), {v({-0.5, -0.5}), v({-0.4, -0.6})});
  CHECK(r.skipped == 0);
  CHECK(r.max <= 1e-12);
  // H equals C on the family.
  const Vec p = f.dS_dx(v({2.8, 0.1}), v({-0.5, -0.5}));
  CHECK(hamiltonian(ell, {v({2.8, 0.1}), p}) == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("two-center action gradient matches dS") {
  TwoCenterConfig cfg;
  cfg.quad_tol = 1e-12;
  const HJFamily f = two_center_family(cfg);
  const Vec x = v({2.8, 0.3}), u = v({-0.5, -0.5});
  const double h = 1e-5;
  for (int i = 0; i < 2; ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    CHECK(std::abs((f.value(xp, u) - f.value(xm, u)) / (2 * h) - f.dS_dx(x, u)[i]) <= 1e-7);
  }
  CHECK(std::abs(f.value(v({2.0 + 1e-12, 0.0}), u)) <= 1e-5);
  CHECK_THROWS(f.value(v({2.0, 0.0}), u));
  CHECK_THROWS_AS(two_center_action(20.0, 0.0, -0.5, -0.5, cfg), ForbiddenRegionError);
}

TEST_CASE("separation constants along an orbit") {
  const auto sys = two_center_system(1.0, 1.0);
  IntegratorSpec spec;
  spec.dt = 1e-3;
  spec.steps = 2000;
  const Trajectory tr = run(sys, {v({0.2, 2.0}), v({0.6, 0.1})}, spec);
  const SeparationTrace s = separation_constants(tr, 1.0, 1.0);
  REQUIRE(s.t.size() == tr.size());
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    CHECK(std::abs(s.C[i] - s.C[0]) <= 1e-9);
    CHECK(std::abs(s.c1[i] - s.c1[0]) <= 1e-8);
  }
  CHECK(s.C[0] == doctest::Approx(two_center_cartesian_hamiltonian(0.2, 2.0, 0.6, 0.1, 1.0, 1.0)));
  std::ostringstream os;
  write_separation_csv(os, s);
  CHECK(os.str().rfind("t,C,c1\n", 0) == 0);
}

}  // TEST_SUITE

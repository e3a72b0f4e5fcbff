#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "noetherlab/fieldlab.hpp"

using namespace noetherlab;

namespace {

constexpr double two_pi = 2 * std::numbers::pi;

ScalarField gaussian(const Lattice1D& lat, double x0, double w, bool moving) {
  ScalarField f;
  for (std::size_t i = 0; i < lat.N; ++i) {
    const double s = (lat.x(i) - x0) / w;
    const double g = std::exp(-s * s);
    f.phi.push_back(g);
    // Right-moving profile of the massless equation: pi = -phi'.
    f.pi.push_back(moving ? 2.0 * s / w * g : 0.0);
  }
  return f;
}

ScalarField standing(const Lattice1D& lat, double k) {
  ScalarField f;
  for (std::size_t i = 0; i < lat.N; ++i) {
    f.phi.push_back(std::cos(k * lat.x(i)));
    f.pi.push_back(0.0);
  }
  return f;
}

}  // namespace

TEST_SUITE("fieldlab") {

TEST_CASE("lattice validation") {
  CHECK_THROWS(Lattice1D(4, 0.1));
  CHECK_THROWS(Lattice1D(16, 0.0));
  const Lattice1D lat(16, 0.5);
  CHECK(lat.length() == 8.0);
  CHECK(lat.x(3) == 1.5);
}

TEST_CASE("pairwise sum is order insensitive to rounding") {
  std::vector<double> xs(1 << 16, 0.1);
  CHECK(std::abs(pairwise_sum(xs) - 0.1 * xs.size()) <= 1e-10);
  CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
  CHECK(pairwise_sum(std::vector<double>{1, 2, 3}) == 6.0);
}

TEST_CASE("force on a discrete eigenmode") {
  const Lattice1D lat(32, 0.2);
  const double k = two_pi * 3 / lat.length();
  const ScalarField f = standing(lat, k);
  const auto F = kg_force(lat, f.phi, 1.5);
  const double w2 = kg_dispersion(1.5, k, lat.dx);
  for (std::size_t i = 0; i < lat.N; ++i) CHECK(std::abs(F[i] + w2 * f.phi[i]) <= 1e-12);
  CHECK(kg_dispersion(1.0, 0.0, 0.1) == 1.0);
}

TEST_CASE("fixed walls read zero") {
  const Lattice1D lat(8, 1.0, Boundary::fixed_zero);
  std::vector<double> phi(8, 1.0);
  const auto F = kg_force(lat, phi, 0.0);
  CHECK(F[0] == -1.0);
  CHECK(F[7] == -1.0);
  CHECK(F[3] == 0.0);
}

TEST_CASE("standing wave frequency") {
  const Lattice1D lat(64, 0.1);
  const double k = two_pi * 2 / lat.length(), dt = 0.01, m = 1.0;
  ScalarField f = standing(lat, k);
  std::vector<double> amp;
  for (int n = 0; n < 400; ++n) {
    amp.push_back(f.phi[0]);
    kg_step(lat, f, m, dt);
  }
  const double w = std::sqrt(kg_dispersion(m, k, lat.dx));
  const double expect = 2.0 * std::asin(0.5 * w * dt) / dt;
  CHECK(std::abs(measure_frequency(amp, dt) - expect) <= 1e-9);
  CHECK(std::abs(f.t - 4.0) <= 1e-12);
}

TEST_CASE("frequency of a sampled cosine") {
  std::vector<double> a;
  for (int n = 0; n < 100; ++n) a.push_back(std::cos(1.3 * 0.05 * n));
  CHECK(measure_frequency(a, 0.05) == doctest::Approx(1.3).epsilon(1e-12));
  CHECK_THROWS(measure_frequency(std::vector<double>{1, 2}, 0.1));
}

TEST_CASE("step size above the light cone is rejected") {
  const Lattice1D lat(16, 0.1);
  ScalarField f = standing(lat, 0.0);
  CHECK_THROWS_AS(kg_step(lat, f, 1.0, 0.2), std::invalid_argument);
}

TEST_CASE("charges of simple states") {
  const Lattice1D lat(64, 0.1);
  ScalarField f;
  f.phi.assign(64, 0.0);
  f.pi.assign(64, 2.0);
  const FieldCharges c = noether_charges(lat, f, 1.0);
  CHECK(c.E == doctest::Approx(2.0 * 64 * 0.1));
  CHECK(c.P == 0.0);
  const ScalarField right = gaussian(lat, 3.2, 0.5, true);
  CHECK(noether_charges(lat, right, 0.0).P < 0.0);
  const ScalarField rest = gaussian(lat, 3.2, 0.5, false);
  CHECK(noether_charges(lat, rest, 0.0).P == 0.0);
}

TEST_CASE("periodic run conserves energy and momentum") {
  const Lattice1D lat(256, 0.1);
  ScalarField f = gaussian(lat, 12.8, 1.0, true);
  KGRunOptions o;
  o.steps = 2000;
  o.sample_every = 100;
  const auto hist = run_kg(lat, f, o);
  CHECK(hist.size() == 21);
  const ChargeAudit a = charge_conservation_audit(hist);
  CHECK(a.E_relative <= 1e-5);
  CHECK(a.P_relative <= 1e-12);
  CHECK_FALSE(a.has_window);
}

TEST_CASE("fixed walls: window energy balances its flux") {
  const Lattice1D lat(200, 0.1, Boundary::fixed_zero);
  ScalarField f = gaussian(lat, 10.0, 1.0, true);
  KGRunOptions o;
  o.m = 0.5;
  o.dt = 0.01;
  o.steps = 1000;
  o.window = std::pair<std::size_t, std::size_t>{60, 140};
  const auto hist = run_kg(lat, f, o);
  const ChargeAudit a = charge_conservation_audit(hist);
  REQUIRE(a.has_window);
  CHECK(a.window_change < 0.0);
  CHECK(a.balance_residual <= 1e-3 * std::abs(a.window_change));
  CHECK(a.E_relative <= 1e-3);
}

TEST_CASE("window flux vanishes for a field at rest") {
  const Lattice1D lat(32, 0.1, Boundary::fixed_zero);
  const ScalarField f = gaussian(lat, 1.6, 0.3, false);
  const WindowCharge w = window_energy(lat, f, 1.0, 4, 20);
  CHECK(w.flux == 0.0);
  CHECK(w.Q > 0.0);
  CHECK_THROWS(window_energy(lat, f, 1.0, 20, 4));
}

TEST_CASE("euler operator is consistent at second order") {
  const double m = 0.7;
  const Binding params{{"m", m}};
  const Expr L = parse_expression("0.5*ut^2 - 0.5*ux^2 - 0.5*m^2*u^2", field_names(params));
  const Expr wrong = parse_expression("0.5*ut^2 - 0.5*ux^2", field_names(params));
  // Exact travelling wave cos(k x - w t) sampled at t = -dt, 0, dt.
  auto worst = [&](std::size_t n, const Expr& lag) {
    const Lattice1D lat(n, 6.4 / static_cast<double>(n));
    const double k = two_pi / lat.length(), w = std::sqrt(k * k + m * m), dt = 0.5 * lat.dx;
    std::array<std::vector<double>, 3> lv;
    for (int level = 0; level < 3; ++level)
      for (std::size_t i = 0; i < n; ++i) lv[level].push_back(std::cos(k * lat.x(i) - w * (level - 1) * dt));
    return max_abs(el_residual(lag, params, lat, lv[0], lv[1], lv[2], dt));
  };
  const double coarse = worst(32, L), fine = worst(64, L);
  CHECK(fine <= 1e-2);
  CHECK(coarse / fine >= 3.5);
  CHECK(worst(64, wrong) > 0.1);
}

TEST_CASE("charge audit needs two samples") {
  CHECK_THROWS(charge_conservation_audit({ChargeSample{}}));
}

TEST_CASE("field and charge csv") {
  const Lattice1D lat(8, 0.5);
  ScalarField f = standing(lat, 0.0);
  std::ostringstream a, b;
  write_field_csv(a, lat, f);
  CHECK(a.str().rfind("x,phi,pi\n0,1,0\n0.5,1,0\n", 0) == 0);
  write_charges_csv(b, {ChargeSample{0.0, 1.0, -0.5, std::nullopt}});
  CHECK(b.str() == "t,E,P\n0,1,-0.5\n");
}

TEST_CASE("yee grid indices wrap") {
  const EMGrid g(4, 5, 6, 1.0);
  CHECK(g.size() == 120);
  CHECK(g.index(-1, 0, 0) == g.index(3, 0, 0));
  CHECK(g.index(0, 5, 0) == g.index(0, 0, 0));
  CHECK(g.index(0, 0, 13) == g.index(0, 0, 1));
}

TEST_CASE("random divergence free data stays constrained") {
  EMGrid g(8, 8, 8, 1.0);
  randomize_divergence_free(g, 42);
  CHECK(max_abs(div_E(g)) <= 1e-12);
  CHECK(max_abs(div_B(g)) <= 1e-12);
  CHECK(em_energy(g) > 0.0);
  const double dt = 0.5 / std::sqrt(3.0);
  const double e0 = em_energy_discrete(g, dt);
  const auto trace = run_maxwell(g, dt, 50, 10);
  CHECK(trace.size() == 6);
  for (const auto& s : trace) {
    CHECK(s.max_div_E <= 1e-12);
    CHECK(s.max_div_B <= 1e-12);
    CHECK(std::abs(s.energy - e0) <= 1e-12 * e0);
  }
  CHECK_THROWS_AS(maxwell_step(g, 0.6), std::invalid_argument);
}

TEST_CASE("same seed gives the same field") {
  EMGrid a(6, 6, 6, 1.0), b(6, 6, 6, 1.0), c(6, 6, 6, 1.0);
  randomize_divergence_free(a, 7);
  randomize_divergence_free(b, 7);
  randomize_divergence_free(c, 8);
  CHECK(a.Ex == b.Ex);
  CHECK(a.Bz == b.Bz);
  CHECK(a.Ex != c.Ex);
}

TEST_CASE("plane wave in a box keeps its energy") {
  EMGrid g(16, 4, 4, 0.25);
  const double k = two_pi / (16 * 0.25);
  for (std::size_t i = 0; i < 16; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      for (std::size_t l = 0; l < 4; ++l) g.Ey[g.index(i, j, l)] = std::sin(k * i * 0.25);
  const double dt = 0.1;
  const double e0 = em_energy_discrete(g, dt);
  for (int n = 0; n < 200; ++n) maxwell_step(g, dt);
  CHECK(std::abs(em_energy_discrete(g, dt) - e0) <= 1e-12 * e0);
  CHECK(std::abs(g.t - 20.0) <= 1e-12);
  std::ostringstream os;
  write_em_csv(os, {EMSample{0, 0, 0, 1}});
  CHECK(os.str().rfind("t,maxdivE,maxdivB,energy\n", 0) == 0);
}

}  // TEST_SUITE

#include "noetherlab/fieldlab.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "noetherlab/csv.hpp"

namespace noetherlab {

Lattice1D::Lattice1D(std::size_t n, double spacing, Boundary b) : N(n), dx(spacing), boundary(b) {
  if (N < 8) throw std::invalid_argument("lattice needs at least 8 sites");
  if (!(dx > 0.0) || !std::isfinite(dx)) throw std::invalid_argument("lattice spacing must be positive");
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

namespace {

/// Site value with the lattice boundary applied.
double site(const Lattice1D& lat, const std::vector<double>& v, std::ptrdiff_t i) {
  const auto n = static_cast<std::ptrdiff_t>(lat.N);
  if (lat.boundary == Boundary::periodic) return v[static_cast<std::size_t>(((i % n) + n) % n)];
  if (i < 0 || i >= n) return 0.0;
  return v[static_cast<std::size_t>(i)];
}

void check_field(const Lattice1D& lat, const ScalarField& f) {
  if (f.phi.size() != lat.N || f.pi.size() != lat.N)
    throw std::invalid_argument("field arrays do not match the lattice");
}

}  // namespace

std::vector<double> kg_force(const Lattice1D& lattice, const std::vector<double>& phi, double m) {
  std::vector<double> out(lattice.N);
  const double inv = 1.0 / (lattice.dx * lattice.dx);
  for (std::size_t i = 0; i < lattice.N; ++i) {
    const auto s = static_cast<std::ptrdiff_t>(i);
    out[i] = (site(lattice, phi, s + 1) - 2.0 * phi[i] + site(lattice, phi, s - 1)) * inv - m * m * phi[i];
  }
  return out;
}

void kg_step(const Lattice1D& lattice, ScalarField& field, double m, double dt) {
  check_field(lattice, field);
  if (!(dt > 0.0) || dt > lattice.dx)
    throw std::invalid_argument("time step violates the CFL bound dt <= dx");
  std::vector<double> force = kg_force(lattice, field.phi, m);
  for (std::size_t i = 0; i < lattice.N; ++i) {
    field.pi[i] += 0.5 * dt * force[i];
    field.phi[i] += dt * field.pi[i];
  }
  force = kg_force(lattice, field.phi, m);
  for (std::size_t i = 0; i < lattice.N; ++i) field.pi[i] += 0.5 * dt * force[i];
  field.t += dt;
}

double kg_dispersion(double m, double k, double dx) {
  const double s = std::sin(0.5 * k * dx);
  return m * m + 4.0 / (dx * dx) * s * s;
}

NameSet field_names(const Binding& params) {
  std::vector<std::string> p;
  for (const auto& [k, v] : params) p.push_back(k);
  return NameSet{{"u", "ut", "ux"}, p};
}

namespace {

// 8-point Gauss-Legendre rule on [0, 1].
constexpr std::array<double, 8> kGaussNode{0.019855071751231856, 0.10166676129318664, 0.2372337950418355,
                                           0.4082826787521751,   0.5917173212478249,  0.7627662049581645,
                                           0.8983332387068134,   0.9801449282487681};
constexpr std::array<double, 8> kGaussWeight{0.050614268145188129, 0.11119051722668724, 0.15685332293894364,
                                             0.18134189168918099,  0.18134189168918099, 0.15685332293894364,
                                             0.11119051722668724,  0.050614268145188129};

}  // namespace

std::vector<double> el_residual(const Expr& lagrangian, const Binding& params, const Lattice1D& lattice,
                                const std::vector<double>& prev, const std::vector<double>& now,
                                const std::vector<double>& next, double dt) {
  if (prev.size() != lattice.N || now.size() != lattice.N || next.size() != lattice.N)
    throw std::invalid_argument("time levels do not match the lattice");
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  static const std::vector<std::string> vars{"u", "ut", "ux"};
  const double dx = lattice.dx;

  // The residual at a site is the derivative of the discrete action with
  // respect to that site, divided by dt dx. The action sums L over space-time
  // cells with the bilinear interpolant. A total divergence then telescopes
  // line by line, so its Euler operator vanishes to round-off.
  //
  // Corner (a, b): a = time offset, b = space offset within the cell.
  auto cell_derivative = [&](const std::vector<double>& lo, const std::vector<double>& hi, std::ptrdiff_t i0,
                             int a, int b) {
    const double u00 = site(lattice, lo, i0), u01 = site(lattice, lo, i0 + 1);
    const double u10 = site(lattice, hi, i0), u11 = site(lattice, hi, i0 + 1);
    const double sign_t = a ? 1.0 : -1.0, sign_x = b ? 1.0 : -1.0;
    double acc = 0.0;
    for (std::size_t p = 0; p < 8; ++p) {
      const double s = kGaussNode[p];
      for (std::size_t q = 0; q < 8; ++q) {
        const double r = kGaussNode[q];
        const double u = (1 - s) * (1 - r) * u00 + s * (1 - r) * u10 + (1 - s) * r * u01 + s * r * u11;
        const double ut = ((1 - r) * (u10 - u00) + r * (u11 - u01)) / dt;
        const double ux = ((1 - s) * (u01 - u00) + s * (u11 - u10)) / dx;
        const double point[] = {u, ut, ux};
        const SecondOrderJet j = jet2(lagrangian, vars, point, params, false);
        const double ws = a ? s : 1 - s, wr = b ? r : 1 - r;
        acc += kGaussWeight[p] * kGaussWeight[q] *
               (j.gradient(0) * ws * wr + j.gradient(1) * sign_t * wr / dt + j.gradient(2) * sign_x * ws / dx);
      }
    }
    return acc;
  };

  std::vector<double> out(lattice.N);
  for (std::size_t idx = 0; idx < lattice.N; ++idx) {
    const auto i = static_cast<std::ptrdiff_t>(idx);
    out[idx] = cell_derivative(prev, now, i - 1, 1, 1) + cell_derivative(prev, now, i, 1, 0) +
               cell_derivative(now, next, i - 1, 0, 1) + cell_derivative(now, next, i, 0, 0);
  }
  return out;
}

FieldCharges noether_charges(const Lattice1D& lattice, const ScalarField& field, double m) {
  check_field(lattice, field);
  const double dx = lattice.dx;
  const auto n = static_cast<std::ptrdiff_t>(lattice.N);
  std::vector<double> e, p;
  e.reserve(lattice.N + 1);
  p.reserve(lattice.N);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double pi = field.pi[static_cast<std::size_t>(i)];
    const double phi = field.phi[static_cast<std::size_t>(i)];
    const double grad = (site(lattice, field.phi, i + 1) - phi) / dx;
    e.push_back(dx * (0.5 * pi * pi + 0.5 * grad * grad + 0.5 * m * m * phi * phi));
    p.push_back(pi * (site(lattice, field.phi, i + 1) - site(lattice, field.phi, i - 1)) / 2.0);
  }
  if (lattice.boundary == Boundary::fixed_zero) {
    const double grad = field.phi[0] / dx;  // link from the left wall
    e.push_back(dx * 0.5 * grad * grad);
  }
  return {pairwise_sum(e), pairwise_sum(p)};
}

WindowCharge window_energy(const Lattice1D& lattice, const ScalarField& field, double m, std::size_t i0,
                           std::size_t i1) {
  check_field(lattice, field);
  if (i0 > i1 || i1 >= lattice.N) throw std::invalid_argument("window outside the lattice");
  const double dx = lattice.dx;
  auto phi = [&](std::ptrdiff_t i) { return site(lattice, field.phi, i); };
  auto pi = [&](std::ptrdiff_t i) { return site(lattice, field.pi, i); };
  // Energy current through the face between i and i + 1.
  auto current = [&](std::ptrdiff_t i) { return -0.5 * (pi(i) + pi(i + 1)) * (phi(i + 1) - phi(i)) / dx; };
  std::vector<double> e;
  for (auto i = static_cast<std::ptrdiff_t>(i0); i <= static_cast<std::ptrdiff_t>(i1); ++i) {
    const double right = (phi(i + 1) - phi(i)) / dx;
    const double left = (phi(i) - phi(i - 1)) / dx;
    e.push_back(dx * (0.5 * pi(i) * pi(i) + 0.5 * m * m * phi(i) * phi(i) + 0.25 * (right * right + left * left)));
  }
  return {pairwise_sum(e), current(static_cast<std::ptrdiff_t>(i1)) - current(static_cast<std::ptrdiff_t>(i0) - 1)};
}

ChargeAudit charge_conservation_audit(const std::vector<ChargeSample>& history) {
  if (history.size() < 2) throw std::invalid_argument("charge audit needs at least two samples");
  ChargeAudit out;
  const ChargeSample& first = history.front();
  for (const auto& s : history) {
    out.E_drift = std::max(out.E_drift, std::abs(s.E - first.E));
    out.P_drift = std::max(out.P_drift, std::abs(s.P - first.P));
  }
  out.E_relative = out.E_drift / std::max(std::abs(first.E), 1e-300);
  out.P_relative = out.P_drift / std::max(std::abs(first.E), 1e-300);
  out.has_window = first.window.has_value();
  if (out.has_window) {
    double outflow = 0.0;
    for (std::size_t k = 1; k < history.size(); ++k) {
      const auto& a = history[k - 1];
      const auto& b = history[k];
      if (!a.window || !b.window) throw std::invalid_argument("window samples missing");
      outflow += 0.5 * (b.t - a.t) * (a.window->flux + b.window->flux);
      out.balance_residual =
          std::max(out.balance_residual, std::abs(b.window->Q - first.window->Q + outflow));
    }
    out.window_change = history.back().window->Q - first.window->Q;
  }
  return out;
}

std::vector<ChargeSample> run_kg(const Lattice1D& lattice, ScalarField& field, const KGRunOptions& options) {
  const std::size_t every = std::max<std::size_t>(options.sample_every, 1);
  std::vector<ChargeSample> out;
  auto sample = [&] {
    const FieldCharges q = noether_charges(lattice, field, options.m);
    ChargeSample s{field.t, q.E, q.P, std::nullopt};
    if (options.window) s.window = window_energy(lattice, field, options.m, options.window->first, options.window->second);
    out.push_back(s);
  };
  sample();
  for (std::size_t n = 1; n <= options.steps; ++n) {
    kg_step(lattice, field, options.m, options.dt);
    if (n % every == 0 || n == options.steps) sample();
  }
  return out;
}

double measure_frequency(std::span<const double> a, double dt) {
  if (a.size() < 3) throw std::invalid_argument("need at least three amplitudes");
  double num = 0.0, den = 0.0;
  for (std::size_t n = 1; n + 1 < a.size(); ++n) {
    num += a[n] * (a[n + 1] - 2.0 * a[n] + a[n - 1]);
    den += a[n] * a[n];
  }
  // a[n+1] - 2a[n] + a[n-1] = -4 sin^2(w dt / 2) a[n]
  const double d = num / den;
  if (!(d <= 0.0)) throw std::domain_error("amplitudes do not oscillate");
  return 2.0 * std::asin(0.5 * std::sqrt(-d)) / dt;
}

void write_field_csv(std::ostream& os, const Lattice1D& lattice, const ScalarField& field) {
  CsvWriter csv(os, {"x", "phi", "pi"});
  for (std::size_t i = 0; i < lattice.N; ++i) {
    const double row[] = {lattice.x(i), field.phi[i], field.pi[i]};
    csv.row(row);
  }
}

void write_charges_csv(std::ostream& os, const std::vector<ChargeSample>& history) {
  CsvWriter csv(os, {"t", "E", "P"});
  for (const auto& s : history) {
    const double row[] = {s.t, s.E, s.P};
    csv.row(row);
  }
}

EMGrid::EMGrid(std::size_t nx_, std::size_t ny_, std::size_t nz_, double dx_)
    : nx(nx_), ny(ny_), nz(nz_), dx(dx_) {
  if (nx == 0 || ny == 0 || nz == 0) throw std::invalid_argument("grid dimensions must be positive");
  if (!(dx > 0.0)) throw std::invalid_argument("grid spacing must be positive");
  for (auto* v : {&Ex, &Ey, &Ez, &Bx, &By, &Bz}) v->assign(size(), 0.0);
}

std::size_t EMGrid::index(std::ptrdiff_t i, std::ptrdiff_t j, std::ptrdiff_t k) const {
  auto wrap = [](std::ptrdiff_t a, std::size_t n) {
    const auto s = static_cast<std::ptrdiff_t>(n);
    return static_cast<std::size_t>(((a % s) + s) % s);
  };
  return (wrap(i, nx) * ny + wrap(j, ny)) * nz + wrap(k, nz);
}

namespace {

struct Vec3Field {
  std::vector<double> x, y, z;
};

template <typename F>
void for_each_cell(const EMGrid& g, F&& f) {
  for (std::size_t i = 0; i < g.nx; ++i)
    for (std::size_t j = 0; j < g.ny; ++j)
      for (std::size_t k = 0; k < g.nz; ++k)
        f(static_cast<std::ptrdiff_t>(i), static_cast<std::ptrdiff_t>(j), static_cast<std::ptrdiff_t>(k));
}

/// Edge field to face field.
Vec3Field curl_edges(const EMGrid& g, const std::vector<double>& ex, const std::vector<double>& ey,
                     const std::vector<double>& ez) {
  Vec3Field c{std::vector<double>(g.size()), std::vector<double>(g.size()), std::vector<double>(g.size())};
  const double inv = 1.0 / g.dx;
  for_each_cell(g, [&](auto i, auto j, auto k) {
    const std::size_t o = g.index(i, j, k);
    c.x[o] = (ez[g.index(i, j + 1, k)] - ez[o] - ey[g.index(i, j, k + 1)] + ey[o]) * inv;
    c.y[o] = (ex[g.index(i, j, k + 1)] - ex[o] - ez[g.index(i + 1, j, k)] + ez[o]) * inv;
    c.z[o] = (ey[g.index(i + 1, j, k)] - ey[o] - ex[g.index(i, j + 1, k)] + ex[o]) * inv;
  });
  return c;
}

/// Face field to edge field.
Vec3Field curl_faces(const EMGrid& g, const std::vector<double>& bx, const std::vector<double>& by,
                     const std::vector<double>& bz) {
  Vec3Field c{std::vector<double>(g.size()), std::vector<double>(g.size()), std::vector<double>(g.size())};
  const double inv = 1.0 / g.dx;
  for_each_cell(g, [&](auto i, auto j, auto k) {
    const std::size_t o = g.index(i, j, k);
    c.x[o] = (bz[o] - bz[g.index(i, j - 1, k)] - by[o] + by[g.index(i, j, k - 1)]) * inv;
    c.y[o] = (bx[o] - bx[g.index(i, j, k - 1)] - bz[o] + bz[g.index(i - 1, j, k)]) * inv;
    c.z[o] = (by[o] - by[g.index(i - 1, j, k)] - bx[o] + bx[g.index(i, j - 1, k)]) * inv;
  });
  return c;
}

void kick_b(EMGrid& g, double h) {
  const Vec3Field c = curl_edges(g, g.Ex, g.Ey, g.Ez);
  for (std::size_t o = 0; o < g.size(); ++o) {
    g.Bx[o] -= h * c.x[o];
    g.By[o] -= h * c.y[o];
    g.Bz[o] -= h * c.z[o];
  }
}

}  // namespace

void maxwell_step(EMGrid& grid, double dt) {
  if (!(dt > 0.0) || dt > grid.dx / std::sqrt(3.0))
    throw std::invalid_argument("time step violates the CFL bound dt <= dx/sqrt(3)");
  kick_b(grid, 0.5 * dt);
  const Vec3Field c = curl_faces(grid, grid.Bx, grid.By, grid.Bz);
  for (std::size_t o = 0; o < grid.size(); ++o) {
    grid.Ex[o] += dt * c.x[o];
    grid.Ey[o] += dt * c.y[o];
    grid.Ez[o] += dt * c.z[o];
  }
  kick_b(grid, 0.5 * dt);
  grid.t += dt;
}

std::vector<double> div_E(const EMGrid& g) {
  std::vector<double> out(g.size());
  for_each_cell(g, [&](auto i, auto j, auto k) {
    const std::size_t o = g.index(i, j, k);
    out[o] = (g.Ex[o] - g.Ex[g.index(i - 1, j, k)] + g.Ey[o] - g.Ey[g.index(i, j - 1, k)] + g.Ez[o] -
              g.Ez[g.index(i, j, k - 1)]) / g.dx;
  });
  return out;
}

std::vector<double> div_B(const EMGrid& g) {
  std::vector<double> out(g.size());
  for_each_cell(g, [&](auto i, auto j, auto k) {
    const std::size_t o = g.index(i, j, k);
    out[o] = (g.Bx[g.index(i + 1, j, k)] - g.Bx[o] + g.By[g.index(i, j + 1, k)] - g.By[o] +
              g.Bz[g.index(i, j, k + 1)] - g.Bz[o]) / g.dx;
  });
  return out;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

namespace {

double sum_squares(const EMGrid& g, std::initializer_list<const std::vector<double>*> parts) {
  std::vector<double> sq(g.size(), 0.0);
  for (const auto* v : parts)
    for (std::size_t o = 0; o < g.size(); ++o) sq[o] += (*v)[o] * (*v)[o];
  return pairwise_sum(sq);
}

}  // namespace

double em_energy(const EMGrid& grid) {
  const double dv = grid.dx * grid.dx * grid.dx;
  return 0.5 * dv * sum_squares(grid, {&grid.Ex, &grid.Ey, &grid.Ez, &grid.Bx, &grid.By, &grid.Bz});
}

double em_energy_discrete(const EMGrid& grid, double dt) {
  const Vec3Field c = curl_edges(grid, grid.Ex, grid.Ey, grid.Ez);
  const double dv = grid.dx * grid.dx * grid.dx;
  const double curl2 = sum_squares(grid, {&c.x, &c.y, &c.z});
  return em_energy(grid) - 0.5 * dv * 0.25 * dt * dt * curl2;
}

void randomize_divergence_free(EMGrid& grid, std::uint64_t seed, double amplitude) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  auto fill = [&] {
    std::vector<double> v(grid.size());
    for (double& x : v) x = u(rng);
    return v;
  };
  const double scale = grid.dx;  // keeps field magnitudes O(amplitude)
  std::vector<double> ax = fill(), ay = fill(), az = fill();
  const Vec3Field e = curl_faces(grid, ax, ay, az);
  ax = fill();
  ay = fill();
  az = fill();
  const Vec3Field b = curl_edges(grid, ax, ay, az);
  for (std::size_t o = 0; o < grid.size(); ++o) {
    grid.Ex[o] = scale * e.x[o];
    grid.Ey[o] = scale * e.y[o];
    grid.Ez[o] = scale * e.z[o];
    grid.Bx[o] = scale * b.x[o];
    grid.By[o] = scale * b.y[o];
    grid.Bz[o] = scale * b.z[o];
  }
}

std::vector<EMSample> run_maxwell(EMGrid& grid, double dt, std::size_t steps, std::size_t sample_every) {
  const std::size_t every = std::max<std::size_t>(sample_every, 1);
  std::vector<EMSample> out;
  auto sample = [&] {
    out.push_back({grid.t, max_abs(div_E(grid)), max_abs(div_B(grid)), em_energy_discrete(grid, dt)});
  };
  sample();
  for (std::size_t n = 1; n <= steps; ++n) {
    maxwell_step(grid, dt);
    if (n % every == 0 || n == steps) sample();
  }
  return out;
}

void write_em_csv(std::ostream& os, const std::vector<EMSample>& trace) {
  CsvWriter csv(os, {"t", "maxdivE", "maxdivB", "energy"});
  for (const auto& s : trace) {
    const double row[] = {s.t, s.max_div_E, s.max_div_B, s.energy};
    csv.row(row);
  }
}

}  // namespace noetherlab

#ifndef NOETHERLAB_FIELDLAB_HPP
#define NOETHERLAB_FIELDLAB_HPP

// Lattice scalar fields in 1+1 dimensions and a vacuum Maxwell stepper.

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "noetherlab/expr.hpp"

namespace noetherlab {

enum class Boundary { periodic, fixed_zero };

/// Sites x_i = i dx, i = 0..N-1. Fixed-zero walls sit at i = -1 and i = N.
struct Lattice1D {
  std::size_t N;
  double dx;
  Boundary boundary;

  Lattice1D(std::size_t n, double spacing, Boundary b = Boundary::periodic);
  double x(std::size_t i) const { return static_cast<double>(i) * dx; }
  double length() const { return static_cast<double>(N) * dx; }
};

/// phi and its time derivative pi, both at time t.
struct ScalarField {
  std::vector<double> phi;
  std::vector<double> pi;
  double t = 0.0;
};

/// Order-insensitive reduction.
double pairwise_sum(std::span<const double> values);

/// phi_xx - m^2 phi with the lattice boundary.
std::vector<double> kg_force(const Lattice1D& lattice, const std::vector<double>& phi, double m);

/// Kick-drift-kick leapfrog for phi_tt = phi_xx - m^2 phi. Requires dt <= dx.
void kg_step(const Lattice1D& lattice, ScalarField& field, double m, double dt);

/// Discrete dispersion m^2 + (4/dx^2) sin^2(k dx / 2).
double kg_dispersion(double m, double k, double dx);

/// Euler operator of a first-order L(u, ut, ux) on three consecutive time
/// levels: the gradient of the discrete action built from the bilinear
/// space-time interpolant, per unit cell area. Consistent to second order;
/// exact for total divergences. Fixed-zero lattices read zero beyond the walls.
std::vector<double> el_residual(const Expr& lagrangian, const Binding& params, const Lattice1D& lattice,
                                const std::vector<double>& prev, const std::vector<double>& now,
                                const std::vector<double>& next, double dt);

/// Names an L expression may use.
NameSet field_names(const Binding& params = {});

struct FieldCharges {
  double E = 0.0;
  /// sum dx pi D_x phi, the T^0_1 = -T^{10} component; a right-moving wave has P < 0.
  double P = 0.0;
};

FieldCharges noether_charges(const Lattice1D& lattice, const ScalarField& field, double m);

/// Energy on sites i0..i1 and the energy flux out through its two faces.
struct WindowCharge {
  double Q = 0.0;
  double flux = 0.0;
};

WindowCharge window_energy(const Lattice1D& lattice, const ScalarField& field, double m, std::size_t i0,
                           std::size_t i1);

struct ChargeSample {
  double t = 0.0;
  double E = 0.0;
  double P = 0.0;
  std::optional<WindowCharge> window;
};

struct ChargeAudit {
  double E_drift = 0.0;
  double E_relative = 0.0;
  double P_drift = 0.0;
  double P_relative = 0.0;
  bool has_window = false;
  double window_change = 0.0;     ///< Q(end) - Q(0)
  double balance_residual = 0.0;  ///< max |Q(t) - Q(0) + int flux|
};

/// Needs at least two samples.
ChargeAudit charge_conservation_audit(const std::vector<ChargeSample>& history);

struct KGRunOptions {
  double m = 1.0;
  double dt = 1e-3;
  std::size_t steps = 1000;
  std::size_t sample_every = 1;
  std::optional<std::pair<std::size_t, std::size_t>> window;
};

std::vector<ChargeSample> run_kg(const Lattice1D& lattice, ScalarField& field, const KGRunOptions& options);

/// Frequency of a linear mode from equally spaced amplitudes, by least squares
/// on a[n+1] + a[n-1] = 2 cos(w dt) a[n].
double measure_frequency(std::span<const double> amplitudes, double dt);

void write_field_csv(std::ostream& os, const Lattice1D& lattice, const ScalarField& field);
void write_charges_csv(std::ostream& os, const std::vector<ChargeSample>& history);

/// Periodic Yee grid. Ex(i+1/2,j,k), Ey(i,j+1/2,k), Ez(i,j,k+1/2),
/// Bx(i,j+1/2,k+1/2), By(i+1/2,j,k+1/2), Bz(i+1/2,j+1/2,k); E and B both at t.
struct EMGrid {
  std::size_t nx, ny, nz;
  double dx;
  double t = 0.0;
  std::vector<double> Ex, Ey, Ez, Bx, By, Bz;

  EMGrid(std::size_t nx, std::size_t ny, std::size_t nz, double dx);
  std::size_t size() const { return nx * ny * nz; }
  std::size_t index(std::ptrdiff_t i, std::ptrdiff_t j, std::ptrdiff_t k) const;
};

/// Half B update, full E update, half B update. Requires dt <= dx / sqrt(3).
void maxwell_step(EMGrid& grid, double dt);

std::vector<double> div_E(const EMGrid& grid);
std::vector<double> div_B(const EMGrid& grid);
double max_abs(std::span<const double> v);

/// 1/2 sum (|E|^2 + |B|^2) dx^3.
double em_energy(const EMGrid& grid);
/// The quadratic form the stepper conserves exactly:
/// 1/2 sum (|E|^2 + |B|^2 - (dt/2)^2 |rot E|^2) dx^3.
double em_energy_discrete(const EMGrid& grid, double dt);

/// E and B as discrete curls of random potentials, so both divergences vanish.
void randomize_divergence_free(EMGrid& grid, std::uint64_t seed, double amplitude = 1.0);

struct EMSample {
  double t, max_div_E, max_div_B, energy;
};

std::vector<EMSample> run_maxwell(EMGrid& grid, double dt, std::size_t steps, std::size_t sample_every = 1);
void write_em_csv(std::ostream& os, const std::vector<EMSample>& trace);

}  // namespace noetherlab

#endif  // NOETHERLAB_FIELDLAB_HPP

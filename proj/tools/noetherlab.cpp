// Command-line front end: scenario files in, reports and CSV out.

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "noetherlab/csv.hpp"
#include "noetherlab/fieldlab.hpp"
#include "noetherlab/hamjac.hpp"
#include "noetherlab/linmodes.hpp"
#include "noetherlab/quadrature.hpp"
#include "noetherlab/radial.hpp"
#include "noetherlab/scenario.hpp"

namespace fs = std::filesystem;
using namespace noetherlab;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_internal = 1;
constexpr int exit_validation = 2;
constexpr int exit_runtime = 3;

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::uint64_t default_seed() {
  if (const char* s = std::getenv("NOETHERLAB_SEED")) return std::strtoull(s, nullptr, 10);
  return 20240611;
}

struct SimulateJob {
  std::string path;
  fs::path out_dir;
  int code = exit_ok;
  std::string log;
};

void run_simulation(SimulateJob& job) {
  std::ostringstream log;
  try {
    const Scenario sc = Scenario::load(job.path);
    const SimulationOutcome outcome = simulate_scenario(sc);
    fs::create_directories(job.out_dir);
    {
      auto os = open_output(job.out_dir / "trajectory.csv");
      write_trajectory_csv(os, outcome.trajectory, outcome.system);
    }
    {
      auto os = open_output(job.out_dir / "audit.csv");
      write_audit_csv(os, outcome.audit);
    }
    std::ostringstream summary;
    write_summary(summary, sc, outcome);
    {
      auto os = open_output(job.out_dir / "summary.txt");
      os << summary.str();
    }
    log << summary.str();
    if (outcome.trajectory.truncated) {
      log << "warning: " << job.path << ": run truncated: " << outcome.trajectory.stop_reason << "\n";
      job.code = exit_runtime;
    }
  } catch (const ScenarioError& e) {
    log << "error: " << e.what() << "\n";
    job.code = exit_validation;
  } catch (const std::exception& e) {
    log << "error: " << job.path << ": " << e.what() << "\n";
    job.code = exit_runtime;
  }
  job.log = log.str();
}

int cmd_simulate(const std::vector<std::string>& paths, const std::string& out, int jobs) {
  std::vector<SimulateJob> work;
  for (const auto& p : paths) {
    const fs::path dir = paths.size() == 1 ? fs::path(out) : fs::path(out) / fs::path(p).stem();
    work.push_back({p, dir, exit_ok, {}});
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < work.size(); i = next++) run_simulation(work[i]);
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(work.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int code = exit_ok;
  for (const auto& job : work) {
    (job.code == exit_ok ? std::cout : std::cerr) << job.log;
    if (job.code == exit_validation || (job.code == exit_runtime && code == exit_ok)) code = job.code;
  }
  return code;
}

struct RadialArgs {
  std::optional<std::string> scenario;
  double M = 1.0, L = 1.0, E = -0.5;
  double quad_tol = 1e-9, r_guard = 1e-6;
  int trace_points = 361;
  std::string out;
};

int cmd_radial(RadialArgs a, const CLI::App& cmd) {
  if (a.scenario) {
    const Scenario sc = Scenario::load(*a.scenario);
    if (!cmd.count("--M")) a.M = sc.number("radial", "M", a.M);
    if (!cmd.count("--L")) a.L = sc.number("radial", "L", a.L);
    if (!cmd.count("--E")) a.E = sc.number("radial", "E", a.E);
    if (!cmd.count("--quad-tol")) a.quad_tol = sc.number("radial", "quad_tol", a.quad_tol);
    if (!cmd.count("--r-guard")) a.r_guard = sc.number("radial", "r_guard", a.r_guard);
  }
  if (!(a.M > 0.0)) throw std::invalid_argument("M must be positive");
  const RadialPotential V = RadialPotential::newton(a.M);
  const EffectiveProfile profile = effective_profile(V, a.L, a.E, Bracket{});
  std::cout << "classification=" << to_string(profile.classification) << "\n";
  for (std::size_t i = 0; i < profile.turning_points.size(); ++i)
    std::cout << "turning_point_" << i + 1 << "=" << format_double(profile.turning_points[i]) << "\n";

  std::optional<KeplerElements> el;
  if (a.L != 0.0) {
    el = kepler_elements(a.M, a.L, a.E);
    std::cout << "p=" << format_double(el->p) << "\n"
              << "eps=" << format_double(el->eps) << "\n"
              << "r_per=" << format_double(el->r_per) << "\n"
              << "r_aph=" << format_double(el->r_aph) << "\n"
              << "a=" << format_double(el->a) << "\n"
              << "b=" << format_double(el->b) << "\n"
              << "c=" << format_double(el->c) << "\n"
              << "T=" << format_double(el->T) << "\n";
  }
  if (profile.classification == OrbitClass::bounded && profile.turning_points.size() >= 2) {
    const QuadratureOptions q{a.quad_tol, a.r_guard};
    const double r1 = profile.turning_points.front(), r2 = profile.turning_points.back();
    std::cout << "half_period=" << format_double(t_of_r(V, a.L, a.E, r1, r2, q)) << "\n"
              << "half_angle=" << format_double(phi_of_r(V, a.L, a.E, r1, r2, q)) << "\n";
  } else if (profile.classification == OrbitClass::collision && !profile.turning_points.empty()) {
    const QuadratureOptions q{a.quad_tol, a.r_guard};
    std::cout << "fall_time=" << format_double(t_of_r(V, a.L, a.E, profile.turning_points.back(), 0.0, q))
              << "\n";
  }

  if (!a.out.empty()) {
    fs::create_directories(a.out);
    {
      auto os = open_output(fs::path(a.out) / "profile.csv");
      CsvWriter csv(os, {"r", "V_eff"});
      const double hi = profile.turning_points.empty() ? 10.0 : 2.0 * profile.turning_points.back();
      for (int i = 1; i <= 400; ++i) {
        const double r = hi * i / 400.0;
        const double row[] = {r, v_eff(V, a.L, r)};
        csv.row(row);
      }
    }
    if (el) {
      std::vector<double> phis;
      for (int i = 0; i < a.trace_points; ++i)
        phis.push_back(2.0 * std::numbers::pi * i / std::max(1, a.trace_points - 1));
      const OrbitTrace trace = orbit_trace(*el, phis);
      auto os = open_output(fs::path(a.out) / "trace.csv");
      CsvWriter csv(os, {"phi", "r", "x", "y"});
      for (const auto& s : trace.samples) {
        const double row[] = {s.phi, s.r, s.x, s.y};
        csv.row(row);
      }
    }
  }
  return exit_ok;
}

int cmd_modes(const std::string& path, std::optional<double> eig_tol, std::optional<double> newton_tol,
              const std::string& out) {
  const Scenario sc = Scenario::load(path);
  const LagrangianSystem sys = build_system(sc);
  EquilibriumOptions opts;
  opts.eig_rel_tol = eig_tol.value_or(sc.number("modes", "eig_tol", opts.eig_rel_tol));
  opts.newton_tol = newton_tol.value_or(sc.number("modes", "newton_tol", opts.newton_tol));
  Vec guess = Vec::Zero(static_cast<Eigen::Index>(sys.dim()));
  if (const auto g = sc.numbers("modes", "guess")) {
    if (g->size() != sys.dim()) sc.fail("modes", "guess", "wrong length");
    guess = Eigen::Map<const Vec>(g->data(), static_cast<Eigen::Index>(g->size()));
  }
  const Equilibrium eq = find_equilibrium(sys, guess, opts);
  const QuadraticApprox qa = quadratic_approx(sys, eq.q0);
  const ModeSet modes = normal_modes(qa.alpha, qa.omega, opts.eig_rel_tol);
  std::cout << "classification=" << to_string(eq.classification) << "\n";
  std::ostringstream csv;
  write_modes_csv(csv, modes);
  std::cout << csv.str();
  if (!out.empty()) {
    fs::create_directories(out);
    auto os = open_output(fs::path(out) / "modes.csv");
    os << csv.str();
  }
  return exit_ok;
}

int cmd_hj(const std::string& path, double hj_tol, const std::string& out) {
  const Scenario sc = Scenario::load(path);
  const std::string family = sc.text("hj", "family").value_or("two_center");
  const int grid = static_cast<int>(sc.number("hj", "grid", 12));
  const double spread = sc.number("hj", "spread", 0.05);
  if (grid < 2) sc.fail("hj", "grid", "needs at least 2 points per axis");

  HJResidual residual;
  std::optional<SeparationTrace> trace;
  if (family == "two_center") {
    const TwoCenterConfig cfg{sc.number("hj", "c", 1.0), sc.number("hj", "k", 1.0)};
    const double C = sc.number("hj", "C", -0.5), c1 = sc.number("hj", "c1", -0.5);
    const LagrangianSystem ell = two_center_elliptic_system(cfg.c, cfg.k);
    const HJFamily fam = two_center_family(cfg);
    std::vector<Vec> xs, us;
    for (int i = 0; i < grid; ++i) {
      for (int j = 0; j < grid; ++j) {
        Vec x(2);
        x << 2.0 * cfg.c * (1.05 + 0.5 * i / (grid - 1)), 2.0 * cfg.c * (-0.9 + 1.8 * j / (grid - 1));
        xs.push_back(x);
        Vec u(2);
        u << C * (1.0 + spread * (2.0 * i / (grid - 1) - 1.0)), c1 * (1.0 + spread * (2.0 * j / (grid - 1) - 1.0));
        us.push_back(u);
      }
    }
    residual = hj_residual(ell, fam, xs, us);
    if (sc.has("initial")) {
      const LagrangianSystem sys = build_system(sc);
      const Trajectory traj = run(sys, build_initial_state(sc, sys), build_integrator(sc));
      trace = separation_constants(traj, cfg.c, cfg.k);
    }
  } else if (family == "kepler") {
    const double M = sc.number("hj", "M", 1.0), E = sc.number("hj", "E", -0.25), L = sc.number("hj", "L", 1.0);
    const KeplerElements el = kepler_elements(M, L, E);
    const HJFamily fam = kepler_radial_family(M, sc.number("hj", "r_anchor", 0.5 * (el.r_per + el.r_aph)));
    std::vector<Vec> xs, us;
    for (int i = 0; i < grid; ++i) {
      for (int j = 0; j < grid; ++j) {
        Vec x(2);
        x << el.r_per + (el.r_aph - el.r_per) * (0.3 + 0.4 * i / (grid - 1)), 2.0 * std::numbers::pi * j / grid;
        xs.push_back(x);
        Vec u(2);
        u << E * (1.0 + spread * (2.0 * i / (grid - 1) - 1.0)), L * (1.0 + spread * (2.0 * j / (grid - 1) - 1.0));
        us.push_back(u);
      }
    }
    residual = hj_residual(kepler_polar_system(M), fam, xs, us);
  } else {
    sc.fail("hj", "family", "expected two_center or kepler");
  }

  std::cout << "residual_max=" << format_double(residual.max) << "\n"
            << "residual_mean=" << format_double(residual.mean) << "\n"
            << "skipped=" << residual.skipped << "\n"
            << "solves=" << (residual.max <= hj_tol ? "true" : "false") << "\n";
  if (trace) {
    auto stdev = [](const std::vector<double>& v) {
      double mean = 0.0, var = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      for (double x : v) var += (x - mean) * (x - mean);
      return std::sqrt(var / static_cast<double>(v.size()));
    };
    std::cout << "std_C=" << format_double(stdev(trace->C)) << "\n"
              << "std_c1=" << format_double(stdev(trace->c1)) << "\n";
    if (!out.empty()) {
      fs::create_directories(out);
      auto os = open_output(fs::path(out) / "constants.csv");
      write_separation_csv(os, *trace);
    }
    if (trace->truncated) {
      std::cerr << "warning: trajectory left the elliptic chart\n";
      return exit_runtime;
    }
  }
  return exit_ok;
}

struct KGArgs {
  std::size_t n = 256;
  double dx = 0.1, m = 1.0, dt = 1e-3;
  std::size_t steps = 10000, sample_every = 100;
  std::string boundary = "periodic", profile = "gaussian";
  double width = 1.0;
  std::string out;
};

int cmd_field_kg(const KGArgs& a) {
  const Lattice1D lat(a.n, a.dx, a.boundary == "fixed_zero" ? Boundary::fixed_zero : Boundary::periodic);
  if (a.boundary != "periodic" && a.boundary != "fixed_zero")
    throw std::invalid_argument("boundary must be periodic or fixed_zero");
  ScalarField f{std::vector<double>(a.n), std::vector<double>(a.n), 0.0};
  const double len = lat.length();
  for (std::size_t i = 0; i < a.n; ++i) {
    const double x = lat.x(i);
    if (a.profile == "gaussian") {
      const double z = (x - 0.5 * len) / a.width;
      f.phi[i] = std::exp(-z * z);
      f.pi[i] = 2.0 * z / a.width * f.phi[i];  // right-moving for m = 0
    } else if (a.profile == "standing") {
      f.phi[i] = std::cos(2.0 * std::numbers::pi * x / len);
    } else {
      throw std::invalid_argument("profile must be gaussian or standing");
    }
  }
  KGRunOptions opts;
  opts.m = a.m;
  opts.dt = a.dt;
  opts.steps = a.steps;
  opts.sample_every = a.sample_every;
  const std::vector<ChargeSample> history = run_kg(lat, f, opts);
  const ChargeAudit audit = charge_conservation_audit(history);
  std::cout << "E_relative_drift=" << format_double(audit.E_relative) << "\n"
            << "P_relative_drift=" << format_double(audit.P_relative) << "\n";
  if (!a.out.empty()) {
    fs::create_directories(a.out);
    auto fos = open_output(fs::path(a.out) / "field.csv");
    write_field_csv(fos, lat, f);
    auto cos = open_output(fs::path(a.out) / "charges.csv");
    write_charges_csv(cos, history);
  }
  return exit_ok;
}

int cmd_field_maxwell(std::size_t n, double dx, std::optional<double> dt, std::size_t steps,
                      std::optional<std::uint64_t> seed, const std::string& out) {
  EMGrid grid(n, n, n, dx);
  randomize_divergence_free(grid, seed.value_or(default_seed()));
  const double step = dt.value_or(0.5 * dx / std::sqrt(3.0));
  const std::vector<EMSample> trace = run_maxwell(grid, step, steps, 1);
  double div_e = 0.0, div_b = 0.0, drift = 0.0;
  for (const auto& s : trace) {
    div_e = std::max(div_e, s.max_div_E);
    div_b = std::max(div_b, s.max_div_B);
    drift = std::max(drift, std::abs(s.energy - trace.front().energy));
  }
  std::cout << "max_div_E=" << format_double(div_e) << "\n"
            << "max_div_B=" << format_double(div_b) << "\n"
            << "energy_relative_drift=" << format_double(drift / trace.front().energy) << "\n";
  if (!out.empty()) {
    fs::create_directories(out);
    auto os = open_output(fs::path(out) / "constraints.csv");
    write_em_csv(os, trace);
  }
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lagrangian and Hamiltonian mechanics workbench"};
  app.require_subcommand(1);

  auto* simulate = app.add_subcommand("simulate", "Integrate scenarios and audit conserved charges");
  std::vector<std::string> scenario_paths;
  std::string sim_out;
  int jobs = 1;
  simulate->add_option("scenario", scenario_paths, "Scenario files")->required();
  simulate->add_option("--out", sim_out, "Output directory")->required();
  simulate->add_option("--jobs", jobs, "Scenarios run in parallel")->check(CLI::PositiveNumber);

  auto* radial = app.add_subcommand("radial", "Kepler radial motion and orbital elements");
  RadialArgs ra;
  radial->add_option("--scenario", ra.scenario, "Scenario with a [radial] section");
  radial->add_option("--M", ra.M, "Central mass");
  radial->add_option("--L", ra.L, "Angular momentum");
  radial->add_option("--E", ra.E, "Energy");
  radial->add_option("--quad-tol", ra.quad_tol, "Quadrature tolerance");
  radial->add_option("--r-guard", ra.r_guard, "Collision guard radius");
  radial->add_option("--trace-points", ra.trace_points, "Samples of the orbit trace");
  radial->add_option("--out", ra.out, "Directory for profile.csv and trace.csv");

  auto* modes = app.add_subcommand("modes", "Equilibrium classification and normal modes");
  std::string modes_path, modes_out;
  std::optional<double> eig_tol, newton_tol;
  modes->add_option("scenario", modes_path, "Scenario file")->required();
  modes->add_option("--eig-tol", eig_tol, "Relative zero-eigenvalue threshold");
  modes->add_option("--newton-tol", newton_tol, "Gradient norm tolerance");
  modes->add_option("--out", modes_out, "Directory for modes.csv");

  auto* hj = app.add_subcommand("hj", "Hamilton-Jacobi family residuals and separation constants");
  std::string hj_path, hj_out;
  double hj_tol = 1e-8;
  hj->add_option("scenario", hj_path, "Scenario with an [hj] section")->required();
  hj->add_option("--hj-tol", hj_tol, "Residual threshold");
  hj->add_option("--out", hj_out, "Directory for constants.csv");

  auto* field = app.add_subcommand("field", "Lattice field theory");
  field->require_subcommand(1);
  auto* kg = field->add_subcommand("kg", "1+1D Klein-Gordon lattice");
  KGArgs ka;
  kg->add_option("--n", ka.n, "Lattice sites");
  kg->add_option("--dx", ka.dx, "Lattice spacing");
  kg->add_option("--m", ka.m, "Mass");
  kg->add_option("--dt", ka.dt, "Time step");
  kg->add_option("--steps", ka.steps, "Steps");
  kg->add_option("--sample-every", ka.sample_every, "Steps between charge samples");
  kg->add_option("--boundary", ka.boundary, "periodic or fixed_zero");
  kg->add_option("--profile", ka.profile, "gaussian or standing");
  kg->add_option("--width", ka.width, "Gaussian width");
  kg->add_option("--out", ka.out, "Directory for field.csv and charges.csv");

  auto* maxwell = field->add_subcommand("maxwell", "Vacuum Maxwell on a periodic Yee grid");
  std::size_t em_n = 16, em_steps = 100;
  double em_dx = 1.0;
  std::optional<double> em_dt;
  std::optional<std::uint64_t> em_seed;
  std::string em_out;
  maxwell->add_option("--n", em_n, "Cells per axis");
  maxwell->add_option("--dx", em_dx, "Cell size");
  maxwell->add_option("--dt", em_dt, "Time step (default half the CFL bound)");
  maxwell->add_option("--steps", em_steps, "Steps");
  maxwell->add_option("--seed", em_seed, "Seed for the initial data (default NOETHERLAB_SEED)");
  maxwell->add_option("--out", em_out, "Directory for constraints.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_validation;
  }

  try {
    if (*simulate) return cmd_simulate(scenario_paths, sim_out, jobs);
    if (*radial) return cmd_radial(ra, *radial);
    if (*modes) return cmd_modes(modes_path, eig_tol, newton_tol, modes_out);
    if (*hj) return cmd_hj(hj_path, hj_tol, hj_out);
    if (*kg) return cmd_field_kg(ka);
    if (*maxwell) return cmd_field_maxwell(em_n, em_dx, em_dt, em_steps, em_seed, em_out);
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_validation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_validation;
  } catch (const InfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_validation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_runtime;
  }
  return exit_internal;
}

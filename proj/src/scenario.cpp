#include "noetherlab/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "noetherlab/csv.hpp"

namespace noetherlab {

ScenarioError::ScenarioError(const std::string& file, int line, const std::string& message)
    : std::runtime_error(file + ":" + std::to_string(line) + ": " + message), line_(line) {}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"system", {"dim", "coords", "metric", "mass", "potential", "lagrangian", "params", "r_guard",
                  "singular_points"}},
      {"initial", {"q", "p", "qdot"}},
      {"run", {"method", "dt", "steps", "formulation"}},
      {"symmetries", {}},
      {"radial", {"M", "L", "E", "quad_tol", "r_guard"}},
      {"modes", {"guess", "eig_tol", "newton_tol"}},
      {"hj", {"family", "c", "k", "M", "C", "c1", "E", "L", "grid", "spread", "r_anchor"}},
      {"field", {"kind", "n", "dx", "m", "dt", "steps", "boundary", "profile", "width", "seed", "sample_every"}},
  };
  return keys;
}

bool key_allowed(const std::string& section, const std::string& key) {
  if (section == "symmetries") return true;
  if (section == "system" && std::regex_match(key, std::regex("g[1-9][1-9]"))) return true;
  return known_keys().at(section).count(key) > 0;
}

bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

}  // namespace

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  int depth = 0;
  std::string current;
  for (char ch : text) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == ',' && depth == 0) {
      out.push_back(trim(current));
      current.clear();
    } else {
      current += ch;
    }
  }
  if (!trim(current).empty() || !out.empty()) out.push_back(trim(current));
  return out;
}

Scenario Scenario::parse(const std::string& text, const std::string& path) {
  Scenario sc;
  sc.path_ = path;
  std::istringstream in(text);
  std::string raw;
  std::string current;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ScenarioError(path, line_no, "malformed section header");
      current = trim(line.substr(1, line.size() - 2));
      if (!known_keys().count(current)) throw ScenarioError(path, line_no, "unknown section [" + current + "]");
      if (sc.sections_.count(current)) throw ScenarioError(path, line_no, "duplicate section [" + current + "]");
      sc.sections_[current].line = line_no;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ScenarioError(path, line_no, "expected key = value");
    if (current.empty()) throw ScenarioError(path, line_no, "key outside any section");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    const std::string where = "[" + current + "]." + key;
    if (key.empty()) throw ScenarioError(path, line_no, "empty key");
    if (!key_allowed(current, key)) throw ScenarioError(path, line_no, where + ": unknown key");
    auto& section = sc.sections_[current];
    if (section.entries.count(key)) throw ScenarioError(path, line_no, where + ": duplicate key");
    section.entries[key] = {value, line_no};
    section.order.push_back(key);
  }
  return sc;
}

Scenario Scenario::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError(path, 0, "cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

std::string Scenario::name() const { return std::filesystem::path(path_).stem().string(); }

bool Scenario::has(const std::string& section, const std::string& key) const {
  const auto* s = this->section(section);
  return s && s->entries.count(key);
}

const ScenarioSection* Scenario::section(const std::string& name) const {
  const auto it = sections_.find(name);
  return it == sections_.end() ? nullptr : &it->second;
}

void Scenario::fail(const std::string& section, const std::string& key, const std::string& message) const {
  int line = 0;
  if (const auto* s = this->section(section)) {
    line = s->line;
    if (const auto it = s->entries.find(key); it != s->entries.end()) line = it->second.line;
  }
  const std::string where = key.empty() ? "[" + section + "]" : "[" + section + "]." + key;
  throw ScenarioError(path_, line, where + ": " + message);
}

std::optional<std::string> Scenario::text(const std::string& section, const std::string& key) const {
  const auto* s = this->section(section);
  if (!s) return std::nullopt;
  const auto it = s->entries.find(key);
  if (it == s->entries.end()) return std::nullopt;
  return it->second.value;
}

std::optional<double> Scenario::number(const std::string& section, const std::string& key) const {
  const auto t = text(section, key);
  if (!t) return std::nullopt;
  double v = 0.0;
  if (!parse_double(*t, v)) fail(section, key, "expected a number, got '" + *t + "'");
  return v;
}

double Scenario::number(const std::string& section, const std::string& key, double fallback) const {
  return number(section, key).value_or(fallback);
}

std::optional<std::vector<double>> Scenario::numbers(const std::string& section, const std::string& key) const {
  const auto t = text(section, key);
  if (!t) return std::nullopt;
  std::vector<double> out;
  for (const auto& item : split_list(*t)) {
    double v = 0.0;
    if (!parse_double(item, v)) fail(section, key, "expected a list of numbers, got '" + item + "'");
    out.push_back(v);
  }
  return out;
}

namespace {

Binding parse_params(const Scenario& sc) {
  Binding out;
  const auto t = sc.text("system", "params");
  if (!t || trim(*t).empty()) return out;
  for (const auto& item : split_list(*t)) {
    const auto eq = item.find('=');
    double v = 0.0;
    if (eq == std::string::npos || !parse_double(item.substr(eq + 1), v))
      sc.fail("system", "params", "expected name=value pairs, got '" + item + "'");
    const std::string name = trim(item.substr(0, eq));
    if (out.count(name)) sc.fail("system", "params", "parameter '" + name + "' given twice");
    out[name] = v;
  }
  return out;
}

Guard parse_guard(const Scenario& sc, std::size_t dim) {
  const auto r_guard = sc.number("system", "r_guard");
  const auto points = sc.text("system", "singular_points");
  if (!r_guard) {
    if (points) sc.fail("system", "singular_points", "needs r_guard");
    return Guard::none();
  }
  if (!(*r_guard > 0.0)) sc.fail("system", "r_guard", "must be positive");
  if (!points) return Guard::around_origin(dim, *r_guard);
  Guard g;
  g.min_distance = *r_guard;
  g.description = "singular points";
  std::istringstream in(*points);
  std::string item;
  while (std::getline(in, item, ';')) {
    std::vector<double> coords;
    for (const auto& c : split_list(item)) {
      double v = 0.0;
      if (!parse_double(c, v)) sc.fail("system", "singular_points", "expected 'a,b; c,d' coordinates");
      coords.push_back(v);
    }
    if (coords.size() != dim) sc.fail("system", "singular_points", "each point needs " + std::to_string(dim) + " coordinates");
    g.singular_points.push_back(Eigen::Map<const Vec>(coords.data(), static_cast<Eigen::Index>(dim)));
  }
  return g;
}

}  // namespace

LagrangianSystem build_system(const Scenario& sc) {
  if (!sc.has("system")) sc.fail("system", "", "missing section");
  const auto coords_text = sc.text("system", "coords");
  if (!coords_text) sc.fail("system", "coords", "missing");
  const std::vector<std::string> coords = split_list(*coords_text);
  if (const auto dim = sc.number("system", "dim"); dim && *dim != static_cast<double>(coords.size()))
    sc.fail("system", "dim", "does not match the number of coordinates");
  const Binding params = parse_params(sc);
  const Guard guard = parse_guard(sc, coords.size());
  const auto lagrangian = sc.text("system", "lagrangian");
  const auto potential = sc.text("system", "potential");
  const std::string metric = sc.text("system", "metric").value_or(lagrangian ? "general" : "euclidean");

  try {
    if (lagrangian) {
      if (potential) sc.fail("system", "potential", "cannot be combined with lagrangian");
      if (metric != "general") sc.fail("system", "metric", "must be 'general' when lagrangian is given");
      return LagrangianSystem::general(coords, *lagrangian, params, guard);
    }
    if (!potential) sc.fail("system", "potential", "missing");
    if (metric == "euclidean") {
      const double mass = sc.number("system", "mass", 1.0);
      if (!(mass > 0.0)) sc.fail("system", "mass", "must be positive");
      return LagrangianSystem::euclidean(coords, mass, *potential, params, guard);
    }
    if (metric != "tensor") sc.fail("system", "metric", "expected euclidean, tensor or general");
    const std::size_t n = coords.size();
    std::vector<std::string> entries(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const std::string key = "g" + std::to_string(std::min(i, j) + 1) + std::to_string(std::max(i, j) + 1);
        const auto e = sc.text("system", key);
        if (!e) sc.fail("system", key, "missing metric entry");
        entries[i * n + j] = *e;
      }
    }
    return LagrangianSystem::with_metric(coords, entries, *potential, params, guard);
  } catch (const ScenarioError&) {
    throw;
  } catch (const ParseError& e) {
    const std::string key = lagrangian ? "lagrangian" : "potential";
    sc.fail("system", key, e.what());
  } catch (const std::exception& e) {
    sc.fail("system", "", e.what());
  }
}

PhaseState build_initial_state(const Scenario& sc, const LagrangianSystem& sys) {
  if (!sc.has("initial")) sc.fail("initial", "", "missing section");
  const std::size_t n = sys.dim();
  auto vector_of = [&](const std::string& key) {
    const auto v = sc.numbers("initial", key);
    if (!v) sc.fail("initial", key, "missing");
    if (v->size() != n)
      sc.fail("initial", key, "expected " + std::to_string(n) + " values, got " + std::to_string(v->size()));
    return Vec(Eigen::Map<const Vec>(v->data(), static_cast<Eigen::Index>(n)));
  };
  const Vec q = vector_of("q");
  const bool has_p = sc.has("initial", "p");
  const bool has_qdot = sc.has("initial", "qdot");
  if (has_p == has_qdot) sc.fail("initial", has_p ? "qdot" : "p", "give exactly one of p and qdot");
  if (!sys.admissible(q)) sc.fail("initial", "q", "outside the guarded domain (" + sys.guard().description + ")");
  try {
    if (has_p) return PhaseState{q, vector_of("p")};
    return to_momenta(sys, VelocityState{q, vector_of("qdot")});
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    sc.fail("initial", has_p ? "p" : "qdot", e.what());
  }
}

IntegratorSpec build_integrator(const Scenario& sc) {
  IntegratorSpec spec;
  const std::string method = sc.text("run", "method").value_or("rk4");
  if (method == "rk4") spec.method = Method::rk4;
  else if (method == "verlet") spec.method = Method::verlet;
  else sc.fail("run", "method", "expected rk4 or verlet");
  const std::string form = sc.text("run", "formulation").value_or("hamilton");
  if (form == "hamilton") spec.formulation = Formulation::hamilton;
  else if (form == "euler_lagrange") spec.formulation = Formulation::euler_lagrange;
  else sc.fail("run", "formulation", "expected hamilton or euler_lagrange");
  spec.dt = sc.number("run", "dt", 1e-3);
  if (!(spec.dt > 0.0)) sc.fail("run", "dt", "must be positive");
  const double steps = sc.number("run", "steps", 1000.0);
  if (!(steps >= 1.0) || steps != std::floor(steps)) sc.fail("run", "steps", "must be a positive integer");
  spec.steps = static_cast<std::size_t>(steps);
  return spec;
}

std::vector<Monitor> build_monitors(const Scenario& sc, const LagrangianSystem& sys) {
  std::vector<Monitor> out = builtin_monitors(sys);
  const auto* sym = sc.section("symmetries");
  if (!sym) return out;
  for (const auto& key : sym->order) {
    const std::string& value = sym->entries.at(key).value;
    try {
      if (key == "runge_lenz") {
        double M = 0.0;
        if (!parse_double(value, M)) {
          const auto it = sys.params().find(trim(value));
          if (it == sys.params().end()) sc.fail("symmetries", key, "expected a number or parameter name");
          M = it->second;
        }
        for (auto& m : runge_lenz_monitors(sys, M)) out.push_back(std::move(m));
        continue;
      }
      out.push_back(charge_monitor(sys, SymmetryField(sys, split_list(value), key)));
    } catch (const ScenarioError&) {
      throw;
    } catch (const std::exception& e) {
      sc.fail("symmetries", key, e.what());
    }
  }
  return out;
}

SimulationOutcome simulate_scenario(const Scenario& sc) {
  LagrangianSystem sys = build_system(sc);
  const PhaseState s0 = build_initial_state(sc, sys);
  const IntegratorSpec spec = build_integrator(sc);
  try {
    spec.validate(sys);
  } catch (const std::invalid_argument& e) {
    sc.fail("run", "method", e.what());
  }
  const std::vector<Monitor> monitors = build_monitors(sc, sys);
  Trajectory traj = run(sys, s0, spec);
  std::vector<DriftReport> reports = audit(traj, monitors);
  return {std::move(sys), std::move(traj), std::move(reports)};
}

void write_summary(std::ostream& os, const Scenario& sc, const SimulationOutcome& outcome) {
  const Trajectory& traj = outcome.trajectory;
  os << "scenario=" << sc.name() << "\n";
  os << "system=" << outcome.system.fingerprint() << "\n";
  os << "integrator=" << traj.meta.integrator << "\n";
  os << "dt=" << format_double(traj.meta.dt) << "\n";
  os << "samples=" << traj.size() << "\n";
  os << "t_end=" << format_double(traj.t.back()) << "\n";
  os << "truncated=" << (traj.truncated ? "true" : "false") << "\n";
  if (traj.truncated) os << "stop_reason=" << traj.stop_reason << "\n";
  for (const auto& r : outcome.audit) {
    if (r.valid)
      os << "drift." << r.label << "=" << format_double(r.relative_drift) << "\n";
    else
      os << "drift." << r.label << "=invalid (" << r.error << ")\n";
  }
}

}  // namespace noetherlab

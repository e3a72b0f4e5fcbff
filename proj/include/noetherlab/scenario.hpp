#ifndef NOETHERLAB_SCENARIO_HPP
#define NOETHERLAB_SCENARIO_HPP

// INI-style scenario files: [section] headers, key = value, # comments.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "noetherlab/conserve.hpp"
#include "noetherlab/integrate.hpp"
#include "noetherlab/mechsys.hpp"

namespace noetherlab {

class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(const std::string& file, int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

struct ScenarioEntry {
  std::string value;
  int line = 0;
};

struct ScenarioSection {
  int line = 0;
  std::vector<std::string> order;
  std::map<std::string, ScenarioEntry> entries;
};

class Scenario {
 public:
  static Scenario parse(const std::string& text, const std::string& path);
  static Scenario load(const std::string& path);

  const std::string& path() const { return path_; }
  /// File stem, used for output directories.
  std::string name() const;
  bool has(const std::string& section) const { return sections_.count(section) > 0; }
  bool has(const std::string& section, const std::string& key) const;
  const ScenarioSection* section(const std::string& name) const;

  std::optional<std::string> text(const std::string& section, const std::string& key) const;
  std::optional<double> number(const std::string& section, const std::string& key) const;
  double number(const std::string& section, const std::string& key, double fallback) const;
  std::optional<std::vector<double>> numbers(const std::string& section, const std::string& key) const;

  /// Diagnostic pinned to the line of section.key (or the section header).
  [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& message) const;

 private:
  std::string path_;
  std::map<std::string, ScenarioSection> sections_;
};

/// Comma-separated items at parenthesis depth zero, trimmed.
std::vector<std::string> split_list(const std::string& text);

LagrangianSystem build_system(const Scenario& sc);
PhaseState build_initial_state(const Scenario& sc, const LagrangianSystem& sys);
IntegratorSpec build_integrator(const Scenario& sc);
std::vector<Monitor> build_monitors(const Scenario& sc, const LagrangianSystem& sys);

struct SimulationOutcome {
  LagrangianSystem system;
  Trajectory trajectory;
  std::vector<DriftReport> audit;
};

SimulationOutcome simulate_scenario(const Scenario& sc);

void write_summary(std::ostream& os, const Scenario& sc, const SimulationOutcome& outcome);

}  // namespace noetherlab

#endif  // NOETHERLAB_SCENARIO_HPP

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dwgeom/field_solver.hpp"
#include "dwgeom/hamilton_jacobi.hpp"
#include "dwgeom/theory.hpp"

namespace dwgeom {

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Task { AlgebraCheck, VerifyXh, Integrate, HjCheck, FoliationCheck };

Task task_from_name(const std::string& name);
std::string task_name(Task t);

struct InitialSpec {
  std::string type = "plane-wave";  // plane-wave | standing-wave | gaussian | mechanics
  double amplitude = 1.0;
  int mode = 1;
  double width = 1.0;
  double q0 = 1.0;
  double p0 = 0.0;
};

struct SectionSpec {
  // Either a potential (builtin name or expressions for S^mu) or explicit
  // section component expressions over x1..xn, q1..qN.
  std::string potential_name;                // "free-particle" | "oscillator" | "zero"
  std::vector<std::string> potential_exprs;  // n entries
  std::vector<std::string> momenta_exprs;    // n*N entries, mu-major
  std::string affine_expr;

  bool has_potential() const { return !potential_name.empty() || !potential_exprs.empty(); }
  bool has_section() const { return !momenta_exprs.empty(); }
};

struct ScenarioConfig {
  Task task = Task::AlgebraCheck;
  std::string theory_name = "oscillator";
  double mass = 1.0;
  std::string potential_expr;  // custom theory potential V(q1)
  int custom_n = 2;

  int samples = 100;
  int gauges = 10;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = ".";

  GridSpec grid;
  InitialSpec initial;
  int sample_every = 1;
  std::optional<double> energy_drift_tol;

  SectionSpec section;
  DomainBox domain;
  double tolerance = 1e-6;
  bool require_t4 = false;
  bool expect_integrable = true;
};

/// Parses and validates a JSON config document (strict: unknown keys are
/// rejected). task_from_cli, when nonempty, must agree with any "task" key.
ScenarioConfig parse_config(const std::string& json_text, const std::string& task_from_cli);

struct ScenarioResult {
  int exit_code = 0;  // 0 pass, 1 check failure, 2 config error, 3 divergence
  std::vector<std::string> summary;
  std::vector<std::filesystem::path> artifacts;
};

/// Dispatches the configured task, writing CSV artifacts and summary.json
/// under cfg.output_dir. Identical config and seed yield byte-identical CSV
/// artifacts.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

/// Builds the configured theory (builtin registry or custom potential).
Theory theory_from_config(const ScenarioConfig& cfg);

}  // namespace dwgeom

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dwgeom/expr.hpp"
#include "dwgeom/field_solver.hpp"
#include "dwgeom/scenario.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitDivergence = 3;

int run_task(const std::string& task, const std::string& config_path, long long seed,
             const std::string& out_dir) {
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "error [config]: cannot open '" << config_path << "'\n";
    return kExitConfigError;
  }
  std::stringstream buf;
  buf << in.rdbuf();

  dwgeom::ScenarioConfig cfg = dwgeom::parse_config(buf.str(), task);
  if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
  if (!out_dir.empty()) cfg.output_dir = out_dir;

  dwgeom::ScenarioResult res = dwgeom::run_scenario(cfg);
  for (const std::string& line : res.summary) std::cout << line << "\n";
  for (const auto& artifact : res.artifacts) std::cout << "wrote " << artifact.string() << "\n";
  return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multisymplectic De Donder-Weyl field theory toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  long long seed = -1;
  std::string out_dir;

  const char* tasks[] = {"algebra-check", "verify-xh", "integrate", "hj-check",
                         "foliation-check"};
  const char* descriptions[] = {
      "exterior algebra and canonical form checks",
      "defining relation i_X omega = dh at random phase points",
      "integrate the field equations and export the trajectory",
      "Hamilton-Jacobi potential / section condition checks",
      "Frobenius integrability of the projected distribution"};
  for (int k = 0; k < 5; ++k) {
    CLI::App* sub = app.add_subcommand(tasks[k], descriptions[k]);
    sub->add_option("--config", config_path, "JSON scenario config")->required();
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--out", out_dir, "override the output directory");
  }

  CLI11_PARSE(app, argc, argv);

  std::string task = app.get_subcommands().front()->get_name();
  try {
    return run_task(task, config_path, seed, out_dir);
  } catch (const dwgeom::expr_parse_error& e) {
    std::cerr << "error [parser] at byte " << e.offset << ": " << e.what()
              << " (expected " << e.expected << ")\n";
    return kExitConfigError;
  } catch (const dwgeom::config_error& e) {
    std::cerr << "error [config]: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const dwgeom::divergence_error& e) {
    std::cerr << "error [field_solver]: " << e.what() << " at t = " << e.t << "\n";
    return kExitDivergence;
  } catch (const dwgeom::singular_lagrangian_error& e) {
    std::cerr << "error [dedonder_weyl]: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const dwgeom::algebra_error& e) {
    std::cerr << "error [multivector_algebra]: " << e.what() << "\n";
    return kExitCheckFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailure;
  }
}

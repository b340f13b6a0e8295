#include "qsturm/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Equilibria, Sturm permutation and connection graph of u_t = a(x,u,u_x) u_xx + f(x,u,u_x) "
               "on [0, pi] with Neumann boundary conditions"};
  qsturm::RunConfig config;
  std::string stage = "verify";
  app.add_option("--problem", config.problem, "Problem file")->required()->check(CLI::ExistingFile);
  app.add_option("--stage", stage, "Last stage to run")
      ->check(CLI::IsMember({"equilibria", "permutation", "graph", "verify"}));
  app.add_option("--out", config.out, "Output directory")->capture_default_str();
  app.add_option("--seed", config.seed, "Seed for random verification directions")->capture_default_str();
  app.add_option("--grid", config.grid, "Simulation grid size for verification (>= 101)");
  app.add_option("--scan", config.scan, "Number of shooting scan points");
  app.add_option("--tol", config.tol, "Relative tolerance of the shooting integrator");
  app.add_flag("--trajectories", config.trajectories, "Write every verification trajectory as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qsturm::kExitUsage;
  }
  config.stage = qsturm::parse_stage(stage);
  try {
    return qsturm::run(config, &std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return qsturm::kExitUnexpected;
  }
}

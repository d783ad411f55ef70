// Command-line front end for adaptive runs.
//
//   safem --problem mixed --domain l-shape --field one --mode safem --out run.csv
//
// Exit status: 0 on success, 2 for invalid flags or settings, 3 when a linear
// solve fails (the message names the level), 1 for anything else.

#include <future>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "safem/experiment.hpp"

namespace {

int run_one(const safem::ExperimentConfig& config) {
  std::cout << safem::run_experiment(config).summary << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  safem::ExperimentConfig cfg;
  std::string sweep;
  std::size_t max_elements = cfg.params.max_elements;

  CLI::App app{"Adaptive FEM with separate and collective marking"};
  app.set_config("--config", "", "Read settings from a key=value file; flags override it");
  app.add_option("--problem", cfg.problem, "mixed, ls, data-only or oscillation-only")->capture_default_str();
  app.add_option("--domain", cfg.domain, "unit-square or l-shape")->capture_default_str();
  app.add_option("--mesh", cfg.mesh, "Initial mesh file (overrides --domain)");
  app.add_option("--field", cfg.field, "one, zero, linear-x, radial-alpha:<a>[@x,y], checkerboard:<k>")
      ->capture_default_str();
  app.add_option("--mode", cfg.mode, "safem, cafem, uniform or approx-only")->capture_default_str();
  app.add_option("--theta-a", cfg.params.theta_a, "Bulk parameter of Doerfler marking")->capture_default_str();
  app.add_option("--kappa", cfg.params.kappa, "Case (A) threshold mu^2 <= kappa eta^2")->capture_default_str();
  app.add_option("--rho-b", cfg.params.rho_b, "Case (B) reduction of mu^2")->capture_default_str();
  app.add_option("--sigma-tol", cfg.params.sigma_tol, "Stop once sigma falls below this")->capture_default_str();
  app.add_option("--max-elements", max_elements, "Stop once the mesh has this many elements")
      ->capture_default_str();
  app.add_option("--quad-degree", cfg.quad_degree, "Exactness degree of the data quadrature")
      ->capture_default_str();
  app.add_option("--approx-tol", cfg.approx_tol, "Tolerance for --mode approx-only")->capture_default_str();
  app.add_option("--seed", cfg.seed, "Seed for randomised hierarchies in the report")->capture_default_str();
  app.add_option("--out", cfg.out, "Level CSV (- for stdout)");
  app.add_option("--report", cfg.report, "Axiom report; a .kv suffix selects key=value output");
  app.add_option("--dump-solution", cfg.dump_solution, "Write the final discrete solution");
  app.add_option("--save-mesh", cfg.save_mesh, "Write the final mesh");
  app.add_flag("--timings", cfg.params.timings, "Record wall time per level in the CSV");
  app.add_option("--sweep", sweep, "Run key=v1,v2,... in parallel, one run per value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  cfg.params.max_elements = max_elements;

  try {
    if (sweep.empty()) {
      cfg.validate();
      return run_one(cfg);
    }
    const auto configs = safem::expand_sweep(cfg, sweep);
    for (const auto& c : configs) c.validate();
    std::vector<std::future<safem::ExperimentResult>> jobs;
    for (const auto& c : configs) jobs.push_back(std::async(std::launch::async, safem::run_experiment, c));
    const std::string key = sweep.substr(0, sweep.find('='));
    const std::string values = sweep.substr(sweep.find('=') + 1);
    std::size_t start = 0;
    for (auto& job : jobs) {
      const std::size_t end = values.find(',', start);
      const std::string v = values.substr(start, end == std::string::npos ? std::string::npos : end - start);
      start = end + 1;
      std::cout << key << "=" << v << " " << job.get().summary << "\n";
    }
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\nRun with --help for usage.\n";
    return 2;
  } catch (const safem::LevelError& e) {
    std::cerr << "solver failure at " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

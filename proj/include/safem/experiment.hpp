#pragma once

// One configured experiment: problem and domain selection, the adaptive run,
// CSV and report emission. The command-line tool is a thin wrapper.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "safem/axioms.hpp"
#include "safem/driver.hpp"

namespace safem {

struct ExperimentConfig {
  std::string problem = "mixed";    // mixed | ls | data-only | oscillation-only
  std::string domain = "unit-square";
  std::string mesh;                  // mesh file, overrides domain when set
  std::string field = "one";
  std::string mode = "safem";        // safem | cafem | uniform | approx-only
  SafemParams params;
  int quad_degree = 5;
  double approx_tol = 1e-4;
  std::uint64_t seed = 1;
  std::string out;                   // CSV path, "-" for stdout, empty for none
  std::string report;                // axiom report path (text; ".kv" suffix for key=value)
  std::string dump_solution;         // final discrete solution
  std::string save_mesh;             // final mesh

  /// Throws std::invalid_argument naming the offending setting.
  void validate() const;
};

struct ExperimentResult {
  RunResult run;
  std::optional<RateFit> rate;
  std::vector<AxiomReport> reports;
  std::size_t approx_elements = 0;  // approx-only mode
  double approx_mu2 = 0.0;
  std::string summary;
};

/// Runs one experiment and writes the requested files. Solver failures
/// surface as LevelError.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Axiom checks applicable to a finished run.
std::vector<AxiomReport> standard_reports(const ExperimentConfig& config, const RunResult& run,
                                          const Triangulation& T0);

/// Expands "key=v1,v2,..." into one config per value. Keys are the long
/// option names without dashes (theta-a, kappa, rho-b, field, problem, ...).
/// Output paths receive a ".key=value" suffix before their extension.
std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& base, const std::string& spec);

/// Applies a single "key=value" setting, as used by sweeps.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

}  // namespace safem

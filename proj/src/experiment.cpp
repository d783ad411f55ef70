#include "safem/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "safem/domains.hpp"
#include "safem/mesh_io.hpp"

namespace safem {

namespace {

const char* const kProblems[] = {"mixed", "ls", "data-only", "oscillation-only"};
const char* const kModes[] = {"safem", "cafem", "uniform", "approx-only"};

template <std::size_t N>
bool one_of(const std::string& s, const char* const (&list)[N]) {
  for (const char* x : list) {
    if (s == x) return true;
  }
  return false;
}

// Opens `path` for writing; "-" is stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path != "-") {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot write " + path);
    }
  }
  std::ostream& get() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

std::string with_suffix(const std::string& path, const std::string& suffix) {
  if (path.empty() || path == "-") return path;
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + suffix;
  return path.substr(0, dot) + suffix + path.substr(dot);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size()) throw std::invalid_argument(key + ": not a number: '" + v + "'");
  return d;
}

std::size_t to_size(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d < 0 || d != std::floor(d)) throw std::invalid_argument(key + ": not a non-negative integer: '" + v + "'");
  return static_cast<std::size_t>(d);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!one_of(problem, kProblems)) throw std::invalid_argument("unknown problem '" + problem + "'");
  if (!one_of(mode, kModes)) throw std::invalid_argument("unknown mode '" + mode + "'");
  if (mesh.empty() && domain != "unit-square" && domain != "l-shape") {
    throw std::invalid_argument("unknown domain '" + domain + "'");
  }
  parse_field(field);
  params.validate();
  if (quad_degree < 1 || quad_degree > 30) throw std::invalid_argument("quad-degree must lie in [1, 30]");
  if (!(approx_tol > 0.0)) throw std::invalid_argument("approx-tol must be positive");
}

void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& value) {
  if (key == "problem") c.problem = value;
  else if (key == "domain") c.domain = value;
  else if (key == "mesh") c.mesh = value;
  else if (key == "field") c.field = value;
  else if (key == "mode") c.mode = value;
  else if (key == "theta-a") c.params.theta_a = to_double(key, value);
  else if (key == "kappa") c.params.kappa = to_double(key, value);
  else if (key == "rho-b") c.params.rho_b = to_double(key, value);
  else if (key == "sigma-tol") c.params.sigma_tol = to_double(key, value);
  else if (key == "max-elements") c.params.max_elements = to_size(key, value);
  else if (key == "quad-degree") c.quad_degree = static_cast<int>(to_size(key, value));
  else if (key == "approx-tol") c.approx_tol = to_double(key, value);
  else if (key == "seed") c.seed = to_size(key, value);
  else throw std::invalid_argument("cannot sweep over '" + key + "'");
}

std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& base, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
    throw std::invalid_argument("sweep must look like key=v1,v2,...");
  }
  const std::string key = spec.substr(0, eq);
  std::vector<ExperimentConfig> out;
  std::stringstream values(spec.substr(eq + 1));
  std::string v;
  while (std::getline(values, v, ',')) {
    ExperimentConfig c = base;
    apply_setting(c, key, v);
    const std::string suffix = "." + key + "=" + v;
    c.out = with_suffix(c.out, suffix);
    c.report = with_suffix(c.report, suffix);
    c.dump_solution = with_suffix(c.dump_solution, suffix);
    c.save_mesh = with_suffix(c.save_mesh, suffix);
    out.push_back(std::move(c));
  }
  if (out.empty()) throw std::invalid_argument("sweep lists no values");
  return out;
}

std::vector<AxiomReport> standard_reports(const ExperimentConfig& config, const RunResult& run,
                                          const Triangulation& T0) {
  std::vector<AxiomReport> reps;
  reps.push_back(check_A12(run.records));
  reps.push_back(check_rlinear(run.records));
  reps.push_back(check_QM(run.records, config.problem == "ls"));
  reps.push_back(check_A4_telescope(run.records));
  const auto field = parse_field(config.field);
  const auto hierarchy = random_hierarchy(T0, 10, config.seed);
  reps.push_back(check_B2(hierarchy, oscillation_functional(field, rule_for_degree(config.quad_degree))));
  return reps;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const Triangulation T0 = make_domain(config.mesh.empty() ? config.domain : config.mesh);
  const ScalarField field = parse_field(config.field);
  const QuadratureRule& rule = rule_for_degree(config.quad_degree);
  auto problem = make_problem(config.problem, field, rule);

  ExperimentResult res;
  char line[256];
  if (config.mode == "approx-only") {
    ApproxState state(T0, problem->data_functional());
    const Triangulation T = state.run(config.approx_tol);
    res.approx_elements = T.size();
    res.approx_mu2 = state.mu2_of(T);
    res.run.final_mesh = T;
    std::snprintf(line, sizeof line, "elements=%zu added=%zu mu2=%.17g tol=%.17g", T.size(), T.size() - T0.size(),
                  res.approx_mu2, config.approx_tol);
    res.summary = line;
  } else {
    if (config.mode == "safem") res.run = safem_run(*problem, config.params, T0);
    else if (config.mode == "cafem") res.run = cafem_run(*problem, config.params, T0);
    else res.run = uniform_run(*problem, config.params, T0);

    try {
      res.rate = fit_rate(res.run.records);
    } catch (const std::invalid_argument&) {
      res.rate.reset();
    }
    const auto& last = res.run.records.back();
    std::snprintf(line, sizeof line, "fitted_s=%.6g levels=%zu final_sigma=%.6g", res.rate ? res.rate->s : NAN,
                  res.run.records.size(), std::sqrt(last.sigma2));
    res.summary = line;

    if (!config.out.empty()) {
      Sink sink(config.out);
      write_csv(sink.get(), res.run.records);
    }
    if (!config.report.empty()) {
      res.reports = standard_reports(config, res.run, T0);
      Sink sink(config.report);
      const bool kv = config.report.size() > 3 && config.report.substr(config.report.size() - 3) == ".kv";
      if (kv) write_report_kv(sink.get(), res.reports);
      else write_report_text(sink.get(), res.reports);
    }
    if (!config.dump_solution.empty()) {
      // The loop keeps no solutions; solve the final mesh once more.
      const auto state = problem->solve(res.run.final_mesh);
      Sink sink(config.dump_solution);
      problem->dump(sink.get(), *state);
    }
  }
  if (!config.save_mesh.empty()) {
    Sink sink(config.save_mesh);
    write_mesh(sink.get(), res.run.final_mesh);
  }
  return res;
}

}  // namespace safem

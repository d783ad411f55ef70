#pragma once

// Adaptive loops over a ProblemInstance: separate marking (SAFEM), collective
// marking on sigma^2 = eta^2 + mu^2 (CAFEM) and uniform refinement, plus the
// level log and rate fitting.

#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "safem/problem.hpp"

namespace safem {

struct SafemParams {
  double theta_a = 0.3;
  double kappa = 1.0;
  double rho_b = 0.5;
  double sigma_tol = 1e-6;           // stop once sigma <= sigma_tol
  std::size_t max_elements = 200000;  // stop once |T| >= max_elements
  std::size_t max_levels = 10000;
  bool timings = false;               // record wall time per level
  bool keep_meshes = false;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct LevelRecord {
  std::size_t level = 0;
  std::size_t elements = 0;
  std::size_t N = 0;  // |T_l| - |T_0|
  char case_flag = 'A';  // 'A', 'B' or 'U' (uniform)
  double eta2 = 0.0;
  double mu2 = 0.0;
  double sigma2 = 0.0;
  double delta2 = kNaN;        // to the next level, back-filled
  double delta2_check = kNaN;  // independent value where the problem has one
  std::size_t marked = 0;      // |M_l| in Case A, |T_{l+1}| - |T_l| in Case B
  double seconds = 0.0;
  double functional = kNaN;
  double marked_eta2 = kNaN;   // eta^2(M_l), Case A
  double approx_tol = kNaN;    // Case B tolerance rho_B mu^2_l
  double approx_mu2 = kNaN;    // mu^2(T_Tol), Case B
  double residual = 0.0;
  double constraint_defect = 0.0;
};

struct RunResult {
  std::vector<LevelRecord> records;
  std::vector<Triangulation> meshes;  // only with keep_meshes
  std::string stop_reason;            // "sigma-tol", "sigma-zero", "max-elements", "max-levels"
  Triangulation final_mesh;
};

/// A solver failure tagged with the level at which it occurred.
class LevelError : public std::runtime_error {
 public:
  LevelError(std::size_t level, const std::string& what)
      : std::runtime_error("level " + std::to_string(level) + ": " + what), level_(level) {}
  std::size_t level() const { return level_; }

 private:
  std::size_t level_;
};

RunResult safem_run(ProblemInstance& problem, const SafemParams& params, const Triangulation& T0);
RunResult cafem_run(ProblemInstance& problem, const SafemParams& params, const Triangulation& T0);
/// Two uniform bisection sweeps per level, so |T| grows by four.
RunResult uniform_run(ProblemInstance& problem, const SafemParams& params, const Triangulation& T0);

struct RateFit {
  double s = 0.0;          // minus the slope of log sigma against log(1 + N)
  double intercept = 0.0;
  std::size_t used = 0;
  std::vector<double> s_grid;
  std::vector<double> sup;  // sup_l (1 + N_l)^s sigma_l for each s in s_grid
};

/// Least-squares rate over records with sigma > 0 and N >= min_N. Throws
/// std::invalid_argument when fewer than four records qualify.
RateFit fit_rate(const std::vector<LevelRecord>& records, const std::vector<double>& s_grid = {},
                 std::size_t min_N = 0);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

void write_csv_header(std::ostream& out);
void write_csv(std::ostream& out, const std::vector<LevelRecord>& records);

}  // namespace safem

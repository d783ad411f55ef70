#pragma once

// Empirical checks of the axioms' observable consequences on recorded runs
// and on refinement hierarchies. Constants are searched for as certificates;
// a failing check names the offending levels.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "safem/driver.hpp"

namespace safem {

struct AxiomReport {
  std::string name;
  bool pass = false;
  std::size_t pairs = 0;
  std::map<std::string, double> values;  // fitted constants and worst ratios
  std::string witness;                   // set on failure
};

/// mu(T_j) <= mu(T_i) (1 + 1e-9) for all i < j of a nested hierarchy.
AxiomReport check_B2(const std::vector<Triangulation>& hierarchy, const ElementFunctional& mu2);

/// Pairwise over all i < j of the records. With `least_squares` the
/// functional must not grow beyond 1e-9 relative; otherwise the largest
/// sigma_j / sigma_i must stay below `bound`.
AxiomReport check_QM(const std::vector<LevelRecord>& records, bool least_squares, double bound = 10.0);

/// Searches Lambda over {0} and 25 log-spaced points in [1e-2, 1e4] for the
/// smallest rho with sigma2_{l+1} - Lambda delta2_l <= rho sigma2_l on every
/// recorded level. Passes if some Lambda gives rho < 1.
AxiomReport check_A12(const std::vector<LevelRecord>& records);

/// q from a least-squares fit of log sigma2_l against l, C the smallest
/// constant with sigma2_{l+m} <= C q^m sigma2_l on all pairs. Passes if
/// q <= 0.999.
AxiomReport check_rlinear(const std::vector<LevelRecord>& records);

/// sum_{k >= l} delta2_k <= C sigma2_l with C reported. When the records
/// carry a functional, also checks that sum_{k >= l} delta2_check_k equals
/// functional_l - functional_last within `tol` functional_0, for every l.
AxiomReport check_A4_telescope(const std::vector<LevelRecord>& records, double tol = 1e-8);

struct B1Options {
  std::vector<double> tolerances;  // decreasing
  std::size_t uniform_levels = 8;  // single bisection sweeps for the comparison
  double slope_margin = 0.05;
};

/// Runs APPROX over the tolerances, requires mu2(T_Tol) <= Tol every time,
/// and fits the growth slope of log(|T_Tol| - |T0| + 1) against -log Tol.
/// The comparison is the slope of log |T| against -log mu2 over the last four
/// of `uniform_levels` uniform bisection sweeps; passes when the adaptive
/// slope is no worse than that plus the margin.
AxiomReport check_B1_rate(const Triangulation& T0, const ElementFunctional& mu2, const B1Options& opt);

/// A nested hierarchy of `levels` meshes from T0, each obtained by refining
/// a random fraction of the previous one.
std::vector<Triangulation> random_hierarchy(const Triangulation& T0, std::size_t levels, std::uint64_t seed,
                                            double fraction = 0.2);

void write_report_text(std::ostream& out, const std::vector<AxiomReport>& reports);
/// One "check.key=value" line per entry.
void write_report_kv(std::ostream& out, const std::vector<AxiomReport>& reports);

}  // namespace safem

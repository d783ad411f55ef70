#pragma once

// Lowest-order Raviart-Thomas mixed FEM for the dual Poisson problem
//
//   (p, q) + (u, div q) = 0          for all q in RT0(T)
//   (v, div p)          = -(f, v)    for all v in P0(T)
//
// with u = 0 on the boundary imposed naturally, p = grad u, div p = -f.

#include <vector>

#include "safem/linear_solver.hpp"
#include "safem/marking.hpp"
#include "safem/quadrature.hpp"
#include "safem/topology.hpp"

namespace safem {

/// Saddle-point system [A B^T; B 0] (flux; u) = (0; g) with A the RT0 mass
/// matrix, B_{K,E} = int_K div psi_E and g_K = -int_K f.
struct MixedSystem {
  MeshTopology topo;
  SparseMatrix A;
  SparseMatrix B;
  Vector g;
  std::vector<ElementMoments> data;  // per element, from the quadrature rule

  std::size_t num_flux_dofs() const { return topo.num_edges(); }
  std::size_t num_dofs() const { return topo.num_edges() + topo.num_elements(); }
  /// The full symmetric indefinite matrix, assembled on demand.
  SparseMatrix saddle_matrix() const;
  Vector rhs() const;
};

struct MixedSolution {
  std::vector<double> flux;  // per edge, along the global normal
  std::vector<double> u;     // per element
  double residual = 0.0;     // relative Euclidean residual of the saddle system
};

MixedSystem assemble_mixed(const Triangulation& T, const ScalarField& f,
                           const QuadratureRule& rule = default_rule());

/// Solves through the Crouzeix-Raviart equivalence: for piecewise-constant
/// data the RT0 flux equals grad_NC u_CR - f_K/2 (x - mid_K), where u_CR is the
/// nonconforming P1 solution. The multiplier u is recovered edge by edge from
/// the first block row. Throws SolverError if the saddle residual exceeds
/// rel_tol.
MixedSolution solve_mixed(const MixedSystem& system, double rel_tol = 1e-10);

/// Relative residual of (flux, u) in the saddle system.
double mixed_residual(const MixedSystem& system, const MixedSolution& sol);

/// eta^2(K) = |K| ||p||^2_K + |K|^{1/2} sum_{E in E(K)} ||[p]_E . tau_E||^2_E.
IndicatorField eta_mixed(const MeshTopology& topo, const MixedSolution& sol);

/// ||p_fine - p_coarse||^2_{H(div)}, evaluated on the fine mesh.
/// Throws std::invalid_argument if `fine` does not refine `coarse`.
double delta_mixed(const Triangulation& coarse, const MeshTopology& coarse_topo,
                   const MixedSolution& coarse_sol, const Triangulation& fine,
                   const MeshTopology& fine_topo, const MixedSolution& fine_sol);

/// Writes "edge_id flux" and "element_id u" tables.
void dump_mixed_solution(std::ostream& out, const MixedSolution& sol);

}  // namespace safem

#pragma once

// Div least-squares FEM for -div grad u = f, u = 0 on the boundary:
// minimise  LS(f; q, v) = ||f + div q||^2 + ||q - grad v||^2
// over RT0(T) x S1_0(T).

#include <iosfwd>
#include <vector>

#include "safem/linear_solver.hpp"
#include "safem/marking.hpp"
#include "safem/quadrature.hpp"
#include "safem/topology.hpp"

namespace safem {

/// Normal equations of the quadratic functional. Unknowns are ordered as all
/// edge fluxes followed by the interior vertices.
struct LsSystem {
  MeshTopology topo;
  SparseMatrix K;
  Vector rhs;
  std::vector<int> vertex_dof;  // -1 on boundary vertices
  std::vector<ElementMoments> data;

  std::size_t num_flux_dofs() const { return topo.num_edges(); }
};

struct LsSolution {
  std::vector<double> flux;  // per edge
  std::vector<double> u;     // per vertex, zero on the boundary
  double residual = 0.0;     // ||K x - rhs|| / ||rhs||
};

struct LsEstimate {
  std::vector<double> ls_per_element;
  double ls_total = 0.0;
};

LsSystem assemble_ls(const Triangulation& T, const ScalarField& f,
                     const QuadratureRule& rule = default_rule());

/// Throws SolverError when the relative residual exceeds rel_tol.
LsSolution solve_ls(const LsSystem& system, double rel_tol = 1e-10);

/// LS(f; p, u) element by element. The data term uses
/// ||f + c||^2_K = mu^2(K) + |K| (f_K + c)^2 for the constant c = div p|_K.
LsEstimate ls_functional(const LsSystem& system, const LsSolution& sol);

/// ||(1 - Pi_0) p||^2_K + |K|^{1/2} sum_E ||[p]_E . tau_E||^2_E
///   + |K|^{1/2} sum_{E interior} ||[d u / d nu_E]_E||^2_E
IndicatorField eta_ls(const MeshTopology& topo, const LsSolution& sol);

/// LS(f; coarse) - LS(f; fine). Values below zero within 1e-9 LS(f; coarse)
/// are clamped to zero; `clamped` reports whether that happened. Throws
/// std::invalid_argument if `fine` does not refine `coarse`.
double delta_ls(const Triangulation& coarse, double coarse_ls, const Triangulation& fine,
                double fine_ls, bool* clamped = nullptr);

/// LS(0; p_fine - p_coarse, u_fine - u_coarse), evaluated on the fine mesh.
double ls_of_difference(const Triangulation& coarse, const MeshTopology& coarse_topo,
                        const LsSolution& coarse_sol, const Triangulation& fine,
                        const MeshTopology& fine_topo, const LsSolution& fine_sol);

/// Writes "edge_id flux" and "node_id u" tables.
void dump_ls_solution(std::ostream& out, const LsSolution& sol);

}  // namespace safem

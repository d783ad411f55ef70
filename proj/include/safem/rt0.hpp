#pragma once

// Lowest-order Raviart-Thomas fields on a MeshTopology.
//
// The degree of freedom of edge E is the normal component of the field on E
// in the direction of the global edge normal. On element K the basis function
// of local edge i is  psi_i(x) = s_i |E_i| / (2|K|) (x - P_i),  P_i the vertex
// opposite E_i and s_i = topo.edge_sign(K, i); it has unit normal component on
// E_i and divergence s_i |E_i| / |K|.

#include <array>
#include <span>
#include <vector>

#include "safem/topology.hpp"

namespace safem::rt0 {

/// RT0 field restricted to one element, anchored at a point inside it:
/// value(x) = scale * (x - anchor) + at_anchor.
struct LocalField {
  double scale = 0.0;
  Vertex anchor{};
  std::array<double, 2> at_anchor{};

  std::array<double, 2> operator()(double x, double y) const {
    return {scale * (x - anchor.x) + at_anchor[0], scale * (y - anchor.y) + at_anchor[1]};
  }
  double divergence() const { return 2.0 * scale; }
};

LocalField local_field(const MeshTopology& topo, std::size_t k, std::span<const double> flux);

/// Coefficient c_i of (x - P_i) for the basis function of local edge i.
double basis_scale(const MeshTopology& topo, std::size_t k, int i);

/// 3x3 local mass matrix  int_K psi_i . psi_j.
std::array<std::array<double, 3>, 3> local_mass(const MeshTopology& topo, std::size_t k);

/// int_K |p|^2 for an affine field (edge-midpoint rule, exact for quadratics).
double l2_norm2(const MeshTopology& topo, std::size_t k, const LocalField& p);

/// int_K |p - q|^2 for two affine fields on the same element.
double l2_distance2(const MeshTopology& topo, std::size_t k, const LocalField& p, const LocalField& q);

/// || [p]_E . tau_E ||^2_{L2(E)} for every edge, using the one-sided trace on
/// boundary edges. Traces are affine, so the integral is exact.
std::vector<double> tangential_jumps2(const MeshTopology& topo, std::span<const double> flux);

/// Integral over an edge of g^2 for g affine with endpoint values ga, gb.
inline double affine_square_integral(double length, double ga, double gb) {
  return length / 3.0 * (ga * ga + ga * gb + gb * gb);
}

}  // namespace safem::rt0

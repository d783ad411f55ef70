#pragma once

#include <array>
#include <vector>

#include "safem/mesh.hpp"

namespace safem {

/// Element/edge/vertex incidence of a conforming triangulation with compact
/// local numbering. Local edge i of an element is the edge opposite its
/// vertex i.
///
/// Edge orientation: the global normal of an interior edge points from the
/// element with the lower index to the higher one; boundary normals point
/// outward. `edge_sign(k, i)` is +1 when the global normal of local edge i of
/// element k is the outward normal of k.
struct MeshTopology {
  std::vector<Vertex> points;
  std::vector<std::array<int, 3>> elements;
  std::vector<std::array<int, 3>> element_edges;
  std::vector<std::array<int, 2>> edges;           // endpoint vertices
  std::vector<std::array<int, 2>> edge_elements;   // [1] == -1 on the boundary
  std::vector<char> boundary_vertex;
  std::vector<double> areas;

  std::size_t num_elements() const { return elements.size(); }
  std::size_t num_edges() const { return edges.size(); }
  std::size_t num_vertices() const { return points.size(); }

  bool is_boundary_edge(int e) const { return edge_elements[static_cast<std::size_t>(e)][1] < 0; }
  double edge_sign(std::size_t k, int i) const {
    const int e = element_edges[k][static_cast<std::size_t>(i)];
    return edge_elements[static_cast<std::size_t>(e)][0] == static_cast<int>(k) ? 1.0 : -1.0;
  }
  double edge_length(int e) const;
  Vertex edge_midpoint(int e) const;
  const Vertex& point(std::size_t k, int i) const {
    return points[static_cast<std::size_t>(elements[k][static_cast<std::size_t>(i)])];
  }
  Vertex centroid(std::size_t k) const;
  /// Gradient of the barycentric coordinate of local vertex i.
  std::array<double, 2> grad_lambda(std::size_t k, int i) const;
  /// Unit outward normal of local edge i of element k.
  std::array<double, 2> outward_normal(std::size_t k, int i) const;
};

/// Throws std::invalid_argument if T is not conforming.
MeshTopology build_topology(const Triangulation& T);

}  // namespace safem

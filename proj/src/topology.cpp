#include "safem/topology.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace safem {

double MeshTopology::edge_length(int e) const {
  const auto& [a, b] = edges[static_cast<std::size_t>(e)];
  const Vertex& p = points[static_cast<std::size_t>(a)];
  const Vertex& q = points[static_cast<std::size_t>(b)];
  return std::hypot(q.x - p.x, q.y - p.y);
}

Vertex MeshTopology::edge_midpoint(int e) const {
  const auto& [a, b] = edges[static_cast<std::size_t>(e)];
  const Vertex& p = points[static_cast<std::size_t>(a)];
  const Vertex& q = points[static_cast<std::size_t>(b)];
  return {0.5 * (p.x + q.x), 0.5 * (p.y + q.y)};
}

Vertex MeshTopology::centroid(std::size_t k) const {
  const Vertex& a = point(k, 0);
  const Vertex& b = point(k, 1);
  const Vertex& c = point(k, 2);
  return {(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
}

std::array<double, 2> MeshTopology::grad_lambda(std::size_t k, int i) const {
  const Vertex& p = point(k, (i + 1) % 3);
  const Vertex& q = point(k, (i + 2) % 3);
  const double twice = 2.0 * areas[k];
  return {(p.y - q.y) / twice, (q.x - p.x) / twice};
}

std::array<double, 2> MeshTopology::outward_normal(std::size_t k, int i) const {
  const Vertex& p = point(k, (i + 1) % 3);
  const Vertex& q = point(k, (i + 2) % 3);
  const double dx = q.x - p.x, dy = q.y - p.y;
  const double len = std::hypot(dx, dy);
  return {dy / len, -dx / len};
}

MeshTopology build_topology(const Triangulation& T) {
  const BisectionForest& forest = T.forest();
  MeshTopology topo;
  const std::size_t n = T.size();
  topo.elements.resize(n);
  topo.element_edges.resize(n);
  topo.areas.resize(n);

  std::unordered_map<VertexId, int> local;
  local.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& v = T.triangle(k).v;
    for (int i = 0; i < 3; ++i) {
      auto [it, inserted] = local.try_emplace(v[i], static_cast<int>(topo.points.size()));
      if (inserted) topo.points.push_back(forest.vertex(v[i]));
      topo.elements[k][i] = it->second;
    }
    topo.areas[k] = T.area(k);
  }

  std::unordered_map<EdgeKey, int> edge_id;
  edge_id.reserve(2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& v = topo.elements[k];
    for (int i = 0; i < 3; ++i) {
      const int a = v[(i + 1) % 3], b = v[(i + 2) % 3];
      auto [it, inserted] = edge_id.try_emplace(edge_key(a, b), static_cast<int>(topo.edges.size()));
      if (inserted) {
        topo.edges.push_back({std::min(a, b), std::max(a, b)});
        topo.edge_elements.push_back({static_cast<int>(k), -1});
      } else {
        auto& owners = topo.edge_elements[static_cast<std::size_t>(it->second)];
        if (owners[1] != -1) throw std::invalid_argument("build_topology: edge shared by three elements");
        owners[1] = static_cast<int>(k);
      }
      topo.element_edges[k][i] = it->second;
    }
  }

  topo.boundary_vertex.assign(topo.points.size(), 0);
  std::vector<VertexId> global(topo.points.size());
  for (const auto& [g, l] : local) global[static_cast<std::size_t>(l)] = g;
  for (std::size_t e = 0; e < topo.edges.size(); ++e) {
    if (topo.edge_elements[e][1] >= 0) continue;
    const auto [a, b] = topo.edges[e];
    if (!forest.is_boundary_edge(global[static_cast<std::size_t>(a)], global[static_cast<std::size_t>(b)])) {
      throw std::invalid_argument("build_topology: triangulation has hanging nodes");
    }
    topo.boundary_vertex[static_cast<std::size_t>(a)] = 1;
    topo.boundary_vertex[static_cast<std::size_t>(b)] = 1;
  }
  return topo;
}

}  // namespace safem

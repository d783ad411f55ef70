#include "safem/rt0.hpp"

#include <cmath>

namespace safem::rt0 {

double basis_scale(const MeshTopology& topo, std::size_t k, int i) {
  const int e = topo.element_edges[k][static_cast<std::size_t>(i)];
  return topo.edge_sign(k, i) * topo.edge_length(e) / (2.0 * topo.areas[k]);
}

LocalField local_field(const MeshTopology& topo, std::size_t k, std::span<const double> flux) {
  LocalField p;
  p.anchor = topo.centroid(k);
  for (int i = 0; i < 3; ++i) {
    const int e = topo.element_edges[k][static_cast<std::size_t>(i)];
    const double c = basis_scale(topo, k, i) * flux[static_cast<std::size_t>(e)];
    const Vertex& P = topo.point(k, i);
    p.scale += c;
    p.at_anchor[0] += c * (p.anchor.x - P.x);
    p.at_anchor[1] += c * (p.anchor.y - P.y);
  }
  return p;
}

std::array<std::array<double, 3>, 3> local_mass(const MeshTopology& topo, std::size_t k) {
  std::array<Vertex, 3> mid;
  for (int m = 0; m < 3; ++m) {
    const Vertex& a = topo.point(k, (m + 1) % 3);
    const Vertex& b = topo.point(k, (m + 2) % 3);
    mid[static_cast<std::size_t>(m)] = {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
  }
  std::array<double, 3> c{};
  for (int i = 0; i < 3; ++i) c[static_cast<std::size_t>(i)] = basis_scale(topo, k, i);
  std::array<std::array<double, 3>, 3> M{};
  const double w = topo.areas[k] / 3.0;
  for (int i = 0; i < 3; ++i) {
    const Vertex& Pi = topo.point(k, i);
    for (int j = i; j < 3; ++j) {
      const Vertex& Pj = topo.point(k, j);
      double s = 0.0;
      for (const Vertex& m : mid) s += (m.x - Pi.x) * (m.x - Pj.x) + (m.y - Pi.y) * (m.y - Pj.y);
      const double v = c[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(j)] * w * s;
      M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
      M[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = v;
    }
  }
  return M;
}

double l2_norm2(const MeshTopology& topo, std::size_t k, const LocalField& p) {
  return l2_distance2(topo, k, p, LocalField{});
}

double l2_distance2(const MeshTopology& topo, std::size_t k, const LocalField& p, const LocalField& q) {
  double s = 0.0;
  for (int m = 0; m < 3; ++m) {
    const Vertex& a = topo.point(k, (m + 1) % 3);
    const Vertex& b = topo.point(k, (m + 2) % 3);
    const double x = 0.5 * (a.x + b.x), y = 0.5 * (a.y + b.y);
    const auto u = p(x, y);
    const auto v = q(x, y);
    const double dx = u[0] - v[0], dy = u[1] - v[1];
    s += dx * dx + dy * dy;
  }
  return topo.areas[k] / 3.0 * s;
}

std::vector<double> tangential_jumps2(const MeshTopology& topo, std::span<const double> flux) {
  std::vector<double> out(topo.num_edges(), 0.0);
  for (std::size_t e = 0; e < topo.num_edges(); ++e) {
    const auto [ia, ib] = topo.edges[e];
    const Vertex& a = topo.points[static_cast<std::size_t>(ia)];
    const Vertex& b = topo.points[static_cast<std::size_t>(ib)];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const double tx = (b.x - a.x) / len, ty = (b.y - a.y) / len;
    const auto [k0, k1] = topo.edge_elements[e];
    const LocalField p0 = local_field(topo, static_cast<std::size_t>(k0), flux);
    auto tangential = [&](const LocalField& p, const Vertex& x) {
      const auto v = p(x.x, x.y);
      return v[0] * tx + v[1] * ty;
    };
    double ga = tangential(p0, a), gb = tangential(p0, b);
    if (k1 >= 0) {
      const LocalField p1 = local_field(topo, static_cast<std::size_t>(k1), flux);
      ga -= tangential(p1, a);
      gb -= tangential(p1, b);
    }
    out[e] = affine_square_integral(len, ga, gb);
  }
  return out;
}

}  // namespace safem::rt0

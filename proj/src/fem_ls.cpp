#include "safem/fem_ls.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <ostream>
#include <stdexcept>

#include "safem/rt0.hpp"

namespace safem {

namespace {

std::array<double, 2> gradient(const MeshTopology& topo, std::size_t k, const std::vector<double>& u) {
  std::array<double, 2> g{};
  for (int a = 0; a < 3; ++a) {
    const double ua = u[static_cast<std::size_t>(topo.elements[k][static_cast<std::size_t>(a)])];
    if (ua == 0.0) continue;
    const auto gl = topo.grad_lambda(k, a);
    g[0] += ua * gl[0];
    g[1] += ua * gl[1];
  }
  return g;
}

// p - grad u as an affine field on element k.
rt0::LocalField residual_field(const MeshTopology& topo, std::size_t k, const LsSolution& sol) {
  auto q = rt0::local_field(topo, k, sol.flux);
  const auto g = gradient(topo, k, sol.u);
  q.at_anchor[0] -= g[0];
  q.at_anchor[1] -= g[1];
  return q;
}

}  // namespace

LsSystem assemble_ls(const Triangulation& T, const ScalarField& f, const QuadratureRule& rule) {
  LsSystem sys;
  sys.topo = build_topology(T);
  const MeshTopology& topo = sys.topo;
  const std::size_t nk = topo.num_elements();
  const auto ne = static_cast<int>(topo.num_edges());

  sys.vertex_dof.assign(topo.num_vertices(), -1);
  int nv = 0;
  for (std::size_t v = 0; v < topo.num_vertices(); ++v) {
    if (!topo.boundary_vertex[v]) sys.vertex_dof[v] = nv++;
  }
  const int n = ne + nv;

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(36 * nk);
  sys.rhs = Vector::Zero(n);
  sys.data.resize(nk);
  for (std::size_t k = 0; k < nk; ++k) {
    const double area = topo.areas[k];
    const Vertex c = topo.centroid(k);
    sys.data[k] = element_moments(f, topo.point(k, 0), topo.point(k, 1), topo.point(k, 2), rule);
    const auto M = rt0::local_mass(topo, k);

    std::array<int, 3> ed{}, vd{};
    std::array<double, 3> div{};
    std::array<std::array<double, 2>, 3> psi_c{}, gl{};
    for (int i = 0; i < 3; ++i) {
      const auto si = static_cast<std::size_t>(i);
      ed[si] = topo.element_edges[k][si];
      vd[si] = sys.vertex_dof[static_cast<std::size_t>(topo.elements[k][si])];
      div[si] = topo.edge_sign(k, i) * topo.edge_length(ed[si]) / area;
      const double s = rt0::basis_scale(topo, k, i);
      const Vertex& P = topo.point(k, i);
      psi_c[si] = {s * (c.x - P.x), s * (c.y - P.y)};
      gl[si] = topo.grad_lambda(k, i);
    }

    for (std::size_t i = 0; i < 3; ++i) {
      sys.rhs[ed[i]] -= area * sys.data[k].mean * div[i];
      for (std::size_t j = 0; j < 3; ++j) {
        trip.emplace_back(ed[i], ed[j], area * div[i] * div[j] + M[i][j]);
        if (vd[j] >= 0) {
          const double b = -area * (psi_c[i][0] * gl[j][0] + psi_c[i][1] * gl[j][1]);
          trip.emplace_back(ed[i], ne + vd[j], b);
          trip.emplace_back(ne + vd[j], ed[i], b);
        }
        if (vd[i] >= 0 && vd[j] >= 0) {
          trip.emplace_back(ne + vd[i], ne + vd[j], area * (gl[i][0] * gl[j][0] + gl[i][1] * gl[j][1]));
        }
      }
    }
  }
  sys.K.resize(n, n);
  sys.K.setFromTriplets(trip.begin(), trip.end());
  return sys;
}

LsSolution solve_ls(const LsSystem& system, double rel_tol) {
  const std::size_t ne = system.num_flux_dofs();
  LsSolution sol;
  sol.flux.assign(ne, 0.0);
  sol.u.assign(system.topo.num_vertices(), 0.0);
  if (system.rhs.norm() == 0.0) return sol;

  const Vector x = solve_spd(system.K, system.rhs);
  for (std::size_t e = 0; e < ne; ++e) sol.flux[e] = x[static_cast<Eigen::Index>(e)];
  for (std::size_t v = 0; v < sol.u.size(); ++v) {
    const int d = system.vertex_dof[v];
    if (d >= 0) sol.u[v] = x[static_cast<Eigen::Index>(ne) + d];
  }
  sol.residual = (system.K * x - system.rhs).norm() / system.rhs.norm();
  if (!(sol.residual <= rel_tol)) {
    char msg[128];
    std::snprintf(msg, sizeof msg, "solve_ls: relative residual %.3e above %.1e", sol.residual, rel_tol);
    throw SolverError(msg, sol.residual);
  }
  return sol;
}

LsEstimate ls_functional(const LsSystem& system, const LsSolution& sol) {
  const MeshTopology& topo = system.topo;
  LsEstimate out;
  out.ls_per_element.resize(topo.num_elements());
  for (std::size_t k = 0; k < topo.num_elements(); ++k) {
    const auto q = residual_field(topo, k, sol);
    const double r = system.data[k].mean + q.divergence();
    const double v = system.data[k].mu2 + topo.areas[k] * r * r + rt0::l2_norm2(topo, k, q);
    out.ls_per_element[k] = v;
    out.ls_total += v;
  }
  return out;
}

IndicatorField eta_ls(const MeshTopology& topo, const LsSolution& sol) {
  const auto tjump = rt0::tangential_jumps2(topo, sol.flux);
  std::vector<double> njump(topo.num_edges(), 0.0);
  for (std::size_t e = 0; e < topo.num_edges(); ++e) {
    const auto [k0, k1] = topo.edge_elements[e];
    if (k1 < 0) continue;
    const auto g0 = gradient(topo, static_cast<std::size_t>(k0), sol.u);
    const auto g1 = gradient(topo, static_cast<std::size_t>(k1), sol.u);
    const auto [ia, ib] = topo.edges[e];
    const Vertex& a = topo.points[static_cast<std::size_t>(ia)];
    const Vertex& b = topo.points[static_cast<std::size_t>(ib)];
    const double len = topo.edge_length(static_cast<int>(e));
    // Unnormalised normal (b - a) rotated; the sign does not matter.
    const double jn = ((g0[0] - g1[0]) * (b.y - a.y) - (g0[1] - g1[1]) * (b.x - a.x)) / len;
    njump[e] = len * jn * jn;
  }

  std::vector<double> eta2(topo.num_elements());
  for (std::size_t k = 0; k < eta2.size(); ++k) {
    auto p = rt0::local_field(topo, k, sol.flux);
    rt0::LocalField mean;
    mean.anchor = p.anchor;
    mean.at_anchor = p.at_anchor;
    double j = 0.0;
    for (int e : topo.element_edges[k]) j += tjump[static_cast<std::size_t>(e)] + njump[static_cast<std::size_t>(e)];
    eta2[k] = rt0::l2_distance2(topo, k, p, mean) + std::sqrt(topo.areas[k]) * j;
  }
  return IndicatorField(std::move(eta2));
}

double delta_ls(const Triangulation& coarse, double coarse_ls, const Triangulation& fine, double fine_ls,
                bool* clamped) {
  if (!is_refinement_of(fine, coarse)) throw std::invalid_argument("delta_ls: meshes are not nested");
  if (clamped) *clamped = false;
  const double d = coarse_ls - fine_ls;
  if (d >= 0.0) return d;
  if (-d <= 1e-9 * coarse_ls) {
    if (clamped) *clamped = true;
    std::cerr << "warning: delta_ls clamped " << d << " to 0\n";
    return 0.0;
  }
  std::cerr << "warning: delta_ls negative beyond tolerance: " << d << "\n";
  return d;
}

double ls_of_difference(const Triangulation& coarse, const MeshTopology& coarse_topo,
                        const LsSolution& coarse_sol, const Triangulation& fine,
                        const MeshTopology& fine_topo, const LsSolution& fine_sol) {
  const auto parent = coarse_parent_map(fine, coarse);
  double s = 0.0;
  for (std::size_t k = 0; k < fine_topo.num_elements(); ++k) {
    const auto qf = residual_field(fine_topo, k, fine_sol);
    const auto qc = residual_field(coarse_topo, parent[k], coarse_sol);
    const double ddiv = qf.divergence() - qc.divergence();
    s += fine_topo.areas[k] * ddiv * ddiv + rt0::l2_distance2(fine_topo, k, qf, qc);
  }
  return s;
}

void dump_ls_solution(std::ostream& out, const LsSolution& sol) {
  char buf[64];
  out << "# edge_id flux\n";
  for (std::size_t e = 0; e < sol.flux.size(); ++e) {
    std::snprintf(buf, sizeof buf, "%zu %.17g\n", e, sol.flux[e]);
    out << buf;
  }
  out << "# node_id u\n";
  for (std::size_t v = 0; v < sol.u.size(); ++v) {
    std::snprintf(buf, sizeof buf, "%zu %.17g\n", v, sol.u[v]);
    out << buf;
  }
}

}  // namespace safem

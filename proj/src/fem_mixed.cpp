#include "safem/fem_mixed.hpp"

#include <cmath>
#include <cstdio>
#include <deque>
#include <ostream>

#include "safem/rt0.hpp"

namespace safem {

SparseMatrix MixedSystem::saddle_matrix() const {
  const auto ne = static_cast<Eigen::Index>(topo.num_edges());
  const auto n = static_cast<Eigen::Index>(num_dofs());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(A.nonZeros() + 2 * B.nonZeros()));
  for (int c = 0; c < A.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(A, c); it; ++it) trip.emplace_back(it.row(), it.col(), it.value());
  }
  for (int c = 0; c < B.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(B, c); it; ++it) {
      trip.emplace_back(ne + it.row(), it.col(), it.value());
      trip.emplace_back(it.col(), ne + it.row(), it.value());
    }
  }
  SparseMatrix S(n, n);
  S.setFromTriplets(trip.begin(), trip.end());
  return S;
}

Vector MixedSystem::rhs() const {
  Vector b = Vector::Zero(static_cast<Eigen::Index>(num_dofs()));
  b.tail(g.size()) = g;
  return b;
}

MixedSystem assemble_mixed(const Triangulation& T, const ScalarField& f, const QuadratureRule& rule) {
  MixedSystem sys;
  sys.topo = build_topology(T);
  const MeshTopology& topo = sys.topo;
  const std::size_t nk = topo.num_elements();
  const auto ne = static_cast<Eigen::Index>(topo.num_edges());

  std::vector<Eigen::Triplet<double>> a_trip, b_trip;
  a_trip.reserve(9 * nk);
  b_trip.reserve(3 * nk);
  sys.g.resize(static_cast<Eigen::Index>(nk));
  sys.data.resize(nk);
  for (std::size_t k = 0; k < nk; ++k) {
    const auto M = rt0::local_mass(topo, k);
    for (int i = 0; i < 3; ++i) {
      const int ei = topo.element_edges[k][static_cast<std::size_t>(i)];
      for (int j = 0; j < 3; ++j) {
        const int ej = topo.element_edges[k][static_cast<std::size_t>(j)];
        a_trip.emplace_back(ei, ej, M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
      }
      b_trip.emplace_back(static_cast<int>(k), ei, topo.edge_sign(k, i) * topo.edge_length(ei));
    }
    sys.data[k] = element_moments(f, topo.point(k, 0), topo.point(k, 1), topo.point(k, 2), rule);
    sys.g[static_cast<Eigen::Index>(k)] = -sys.data[k].mean * topo.areas[k];
  }
  sys.A.resize(ne, ne);
  sys.A.setFromTriplets(a_trip.begin(), a_trip.end());
  sys.B.resize(static_cast<Eigen::Index>(nk), ne);
  sys.B.setFromTriplets(b_trip.begin(), b_trip.end());
  return sys;
}

double mixed_residual(const MixedSystem& system, const MixedSolution& sol) {
  const Eigen::Map<const Vector> p(sol.flux.data(), static_cast<Eigen::Index>(sol.flux.size()));
  const Eigen::Map<const Vector> u(sol.u.data(), static_cast<Eigen::Index>(sol.u.size()));
  const Vector r1 = system.A * p + system.B.transpose() * u;
  const Vector r2 = system.B * p - system.g;
  const double num = std::sqrt(r1.squaredNorm() + r2.squaredNorm());
  const double den = system.g.norm();
  return den > 0.0 ? num / den : num;
}

MixedSolution solve_mixed(const MixedSystem& system, double rel_tol) {
  const MeshTopology& topo = system.topo;
  const std::size_t nk = topo.num_elements();
  const std::size_t ne = topo.num_edges();
  MixedSolution sol;
  sol.flux.assign(ne, 0.0);
  sol.u.assign(nk, 0.0);
  if (system.g.norm() == 0.0) return sol;

  // Nonconforming P1 problem with piecewise-constant load on interior edges.
  std::vector<int> dof(ne, -1);
  int ndof = 0;
  for (std::size_t e = 0; e < ne; ++e) {
    if (!topo.is_boundary_edge(static_cast<int>(e))) dof[e] = ndof++;
  }
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(9 * nk);
  Vector load = Vector::Zero(ndof);
  std::vector<double> f_mean(nk);
  for (std::size_t k = 0; k < nk; ++k) {
    f_mean[k] = -system.g[static_cast<Eigen::Index>(k)] / topo.areas[k];
    std::array<std::array<double, 2>, 3> grad;
    for (int i = 0; i < 3; ++i) {
      const auto gl = topo.grad_lambda(k, i);
      grad[static_cast<std::size_t>(i)] = {-2.0 * gl[0], -2.0 * gl[1]};
    }
    for (int i = 0; i < 3; ++i) {
      const int di = dof[static_cast<std::size_t>(topo.element_edges[k][static_cast<std::size_t>(i)])];
      if (di < 0) continue;
      load[di] += f_mean[k] * topo.areas[k] / 3.0;
      for (int j = 0; j < 3; ++j) {
        const int dj = dof[static_cast<std::size_t>(topo.element_edges[k][static_cast<std::size_t>(j)])];
        if (dj < 0) continue;
        const auto& gi = grad[static_cast<std::size_t>(i)];
        const auto& gj = grad[static_cast<std::size_t>(j)];
        trip.emplace_back(di, dj, topo.areas[k] * (gi[0] * gj[0] + gi[1] * gj[1]));
      }
    }
  }
  SparseMatrix K(ndof, ndof);
  K.setFromTriplets(trip.begin(), trip.end());
  const Vector ucr = solve_spd(K, load);

  // Flux: evaluate the reconstructed field at edge midpoints, averaging the
  // two one-sided values of interior edges.
  std::vector<int> seen(ne, 0);
  for (std::size_t k = 0; k < nk; ++k) {
    double gx = 0.0, gy = 0.0;
    for (int i = 0; i < 3; ++i) {
      const int di = dof[static_cast<std::size_t>(topo.element_edges[k][static_cast<std::size_t>(i)])];
      if (di < 0) continue;
      const auto gl = topo.grad_lambda(k, i);
      gx += -2.0 * gl[0] * ucr[di];
      gy += -2.0 * gl[1] * ucr[di];
    }
    const Vertex c = topo.centroid(k);
    for (int i = 0; i < 3; ++i) {
      const int e = topo.element_edges[k][static_cast<std::size_t>(i)];
      const Vertex m = topo.edge_midpoint(e);
      const double px = gx - 0.5 * f_mean[k] * (m.x - c.x);
      const double py = gy - 0.5 * f_mean[k] * (m.y - c.y);
      const auto n = topo.outward_normal(k, i);
      sol.flux[static_cast<std::size_t>(e)] += topo.edge_sign(k, i) * (px * n[0] + py * n[1]);
      ++seen[static_cast<std::size_t>(e)];
    }
  }
  for (std::size_t e = 0; e < ne; ++e) sol.flux[e] /= seen[e];

  // Multiplier from the first block row, walking the dual graph outward from
  // the boundary.
  const Eigen::Map<const Vector> p(sol.flux.data(), static_cast<Eigen::Index>(ne));
  const Vector r = system.A * p;
  std::vector<char> known(nk, 0);
  std::deque<std::size_t> queue;
  for (std::size_t e = 0; e < ne; ++e) {
    if (!topo.is_boundary_edge(static_cast<int>(e))) continue;
    const auto k = static_cast<std::size_t>(topo.edge_elements[e][0]);
    if (known[k]) continue;
    sol.u[k] = -r[static_cast<Eigen::Index>(e)] / topo.edge_length(static_cast<int>(e));
    known[k] = 1;
    queue.push_back(k);
  }
  while (!queue.empty()) {
    const std::size_t k = queue.front();
    queue.pop_front();
    for (int i = 0; i < 3; ++i) {
      const int e = topo.element_edges[k][static_cast<std::size_t>(i)];
      const auto [k0, k1] = topo.edge_elements[static_cast<std::size_t>(e)];
      if (k1 < 0) continue;
      const auto other = static_cast<std::size_t>(static_cast<std::size_t>(k0) == k ? k1 : k0);
      if (known[other]) continue;
      const double jump = r[e] / topo.edge_length(e);  // u_1 - u_0
      sol.u[other] = static_cast<std::size_t>(k0) == k ? sol.u[k] + jump : sol.u[k] - jump;
      known[other] = 1;
      queue.push_back(other);
    }
  }

  sol.residual = mixed_residual(system, sol);
  if (!(sol.residual <= rel_tol)) {
    char msg[128];
    std::snprintf(msg, sizeof msg, "solve_mixed: relative residual %.3e above %.1e", sol.residual, rel_tol);
    throw SolverError(msg, sol.residual);
  }
  return sol;
}

IndicatorField eta_mixed(const MeshTopology& topo, const MixedSolution& sol) {
  const auto jumps = rt0::tangential_jumps2(topo, sol.flux);
  std::vector<double> eta2(topo.num_elements());
  for (std::size_t k = 0; k < eta2.size(); ++k) {
    const double area = topo.areas[k];
    const auto p = rt0::local_field(topo, k, sol.flux);
    double j = 0.0;
    for (int e : topo.element_edges[k]) j += jumps[static_cast<std::size_t>(e)];
    eta2[k] = area * rt0::l2_norm2(topo, k, p) + std::sqrt(area) * j;
  }
  return IndicatorField(std::move(eta2));
}

double delta_mixed(const Triangulation& coarse, const MeshTopology& coarse_topo,
                   const MixedSolution& coarse_sol, const Triangulation& fine,
                   const MeshTopology& fine_topo, const MixedSolution& fine_sol) {
  const auto parent = coarse_parent_map(fine, coarse);
  double d2 = 0.0;
  for (std::size_t k = 0; k < fine_topo.num_elements(); ++k) {
    const auto pf = rt0::local_field(fine_topo, k, fine_sol.flux);
    const auto pc = rt0::local_field(coarse_topo, parent[k], coarse_sol.flux);
    const double ddiv = pf.divergence() - pc.divergence();
    d2 += rt0::l2_distance2(fine_topo, k, pf, pc) + fine_topo.areas[k] * ddiv * ddiv;
  }
  return d2;
}

void dump_mixed_solution(std::ostream& out, const MixedSolution& sol) {
  char buf[64];
  out << "# edge_id flux\n";
  for (std::size_t e = 0; e < sol.flux.size(); ++e) {
    std::snprintf(buf, sizeof buf, "%zu %.17g\n", e, sol.flux[e]);
    out << buf;
  }
  out << "# element_id u\n";
  for (std::size_t k = 0; k < sol.u.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%zu %.17g\n", k, sol.u[k]);
    out << buf;
  }
}

}  // namespace safem

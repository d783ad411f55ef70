#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <sstream>

#include "safem/domains.hpp"
#include "safem/fem_ls.hpp"
#include "safem/mesh_io.hpp"

using namespace safem;

namespace {

using Vec2 = std::array<double, 2>;

Vec2 psi(const MeshTopology& t, std::size_t k, int i, double x, double y) {
  const int e = t.element_edges[k][static_cast<std::size_t>(i)];
  const double c = t.edge_sign(k, i) * t.edge_length(e) / (2.0 * t.areas[k]);
  const Vertex& P = t.point(k, i);
  return {c * (x - P.x), c * (y - P.y)};
}

// Gradient of the barycentric coordinate of local vertex a, from the vertex
// coordinates directly.
Vec2 grad_bary(const MeshTopology& t, std::size_t k, int a) {
  const Vertex& p1 = t.point(k, (a + 1) % 3);
  const Vertex& p2 = t.point(k, (a + 2) % 3);
  const Vertex& p0 = t.point(k, a);
  const double twice = (p1.x - p0.x) * (p2.y - p0.y) - (p1.y - p0.y) * (p2.x - p0.x);
  return {(p1.y - p2.y) / twice, (p2.x - p1.x) / twice};
}

Vertex bary(const MeshTopology& t, std::size_t k, const std::array<double, 3>& l) {
  Vertex v{};
  for (int i = 0; i < 3; ++i) {
    v.x += l[static_cast<std::size_t>(i)] * t.point(k, i).x;
    v.y += l[static_cast<std::size_t>(i)] * t.point(k, i).y;
  }
  return v;
}

// Dense normal-equation matrix assembled by quadrature of the basis functions.
Eigen::MatrixXd brute_matrix(const LsSystem& sys) {
  const auto& t = sys.topo;
  const QuadratureRule& r = rule_for_degree(4);
  const auto ne = static_cast<int>(t.num_edges());
  const auto n = static_cast<int>(sys.K.rows());
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t k = 0; k < t.num_elements(); ++k) {
    const double A = t.areas[k];
    for (int i = 0; i < 3; ++i) {
      const int ei = t.element_edges[k][static_cast<std::size_t>(i)];
      const double di = t.edge_sign(k, i) * t.edge_length(ei) / A;
      for (int j = 0; j < 3; ++j) {
        const int ej = t.element_edges[k][static_cast<std::size_t>(j)];
        const double dj = t.edge_sign(k, j) * t.edge_length(ej) / A;
        double m = 0.0;
        for (std::size_t q = 0; q < r.weights.size(); ++q) {
          const Vertex x = bary(t, k, r.points[q]);
          const Vec2 a = psi(t, k, i, x.x, x.y), b = psi(t, k, j, x.x, x.y);
          m += r.weights[q] * A * (a[0] * b[0] + a[1] * b[1]);
        }
        K(ei, ej) += A * di * dj + m;
      }
      for (int a = 0; a < 3; ++a) {
        const int va = sys.vertex_dof[static_cast<std::size_t>(t.elements[k][static_cast<std::size_t>(a)])];
        if (va < 0) continue;
        const Vec2 g = grad_bary(t, k, a);
        double b = 0.0;
        for (std::size_t q = 0; q < r.weights.size(); ++q) {
          const Vertex x = bary(t, k, r.points[q]);
          const Vec2 p = psi(t, k, i, x.x, x.y);
          b -= r.weights[q] * A * (p[0] * g[0] + p[1] * g[1]);
        }
        K(ei, ne + va) += b;
        K(ne + va, ei) += b;
      }
    }
    for (int a = 0; a < 3; ++a) {
      const int va = sys.vertex_dof[static_cast<std::size_t>(t.elements[k][static_cast<std::size_t>(a)])];
      for (int b = 0; b < 3; ++b) {
        const int vb = sys.vertex_dof[static_cast<std::size_t>(t.elements[k][static_cast<std::size_t>(b)])];
        if (va < 0 || vb < 0) continue;
        const Vec2 ga = grad_bary(t, k, a), gb = grad_bary(t, k, b);
        K(ne + va, ne + vb) += A * (ga[0] * gb[0] + ga[1] * gb[1]);
      }
    }
  }
  return K;
}

Triangulation refined_square(int levels, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Triangulation T = uniform_refine(unit_square());
  for (int l = 0; l < levels; ++l) {
    std::vector<std::size_t> m;
    for (std::size_t i = 0; i < T.size(); ++i) {
      if (rng() % 3 == 0) m.push_back(i);
    }
    T = refine(T, m);
  }
  return T;
}

struct Solved {
  LsSystem sys;
  LsSolution sol;
  double ls = 0.0;
};

Solved solve(const Triangulation& T, const std::string& f) {
  Solved s{assemble_ls(T, parse_field(f)), {}, 0.0};
  s.sol = solve_ls(s.sys);
  s.ls = ls_functional(s.sys, s.sol).ls_total;
  return s;
}

}  // namespace

TEST_CASE("one-element system against hand assembly") {
  const std::vector<Vertex> v{{0, 0}, {1, 0}, {0, 1}};
  const auto T = Triangulation::initial(make_forest(v, {{0, 1, 2}}, {false}, {}));
  const auto sys = assemble_ls(T, parse_field("one"));
  REQUIRE(sys.K.rows() == 3);
  const Eigen::MatrixXd ref = brute_matrix(sys);
  CHECK((Eigen::MatrixXd(sys.K) - ref).norm() <= 1e-14 * ref.norm());
  // rhs_E = -|K| f_K div psi_E = -s_E |E|
  for (int i = 0; i < 3; ++i) {
    const int e = sys.topo.element_edges[0][static_cast<std::size_t>(i)];
    CHECK(sys.rhs[e] == doctest::Approx(-sys.topo.edge_sign(0, i) * sys.topo.edge_length(e)));
  }
}

TEST_CASE("interior vertex block: criss-cross square") {
  std::vector<Vertex> v{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}};
  const auto T = Triangulation::initial(
      make_forest(v, {{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}}, {false, false, false, false}, {}));
  const auto sys = assemble_ls(T, parse_field("one"));
  const auto ne = static_cast<Eigen::Index>(sys.topo.num_edges());
  REQUIRE(sys.K.rows() == ne + 1);
  CHECK(sys.K.coeff(ne, ne) == doctest::Approx(4.0).epsilon(1e-14));
  const Eigen::MatrixXd ref = brute_matrix(sys);
  CHECK((Eigen::MatrixXd(sys.K) - ref).norm() <= 1e-13 * ref.norm());
}

TEST_CASE("normal equations are symmetric positive definite") {
  const auto sys = assemble_ls(refined_square(3, 1), parse_field("linear-x"));
  const SparseMatrix Kt = sys.K.transpose();
  CHECK((sys.K - Kt).norm() <= 1e-13 * sys.K.norm());
  Eigen::SimplicialLLT<SparseMatrix> llt(sys.K);
  CHECK(llt.info() == Eigen::Success);
  const Eigen::MatrixXd ref = brute_matrix(sys);
  CHECK((Eigen::MatrixXd(sys.K) - ref).norm() <= 1e-13 * ref.norm());
}

TEST_CASE("solve residual and zero data") {
  const auto s = solve(refined_square(3, 2), "radial-alpha:0.6");
  CHECK(s.sol.residual <= 1e-10);
  const auto z = solve(refined_square(1, 2), "zero");
  CHECK(z.sys.rhs.norm() == 0.0);
  for (double x : z.sol.flux) CHECK(x == 0.0);
  CHECK(z.ls == 0.0);
  CHECK(eta_ls(z.sys.topo, z.sol).total() == 0.0);
}

TEST_CASE("functional decreases under refinement and telescopes") {
  for (const char* f : {"one", "linear-x"}) {
    CAPTURE(f);
    Triangulation C = refined_square(2, 3);
    auto cs = solve(C, f);
    std::mt19937_64 rng(4);
    for (int l = 0; l < 4; ++l) {
      std::vector<std::size_t> m;
      for (std::size_t i = 0; i < C.size(); ++i) {
        if (rng() % 3 == 0) m.push_back(i);
      }
      const Triangulation F = refine(C, m);
      const auto fs = solve(F, f);
      CHECK(fs.ls <= cs.ls);
      const double d = ls_of_difference(C, cs.sys.topo, cs.sol, F, fs.sys.topo, fs.sol);
      CHECK(std::abs((cs.ls - fs.ls) - d) <= 1e-8 * cs.ls);
      C = F;
      cs = fs;
    }
  }
}

TEST_CASE("ls functional equals the direct quadratic form") {
  // LS = ||f||^2 + x'Kx - 2 rhs'x for the normal equations K x = rhs
  const auto s = solve(refined_square(2, 5), "linear-x");
  Vector x = Vector::Zero(s.sys.K.rows());
  const auto ne = s.sys.num_flux_dofs();
  for (std::size_t e = 0; e < ne; ++e) x[static_cast<Eigen::Index>(e)] = s.sol.flux[e];
  for (std::size_t v = 0; v < s.sol.u.size(); ++v) {
    const int d = s.sys.vertex_dof[v];
    if (d >= 0) x[static_cast<Eigen::Index>(ne) + d] = s.sol.u[v];
  }
  double f2 = 0.0;
  for (const auto& m : s.sys.data) f2 += m.norm2;
  const double q = f2 + x.dot(s.sys.K * x) - 2.0 * s.sys.rhs.dot(x);
  CHECK(s.ls == doctest::Approx(q).epsilon(1e-10));
}

TEST_CASE("eta of an affine solution reduces to boundary tangential traces") {
  const Triangulation T = refined_square(2, 6);
  const auto topo = build_topology(T);
  const Vec2 g{1.0, 2.0};
  LsSolution sol;
  sol.u.resize(topo.num_vertices());
  for (std::size_t v = 0; v < sol.u.size(); ++v) sol.u[v] = g[0] * topo.points[v].x + g[1] * topo.points[v].y;
  sol.flux.resize(topo.num_edges());
  for (std::size_t e = 0; e < topo.num_edges(); ++e) {
    const auto k0 = static_cast<std::size_t>(topo.edge_elements[e][0]);
    for (int i = 0; i < 3; ++i) {
      if (topo.element_edges[k0][static_cast<std::size_t>(i)] != static_cast<int>(e)) continue;
      const auto n = topo.outward_normal(k0, i);
      sol.flux[e] = g[0] * n[0] + g[1] * n[1];
    }
  }
  const auto eta = eta_ls(topo, sol);
  for (std::size_t k = 0; k < topo.num_elements(); ++k) {
    double expected = 0.0;
    for (int e : topo.element_edges[k]) {
      if (!topo.is_boundary_edge(e)) continue;
      const Vertex& a = topo.points[static_cast<std::size_t>(topo.edges[static_cast<std::size_t>(e)][0])];
      const Vertex& b = topo.points[static_cast<std::size_t>(topo.edges[static_cast<std::size_t>(e)][1])];
      const double len = topo.edge_length(e);
      const double t = (g[0] * (b.x - a.x) + g[1] * (b.y - a.y)) / len;
      expected += len * t * t;
    }
    expected *= std::sqrt(topo.areas[k]);
    CHECK(eta[k] == doctest::Approx(expected).epsilon(1e-12).scale(1e-15));
  }
}

TEST_CASE("eta regression on the once-refined unit square with f = 1") {
  const auto s = solve(uniform_refine(unit_square()), "one");
  CHECK(eta_ls(s.sys.topo, s.sol).total() == doctest::Approx(0.20690317356481561).epsilon(1e-12));
  // four elements, one interior vertex; agrees with 1/73 to all digits
  CHECK(s.ls == doctest::Approx(1.0 / 73.0).epsilon(1e-12));
}

TEST_CASE("delta_ls clamps tiny negative values and rejects non-nested meshes") {
  const Triangulation C = refined_square(1, 7);
  const Triangulation F = uniform_refine(C);
  bool clamped = true;
  CHECK(delta_ls(C, 1.0, F, 0.75, &clamped) == 0.25);
  CHECK_FALSE(clamped);
  CHECK(delta_ls(C, 1.0, F, 1.0 + 5e-10, &clamped) == 0.0);
  CHECK(clamped);
  CHECK(delta_ls(C, 1.0, F, 1.1, &clamped) == doctest::Approx(-0.1));
  CHECK_FALSE(clamped);
  CHECK_THROWS_AS(delta_ls(F, 1.0, C, 0.5), std::invalid_argument);
}

TEST_CASE("solution dump format") {
  std::ostringstream out;
  dump_ls_solution(out, solve(uniform_refine(unit_square()), "one").sol);
  CHECK(out.str().find("# edge_id flux\n") == 0);
  CHECK(out.str().find("# node_id u\n") != std::string::npos);
}

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "safem/axioms.hpp"
#include "safem/domains.hpp"
#include "safem/problem.hpp"

using namespace safem;

namespace {

std::vector<LevelRecord> synthetic(std::size_t n, double q, double delta = 0.0) {
  std::vector<LevelRecord> recs;
  for (std::size_t l = 0; l < n; ++l) {
    LevelRecord r;
    r.level = l;
    r.N = 10 * l;
    r.sigma2 = std::pow(q, static_cast<double>(l));
    r.delta2 = l + 1 < n ? delta * r.sigma2 : kNaN;
    recs.push_back(r);
  }
  return recs;
}

std::vector<Triangulation> uniform_hierarchy(Triangulation T, std::size_t levels) {
  std::vector<Triangulation> h{T};
  for (std::size_t l = 1; l < levels; ++l) h.push_back(T = uniform_refine(T));
  return h;
}

}  // namespace

TEST_CASE("A12 on geometric data") {
  const auto rep = check_A12(synthetic(12, 0.5));
  CHECK(rep.pass);
  CHECK(rep.values.at("rho") == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(rep.values.at("lambda") == 0.0);
  CHECK(rep.pairs == 11);
}

TEST_CASE("A12 needs Lambda when sigma stalls but delta is large") {
  // sigma2_{l+1} = sigma2_l, delta2_l = sigma2_l: Lambda = 1e-2 already gives rho = 0.99
  auto recs = synthetic(6, 1.0, 1.0);
  const auto rep = check_A12(recs);
  CHECK(rep.pass);
  CHECK(rep.values.at("lambda") == doctest::Approx(1e-2));
  CHECK(rep.values.at("rho") == doctest::Approx(0.99));
}

TEST_CASE("A12 fails on constant sigma without delta and names the levels") {
  const auto rep = check_A12(synthetic(6, 1.0));
  CHECK_FALSE(rep.pass);
  CHECK(rep.witness.find("levels 0 -> 1") != std::string::npos);
}

TEST_CASE("R-linear fit") {
  auto rep = check_rlinear(synthetic(10, 0.25));
  CHECK(rep.pass);
  CHECK(rep.values.at("q") == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(rep.values.at("C") == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.pairs == 45);

  rep = check_rlinear(synthetic(10, 1.0));
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(rep.witness.empty());
}

TEST_CASE("A4 constant and telescope") {
  auto recs = synthetic(8, 0.5, 0.5);
  auto rep = check_A4_telescope(recs);
  CHECK(rep.pass);
  // sum_{k >= l} delta2_k / sigma2_l = 0.5 (1 + ... + 2^-(6-l)) -> worst at l = 0
  CHECK(rep.values.at("C") == doctest::Approx(1.0 - std::pow(0.5, 7)));

  // a functional whose drops are exactly the deltas
  for (std::size_t l = 0; l < recs.size(); ++l) {
    double tail = 0.0;
    for (std::size_t k = l; k + 1 < recs.size(); ++k) tail += recs[k].delta2;
    recs[l].functional = 1.0 + tail;
  }
  rep = check_A4_telescope(recs);
  CHECK(rep.pass);
  CHECK(rep.values.at("telescope_error") <= 1e-15);
  recs[3].delta2_check = recs[3].delta2 * 1.5;
  rep = check_A4_telescope(recs);
  CHECK_FALSE(rep.pass);

  const auto single = check_A4_telescope(synthetic(1, 0.5));
  CHECK(single.pass);
  CHECK(single.values.at("C") == 0.0);
}

TEST_CASE("QM") {
  auto recs = synthetic(5, 0.5);
  CHECK(check_QM(recs, false).pass);
  CHECK(check_QM(recs, false).values.at("max_sigma_ratio") <= 1.0);
  recs[3].sigma2 = 400.0;  // sigma ratio 20
  CHECK_FALSE(check_QM(recs, false).pass);

  auto ls = synthetic(5, 0.5);
  for (auto& r : ls) r.functional = r.sigma2;
  CHECK(check_QM(ls, true).pass);
  ls[4].functional = ls[2].functional * (1 + 1e-6);
  const auto rep = check_QM(ls, true);
  CHECK_FALSE(rep.pass);
  CHECK(rep.witness.find("level 4") != std::string::npos);
}

TEST_CASE("B2 on uniform hierarchies") {
  const auto h = uniform_hierarchy(unit_square(), 7);
  CHECK(check_B2(h, oscillation_functional(parse_field("one"))).pass);

  const auto mu2 = oscillation_functional(parse_field("linear-x"));
  const auto rep = check_B2(h, mu2);
  CHECK(rep.pass);
  CHECK(rep.pairs == 21);
  // two bisection sweeps halve h, and mu for linear data is proportional to h
  auto mu = [&](const Triangulation& T) {
    double s = 0.0;
    for (std::size_t k = 0; k < T.size(); ++k) {
      const auto& t = T.triangle(k);
      s += mu2(T.forest().vertex(t.v[0]), T.forest().vertex(t.v[1]), T.forest().vertex(t.v[2]));
    }
    return std::sqrt(s);
  };
  CHECK(mu(h[6]) / mu(h[4]) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("B2 detects an increase") {
  const auto h = uniform_hierarchy(unit_square(), 3);
  // rewards small elements, so refining increases it
  const ElementFunctional bad = [](const Vertex& a, const Vertex& b, const Vertex& c) {
    return 1.0 / std::abs(signed_area(a, b, c));
  };
  const auto rep = check_B2(h, bad);
  CHECK_FALSE(rep.pass);
  CHECK(rep.witness.find("mu(T_1)") != std::string::npos);
}

TEST_CASE("B1 rate") {
  B1Options opt;
  opt.tolerances = {1e-2, 1e-3, 1e-4, 1e-5};
  auto rep = check_B1_rate(unit_square(), oscillation_functional(parse_field("one")), opt);
  CHECK(rep.pass);
  CHECK(rep.values.at("adaptive_slope") == 0.0);

  // linear data: mu2 ~ 1/N for adaptive and uniform meshes alike
  opt.tolerances = {1e-3, 3e-4, 1e-4, 3e-5, 1e-5, 3e-6};
  rep = check_B1_rate(unit_square(), oscillation_functional(parse_field("linear-x")), opt);
  CHECK(rep.pass);
  CHECK(rep.values.at("uniform_slope") == doctest::Approx(1.0).epsilon(0.02));
  CHECK(std::abs(rep.values.at("adaptive_slope") - rep.values.at("uniform_slope")) <= 0.05);
  CHECK(rep.values.at("max_mu2_over_tol") <= 1.0);

  rep = check_B1_rate(unit_square(), oscillation_functional(parse_field("radial-alpha:0.6")), opt);
  CHECK(rep.pass);
  CHECK(rep.values.at("adaptive_slope") < rep.values.at("uniform_slope"));
}

TEST_CASE("random hierarchies are nested and conforming") {
  const auto h = random_hierarchy(l_shape(), 8, 99);
  REQUIRE(h.size() == 8);
  for (std::size_t l = 0; l + 1 < h.size(); ++l) {
    CHECK(is_refinement_of(h[l + 1], h[l]));
    CHECK(h[l + 1].size() > h[l].size());
    CHECK(is_conforming(h[l + 1]));
  }
  CHECK(random_hierarchy(l_shape(), 8, 99).back().size() == h.back().size());
}

TEST_CASE("report writers") {
  std::vector<AxiomReport> reps{check_A12(synthetic(4, 0.5)), check_A12(synthetic(4, 1.0))};
  std::ostringstream kv, text;
  write_report_kv(kv, reps);
  write_report_text(text, reps);
  CHECK(kv.str().find("A12.pass=1") != std::string::npos);
  CHECK(kv.str().find("A12.rho=") != std::string::npos);
  CHECK(text.str().find("FAIL") != std::string::npos);
  CHECK(text.str().find("PASS") != std::string::npos);
}

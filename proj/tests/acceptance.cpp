// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. All thresholds are the constants below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "safem/axioms.hpp"
#include "safem/domains.hpp"
#include "safem/driver.hpp"
#include "safem/problem.hpp"

using namespace safem;

namespace {

constexpr double kMaxSecondsPerRun = 60.0;         // C1
constexpr std::size_t kMinLevels = 12;             // C1
constexpr std::size_t kB2PairsPerField = 200;      // C2
constexpr double kTelescopeTol = 1e-8;             // C3, relative to LS at level 0
constexpr double kRateLow = 0.43, kRateHigh = 0.57;  // C4
constexpr std::size_t kRateMinN = 1000;            // C4, C9: pre-asymptotic levels excluded
constexpr double kUniformRateMax = 0.40;           // C4
constexpr double kRateSeconds = 300.0;             // C4
constexpr double kConstraintTol = 1e-9;            // C6
constexpr double kResidualTol = 1e-9;              // C6
constexpr int kDoerflerInstances = 1000;           // C7
constexpr std::size_t kDoerflerMaxSize = 15;       // C7
constexpr double kTildeMuTol = 1e-14;              // C7
constexpr int kFuzzOps = 10000;                    // C8
constexpr double kAreaTol = 1e-12;                 // C8
constexpr double kRateMatchTol = 0.05;             // C9

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += " [failed: " + what + "]";
    }
  }
  void note(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    detail += buf;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct TimedRun {
  RunResult run;
  double seconds = 0.0;
};

TimedRun timed(const std::function<RunResult()>& f) {
  const auto t0 = std::chrono::steady_clock::now();
  TimedRun r{f(), 0.0};
  r.seconds = seconds_since(t0);
  return r;
}

// Shared L-shape runs with f = 1 and default parameters.
struct Runs {
  TimedRun mixed, ls;
};

const Runs& l_shape_runs() {
  static const Runs runs = [] {
    Runs r;
    SafemParams p;
    MixedProblem mixed(parse_field("one"));
    r.mixed = timed([&] { return safem_run(mixed, p, l_shape()); });
    LsProblem ls(parse_field("one"));
    r.ls = timed([&] { return safem_run(ls, p, l_shape()); });
    return r;
  }();
  return runs;
}

Outcome criterion1() {
  Outcome o;
  const auto& runs = l_shape_runs();
  using Entry = std::pair<const char*, const TimedRun*>;
  for (const auto& [name, run] : {Entry{"mixed", &runs.mixed}, Entry{"ls", &runs.ls}}) {
    const auto& recs = run->run.records;
    const auto a12 = check_A12(recs);
    const auto rl = check_rlinear(recs);
    o.note(" %s: levels=%zu |T|=%zu time=%.1fs rho=%.3f Lambda=%.3g q=%.3f C=%.2f;", name, recs.size(),
           recs.back().elements, run->seconds, a12.values.at("rho"), a12.values.at("lambda"), rl.values.at("q"),
           rl.values.at("C"));
    o.require(recs.size() >= kMinLevels, std::string(name) + " levels");
    o.require(a12.pass, std::string(name) + " A12: " + a12.witness);
    o.require(rl.pass, std::string(name) + " rlinear: " + rl.witness);
    o.require(run->seconds <= kMaxSecondsPerRun, std::string(name) + " time");
  }
  return o;
}

Outcome criterion2() {
  Outcome o;
  const Triangulation T0 = l_shape();
  for (const char* f : {"radial-alpha:0.6", "linear-x"}) {
    const auto mu2 = oscillation_functional(parse_field(f));
    std::size_t pairs = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 1; pairs < kB2PairsPerField; ++seed) {
      const auto rep = check_B2(random_hierarchy(T0, 5, seed, 0.3), mu2);
      pairs += rep.pairs;
      worst = std::max(worst, rep.values.at("max_ratio"));
      o.require(rep.pass, std::string(f) + ": " + rep.witness);
    }
    o.note(" %s: %zu pairs, max mu_fine/mu_coarse=%.6f;", f, pairs, worst);
  }
  const auto qm = check_QM(l_shape_runs().ls.run.records, true);
  o.note(" LS over %zu level pairs monotone=%d", qm.pairs, qm.pass ? 1 : 0);
  o.require(qm.pass, "LS monotonicity: " + qm.witness);
  return o;
}

Outcome criterion3() {
  Outcome o;
  const auto rep = check_A4_telescope(l_shape_runs().ls.run.records, kTelescopeTol);
  o.note(" drop route err=%.2e, LS(0;diff) route err=%.2e (relative to LS_0), C=%.3f",
         rep.values.at("telescope_error"), rep.values.at("telescope_error_independent"), rep.values.at("C"));
  o.require(rep.pass, rep.witness);
  return o;
}

Outcome criterion4() {
  Outcome o;
  const auto& adaptive = l_shape_runs().mixed;
  MixedProblem mixed(parse_field("one"));
  const auto uniform = timed([&] { return uniform_run(mixed, SafemParams{}, l_shape()); });
  const auto fit = fit_rate(adaptive.run.records, {}, kRateMinN);
  const auto fit_all = fit_rate(adaptive.run.records);
  const auto ufit = fit_rate(uniform.run.records);
  const double total = adaptive.seconds + uniform.seconds;
  o.note(" SAFEM s=%.3f (N>=%zu, %zu levels; all levels %.3f), uniform s=%.3f, %.1fs", fit.s, kRateMinN, fit.used,
         fit_all.s, ufit.s, total);
  o.require(fit.s >= kRateLow && fit.s <= kRateHigh, "adaptive rate");
  o.require(ufit.s <= kUniformRateMax, "uniform rate");
  o.require(total <= kRateSeconds, "time");
  return o;
}

Outcome criterion5() {
  Outcome o;
  B1Options opt;
  for (int k = 2; k <= 16; ++k) opt.tolerances.push_back(0.1 * std::pow(2.0, -k));
  opt.uniform_levels = 16;
  const auto rep = check_B1_rate(unit_square(), oscillation_functional(parse_field("radial-alpha:0.6")), opt);
  o.note(" radial-alpha:0.6: adaptive slope=%.3f (s=%.3f), uniform slope=%.3f, max mu2/Tol=%.3f",
         rep.values.at("adaptive_slope"), rep.values.at("adaptive_s"), rep.values.at("uniform_slope"),
         rep.values.at("max_mu2_over_tol"));
  o.require(rep.pass, rep.witness);
  return o;
}

Outcome criterion6() {
  Outcome o;
  const auto& runs = l_shape_runs();
  double cd = 0.0, mres = 0.0, lres = 0.0;
  for (const auto& r : runs.mixed.run.records) {
    cd = std::max(cd, r.constraint_defect);
    mres = std::max(mres, r.residual);
  }
  for (const auto& r : runs.ls.run.records) lres = std::max(lres, r.residual);
  o.note(" mixed max constraint defect=%.2e, saddle residual=%.2e; LS residual=%.2e", cd, mres, lres);
  o.require(cd <= kConstraintTol, "mixed constraint");
  o.require(mres <= kResidualTol, "mixed residual");
  o.require(lres <= kResidualTol, "LS residual");
  return o;
}

Outcome criterion7() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> size(1, kDoerflerMaxSize);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int mismatches = 0;
  for (int trial = 0; trial < kDoerflerInstances; ++trial) {
    std::vector<double> v(size(rng));
    for (double& x : v) x = std::pow(u(rng), 3);
    if (trial % 10 == 0) std::fill(v.begin(), v.begin() + static_cast<long>(v.size() / 2), 0.25);  // ties
    const double theta = 0.01 + 0.99 * u(rng);
    const IndicatorField eta(v);
    const auto M = doerfler_select(theta, eta);
    double total = 0.0;
    for (double x : v) total += x;
    std::size_t best = v.size();
    for (std::uint32_t mask = 1; mask < (1u << v.size()); ++mask) {
      const auto card = static_cast<std::size_t>(__builtin_popcount(mask));
      if (card >= best) continue;
      double s = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (mask & (1u << i)) s += v[i];
      }
      if (s >= theta * total) best = card;
    }
    if (M.size() != best || eta.sum_over(M) < theta * total) ++mismatches;
  }
  o.note(" Doerfler: %d/%d instances differ from exhaustive search;", mismatches, kDoerflerInstances);
  o.require(mismatches == 0, "Doerfler minimal cardinality");

  // tilde-mu in the APPROX state against the recursion evaluated here
  double worst = 0.0;
  std::size_t checked = 0;
  // checkerboard lines cut elements at every level, so its tolerance stays coarse
  for (const auto& [f, tol] : {std::pair{"radial-alpha:0.6", 1e-5}, std::pair{"linear-x", 1e-5},
                               std::pair{"checkerboard:3", 1e-2}}) {
    ApproxState state(unit_square(), oscillation_functional(parse_field(f)));
    state.run(tol);
    const BisectionForest& forest = state.root_mesh().forest();
    for (NodeId leaf : state.partition()) {
      for (NodeId n = leaf; forest.node(n).parent != kNoNode; n = forest.node(n).parent) {
        const NodeId p = forest.node(n).parent;
        const auto kids = forest.node(p).children;
        const double m = state.mu(p), t = state.tilde_mu(p), m1 = state.mu(kids[0]), m2 = state.mu(kids[1]);
        const double expected = m + t > 0.0 ? t * (m1 + m2) / (m + t) : 0.0;
        worst = std::max(worst, std::abs(state.tilde_mu(n) - expected) / std::max(expected, 1e-300));
        ++checked;
      }
      const NodeId root = forest.root_of(leaf);
      worst = std::max(worst, std::abs(state.tilde_mu(root) - state.mu(root)) / std::max(state.mu(root), 1e-300));
    }
  }
  o.note(" tilde-mu: %zu parent/child relations, max relative deviation %.1e", checked, worst);
  o.require(worst <= kTildeMuTol, "tilde-mu recursion");
  return o;
}

Outcome criterion8() {
  Outcome o;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t refines = 0, overlays = 0, violations = 0;
  double worst_angle = std::numbers::pi;
  for (const char* dom : {"unit-square", "l-shape"}) {
    const Triangulation T0 = make_domain(dom);
    const double area0 = total_area(T0);
    std::vector<Triangulation> pool{T0};
    for (int op = 0; op < kFuzzOps / 2; ++op) {
      const std::size_t i = rng() % pool.size();
      Triangulation T;
      if (u(rng) < 0.7 || pool.size() < 2) {
        const Triangulation& S = pool[i];
        std::vector<std::size_t> M;
        const double frac = 0.3 * u(rng);
        for (std::size_t k = 0; k < S.size(); ++k) {
          if (u(rng) < frac) M.push_back(k);
        }
        if (M.empty()) M.push_back(rng() % S.size());
        T = refine(S, M);
        ++refines;
        if (!is_refinement_of(T, S)) ++violations;
      } else {
        const Triangulation& A = pool[i];
        const Triangulation& B = pool[rng() % pool.size()];
        T = overlay(A, B);
        ++overlays;
        if (T.size() + T0.size() > A.size() + B.size()) ++violations;
        if (!is_refinement_of(T, A) || !is_refinement_of(T, B)) ++violations;
      }
      if (!is_conforming(T)) ++violations;
      if (std::abs(total_area(T) - area0) > kAreaTol * area0) ++violations;
      const double ang = min_angle(T);
      worst_angle = std::min(worst_angle, ang);
      if (ang < std::numbers::pi / 4 - 1e-12) ++violations;
      // keep meshes small; restart from T0 now and then
      if (T.size() > 3000) pool[i] = T0;
      else if (pool.size() < 16) pool.push_back(T);
      else pool[rng() % pool.size()] = T;
    }
  }
  o.note(" %zu refinements, %zu overlays, %zu violations, min angle %.6f rad (pi/4 = %.6f)", refines, overlays,
         violations, worst_angle, std::numbers::pi / 4);
  o.require(violations == 0, "mesh invariants");
  return o;
}

Outcome criterion9() {
  Outcome o;
  for (const char* f : {"one", "radial-alpha:0.6", "linear-x"}) {
    for (const char* dom : {"unit-square", "l-shape"}) {
      const Triangulation T0 = make_domain(dom);
      DataOnlyProblem problem(parse_field(f));
      SafemParams p;
      p.sigma_tol = 0.0;
      const auto run = cafem_run(problem, p, T0);
      const double s_cafem = fit_rate(run.records, {}, kRateMinN).s;
      const double s_cafem_all = fit_rate(run.records).s;

      // N + 1 against 1/Tol; sigma^2 <= Tol, so the rate in sigma is half the inverse slope
      ApproxState state(T0, problem.data_functional());
      std::vector<double> x, y, xa, ya;
      double tol = run.records.front().sigma2;
      for (int k = 0; k < 60; ++k) {
        tol *= 0.5;
        const Triangulation T = state.run(tol);
        if (T.size() > p.max_elements) break;
        const std::size_t N = T.size() - T0.size();
        xa.push_back(1.0 / tol);
        ya.push_back(static_cast<double>(N) + 1.0);
        if (N >= kRateMinN) {
          x.push_back(xa.back());
          y.push_back(ya.back());
        }
      }
      const double s_approx = 0.5 / loglog_slope(x, y);
      const double s_approx_all = 0.5 / loglog_slope(xa, ya);
      o.note(" %s/%s: CAFEM %.3f APPROX %.3f (all levels %.3f, %.3f);", f, dom, s_cafem, s_approx, s_cafem_all,
             s_approx_all);
      o.require(std::abs(s_cafem - s_approx) <= kRateMatchTol, std::string(f) + "/" + dom);
    }
  }
  return o;
}

}  // namespace

int main() {
  std::setvbuf(stdout, nullptr, _IOLBF, 0);
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria{
      {"C1 contraction and R-linear convergence (mixed, LS)", criterion1},
      {"C2 data monotonicity and LS monotonicity", criterion2},
      {"C3 LS telescoping identity", criterion3},
      {"C4 optimal rate on the L-shape", criterion4},
      {"C5 APPROX rate", criterion5},
      {"C6 discrete constraints and solver residuals", criterion6},
      {"C7 Doerfler minimality and tilde-mu recursion", criterion7},
      {"C8 mesh fuzzing", criterion8},
      {"C9 CAFEM vs APPROX on the data-only problem", criterion9},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string(" exception: ") + e.what();
    }
    std::printf("%s %s (%.1fs):%s\n", o.pass ? "PASS" : "FAIL", name, seconds_since(t0), o.detail.c_str());
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

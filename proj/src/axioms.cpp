#include "safem/axioms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <sstream>

namespace safem {

namespace {

double mu2_sum(const Triangulation& T, const ElementFunctional& mu2) {
  const BisectionForest& forest = T.forest();
  double s = 0.0;
  for (std::size_t k = 0; k < T.size(); ++k) {
    const auto& v = T.triangle(k).v;
    s += mu2(forest.vertex(v[0]), forest.vertex(v[1]), forest.vertex(v[2]));
  }
  return s;
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Records whose delta to the next level is known.
std::size_t with_delta(const std::vector<LevelRecord>& r) {
  std::size_t n = 0;
  while (n < r.size() && !std::isnan(r[n].delta2)) ++n;
  return n;
}

}  // namespace

AxiomReport check_B2(const std::vector<Triangulation>& hierarchy, const ElementFunctional& mu2) {
  AxiomReport rep;
  rep.name = "B2";
  std::vector<double> mu(hierarchy.size());
  for (std::size_t i = 0; i < hierarchy.size(); ++i) mu[i] = std::sqrt(mu2_sum(hierarchy[i], mu2));
  double worst = 0.0;
  rep.pass = true;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t j = i + 1; j < mu.size(); ++j) {
      ++rep.pairs;
      if (mu[i] > 0.0) worst = std::max(worst, mu[j] / mu[i]);
      if (mu[j] > mu[i] * (1.0 + 1e-9)) {
        if (rep.pass) rep.witness = fmt("mu(T_%zu) = %.17g > mu(T_%zu) = %.17g", j, mu[j], i, mu[i]);
        rep.pass = false;
      }
    }
  }
  rep.values["max_ratio"] = worst;
  return rep;
}

AxiomReport check_QM(const std::vector<LevelRecord>& records, bool least_squares, double bound) {
  AxiomReport rep;
  rep.name = "QM";
  rep.pass = true;
  double worst = records.empty() ? 0.0 : 1.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (std::size_t j = i + 1; j < records.size(); ++j) {
      ++rep.pairs;
      const auto& a = records[i];
      const auto& b = records[j];
      if (a.sigma2 > 0.0) worst = std::max(worst, std::sqrt(b.sigma2 / a.sigma2));
      if (least_squares && b.functional > a.functional * (1.0 + 1e-9)) {
        if (rep.pass) {
          rep.witness = fmt("LS(level %zu) = %.17g > LS(level %zu) = %.17g", b.level, b.functional, a.level,
                            a.functional);
        }
        rep.pass = false;
      }
    }
  }
  rep.values["max_sigma_ratio"] = worst;
  if (!least_squares) {
    rep.values["bound"] = bound;
    if (worst >= bound) {
      rep.pass = false;
      rep.witness = fmt("max sigma ratio %.6g not below %.6g", worst, bound);
    }
  }
  return rep;
}

AxiomReport check_A12(const std::vector<LevelRecord>& records) {
  AxiomReport rep;
  rep.name = "A12";
  const std::size_t n = with_delta(records);
  std::vector<double> grid{0.0};
  for (int i = 0; i < 25; ++i) grid.push_back(std::pow(10.0, -2.0 + 6.0 * i / 24.0));

  double best_rho = std::numeric_limits<double>::infinity(), best_lambda = 0.0;
  std::size_t best_level = 0;
  bool found = false;
  for (double lambda : grid) {
    double rho = 0.0;
    std::size_t arg = 0;
    for (std::size_t l = 0; l < n; ++l) {
      if (records[l].sigma2 <= 0.0) continue;
      const double r = (records[l + 1].sigma2 - lambda * records[l].delta2) / records[l].sigma2;
      if (r > rho) {
        rho = r;
        arg = l;
      }
    }
    if (rho < best_rho) {
      best_rho = rho;
      best_lambda = lambda;
      best_level = arg;
    }
    if (rho < 1.0) {
      // Smallest Lambda on the grid that certifies.
      rep.values["rho"] = rho;
      rep.values["lambda"] = lambda;
      found = true;
      break;
    }
  }
  rep.pairs = n;
  rep.pass = found && n > 0;
  if (!rep.pass) {
    rep.values["rho"] = best_rho;
    rep.values["lambda"] = best_lambda;
    rep.witness = n == 0 ? std::string("no level pairs")
                         : fmt("levels %zu -> %zu: sigma2 %.17g -> %.17g, delta2 %.17g", best_level,
                               best_level + 1, records[best_level].sigma2, records[best_level + 1].sigma2,
                               records[best_level].delta2);
  }
  return rep;
}

AxiomReport check_rlinear(const std::vector<LevelRecord>& records) {
  AxiomReport rep;
  rep.name = "rlinear";
  std::vector<double> lv, ls;
  for (const auto& r : records) {
    if (r.sigma2 > 0.0) {
      lv.push_back(static_cast<double>(r.level));
      ls.push_back(std::log(r.sigma2));
    }
  }
  if (lv.size() < 2) {
    rep.witness = "fewer than two levels with sigma > 0";
    return rep;
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lv.size(); ++i) {
    mx += lv[i];
    my += ls[i];
  }
  mx /= static_cast<double>(lv.size());
  my /= static_cast<double>(lv.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lv.size(); ++i) {
    sxy += (lv[i] - mx) * (ls[i] - my);
    sxx += (lv[i] - mx) * (lv[i] - mx);
  }
  const double q = std::exp(sxy / sxx);
  double C = 0.0;
  std::size_t wi = 0, wj = 0;
  for (std::size_t i = 0; i < lv.size(); ++i) {
    for (std::size_t j = i + 1; j < lv.size(); ++j) {
      ++rep.pairs;
      const double c = std::exp(ls[j] - ls[i] - (lv[j] - lv[i]) * std::log(q));
      if (c > C) {
        C = c;
        wi = i;
        wj = j;
      }
    }
  }
  rep.values["q"] = q;
  rep.values["C"] = C;
  rep.pass = q <= 0.999;
  if (!rep.pass) {
    rep.witness = fmt("fitted q = %.6g; worst pair levels %.0f -> %.0f", q, lv[wi], lv[wj]);
  }
  return rep;
}

AxiomReport check_A4_telescope(const std::vector<LevelRecord>& records, double tol) {
  AxiomReport rep;
  rep.name = "A4";
  rep.pass = true;
  const std::size_t n = with_delta(records);
  double C = 0.0;
  double tail = 0.0;
  for (std::size_t l = n; l-- > 0;) {
    tail += records[l].delta2;
    ++rep.pairs;
    if (records[l].sigma2 > 0.0) C = std::max(C, tail / records[l].sigma2);
    else if (tail > 0.0) {
      rep.pass = false;
      rep.witness = fmt("level %zu: sigma = 0 but later deltas sum to %.17g", l, tail);
    }
  }
  rep.values["C"] = C;
  if (!std::isfinite(C)) rep.pass = false;

  const bool has_functional = !records.empty() && !std::isnan(records.front().functional);
  if (has_functional && n > 0) {
    double worst = 0.0, worst_check = 0.0;
    std::size_t wl = 0;
    for (std::size_t l = 0; l < n; ++l) {
      double sum = 0.0, sum_check = 0.0;
      for (std::size_t k = l; k < n; ++k) {
        sum += records[k].delta2;
        sum_check += std::isnan(records[k].delta2_check) ? records[k].delta2 : records[k].delta2_check;
      }
      const double drop = records[l].functional - records[n].functional;
      const double scale = records.front().functional > 0.0 ? records.front().functional : 1.0;
      const double e = std::abs(sum - drop) / scale;
      const double ec = std::abs(sum_check - drop) / scale;
      worst = std::max(worst, e);
      if (ec > worst_check) {
        worst_check = ec;
        wl = l;
      }
    }
    rep.values["telescope_error"] = worst;
    rep.values["telescope_error_independent"] = worst_check;
    if (worst > tol || worst_check > tol) {
      rep.pass = false;
      rep.witness = fmt("telescope from level %zu off by %.3e relative", wl, std::max(worst, worst_check));
    }
  }
  return rep;
}

AxiomReport check_B1_rate(const Triangulation& T0, const ElementFunctional& mu2, const B1Options& opt) {
  AxiomReport rep;
  rep.name = "B1";
  rep.pass = true;
  ApproxState state(T0, mu2);
  std::vector<double> x, y;
  double max_ratio = 0.0;
  for (double tol : opt.tolerances) {
    const Triangulation T = state.run(tol);
    const double m2 = state.mu2_of(T);
    ++rep.pairs;
    max_ratio = std::max(max_ratio, m2 / tol);
    if (!(m2 <= tol)) {
      if (rep.pass) rep.witness = fmt("tol %.6g: mu2(T_Tol) = %.17g", tol, m2);
      rep.pass = false;
    }
    x.push_back(1.0 / tol);
    y.push_back(static_cast<double>(T.size() - T0.size()) + 1.0);
  }
  rep.values["max_mu2_over_tol"] = max_ratio;
  if (x.size() >= 2) {
    const double adaptive = loglog_slope(x, y);
    rep.values["adaptive_slope"] = adaptive;
    rep.values["adaptive_s"] = adaptive > 0.0 ? 0.5 / adaptive : std::numeric_limits<double>::infinity();
  }

  std::vector<double> ux, uy;
  Triangulation U = T0;
  for (std::size_t l = 0; l <= opt.uniform_levels; ++l) {
    const double m2 = mu2_sum(U, mu2);
    if (m2 > 0.0) {
      ux.push_back(1.0 / m2);
      uy.push_back(static_cast<double>(U.size()));
    }
    if (l < opt.uniform_levels) U = uniform_refine(U);
  }
  if (ux.size() >= 3 && x.size() >= 2) {
    // Asymptotic uniform slope from the last four levels.
    const std::size_t t = ux.size() >= 4 ? ux.size() - 4 : 0;
    const double best = loglog_slope({ux.begin() + static_cast<long>(t), ux.end()},
                                     {uy.begin() + static_cast<long>(t), uy.end()});
    rep.values["uniform_slope"] = best;
    if (rep.values["adaptive_slope"] > best + opt.slope_margin) {
      if (rep.pass) {
        rep.witness = fmt("adaptive slope %.4f worse than uniform %.4f", rep.values["adaptive_slope"], best);
      }
      rep.pass = false;
    }
  }
  return rep;
}

std::vector<Triangulation> random_hierarchy(const Triangulation& T0, std::size_t levels, std::uint64_t seed,
                                            double fraction) {
  std::mt19937_64 rng(seed);
  std::vector<Triangulation> out{T0};
  while (out.size() < levels) {
    const Triangulation& T = out.back();
    std::bernoulli_distribution pick(fraction);
    std::vector<std::size_t> M;
    for (std::size_t k = 0; k < T.size(); ++k) {
      if (pick(rng)) M.push_back(k);
    }
    if (M.empty()) M.push_back(std::uniform_int_distribution<std::size_t>(0, T.size() - 1)(rng));
    out.push_back(refine(T, M));
  }
  return out;
}

void write_report_text(std::ostream& out, const std::vector<AxiomReport>& reports) {
  for (const auto& r : reports) {
    out << r.name << ": " << (r.pass ? "PASS" : "FAIL") << " (" << r.pairs << " pairs)";
    for (const auto& [k, v] : r.values) out << fmt(" %s=%.6g", k.c_str(), v);
    out << "\n";
    if (!r.witness.empty()) out << "  witness: " << r.witness << "\n";
  }
}

void write_report_kv(std::ostream& out, const std::vector<AxiomReport>& reports) {
  for (const auto& r : reports) {
    out << r.name << ".pass=" << (r.pass ? 1 : 0) << "\n";
    out << r.name << ".pairs=" << r.pairs << "\n";
    for (const auto& [k, v] : r.values) out << r.name << "." << k << fmt("=%.17g", v) << "\n";
    if (!r.witness.empty()) out << r.name << ".witness=" << r.witness << "\n";
  }
}

}  // namespace safem

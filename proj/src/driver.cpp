#include "safem/driver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <ostream>

namespace safem {

void SafemParams::validate() const {
  if (!(theta_a > 0.0 && theta_a <= 1.0)) throw std::invalid_argument("theta_a must lie in (0, 1]");
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
  if (!(rho_b > 0.0 && rho_b < 1.0)) throw std::invalid_argument("rho_b must lie in (0, 1)");
  if (!(sigma_tol >= 0.0)) throw std::invalid_argument("sigma_tol must be non-negative");
  if (max_elements == 0) throw std::invalid_argument("max_elements must be positive");
}

namespace {

enum class Strategy { separate, collective, uniform };

using Clock = std::chrono::steady_clock;

RunResult run(ProblemInstance& problem, const SafemParams& params, const Triangulation& T0, Strategy strategy) {
  params.validate();
  RunResult out;
  std::unique_ptr<ApproxState> approx_state;
  std::unique_ptr<DiscreteState> prev;
  Triangulation T = T0;

  for (std::size_t level = 0;; ++level) {
    const auto t0 = Clock::now();
    std::unique_ptr<DiscreteState> state;
    try {
      state = problem.solve(T);
    } catch (const SolverError& e) {
      throw LevelError(level, e.what());
    }
    const IndicatorField eta = problem.eta(*state);
    const IndicatorField mu = problem.mu(*state);

    if (prev) {
      LevelRecord& last = out.records.back();
      last.delta2 = problem.delta2(*prev, *state);
      if (auto d = problem.delta2_check(*prev, *state)) last.delta2_check = *d;
    }

    LevelRecord rec;
    rec.level = level;
    rec.elements = T.size();
    rec.N = T.size() - T0.size();
    rec.eta2 = eta.total();
    rec.mu2 = mu.total();
    rec.sigma2 = rec.eta2 + rec.mu2;
    if (auto v = problem.functional(*state)) rec.functional = *v;
    rec.residual = problem.solve_residual(*state);
    rec.constraint_defect = problem.constraint_defect(*state);
    if (params.keep_meshes) out.meshes.push_back(T);

    std::string stop;
    if (rec.sigma2 == 0.0) stop = "sigma-zero";
    else if (std::sqrt(rec.sigma2) <= params.sigma_tol) stop = "sigma-tol";
    else if (T.size() >= params.max_elements) stop = "max-elements";
    else if (level + 1 >= params.max_levels) stop = "max-levels";

    Triangulation next;
    if (strategy == Strategy::uniform) {
      rec.case_flag = 'U';
      if (stop.empty()) {
        next = uniform_refine(uniform_refine(T));
        rec.marked = T.size();
      }
    } else if (strategy == Strategy::collective || rec.mu2 <= params.kappa * rec.eta2) {
      rec.case_flag = 'A';
      if (stop.empty()) {
        const IndicatorField ind = strategy == Strategy::collective ? eta + mu : eta;
        const auto M = doerfler_select(params.theta_a, ind);
        rec.marked = M.size();
        rec.marked_eta2 = ind.sum_over(M);
        next = refine(T, M);
      }
    } else {
      rec.case_flag = 'B';
      if (stop.empty()) {
        if (!approx_state) approx_state = std::make_unique<ApproxState>(T0, problem.data_functional());
        rec.approx_tol = params.rho_b * rec.mu2;
        const Triangulation Ttol = approx_state->run(rec.approx_tol);
        rec.approx_mu2 = approx_state->mu2_of(Ttol);
        next = overlay(T, Ttol);
        rec.marked = next.size() - T.size();
      }
    }
    if (params.timings) rec.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    out.records.push_back(rec);

    if (!stop.empty()) {
      out.stop_reason = stop;
      out.final_mesh = T;
      return out;
    }
    prev = std::move(state);
    T = std::move(next);
  }
}

}  // namespace

RunResult safem_run(ProblemInstance& problem, const SafemParams& params, const Triangulation& T0) {
  return run(problem, params, T0, Strategy::separate);
}

RunResult cafem_run(ProblemInstance& problem, const SafemParams& params, const Triangulation& T0) {
  return run(problem, params, T0, Strategy::collective);
}

RunResult uniform_run(ProblemInstance& problem, const SafemParams& params, const Triangulation& T0) {
  return run(problem, params, T0, Strategy::uniform);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("loglog_slope: need two or more points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw std::invalid_argument("loglog_slope: abscissae coincide");
  return sxy / sxx;
}

RateFit fit_rate(const std::vector<LevelRecord>& records, const std::vector<double>& s_grid, std::size_t min_N) {
  std::vector<double> x, y;
  for (const auto& r : records) {
    if (r.sigma2 > 0.0 && r.N >= min_N) {
      x.push_back(1.0 + static_cast<double>(r.N));
      y.push_back(std::sqrt(r.sigma2));
    }
  }
  if (x.size() < 4) throw std::invalid_argument("fit_rate: fewer than four usable records");
  RateFit fit;
  fit.used = x.size();
  fit.s = -loglog_slope(x, y);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  fit.intercept = (my + fit.s * mx) / static_cast<double>(x.size());
  fit.s_grid = s_grid;
  for (double s : s_grid) {
    double sup = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sup = std::max(sup, std::pow(x[i], s) * y[i]);
    fit.sup.push_back(sup);
  }
  return fit;
}

void write_csv_header(std::ostream& out) { out << "level,N,case,eta2,mu2,sigma2,delta2,marked,seconds\n"; }

void write_csv(std::ostream& out, const std::vector<LevelRecord>& records) {
  write_csv_header(out);
  char buf[256], delta[32] = "";
  for (const auto& r : records) {
    // The last level has no successor; leave its delta empty.
    if (std::isnan(r.delta2)) delta[0] = '\0';
    else std::snprintf(delta, sizeof delta, "%.17g", r.delta2);
    std::snprintf(buf, sizeof buf, "%zu,%zu,%c,%.17g,%.17g,%.17g,%s,%zu,%.6f\n", r.level, r.N, r.case_flag, r.eta2,
                  r.mu2, r.sigma2, delta, r.marked, r.seconds);
    out << buf;
  }
}

}  // namespace safem

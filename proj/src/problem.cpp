#include "safem/problem.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace safem {

namespace {

template <class S>
const S& as(const DiscreteState& s) {
  return dynamic_cast<const S&>(s);
}

std::vector<ElementMoments> moments(const Triangulation& T, const ScalarField& f, const QuadratureRule& rule) {
  const BisectionForest& forest = T.forest();
  std::vector<ElementMoments> out(T.size());
  for (std::size_t k = 0; k < T.size(); ++k) {
    const auto& v = T.triangle(k).v;
    out[k] = element_moments(f, forest.vertex(v[0]), forest.vertex(v[1]), forest.vertex(v[2]), rule);
  }
  return out;
}

IndicatorField mu_from(const std::vector<ElementMoments>& data) {
  std::vector<double> mu2(data.size());
  for (std::size_t k = 0; k < data.size(); ++k) mu2[k] = data[k].mu2;
  return IndicatorField(std::move(mu2));
}

}  // namespace

IndicatorField oscillation(const Triangulation& T, const ScalarField& f, const QuadratureRule& rule) {
  return mu_from(moments(T, f, rule));
}

// ---------------------------------------------------------------------------

MixedProblem::MixedProblem(ScalarField f, QuadratureRule rule) : f_(std::move(f)), rule_(std::move(rule)) {}

std::unique_ptr<DiscreteState> MixedProblem::solve(const Triangulation& T) {
  auto s = std::make_unique<State>(T);
  s->system = assemble_mixed(T, f_, rule_);
  s->solution = solve_mixed(s->system);
  return s;
}

IndicatorField MixedProblem::eta(const DiscreteState& s) {
  const auto& st = as<State>(s);
  return eta_mixed(st.system.topo, st.solution);
}

IndicatorField MixedProblem::mu(const DiscreteState& s) { return mu_from(as<State>(s).system.data); }

double MixedProblem::delta2(const DiscreteState& coarse, const DiscreteState& fine) {
  const auto& c = as<State>(coarse);
  const auto& f = as<State>(fine);
  return delta_mixed(c.mesh, c.system.topo, c.solution, f.mesh, f.system.topo, f.solution);
}

ElementFunctional MixedProblem::data_functional() const { return oscillation_functional(f_, rule_); }

double MixedProblem::solve_residual(const DiscreteState& s) { return as<State>(s).solution.residual; }

double MixedProblem::constraint_defect(const DiscreteState& s) {
  const auto& st = as<State>(s);
  const MeshTopology& topo = st.system.topo;
  double div = 0.0, load = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < topo.num_elements(); ++k) {
    for (int i = 0; i < 3; ++i) {
      const int e = topo.element_edges[k][static_cast<std::size_t>(i)];
      div += topo.edge_sign(k, i) * topo.edge_length(e) * st.solution.flux[static_cast<std::size_t>(e)];
    }
    const double fk = st.system.data[k].mean * topo.areas[k];
    load += fk;
    scale += std::abs(fk);
  }
  return std::abs(div + load) / std::max(scale, std::numeric_limits<double>::min());
}

void MixedProblem::dump(std::ostream& out, const DiscreteState& s) {
  dump_mixed_solution(out, as<State>(s).solution);
}

// ---------------------------------------------------------------------------

LsProblem::LsProblem(ScalarField f, QuadratureRule rule) : f_(std::move(f)), rule_(std::move(rule)) {}

std::unique_ptr<DiscreteState> LsProblem::solve(const Triangulation& T) {
  auto s = std::make_unique<State>(T);
  s->system = assemble_ls(T, f_, rule_);
  s->solution = solve_ls(s->system);
  s->estimate = ls_functional(s->system, s->solution);
  return s;
}

IndicatorField LsProblem::eta(const DiscreteState& s) {
  const auto& st = as<State>(s);
  return eta_ls(st.system.topo, st.solution);
}

IndicatorField LsProblem::mu(const DiscreteState& s) { return mu_from(as<State>(s).system.data); }

double LsProblem::delta2(const DiscreteState& coarse, const DiscreteState& fine) {
  const auto& c = as<State>(coarse);
  const auto& f = as<State>(fine);
  return delta_ls(c.mesh, c.estimate.ls_total, f.mesh, f.estimate.ls_total);
}

std::optional<double> LsProblem::delta2_check(const DiscreteState& coarse, const DiscreteState& fine) {
  const auto& c = as<State>(coarse);
  const auto& f = as<State>(fine);
  return ls_of_difference(c.mesh, c.system.topo, c.solution, f.mesh, f.system.topo, f.solution);
}

ElementFunctional LsProblem::data_functional() const { return oscillation_functional(f_, rule_); }

std::optional<double> LsProblem::functional(const DiscreteState& s) { return as<State>(s).estimate.ls_total; }

double LsProblem::solve_residual(const DiscreteState& s) { return as<State>(s).solution.residual; }

double LsProblem::constraint_defect(const DiscreteState& s) { return as<State>(s).solution.residual; }

void LsProblem::dump(std::ostream& out, const DiscreteState& s) { dump_ls_solution(out, as<State>(s).solution); }

// ---------------------------------------------------------------------------

DataOnlyProblem::DataOnlyProblem(ScalarField f, QuadratureRule rule) : f_(std::move(f)), rule_(std::move(rule)) {}

std::unique_ptr<DiscreteState> DataOnlyProblem::solve(const Triangulation& T) {
  return std::make_unique<DiscreteState>(T);
}

IndicatorField DataOnlyProblem::eta(const DiscreteState& s) {
  const auto data = moments(s.mesh, f_, rule_);
  std::vector<double> eta2(data.size());
  for (std::size_t k = 0; k < data.size(); ++k) eta2[k] = data[k].area * data[k].area * data[k].norm2;
  return IndicatorField(std::move(eta2));
}

IndicatorField DataOnlyProblem::mu(const DiscreteState& s) {
  return IndicatorField(std::vector<double>(s.mesh.size(), 0.0));
}

double DataOnlyProblem::delta2(const DiscreteState& coarse, const DiscreteState& fine) {
  const auto parent = coarse_parent_map(fine.mesh, coarse.mesh);
  const auto data = moments(fine.mesh, f_, rule_);
  double d = 0.0;
  for (std::size_t k = 0; k < data.size(); ++k) {
    const double w = data[k].area - coarse.mesh.area(parent[k]);
    d += w * w * data[k].norm2;
  }
  return d;
}

ElementFunctional DataOnlyProblem::data_functional() const {
  return [f = f_, rule = rule_](const Vertex& a, const Vertex& b, const Vertex& c) {
    const auto m = element_moments(f, a, b, c, rule);
    return m.area * m.area * m.norm2;
  };
}

// ---------------------------------------------------------------------------

OscillationOnlyProblem::OscillationOnlyProblem(ScalarField f, QuadratureRule rule)
    : f_(std::move(f)), rule_(std::move(rule)) {}

std::unique_ptr<DiscreteState> OscillationOnlyProblem::solve(const Triangulation& T) {
  return std::make_unique<DiscreteState>(T);
}

IndicatorField OscillationOnlyProblem::eta(const DiscreteState& s) {
  return IndicatorField(std::vector<double>(s.mesh.size(), 0.0));
}

IndicatorField OscillationOnlyProblem::mu(const DiscreteState& s) { return oscillation(s.mesh, f_, rule_); }

ElementFunctional OscillationOnlyProblem::data_functional() const { return oscillation_functional(f_, rule_); }

// ---------------------------------------------------------------------------

std::unique_ptr<ProblemInstance> make_problem(const std::string& kind, ScalarField f, const QuadratureRule& rule) {
  if (kind == "mixed") return std::make_unique<MixedProblem>(std::move(f), rule);
  if (kind == "ls") return std::make_unique<LsProblem>(std::move(f), rule);
  if (kind == "data-only") return std::make_unique<DataOnlyProblem>(std::move(f), rule);
  if (kind == "oscillation-only") return std::make_unique<OscillationOnlyProblem>(std::move(f), rule);
  throw std::invalid_argument("unknown problem '" + kind + "'");
}

}  // namespace safem

#pragma once

// The abstract problem seen by the adaptive loops: a solve on a conforming
// mesh, refinement indicators eta and mu, and a distance delta between the
// discrete solutions on nested meshes.

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>

#include "safem/fem_ls.hpp"
#include "safem/fem_mixed.hpp"
#include "safem/marking.hpp"

namespace safem {

/// Solution of one problem on one mesh. Concrete problems downcast.
class DiscreteState {
 public:
  explicit DiscreteState(Triangulation T) : mesh(std::move(T)) {}
  virtual ~DiscreteState() = default;
  Triangulation mesh;
};

class ProblemInstance {
 public:
  virtual ~ProblemInstance() = default;

  virtual std::string name() const = 0;
  /// Throws SolverError on solver failure.
  virtual std::unique_ptr<DiscreteState> solve(const Triangulation& T) = 0;
  virtual IndicatorField eta(const DiscreteState& s) = 0;
  virtual IndicatorField mu(const DiscreteState& s) = 0;
  /// delta^2 between the solutions on T and a refinement of T.
  virtual double delta2(const DiscreteState& coarse, const DiscreteState& fine) = 0;
  /// Second, independently computed value of delta^2 where one exists.
  virtual std::optional<double> delta2_check(const DiscreteState&, const DiscreteState&) {
    return std::nullopt;
  }
  /// Per-element data functional driving APPROX in Case (B).
  virtual ElementFunctional data_functional() const = 0;
  /// Global value of the minimised functional, for energy-type problems.
  virtual std::optional<double> functional(const DiscreteState&) { return std::nullopt; }
  /// Relative residual of the last linear solve.
  virtual double solve_residual(const DiscreteState&) { return 0.0; }
  /// Defect of the problem's exact discrete identity (see the concrete classes).
  virtual double constraint_defect(const DiscreteState&) { return 0.0; }
  virtual void dump(std::ostream&, const DiscreteState&) {}
};

/// Mixed RT0 problem. constraint_defect is
/// |int div p + int Pi_0 f| / max(int |Pi_0 f|, tiny).
class MixedProblem final : public ProblemInstance {
 public:
  explicit MixedProblem(ScalarField f, QuadratureRule rule = default_rule());
  std::string name() const override { return "mixed"; }
  std::unique_ptr<DiscreteState> solve(const Triangulation& T) override;
  IndicatorField eta(const DiscreteState& s) override;
  IndicatorField mu(const DiscreteState& s) override;
  double delta2(const DiscreteState& coarse, const DiscreteState& fine) override;
  ElementFunctional data_functional() const override;
  double solve_residual(const DiscreteState& s) override;
  double constraint_defect(const DiscreteState& s) override;
  void dump(std::ostream& out, const DiscreteState& s) override;

  struct State : DiscreteState {
    using DiscreteState::DiscreteState;
    MixedSystem system;
    MixedSolution solution;
  };

 private:
  ScalarField f_;
  QuadratureRule rule_;
};

/// Least-squares problem. delta2 is the drop of the functional; delta2_check
/// evaluates LS(0; difference) on the fine mesh. constraint_defect is the
/// relative residual of the normal equations.
class LsProblem final : public ProblemInstance {
 public:
  explicit LsProblem(ScalarField f, QuadratureRule rule = default_rule());
  std::string name() const override { return "ls"; }
  std::unique_ptr<DiscreteState> solve(const Triangulation& T) override;
  IndicatorField eta(const DiscreteState& s) override;
  IndicatorField mu(const DiscreteState& s) override;
  double delta2(const DiscreteState& coarse, const DiscreteState& fine) override;
  std::optional<double> delta2_check(const DiscreteState& coarse, const DiscreteState& fine) override;
  ElementFunctional data_functional() const override;
  std::optional<double> functional(const DiscreteState& s) override;
  double solve_residual(const DiscreteState& s) override;
  double constraint_defect(const DiscreteState& s) override;
  void dump(std::ostream& out, const DiscreteState& s) override;

  struct State : DiscreteState {
    using DiscreteState::DiscreteState;
    LsSystem system;
    LsSolution solution;
    LsEstimate estimate;
  };

 private:
  ScalarField f_;
  QuadratureRule rule_;
};

/// Pure data approximation: eta^2(K) = |K|^2 ||f||^2_K and mu = 0. There is
/// no discrete solution; delta^2 measures the change of the weight,
/// sum over fine K of (|K| - |K_coarse|)^2 ||f||^2_K.
class DataOnlyProblem final : public ProblemInstance {
 public:
  explicit DataOnlyProblem(ScalarField f, QuadratureRule rule = default_rule());
  std::string name() const override { return "data-only"; }
  std::unique_ptr<DiscreteState> solve(const Triangulation& T) override;
  IndicatorField eta(const DiscreteState& s) override;
  IndicatorField mu(const DiscreteState& s) override;
  double delta2(const DiscreteState& coarse, const DiscreteState& fine) override;
  /// The weighted L2 functional |K|^2 ||f||^2_K itself.
  ElementFunctional data_functional() const override;

 private:
  ScalarField f_;
  QuadratureRule rule_;
};

/// eta = 0, mu the oscillation of f, delta = 0. Every SAFEM level is Case (B).
class OscillationOnlyProblem final : public ProblemInstance {
 public:
  explicit OscillationOnlyProblem(ScalarField f, QuadratureRule rule = default_rule());
  std::string name() const override { return "oscillation-only"; }
  std::unique_ptr<DiscreteState> solve(const Triangulation& T) override;
  IndicatorField eta(const DiscreteState& s) override;
  IndicatorField mu(const DiscreteState& s) override;
  double delta2(const DiscreteState&, const DiscreteState&) override { return 0.0; }
  ElementFunctional data_functional() const override;

 private:
  ScalarField f_;
  QuadratureRule rule_;
};

/// "mixed", "ls", "data-only" or "oscillation-only".
std::unique_ptr<ProblemInstance> make_problem(const std::string& kind, ScalarField f,
                                              const QuadratureRule& rule = default_rule());

/// mu^2 per leaf of T under the oscillation of f.
IndicatorField oscillation(const Triangulation& T, const ScalarField& f,
                           const QuadratureRule& rule = default_rule());

}  // namespace safem

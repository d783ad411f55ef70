#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "safem/mesh.hpp"
#include "safem/quadrature.hpp"

namespace safem {

/// Non-negative squared indicators, one per element, with a cached total.
class IndicatorField {
 public:
  IndicatorField() = default;
  /// Throws std::invalid_argument on negative or non-finite entries.
  explicit IndicatorField(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }
  double total() const { return total_; }
  double sum_over(std::span<const std::size_t> subset) const;

  /// Element-wise sum of two fields of the same size.
  friend IndicatorField operator+(const IndicatorField& a, const IndicatorField& b);

 private:
  std::vector<double> values_;
  double total_ = 0.0;
};

/// Minimal-cardinality set M with sum_{K in M} values(K) >= theta * total.
/// Greedy by decreasing value, ties by ascending index. Returned indices are
/// sorted ascending. Throws std::invalid_argument unless 0 < theta <= 1.
std::vector<std::size_t> doerfler_select(double theta, const IndicatorField& eta2);

/// Both children of K receive tmu_K (mu_K1 + mu_K2) / (mu_K + tmu_K); a zero
/// denominator yields (0, 0).
std::pair<double, double> tilde_mu_children(double mu_K, double tmu_K, double mu_K1, double mu_K2);

/// mu^2(K) as a function of the triangle alone.
using ElementFunctional = std::function<double(const Vertex&, const Vertex&, const Vertex&)>;

/// The data oscillation ||f - f_K||^2 as an element functional.
ElementFunctional oscillation_functional(ScalarField f, const QuadratureRule& rule = default_rule());

/// Greedy data approximation over NVB partitions of T0, driven by the
/// modified functional tilde-mu. The partition and tilde-mu values persist
/// between calls so a decreasing sequence of tolerances resumes where the
/// previous call stopped.
class ApproxState {
 public:
  ApproxState(Triangulation T0, ElementFunctional mu2, std::size_t max_partition = 4'000'000);

  /// Bisects all maximisers of tilde-mu per pass until mu^2(P) <= tol, then
  /// returns the completion of P. Throws std::invalid_argument for tol <= 0
  /// and std::runtime_error when the partition outgrows the cap.
  ///
  /// Sub-additivity holds with constant 1 for the oscillation functional, so
  /// the loop tolerance Tol / Lambda_B equals tol. A functional that breaks
  /// that would need the division restored here.
  Triangulation run(double tol);

  /// Possibly non-conforming current partition, sorted by node id.
  std::vector<NodeId> partition() const;
  std::size_t partition_size() const { return partition_size_; }
  double partition_mu2() const { return partition_mu2_; }
  double mu(NodeId id);
  double tilde_mu(NodeId id) const { return tmu_[static_cast<std::size_t>(id)]; }
  const Triangulation& root_mesh() const { return T0_; }

  /// mu^2 summed over the leaves of T, using the same cached functional.
  double mu2_of(const Triangulation& T);

 private:
  void ensure(NodeId id);
  void run_loop(double tol);
  double recompute_partition_mu2() const;

  Triangulation T0_;
  ElementFunctional functional_;
  std::size_t max_partition_;
  std::vector<double> mu_;      // NaN until evaluated
  std::vector<double> tmu_;
  std::vector<char> in_partition_;
  std::vector<NodeId> order_;
  std::vector<std::pair<double, NodeId>> heap_;
  std::size_t partition_size_ = 0;
  double partition_mu2_ = 0.0;
};

/// One-shot APPROX with the oscillation of f. Use ApproxState to resume.
Triangulation approx(double tol, const ScalarField& f, const Triangulation& T0,
                     const QuadratureRule& rule = default_rule());

/// |T_to| - |T_from|. Throws std::invalid_argument unless T_to refines T_from.
std::size_t cumulative_marks(const Triangulation& T_from, const Triangulation& T_to);

}  // namespace safem

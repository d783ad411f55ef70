#include "safem/marking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace safem {

IndicatorField::IndicatorField(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("IndicatorField: entries must be finite and non-negative");
    }
    total_ += v;
  }
}

double IndicatorField::sum_over(std::span<const std::size_t> subset) const {
  double s = 0.0;
  for (std::size_t i : subset) s += values_.at(i);
  return s;
}

IndicatorField operator+(const IndicatorField& a, const IndicatorField& b) {
  if (a.size() != b.size()) throw std::invalid_argument("IndicatorField: size mismatch");
  std::vector<double> sum(a.size());
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = a[i] + b[i];
  return IndicatorField(std::move(sum));
}

std::vector<std::size_t> doerfler_select(double theta, const IndicatorField& eta2) {
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw std::invalid_argument("doerfler_select: theta must lie in (0, 1]");
  }
  std::vector<std::size_t> order(eta2.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return eta2[a] > eta2[b]; });
  // The total is summed in the same order as the greedy prefix so that
  // theta = 1 terminates exactly at the last positive entry.
  double total = 0.0;
  for (std::size_t i : order) total += eta2[i];
  const double goal = theta * total;
  std::vector<std::size_t> selected;
  double bulk = 0.0;
  for (std::size_t i : order) {
    if (bulk >= goal) break;
    selected.push_back(i);
    bulk += eta2[i];
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

std::pair<double, double> tilde_mu_children(double mu_K, double tmu_K, double mu_K1, double mu_K2) {
  const double denom = mu_K + tmu_K;
  if (denom == 0.0) return {0.0, 0.0};
  const double t = tmu_K * (mu_K1 + mu_K2) / denom;
  return {t, t};
}

ElementFunctional oscillation_functional(ScalarField f, const QuadratureRule& rule) {
  return [f = std::move(f), rule](const Vertex& a, const Vertex& b, const Vertex& c) {
    return element_moments(f, a, b, c, rule).mu2;
  };
}

// ---------------------------------------------------------------------------

ApproxState::ApproxState(Triangulation T0, ElementFunctional mu2, std::size_t max_partition)
    : T0_(std::move(T0)), functional_(std::move(mu2)), max_partition_(max_partition) {
  for (NodeId id : T0_.leaves()) {
    if (T0_.forest().node(id).parent != kNoNode) {
      throw std::invalid_argument("ApproxState: expects the root mesh T0");
    }
    ensure(id);
    tmu_[static_cast<std::size_t>(id)] = mu(id);
    in_partition_[static_cast<std::size_t>(id)] = 1;
    order_.push_back(id);
    heap_.emplace_back(tmu_[static_cast<std::size_t>(id)], id);
    partition_mu2_ += mu(id) * mu(id);
  }
  partition_size_ = order_.size();
  std::make_heap(heap_.begin(), heap_.end());
}

void ApproxState::ensure(NodeId id) {
  const auto n = std::max<std::size_t>(T0_.forest().num_nodes(), static_cast<std::size_t>(id) + 1);
  if (mu_.size() < n) {
    mu_.resize(n, std::numeric_limits<double>::quiet_NaN());
    tmu_.resize(n, 0.0);
    in_partition_.resize(n, 0);
  }
}

double ApproxState::mu(NodeId id) {
  ensure(id);
  double& m = mu_[static_cast<std::size_t>(id)];
  if (std::isnan(m)) {
    const BisectionForest& forest = T0_.forest();
    const auto& v = forest.triangle(id).v;
    const double m2 = functional_(forest.vertex(v[0]), forest.vertex(v[1]), forest.vertex(v[2]));
    m = std::sqrt(std::max(m2, 0.0));
  }
  return m;
}

double ApproxState::recompute_partition_mu2() const {
  double s = 0.0;
  for (NodeId id : order_) {
    if (in_partition_[static_cast<std::size_t>(id)]) {
      const double m = mu_[static_cast<std::size_t>(id)];
      s += m * m;
    }
  }
  return s;
}

void ApproxState::run_loop(double tol) {
  BisectionForest& forest = T0_.forest_mut();
  auto by_value = [](const auto& a, const auto& b) {
    // Max-heap on tilde-mu; among equal values the lower node id first.
    return a.first < b.first || (a.first == b.first && a.second > b.second);
  };
  std::make_heap(heap_.begin(), heap_.end(), by_value);
  std::vector<NodeId> maximisers;
  while (partition_mu2_ > tol) {
    if (heap_.empty()) break;
    const double top = heap_.front().first;
    maximisers.clear();
    while (!heap_.empty() && heap_.front().first == top) {
      std::pop_heap(heap_.begin(), heap_.end(), by_value);
      maximisers.push_back(heap_.back().second);
      heap_.pop_back();
    }
    for (NodeId id : maximisers) {
      const auto kids = forest.bisect(id);
      ensure(kids[1]);
      const double m = mu(id), m1 = mu(kids[0]), m2 = mu(kids[1]);
      const auto [t1, t2] = tilde_mu_children(m, tmu_[static_cast<std::size_t>(id)], m1, m2);
      tmu_[static_cast<std::size_t>(kids[0])] = t1;
      tmu_[static_cast<std::size_t>(kids[1])] = t2;
      in_partition_[static_cast<std::size_t>(id)] = 0;
      in_partition_[static_cast<std::size_t>(kids[0])] = 1;
      in_partition_[static_cast<std::size_t>(kids[1])] = 1;
      order_.push_back(kids[0]);
      order_.push_back(kids[1]);
      heap_.emplace_back(t1, kids[0]);
      std::push_heap(heap_.begin(), heap_.end(), by_value);
      heap_.emplace_back(t2, kids[1]);
      std::push_heap(heap_.begin(), heap_.end(), by_value);
      partition_mu2_ += m1 * m1 + m2 * m2 - m * m;
      ++partition_size_;
    }
    if (partition_size_ > max_partition_) {
      throw std::runtime_error("approx: partition exceeded " + std::to_string(max_partition_) +
                               " elements before reaching the tolerance");
    }
    // Re-sum before trusting the running total near the stopping point.
    if (partition_mu2_ <= tol) partition_mu2_ = recompute_partition_mu2();
  }
}

Triangulation ApproxState::run(double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("approx: tolerance must be positive");
  double loop_tol = tol;
  for (int attempt = 0; attempt < 64; ++attempt) {
    run_loop(loop_tol);
    Triangulation T = complete(T0_.forest_ptr(), partition());
    if (mu2_of(T) <= tol) return T;
    // Completion only refines further, so this is reached solely through
    // rounding in the functional; tighten and continue.
    loop_tol *= 0.5;
  }
  throw std::runtime_error("approx: tolerance not reached after completion");
}

std::vector<NodeId> ApproxState::partition() const {
  std::vector<NodeId> out;
  out.reserve(partition_size_);
  for (NodeId id : order_) {
    if (in_partition_[static_cast<std::size_t>(id)]) out.push_back(id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double ApproxState::mu2_of(const Triangulation& T) {
  double s = 0.0;
  for (NodeId id : T.leaves()) {
    const double m = mu(id);
    s += m * m;
  }
  return s;
}

Triangulation approx(double tol, const ScalarField& f, const Triangulation& T0, const QuadratureRule& rule) {
  ApproxState state(T0, oscillation_functional(f, rule));
  return state.run(tol);
}

std::size_t cumulative_marks(const Triangulation& T_from, const Triangulation& T_to) {
  if (!is_refinement_of(T_to, T_from)) {
    throw std::invalid_argument("cumulative_marks: second mesh does not refine the first");
  }
  return T_to.size() - T_from.size();
}

}  // namespace safem

#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "safem/mesh.hpp"

namespace safem {

/// Barycentric points and weights normalised to sum to one; integrals are
/// area * sum(w_i f(p_i)).
struct QuadratureRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;
};

/// Cheapest shipped rule exact for total degree `degree`: centroid (1),
/// 3-point (2), 7-point symmetric (3..5), collapsed Gauss-Legendre product
/// rules above that.
const QuadratureRule& rule_for_degree(int degree);

/// The degree-5 seven-point rule used for all data integrals by default.
const QuadratureRule& default_rule();

/// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

struct ScalarField {
  std::string name;
  std::function<double(double, double)> value;
  /// Constant fields have zero oscillation by definition.
  bool constant = false;

  double operator()(double x, double y) const { return value(x, y); }
};

/// Built-in fields: "zero", "one", "linear-x", "radial-alpha:<a>" (r^-a
/// about the origin, or "radial-alpha:<a>@<x>,<y>" about another point) and
/// "checkerboard:<k>" (+1/-1 on a k-by-k grid of unit-length 1/k squares).
/// Throws std::invalid_argument on unknown names.
ScalarField parse_field(const std::string& spec);

double integrate(const ScalarField& f, const Vertex& a, const Vertex& b, const Vertex& c,
                 const QuadratureRule& rule = default_rule());

/// Mean, squared oscillation and squared L2 norm of f on one triangle, all
/// from a single pass of the rule. norm2 == mu2 + area * mean^2.
struct ElementMoments {
  double area = 0.0;
  double mean = 0.0;
  double mu2 = 0.0;
  double norm2 = 0.0;
};

ElementMoments element_moments(const ScalarField& f, const Vertex& a, const Vertex& b,
                               const Vertex& c, const QuadratureRule& rule = default_rule());

/// mu(K) = || f - f_K ||_{L2(K)} with f_K the rule's element mean.
double mu_element(const ScalarField& f, const Vertex& a, const Vertex& b, const Vertex& c,
                  const QuadratureRule& rule = default_rule());

}  // namespace safem

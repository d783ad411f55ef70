#include "safem/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace safem {

namespace {

QuadratureRule centroid_rule() { return {{{1.0 / 3, 1.0 / 3, 1.0 / 3}}, {1.0}, 1}; }

QuadratureRule three_point_rule() {
  const double a = 1.0 / 6, b = 2.0 / 3;
  return {{{a, a, b}, {a, b, a}, {b, a, a}}, {1.0 / 3, 1.0 / 3, 1.0 / 3}, 2};
}

QuadratureRule seven_point_rule() {
  const double s = std::sqrt(15.0);
  const double a1 = (6.0 - s) / 21.0, b1 = (9.0 + 2.0 * s) / 21.0, w1 = (155.0 - s) / 1200.0;
  const double a2 = (6.0 + s) / 21.0, b2 = (9.0 - 2.0 * s) / 21.0, w2 = (155.0 + s) / 1200.0;
  QuadratureRule r;
  r.degree = 5;
  r.points = {{1.0 / 3, 1.0 / 3, 1.0 / 3}, {a1, a1, b1}, {a1, b1, a1}, {b1, a1, a1},
              {a2, a2, b2}, {a2, b2, a2}, {b2, a2, a2}};
  r.weights = {9.0 / 40.0, w1, w1, w1, w2, w2, w2};
  return r;
}

// Collapsed (Duffy) product of Gauss-Legendre rules on the reference
// triangle, exact for total degree 2n - 2.
QuadratureRule collapsed_rule(int degree) {
  const int n = (degree + 3) / 2;
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  QuadratureRule r;
  r.degree = degree;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double u = x[static_cast<std::size_t>(i)], v = x[static_cast<std::size_t>(j)];
      const double xi = u, eta = v * (1.0 - u);
      r.points.push_back({1.0 - xi - eta, xi, eta});
      // Reference area is 1/2; normalise so the weights sum to one.
      r.weights.push_back(2.0 * w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j)] * (1.0 - u));
    }
  }
  return r;
}

}  // namespace

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    nodes[static_cast<std::size_t>(i)] = 0.5 * (1.0 - z);
    weights[static_cast<std::size_t>(i)] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
}

const QuadratureRule& default_rule() {
  static const QuadratureRule rule = seven_point_rule();
  return rule;
}

const QuadratureRule& rule_for_degree(int degree) {
  static const QuadratureRule r1 = centroid_rule();
  static const QuadratureRule r2 = three_point_rule();
  if (degree <= 1) return r1;
  if (degree == 2) return r2;
  if (degree <= 5) return default_rule();
  static std::mutex mutex;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(degree);
  if (it == cache.end()) it = cache.emplace(degree, collapsed_rule(degree)).first;
  return it->second;
}

ScalarField parse_field(const std::string& spec) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || !std::isfinite(v)) {
      throw std::invalid_argument("field '" + spec + "': bad number '" + s + "'");
    }
    return v;
  };
  if (spec == "zero") return {spec, [](double, double) { return 0.0; }, true};
  if (spec == "one") return {spec, [](double, double) { return 1.0; }, true};
  if (spec == "linear-x") return {spec, [](double x, double) { return x; }, false};
  if (spec.starts_with("radial-alpha:")) {
    std::string rest = spec.substr(13);
    double cx = 0.0, cy = 0.0;
    if (const auto at = rest.find('@'); at != std::string::npos) {
      const std::string centre = rest.substr(at + 1);
      const auto comma = centre.find(',');
      if (comma == std::string::npos) throw std::invalid_argument("field '" + spec + "': expected @x,y");
      cx = number(centre.substr(0, comma));
      cy = number(centre.substr(comma + 1));
      rest = rest.substr(0, at);
    }
    const double alpha = number(rest);
    if (alpha < 0.0 || alpha >= 1.0) {
      throw std::invalid_argument("field '" + spec + "': alpha must lie in [0, 1) for f in L2");
    }
    return {spec,
            [=](double x, double y) { return std::pow(std::hypot(x - cx, y - cy), -alpha); },
            alpha == 0.0};
  }
  if (spec.starts_with("checkerboard:")) {
    const double k = number(spec.substr(13));
    if (k < 1.0 || k != std::floor(k)) throw std::invalid_argument("field '" + spec + "': k must be a positive integer");
    return {spec,
            [=](double x, double y) {
              const auto s = static_cast<long long>(std::floor(k * x) + std::floor(k * y));
              return (s % 2 == 0) ? 1.0 : -1.0;
            },
            false};
  }
  throw std::invalid_argument("unknown field '" + spec + "'");
}

double integrate(const ScalarField& f, const Vertex& a, const Vertex& b, const Vertex& c,
                 const QuadratureRule& rule) {
  const double area = std::abs(signed_area(a, b, c));
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.points.size(); ++i) {
    const auto& l = rule.points[i];
    sum += rule.weights[i] * f(l[0] * a.x + l[1] * b.x + l[2] * c.x, l[0] * a.y + l[1] * b.y + l[2] * c.y);
  }
  return area * sum;
}

ElementMoments element_moments(const ScalarField& f, const Vertex& a, const Vertex& b,
                               const Vertex& c, const QuadratureRule& rule) {
  ElementMoments m;
  m.area = std::abs(signed_area(a, b, c));
  thread_local std::vector<double> values;
  values.resize(rule.points.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < rule.points.size(); ++i) {
    const auto& l = rule.points[i];
    values[i] = f(l[0] * a.x + l[1] * b.x + l[2] * c.x, l[0] * a.y + l[1] * b.y + l[2] * c.y);
    mean += rule.weights[i] * values[i];
  }
  m.mean = mean;
  if (!f.constant) {
    double var = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double d = values[i] - mean;
      var += rule.weights[i] * d * d;
    }
    m.mu2 = m.area * var;
  }
  m.norm2 = m.mu2 + m.area * mean * mean;
  return m;
}

double mu_element(const ScalarField& f, const Vertex& a, const Vertex& b, const Vertex& c,
                  const QuadratureRule& rule) {
  return std::sqrt(element_moments(f, a, b, c, rule).mu2);
}

}  // namespace safem

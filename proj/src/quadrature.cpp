#include "freqlab/quadrature.hpp"

#include <cmath>

namespace freqlab {

void gauss_legendre(int count, std::vector<double>& nodes, std::vector<double>& weights) {
  if (count < 1) throw ParameterError("gauss_legendre: count must be >= 1");
  nodes.assign(count, 0.0);
  weights.assign(count, 0.0);
  const int m = (count + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev initial guess, then Newton on P_count.
    double x = std::cos(kPi * (i + 0.75) / (count + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 0; k < count; ++k) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * x * p1 - k * p2) / (k + 1.0);
      }
      pp = count * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[count - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[i] = w;
    weights[count - 1 - i] = w;
  }
}

SphereRule build_rule(int n, int order) {
  require_dim(n, "build_rule");
  if (order < 4) throw ParameterError("build_rule: order must be >= 4");
  SphereRule rule;
  rule.n = n;
  rule.order = order;
  if (n == 2) {
    rule.nodes.reserve(order);
    rule.weights.assign(order, 2.0 * kPi / order);
    for (int j = 0; j < order; ++j) {
      double t = 2.0 * kPi * j / order;
      rule.nodes.push_back(Point(std::cos(t), std::sin(t)));
    }
  } else {
    // Gauss-Legendre in mu = cos(polar) x trapezoid in azimuth.
    std::vector<double> mu, wmu;
    gauss_legendre(order, mu, wmu);
    const int naz = 2 * order;
    const double waz = 2.0 * kPi / naz;
    rule.nodes.reserve(static_cast<size_t>(order) * naz);
    rule.weights.reserve(static_cast<size_t>(order) * naz);
    for (int i = 0; i < order; ++i) {
      double s = std::sqrt(std::max(0.0, 1.0 - mu[i] * mu[i]));
      for (int j = 0; j < naz; ++j) {
        double t = 2.0 * kPi * j / naz;
        rule.nodes.push_back(Point(s * std::cos(t), s * std::sin(t), mu[i]));
        rule.weights.push_back(wmu[i] * waz);
      }
    }
  }
  return rule;
}

BallRule build_ball_rule(int n, int order, int radial_nodes) {
  if (radial_nodes < 4) throw ParameterError("build_ball_rule: radial_nodes must be >= 4");
  BallRule rule;
  rule.sphere = build_rule(n, order);
  std::vector<double> x, w;
  gauss_legendre(radial_nodes, x, w);
  rule.radial_nodes.resize(radial_nodes);
  rule.radial_weights.resize(radial_nodes);
  for (int i = 0; i < radial_nodes; ++i) {
    rule.radial_nodes[i] = 0.5 * (x[i] + 1.0);  // map [-1,1] -> [0,1]
    rule.radial_weights[i] = 0.5 * w[i];
  }
  return rule;
}

double boundary_integral(const PointFn& f, const Point& center, double r,
                         const SphereRule& rule) {
  if (r <= 0.0) throw ParameterError("boundary_integral: radius must be > 0");
  const double rpow = std::pow(r, rule.n - 1);
  double sum = 0.0;
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    Point x = center + r * rule.nodes[i];
    sum += rule.weights[i] * f(x);
  }
  return rpow * sum;
}

double volume_integral(const PointFn& f, const Point& center, double r, const BallRule& rule,
                       double inner) {
  if (r <= 0.0) throw ParameterError("volume_integral: radius must be > 0");
  if (inner < 0.0 || inner >= r) {
    if (inner != 0.0) throw ParameterError("volume_integral: inner cutoff must be in [0, r)");
  }
  const double len = r - inner;
  double sum = 0.0;
  for (size_t k = 0; k < rule.radial_nodes.size(); ++k) {
    const double s = inner + len * rule.radial_nodes[k];
    const double ws = len * rule.radial_weights[k] * std::pow(s, rule.sphere.n - 1);
    double shell = 0.0;
    for (size_t i = 0; i < rule.sphere.nodes.size(); ++i) {
      Point x = center + s * rule.sphere.nodes[i];
      shell += rule.sphere.weights[i] * f(x);
    }
    sum += ws * shell;
  }
  return sum;
}

}  // namespace freqlab

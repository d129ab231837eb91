#pragma once

#include <functional>
#include <vector>

#include "freqlab/geometry.hpp"

namespace freqlab {

/// Quadrature rule on the unit sphere in R^n. Weights sum to |∂B_1|
/// (2*pi for n=2, 4*pi for n=3) and are strictly positive.
///
/// n=2: uniform trapezoid rule with `order` angular nodes (spectrally
/// accurate for smooth periodic integrands). n=3: product of
/// Gauss-Legendre in the polar cosine (`order` nodes) and trapezoid in
/// azimuth (2*order nodes).
struct SphereRule {
  int n = 2;
  int order = 0;
  std::vector<Point> nodes;     // on the unit sphere
  std::vector<double> weights;  // sum to unit_sphere_area(n)
};

/// Product rule for balls: Gauss-Legendre in radius over a sphere rule
/// per shell. The radial nodes/weights are stored on [0, 1] and mapped
/// to the requested interval at integration time.
struct BallRule {
  SphereRule sphere;
  std::vector<double> radial_nodes;    // on (0, 1)
  std::vector<double> radial_weights;  // sum to 1
};

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int count, std::vector<double>& nodes, std::vector<double>& weights);

/// Builds a sphere rule; `order` must be >= 4.
SphereRule build_rule(int n, int order);

/// Builds a ball rule from a sphere rule and a radial node count (>= 4).
BallRule build_ball_rule(int n, int order, int radial_nodes);

using PointFn = std::function<double(const Point&)>;

/// ∫_{∂B_r(center)} f dS  =  Σ_i w_i r^{n-1} f(center + r node_i).
double boundary_integral(const PointFn& f, const Point& center, double r, const SphereRule& rule);

/// ∫_{B_r(center)} f dx via radial Gauss-Legendre over shells of
/// boundary integrals. `inner` > 0 restricts to the annulus
/// inner <= |x - center| <= r (used for fields singular at the center).
double volume_integral(const PointFn& f, const Point& center, double r, const BallRule& rule,
                       double inner = 0.0);

/// Default rule orders; overridable via CLI config keys quad.order2d,
/// quad.order3d, quad.radial_nodes.
struct QuadOptions {
  int order2d = 128;
  int order3d = 32;
  int radial_nodes = 64;

  int order_for(int n) const { return n == 2 ? order2d : order3d; }
};

}  // namespace freqlab

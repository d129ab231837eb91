#include "freqlab/quadrature.hpp"

#include <cmath>
#include <random>

#include "doctest.h"

using namespace freqlab;

namespace {

// Series oracle for the modified Bessel function I0, used as the exact
// value of (2 pi)^-1 \int_{S^1} e^{r cos t} dt.
double bessel_i0(double x) {
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    term *= (x * x) / (4.0 * k * k);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

}  // namespace

TEST_CASE("sphere rules satisfy the partition-of-unity invariant") {
  for (int order : {4, 16, 64, 128}) {
    auto r2 = build_rule(2, order);
    double sum2 = 0;
    for (double w : r2.weights) {
      CHECK(w > 0.0);
      sum2 += w;
    }
    CHECK(sum2 == doctest::Approx(2 * kPi).epsilon(1e-13));

    auto r3 = build_rule(3, order);
    double sum3 = 0;
    for (double w : r3.weights) {
      CHECK(w > 0.0);
      sum3 += w;
    }
    CHECK(sum3 == doctest::Approx(4 * kPi).epsilon(1e-13));
    for (const auto& nd : r3.nodes) CHECK(norm(nd) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("circle rule is uniform") {
  auto rule = build_rule(2, 64);
  CHECK(rule.nodes.size() == 64);
  for (double w : rule.weights) CHECK(w == doctest::Approx(2 * kPi / 64).epsilon(1e-15));
}

TEST_CASE("order below the minimum is rejected") {
  CHECK_THROWS_AS(build_rule(2, 3), ParameterError);
  CHECK_THROWS_AS(build_rule(3, 0), ParameterError);
  CHECK_THROWS_AS(build_ball_rule(2, 16, 2), ParameterError);
  CHECK_THROWS_AS(build_rule(4, 16), ParameterError);
}

TEST_CASE("boundary integrals match closed forms") {
  auto rule2 = build_rule(2, 128);
  auto rule3 = build_rule(3, 32);
  auto one = [](const Point&) { return 1.0; };
  auto x1sq = [](const Point& x) { return x[0] * x[0]; };

  CHECK(boundary_integral(one, Point(0, 0), 1.0, rule2) ==
        doctest::Approx(2 * kPi).epsilon(1e-14));
  // \int_{dB_r} x1^2 dS = pi r^3 in 2D
  CHECK(boundary_integral(x1sq, Point(0, 0), 0.5, rule2) ==
        doctest::Approx(kPi * 0.125).epsilon(1e-13));
  // each coordinate carries a third of \int |x|^2 dS = 4 pi on S^2
  CHECK(boundary_integral(x1sq, Point(0, 0, 0), 1.0, rule3) ==
        doctest::Approx(4 * kPi / 3).epsilon(1e-13));
}

TEST_CASE("volume integrals match closed forms") {
  auto ball2 = build_ball_rule(2, 128, 64);
  auto ball3 = build_ball_rule(3, 32, 64);
  auto one = [](const Point&) { return 1.0; };

  CHECK(volume_integral(one, Point(0, 0), 1.0, ball2) == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(volume_integral(one, Point(0, 0, 0), 1.0, ball3) ==
        doctest::Approx(4 * kPi / 3).epsilon(1e-12));
  // |grad (r^2 cos 2t)|^2 = 4 s^2 integrates to 2 pi over the unit disk
  auto grad_sq = [](const Point& x) { return 4.0 * (x[0] * x[0] + x[1] * x[1]); };
  CHECK(volume_integral(grad_sq, Point(0, 0), 1.0, ball2) ==
        doctest::Approx(2 * kPi).epsilon(1e-12));
}

TEST_CASE("doubling the order drives smooth integrands to the floor") {
  auto f = [](const Point& x) { return std::exp(x[0]); };
  const double exact2 = 2 * kPi * bessel_i0(1.0);
  double prev = 1e300;
  bool hit_floor = false;
  for (int order = 4; order <= 128; order *= 2) {
    auto rule = build_rule(2, order);
    double err = std::abs(boundary_integral(f, Point(0, 0), 1.0, rule) - exact2);
    if (hit_floor) continue;
    if (err <= 1e-12 * exact2) {
      hit_floor = true;
      continue;
    }
    CHECK(err < prev);
    prev = err;
  }
  CHECK(hit_floor);

  // n = 3: exact value 2 pi (e - 1/e) by reduction to the polar integral
  const double exact3 = 2 * kPi * (std::exp(1.0) - std::exp(-1.0));
  auto rule3 = build_rule(3, 32);
  CHECK(boundary_integral(f, Point(0, 0, 0), 1.0, rule3) ==
        doctest::Approx(exact3).epsilon(1e-13));
}

TEST_CASE("homogeneous integrands scale as r^{n-1+m}") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> radius(0.2, 2.0);
  auto rule2 = build_rule(2, 128);
  auto rule3 = build_rule(3, 32);

  for (int trial = 0; trial < 20; ++trial) {
    int m = trial % 5;
    auto f2 = [m](const Point& x) { return std::pow(x[0] + 0.5 * x[1], m); };
    double base = boundary_integral(f2, Point(0, 0), 1.0, rule2);
    double r = radius(rng);
    double scaled = boundary_integral(f2, Point(0, 0), r, rule2);
    CHECK(scaled == doctest::Approx(std::pow(r, 1 + m) * base).epsilon(1e-12));

    auto f3 = [m](const Point& x) { return std::pow(x[0] + 0.3 * x[2], m); };
    double base3 = boundary_integral(f3, Point(0, 0, 0), 1.0, rule3);
    double scaled3 = boundary_integral(f3, Point(0, 0, 0), r, rule3);
    CHECK(scaled3 == doctest::Approx(std::pow(r, 2 + m) * base3).epsilon(1e-12));
  }
}

TEST_CASE("shells compose: ball minus ball equals annulus") {
  auto ball = build_ball_rule(2, 128, 64);
  auto f = [](const Point& x) { return std::exp(x[0] - 0.3 * x[1]); };
  double big = volume_integral(f, Point(0.1, 0.2), 0.9, ball);
  double small = volume_integral(f, Point(0.1, 0.2), 0.4, ball);
  double annulus = volume_integral(f, Point(0.1, 0.2), 0.9, ball, 0.4);
  CHECK(big - small == doctest::Approx(annulus).epsilon(1e-10));
}

TEST_CASE("gauss-legendre nodes integrate polynomials exactly") {
  std::vector<double> x, w;
  gauss_legendre(8, x, w);
  // exact for degree <= 15: check x^14 over [-1, 1]
  double s = 0;
  for (size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], 14);
  CHECK(s == doctest::Approx(2.0 / 15.0).epsilon(1e-13));
}

TEST_CASE("invalid radii are rejected") {
  auto rule = build_rule(2, 16);
  auto ball = build_ball_rule(2, 16, 8);
  auto one = [](const Point&) { return 1.0; };
  CHECK_THROWS_AS(boundary_integral(one, Point(0, 0), 0.0, rule), ParameterError);
  CHECK_THROWS_AS(volume_integral(one, Point(0, 0), 1.0, ball, 1.5), ParameterError);
}

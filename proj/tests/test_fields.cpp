#include "freqlab/fields.hpp"

#include <cmath>
#include <random>

#include "doctest.h"

using namespace freqlab;

namespace {

Point random_point2(std::mt19937& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  return Point(d(rng), d(rng));
}

Point random_point3(std::mt19937& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  return Point(d(rng), d(rng), d(rng));
}

// central-difference gradient of the field's value, the independent check
// for analytic gradients
Point fd_gradient(const ScalarField& f, const Point& x, double h) {
  Point g;
  g.n = x.n;
  for (int a = 0; a < x.n; ++a) {
    Point xp = x, xm = x;
    xp[a] += h;
    xm[a] -= h;
    g[a] = (f.value(xp) - f.value(xm)) / (2 * h);
  }
  return g;
}

}  // namespace

TEST_CASE("harmonic 2d catalog: u = x^2 - y^2 and friends") {
  auto f = make_field(HarmonicPolynomialSpec{2, 0}, 2);
  CHECK(f.value(Point(1, 1)) == doctest::Approx(0.0));
  auto g = f.gradient(Point(1, 1));
  CHECK(g[0] == doctest::Approx(2.0));
  CHECK(g[1] == doctest::Approx(-2.0));
  CHECK(f.laplacian(Point(1, 1)) == doctest::Approx(0.0));

  auto s = make_field(HarmonicPolynomialSpec{2, 1}, 2);
  CHECK(s.value(Point(0.5, 0.25)) == doctest::Approx(2 * 0.5 * 0.25));
}

TEST_CASE("harmonic fields are harmonic at random points") {
  std::mt19937 rng(7);
  for (int k = 0; k <= 5; ++k) {
    for (int idx : {0, 1}) {
      if (k == 0 && idx == 1) continue;
      auto f = make_field(HarmonicPolynomialSpec{k, idx}, 2);
      for (int t = 0; t < 1000; ++t) CHECK(std::abs(f.laplacian(random_point2(rng))) <= 1e-12);
    }
  }
  const auto degree_sizes = std::vector<int>{1, 3, 5, 7, 9};
  for (int deg = 0; deg <= 4; ++deg) {
    for (int m = 0; m < degree_sizes[deg]; ++m) {
      auto f = make_field(HarmonicPolynomialSpec{deg, m}, 3);
      for (int t = 0; t < 200; ++t) CHECK(std::abs(f.laplacian(random_point3(rng))) <= 1e-12);
    }
  }
}

TEST_CASE("3d solid harmonics are homogeneous of their degree") {
  std::mt19937 rng(11);
  for (int deg = 1; deg <= 4; ++deg) {
    auto f = make_field(HarmonicPolynomialSpec{deg, std::min(deg, 2)}, 3);
    for (int t = 0; t < 50; ++t) {
      Point x = random_point3(rng, 0.2, 1.0);
      double lam = 1.7;
      CHECK(f.value(lam * x) ==
            doctest::Approx(std::pow(lam, deg) * f.value(x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("drift exponential: exact bundle and residual") {
  auto f = make_field(DriftExponentialSpec{Point(1.0, 0.0)}, 2);
  auto e = f.eval(Point(0.3, 0.0));
  // high-precision oracle for exp(0.3)
  const double e03 = 1.3498588075760032;
  CHECK(e.u == doctest::Approx(e03).epsilon(1e-15));
  CHECK(e.grad[0] == doctest::Approx(e03).epsilon(1e-15));
  CHECK(e.grad[1] == doctest::Approx(0.0));
  CHECK(e.lap == doctest::Approx(e03).epsilon(1e-15));

  std::mt19937 rng(3);
  for (int t = 0; t < 1000; ++t) {
    Point b = random_point2(rng, -2, 2);
    auto fb = make_field(DriftExponentialSpec{b}, 2);
    Point x = random_point2(rng);
    CHECK(pde_residual(fb, x, EquationDrift{b}) <= 1e-12 * std::max(1.0, fb.value(x)));
  }
  CHECK(pde_residual(f, Point(0.5, 0.2), EquationDrift{Point(1.0, 0.0)}) <= 1e-14);
}

TEST_CASE("affine fields are p-harmonic for every p") {
  auto f = make_field(AffineSpec{Point(2.0, -1.0), 0.25}, 2);
  CHECK(f.laplacian(Point(0.4, 0.1)) == 0.0);
  for (double p : {1.5, 3.0, 7.0}) {
    CHECK(pde_residual(f, Point(0.4, 0.1), EquationPLaplace{p, 0.0}) <= 1e-14);
  }
  CHECK(pde_residual(f, Point(0.4, 0.1), EquationLaplace{}) == 0.0);
}

TEST_CASE("p-radial: construction guards and p-harmonicity") {
  CHECK_THROWS_AS(make_field(PRadialSpec{2.0, 0.1}, 2), ParameterError);
  CHECK_THROWS_AS(make_field(PRadialSpec{3.0, 0.1}, 3), ParameterError);
  CHECK_THROWS_AS(make_field(PRadialSpec{0.5, 0.1}, 2), ParameterError);

  auto f = make_field(PRadialSpec{3.0, 0.1}, 2);
  // u = |x|^{1/2} solves the 3-laplacian away from the origin
  CHECK(f.value(Point(1.0, 0.0)) == doctest::Approx(1.0));
  CHECK(pde_residual(f, Point(1.0, 0.0), EquationPLaplace{3.0, 0.0}) <= 1e-10);
  std::mt19937 rng(5);
  for (int t = 0; t < 300; ++t) {
    Point x = random_point2(rng, 0.3, 1.5);
    CHECK(pde_residual(f, x, EquationPLaplace{3.0, 0.0}) <= 1e-10);
  }
  CHECK_THROWS_AS(f.value(Point(0.05, 0.0)), DomainError);
  CHECK(!f.ball_admissible(Point(0.3, 0.0), 0.25));
  CHECK(f.ball_admissible(Point(0, 0), 0.5));  // annulus about the origin
}

TEST_CASE("p-laplace residual needs regularization at critical points") {
  auto f = make_field(HarmonicPolynomialSpec{2, 0}, 2);  // grad vanishes at 0
  CHECK_THROWS_AS(pde_residual(f, Point(0, 0), EquationPLaplace{3.0, 0.0}), DegenerateError);
  // with regularization the value is finite
  CHECK(pde_residual(f, Point(0, 0), EquationPLaplace{3.0, 1e-6}) <= 1e-3);
}

TEST_CASE("analytic gradients agree with central differences at order 2") {
  std::mt19937 rng(17);
  std::vector<ScalarField> fields = {
      make_field(HarmonicPolynomialSpec{3, 0}, 2),
      make_field(DriftExponentialSpec{Point(0.7, -0.4)}, 2),
      make_field(PRadialSpec{1.5, 0.1}, 2),
      make_field(HarmonicExpSpec{1.0}, 2),
  };
  for (const auto& f : fields) {
    double err_coarse = 0, err_fine = 0;
    for (int t = 0; t < 50; ++t) {
      Point x = random_point2(rng, 0.4, 1.2);
      Point g = f.gradient(x);
      Point gc = fd_gradient(f, x, 1e-2);
      Point gf = fd_gradient(f, x, 1e-3);
      err_coarse = std::max(err_coarse, norm(g - gc));
      err_fine = std::max(err_fine, norm(g - gf));
    }
    double order = std::log10(err_coarse / err_fine);
    CHECK(order >= 1.9);
  }
}

TEST_CASE("ramp field: half-space support") {
  auto f = make_field(RampSpec{Point(2.0, 0.0)}, 2);  // direction normalizes
  CHECK(f.value(Point(0.5, 0.3)) == doctest::Approx(0.5));
  CHECK(f.value(Point(-0.5, 0.3)) == 0.0);
  CHECK(f.gradient(Point(0.5, 0.3))[0] == doctest::Approx(1.0));
  CHECK(f.gradient(Point(-0.5, 0.3))[0] == 0.0);
  CHECK_THROWS_AS(make_field(RampSpec{Point(0.0, 0.0)}, 2), ParameterError);
}

TEST_CASE("scaled wrapper: v(x) = u(tau x)") {
  auto u = make_field(HarmonicPolynomialSpec{3, 0}, 2);
  auto v = make_scaled(u, 2.0);
  Point x(0.2, 0.1);
  CHECK(v.value(x) == doctest::Approx(u.value(2.0 * x)).epsilon(1e-15));
  CHECK(v.gradient(x)[0] == doctest::Approx(2.0 * u.gradient(2.0 * x)[0]).epsilon(1e-15));
  CHECK(v.laplacian(x) == doctest::Approx(4.0 * u.laplacian(2.0 * x)));
  auto drift = make_field(DriftExponentialSpec{Point(1.0, 0.0)}, 2);
  auto vd = make_scaled(drift, 3.0);
  auto eq = vd.natural_equation();
  REQUIRE(std::holds_alternative<EquationDrift>(eq));
  CHECK(std::get<EquationDrift>(eq).b[0] == doctest::Approx(3.0));
}

TEST_CASE("linear combinations differentiate exactly") {
  auto u = make_field(HarmonicPolynomialSpec{1, 0}, 2);
  auto v = make_field(HarmonicPolynomialSpec{2, 0}, 2);
  auto w = make_linear_combination(u, 1.0, v, 0.1);
  Point x(0.3, -0.2);
  CHECK(w.value(x) == doctest::Approx(u.value(x) + 0.1 * v.value(x)).epsilon(1e-15));
  CHECK(w.laplacian(x) == doctest::Approx(0.0));
  CHECK(std::holds_alternative<EquationLaplace>(w.natural_equation()));
}

TEST_CASE("catalog names parse and validate") {
  CHECK(parse_field("harmonic:2d:k=3:cos").name() == "harmonic:2d:k=3:cos");
  CHECK(parse_field("harmonic:3d:deg=2:m=4").dim() == 3);
  CHECK(parse_field("drift-exp:b=2,0").dim() == 2);
  CHECK(parse_field("p-radial:p=3:rmin=0.2").inner_cutoff() == doctest::Approx(0.2));
  CHECK(parse_field("const:5").value(Point(0.4, 0.9)) == 5.0);
  CHECK(parse_field("ramp:e=1,0").value(Point(0.25, 1.0)) == doctest::Approx(0.25));
  CHECK(parse_field("affine:a=1,0:c=0.5").value(Point(0.25, 1.0)) == doctest::Approx(0.75));
  CHECK(parse_field("harmonic-exp:kappa=1").laplacian(Point(0.3, 0.4)) == 0.0);

  CHECK_THROWS_AS(parse_field("harmonic:2d:k=-1:cos"), ParameterError);
  CHECK_THROWS_AS(parse_field("harmonic:2d:k=0:sin"), ParameterError);
  CHECK_THROWS_AS(parse_field("harmonic:3d:deg=5:m=0"), ParameterError);
  CHECK_THROWS_AS(parse_field("p-radial:p=2"), ParameterError);
  CHECK_THROWS_AS(parse_field("no-such-field"), ParameterError);
  CHECK_THROWS_AS(parse_field("drift-exp:b=1"), ParameterError);
}

TEST_CASE("dimension mismatches are rejected") {
  auto f = make_field(HarmonicPolynomialSpec{2, 0}, 2);
  CHECK_THROWS_AS(f.value(Point(0.1, 0.2, 0.3)), ParameterError);
}

TEST_CASE("harmonic-exp is an entire harmonic function") {
  auto f = make_field(HarmonicExpSpec{1.5}, 2);
  std::mt19937 rng(23);
  for (int t = 0; t < 200; ++t) {
    Point x = random_point2(rng);
    CHECK(f.laplacian(x) == 0.0);
    // hessian trace matches the laplacian
    Mat3 h = f.hessian(x);
    CHECK(std::abs(h(0, 0) + h(1, 1)) <= 1e-12 * std::abs(h(0, 0)) + 1e-300);
  }
  CHECK_THROWS_AS(make_field(HarmonicExpSpec{1.0}, 3), ParameterError);
}

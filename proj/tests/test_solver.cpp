#include "freqlab/solver.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "freqlab/frequency.hpp"

using namespace freqlab;

namespace {

BVP unit_square(int nodes, Equation eq, const ScalarField& g) {
  BVP bvp;
  bvp.a = 0.0;
  bvp.b = 1.0;
  bvp.nodes = nodes;
  bvp.equation = eq;
  bvp.boundary = [g](double x, double y) { return g.value(Point(x, y)); };
  return bvp;
}

double max_interior_error(const GridSolution& sol, const ScalarField& exact) {
  double err = 0.0;
  for (int j = 1; j < sol.nodes - 1; ++j)
    for (int i = 1; i < sol.nodes - 1; ++i) {
      Point x(sol.a + i * sol.h, sol.a + j * sol.h);
      err = std::max(err, std::abs(sol.at(i, j) - exact.value(x)));
    }
  return err;
}

}  // namespace

TEST_CASE("laplace solver reproduces affine data exactly") {
  auto g = parse_field("affine:a=1,0:c=0");
  auto sol = solve(unit_square(33, EquationLaplace{}, g));
  CHECK(max_interior_error(sol, g) <= 1e-9);
  CHECK(sol.residual <= 1e-10);
}

TEST_CASE("cubic harmonics lie in the 5-point stencil kernel") {
  // all fourth derivatives of Re(x+iy)^3 vanish, so the discrete solution
  // matches the exact one to solver tolerance at every h
  auto g = parse_field("harmonic:2d:k=3:cos");
  SolveOptions opts;
  opts.tol = 1e-12;
  for (int nodes : {17, 33}) {
    auto sol = solve(unit_square(nodes, EquationLaplace{}, g), opts);
    CHECK(max_interior_error(sol, g) <= 1e-8);
  }
}

TEST_CASE("laplace and drift solvers converge at second order") {
  SolveOptions opts;
  opts.tol = 1e-12;

  auto harm = parse_field("harmonic-exp:kappa=1");
  auto orders = convergence_study(unit_square(17, EquationLaplace{}, harm), harm, opts);
  for (double o : orders) CHECK(o == doctest::Approx(2.0).epsilon(0.1));

  auto drift = parse_field("drift-exp:b=1,0");
  auto dorders = convergence_study(
      unit_square(17, EquationDrift{Point(1.0, 0.0)}, drift), drift, opts);
  for (double o : dorders) CHECK(o == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("discrete maximum principle on the laplace solution") {
  auto g = parse_field("harmonic:2d:k=4:cos");
  auto sol = solve(unit_square(49, EquationLaplace{}, g));
  double gmin = 1e300, gmax = -1e300;
  for (int i = 0; i < sol.nodes; ++i) {
    for (double v : {sol.at(i, 0), sol.at(i, sol.nodes - 1), sol.at(0, i),
                     sol.at(sol.nodes - 1, i)}) {
      gmin = std::min(gmin, v);
      gmax = std::max(gmax, v);
    }
  }
  for (int j = 1; j < sol.nodes - 1; ++j)
    for (int i = 1; i < sol.nodes - 1; ++i) {
      CHECK(sol.at(i, j) >= gmin - 1e-9);
      CHECK(sol.at(i, j) <= gmax + 1e-9);
    }
}

TEST_CASE("drift with b = 0 is bitwise the laplace solution") {
  auto g = parse_field("harmonic:2d:k=3:cos");
  auto lap = solve(unit_square(25, EquationLaplace{}, g));
  auto drf = solve(unit_square(25, EquationDrift{Point(0.0, 0.0)}, g));
  REQUIRE(lap.values.size() == drf.values.size());
  for (size_t i = 0; i < lap.values.size(); ++i) CHECK(lap.values[i] == drf.values[i]);
}

TEST_CASE("mesh peclet violations are parameter errors") {
  auto g = parse_field("drift-exp:b=1,0");
  CHECK_THROWS_AS(solve(unit_square(65, EquationDrift{Point(300.0, 0.0)}, g)), ParameterError);
}

TEST_CASE("grid invariants: boundary rows equal the data") {
  auto g = parse_field("harmonic:2d:k=2:sin");
  auto sol = solve(unit_square(21, EquationLaplace{}, g));
  for (int i = 0; i < sol.nodes; ++i) {
    double x = sol.a + i * sol.h;
    CHECK(sol.at(i, 0) == g.value(Point(x, 0.0)));
    CHECK(sol.at(i, sol.nodes - 1) == g.value(Point(x, 1.0)));
  }
}

TEST_CASE("p = 2 newton lands on the laplace solution") {
  auto g = parse_field("harmonic:2d:k=3:cos");
  SolveOptions opts;
  opts.tol = 1e-12;
  auto lap = solve(unit_square(33, EquationLaplace{}, g), opts);
  SolveOptions popts;
  popts.tol = 1e-11;
  auto pl = solve(unit_square(33, EquationPLaplace{2.0, 1e-6}, g), popts);
  double diff = 0.0;
  for (size_t i = 0; i < lap.values.size(); ++i)
    diff = std::max(diff, std::abs(lap.values[i] - pl.values[i]));
  CHECK(diff <= 1e-8);
}

TEST_CASE("affine data is reproduced exactly for p in {1.5, 3}") {
  auto g = parse_field("affine:a=2,-1:c=0.3");
  for (double p : {1.5, 3.0}) {
    for (int nodes : {17, 33}) {
      auto sol = solve(unit_square(nodes, EquationPLaplace{p, 1e-6}, g));
      CHECK(max_interior_error(sol, g) <= 1e-9);
    }
  }
}

TEST_CASE("newton descends the regularized energy") {
  auto g = parse_field("harmonic:2d:k=3:cos");
  const double p = 3.0, eps = 1e-6;
  SolveOptions opts;
  opts.tol = 1e-9;
  auto sol = solve(unit_square(33, EquationPLaplace{p, eps}, g), opts);
  CHECK(sol.residual <= 1e-9);  // first-order optimality
  CHECK(sol.iterations >= 1);

  // energy of the p-solution does not exceed the harmonic warm start
  SolveOptions lopts;
  lopts.tol = 1e-12;
  auto lap = solve(unit_square(33, EquationLaplace{}, g), lopts);
  CHECK(plaplace_energy(sol, p, eps) <= plaplace_energy(lap, p, eps) + 1e-12);
}

TEST_CASE("nonconvergence carries the last residual") {
  auto g = parse_field("harmonic:2d:k=4:cos");
  SolveOptions opts;
  opts.max_iter = 2;
  try {
    solve(unit_square(65, EquationLaplace{}, g), opts);
    FAIL("expected NonconvergenceError");
  } catch (const NonconvergenceError& e) {
    CHECK(e.last_residual > 0.0);
  }

  SolveOptions popts;
  popts.max_iter = 1;
  popts.tol = 1e-13;
  CHECK_THROWS_AS(solve(unit_square(33, EquationPLaplace{3.0, 1e-6}, g), popts),
                  NonconvergenceError);
}

TEST_CASE("bvp guards: grid size and domain orientation") {
  auto g = parse_field("const:1");
  BVP bad = unit_square(4, EquationLaplace{}, g);
  CHECK_THROWS_AS(solve(bad), ParameterError);
  BVP rev = unit_square(17, EquationLaplace{}, g);
  rev.b = -1.0;
  CHECK_THROWS_AS(solve(rev), ParameterError);
}

TEST_CASE("to_field: bilinear values and FD derivatives") {
  auto g = parse_field("affine:a=1,0:c=0");
  auto field = to_field(solve(unit_square(33, EquationLaplace{}, g)));
  // affine data interpolates exactly
  Point x(0.37, 0.52);
  CHECK(field.value(x) == doctest::Approx(0.37).epsilon(1e-9));
  CHECK(field.gradient(x)[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(field.gradient(x)[1] == doctest::Approx(0.0));

  // cubic data: gradient error is O(h^2)
  auto c = parse_field("harmonic:2d:k=3:cos");
  auto cf = to_field(solve(unit_square(65, EquationLaplace{}, c)));
  Point y(0.41, 0.63);
  double h = 1.0 / 64;
  CHECK(norm(cf.gradient(y) - c.gradient(y)) <= 10 * h * h);
  CHECK(std::abs(cf.laplacian(y)) <= 1e-6);

  // the outermost cell ring is out of the admissible domain
  CHECK_THROWS_AS(cf.value(Point(0.5 * h, 0.5)), DomainError);
  CHECK(!cf.ball_admissible(Point(0.5, 0.5), 0.5));
  CHECK(cf.ball_admissible(Point(0.5, 0.5), 0.4));
}

TEST_CASE("grid save/load round-trips exactly") {
  auto g = parse_field("harmonic:2d:k=2:cos");
  auto sol = solve(unit_square(17, EquationLaplace{}, g));
  auto path = std::filesystem::temp_directory_path() / "freqlab_grid_test.txt";
  save_grid(sol, path.string());
  auto loaded = load_grid(path.string());
  CHECK(loaded.nodes == sol.nodes);
  CHECK(loaded.h == doctest::Approx(sol.h).epsilon(1e-16));
  CHECK(loaded.a == sol.a);
  for (size_t i = 0; i < sol.values.size(); ++i) CHECK(loaded.values[i] == sol.values[i]);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_grid("/nonexistent/grid.txt"), ConfigError);
}

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "freqlab/fields.hpp"

namespace freqlab {

/// Dirichlet problem on the axis-aligned square [a, b]^2 (n = 2 only).
/// `nodes` grid points per side, spacing h = (b - a) / (nodes - 1).
struct BVP {
  double a = 0.0;
  double b = 1.0;
  int nodes = 65;
  Equation equation = EquationLaplace{};
  std::function<double(double, double)> boundary;  // g on ∂[a,b]^2

  double spacing() const { return (b - a) / (nodes - 1); }
};

struct SolveOptions {
  double tol = 1e-10;    // linear: relative residual; p-laplace: |grad E|_2
  int max_iter = 20000;  // linear iterations / Newton steps budget
  double damping = 1.0;  // initial Newton step length
};

/// Converged finite-difference solution on the BVP grid (row-major,
/// values[j * nodes + i] at x = a + i h, y = a + j h). `residual` is the
/// relative linear residual, or |grad E|_2 for p-laplace solves.
struct GridSolution {
  double a = 0.0;
  double b = 1.0;
  int nodes = 0;
  double h = 0.0;
  std::vector<double> values;
  double residual = 0.0;
  int iterations = 0;
  Equation equation = EquationNone{};  // provenance; EquationNone for loaded grids

  double at(int i, int j) const { return values[static_cast<size_t>(j) * nodes + i]; }
};

/// Solves the BVP. laplace: 5-point stencil + conjugate gradients.
/// drift: centered first differences + BiCGStab (drift with b = 0 routes
/// through the laplace path, so the two agree bitwise). plaplace: damped
/// Newton on the regularized P1 energy sum |T| (|grad u|^2 + eps^2)^{p/2}
/// with backtracking halving (descent guaranteed per accepted step,
/// minimum step 2^-20). Throws NonconvergenceError (with the last
/// residual) or ParameterError (grid too small, mesh Peclet >= 1).
GridSolution solve(const BVP& bvp, const SolveOptions& options = {});

/// Wraps a grid solution as a field: bilinear u, centered-difference
/// gradient, 5-point Laplacian, all interpolated between grid nodes.
/// Admissible domain is the grid interior inset by one cell.
ScalarField to_field(const GridSolution& sol);

/// Discrete energy of the p-laplace functional on the solution grid;
/// exposed for the descent test.
double plaplace_energy(const GridSolution& sol, double p, double epsilon);

/// Solves the same problem at h0, h0/2, h0/4 and returns
/// log2(e_k / e_{k+1}) of successive max interior errors against the
/// exact field. Expected ~2 for laplace/drift.
std::vector<double> convergence_study(const BVP& base, const ScalarField& exact,
                                      const SolveOptions& options = {});

/// Plain-text grid exchange format: header "n rows cols h x0 y0", then
/// row-major values, one grid row per line, 17 significant digits.
void save_grid(const GridSolution& sol, const std::string& path);
GridSolution load_grid(const std::string& path);

}  // namespace freqlab

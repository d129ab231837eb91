#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "freqlab/geometry.hpp"

namespace freqlab {

// ---------------------------------------------------------------------------
// Field specifications
// ---------------------------------------------------------------------------

/// Homogeneous harmonic polynomial. 2D: degree k with index 0 -> r^k cos(k t),
/// 1 -> r^k sin(k t). 3D: solid harmonics of degree <= 4, index enumerates the
/// tabulated basis of that degree.
struct HarmonicPolynomialSpec {
  int degree = 1;
  int index = 0;
};

/// u(x) = a . x + c. Affine functions are p-harmonic for every p.
struct AffineSpec {
  Point coeffs;
  double constant = 0.0;
};

/// u(x) = exp(b . x); solves the drift equation lap u = b . grad u.
struct DriftExponentialSpec {
  Point b;
};

/// u(x) = |x|^((p-n)/(p-1)), the radial p-harmonic profile; singular at the
/// origin, admissible on |x| >= r_min. Requires p != n.
struct PRadialSpec {
  double p = 3.0;
  double r_min = 0.1;
};

/// u(x) = max(e . x, 0) with |e| = 1. W^{1,2} but not C^1; vanishes on a half
/// space, which makes it the canonical Poincare-ratio witness.
struct RampSpec {
  Point direction;
};

/// u(x) = exp(kappa x1) cos(kappa x2), an entire (non-polynomial) harmonic
/// function; 2D only. Exercises quadrature and solver accuracy beyond the
/// polynomial regime.
struct HarmonicExpSpec {
  double kappa = 1.0;
};

using FieldSpec = std::variant<HarmonicPolynomialSpec, AffineSpec, DriftExponentialSpec,
                               PRadialSpec, RampSpec, HarmonicExpSpec>;

/// The PDE a field solves by construction.
struct EquationLaplace {};
struct EquationDrift {
  Point b;
};
struct EquationPLaplace {
  double p = 2.0;
  double epsilon = 0.0;  // evaluation regularization; 0 = none
};
struct EquationNone {};  // fields that are not a PDE solution (ramp)
using Equation = std::variant<EquationLaplace, EquationDrift, EquationPLaplace, EquationNone>;

struct EvalBundle {
  double u = 0.0;
  Point grad;
  double lap = 0.0;
};

namespace detail {
class FieldImpl;
}

// ---------------------------------------------------------------------------
// ScalarField
// ---------------------------------------------------------------------------

/// An evaluable scalar field with first and second derivatives. Immutable
/// after construction; evaluations are pure and thread safe.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(std::shared_ptr<const detail::FieldImpl> impl);

  int dim() const;
  const std::string& name() const;

  double value(const Point& x) const;
  Point gradient(const Point& x) const;
  double laplacian(const Point& x) const;
  Mat3 hessian(const Point& x) const;
  EvalBundle eval(const Point& x) const;

  bool admissible(const Point& x) const;
  /// True when the closed ball B_r(center) lies in the admissible domain
  /// (for fields singular at the origin, the annulus convention applies
  /// when center == 0; see inner_cutoff).
  bool ball_admissible(const Point& center, double r) const;
  /// Radius of the excluded ball around the origin (0 for fields defined
  /// everywhere). Volume integrals about the origin start at this radius.
  double inner_cutoff() const;

  /// Grid spacing for grid-backed fields, 0 for closed forms. Checks on
  /// grid fields relax their tolerances to this discretization scale.
  double discretization_scale() const;

  /// The equation the field satisfies by construction.
  Equation natural_equation() const;

  bool valid() const { return impl_ != nullptr; }

  /// Internal backend accessor, used by wrapper fields and the solver.
  std::shared_ptr<const detail::FieldImpl> backend() const { return impl_; }

 private:
  std::shared_ptr<const detail::FieldImpl> impl_;
};

/// Builds a field from a validated spec. Throws ParameterError on invalid
/// specs (PRadial with p == n, negative degree, ...).
ScalarField make_field(const FieldSpec& spec, int n);

/// Builds a field from a catalog name, e.g. "harmonic:2d:k=3:cos",
/// "harmonic:3d:deg=2:m=4", "affine:a=1,0:c=0.5", "const:5",
/// "drift-exp:b=2,0", "p-radial:p=3:rmin=0.2", "ramp:e=1,0".
ScalarField parse_field(const std::string& name);

/// One line per catalog family, for `freqlab describe`.
std::vector<std::string> field_catalog();

/// v(x) = u(tau x); used by the frequency scaling checks.
ScalarField make_scaled(const ScalarField& u, double tau);

/// A monomial c * x^ex * y^ey * z^ez.
struct Monomial {
  double coef = 0.0;
  int ex = 0, ey = 0, ez = 0;
};

/// Builds an exact polynomial field (derivatives are analytic). Building
/// block for the harmonic catalog and for manufactured test solutions.
ScalarField make_polynomial_field(std::vector<Monomial> terms, int n, std::string name = "");

/// u = c_u * u0 + c_v * v0, with derivatives combined exactly.
ScalarField make_linear_combination(const ScalarField& u0, double c_u, const ScalarField& v0,
                                    double c_v);

// ---------------------------------------------------------------------------
// Per-equation residuals
// ---------------------------------------------------------------------------

/// |lap u| (laplace), |lap u - b . grad u| (drift), or the expanded
/// p-laplace residual |s^{(p-2)/2} lap u + (p-2) s^{(p-4)/2} grad^T H grad|
/// with s = |grad|^2 + eps^2. Throws DegenerateError at a p-laplace critical
/// point when eps == 0 and p != 2.
double pde_residual(const ScalarField& field, const Point& x, const Equation& eq);

/// eval_bundle free-function form of ScalarField::eval.
EvalBundle eval_bundle(const ScalarField& field, const Point& x);

}  // namespace freqlab

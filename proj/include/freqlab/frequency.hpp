#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "freqlab/fields.hpp"
#include "freqlab/quadrature.hpp"

namespace freqlab {

// ---------------------------------------------------------------------------
// Radial data
// ---------------------------------------------------------------------------

/// Moments of a field over ∂B_r and B_r about a fixed center.
struct RadialSample {
  double r = 0.0;
  int n = 2;
  double mass = 0.0;            // I(r)  = ∫_{∂B_r} u^2 dS
  double dirichlet = 0.0;       // D(r)  = ∫_{B_r} |grad u|^2 dx
  double flux = 0.0;            // H(r)  = ∫_{∂B_r} u u_nu dS
  double grad_sq_surf = 0.0;    // D'(r) = ∫_{∂B_r} |grad u|^2 dS
  double normal_sq_surf = 0.0;  //         ∫_{∂B_r} |u_nu|^2 dS
  double u_lap_vol = 0.0;       //         ∫_{B_r} u lap u dx
  std::optional<double> p;      // exponent for the p-moments below
  std::optional<double> mass_p;       // ∫_{∂B_r} |u|^p dS
  std::optional<double> dirichlet_p;  // ∫_{B_r} |grad u|^p dx

  bool ok = true;
  std::string error;  // set when a sweep recorded a per-radius failure
};

struct RadialProfile {
  Point center;
  int n = 2;
  std::optional<double> p;
  std::vector<RadialSample> samples;  // strictly increasing radii
};

enum class FrequencyKind { classical, drift, p_power, p_tilde };

FrequencyKind parse_kind(const std::string& name);
std::string kind_name(FrequencyKind k);

/// Explicit constants for the drift growth bound, built from M = |b|_inf
/// and the Poincare constant: r2 = safety / (2 sqrt(Cp) M) capped at r_cap,
/// alpha = max(n - 2 + 6 M r2, n - 1), beta = 2 (M r2)^2 / (n - 1).
struct DriftConstants {
  double m_bound = 0.0;   // M
  double poincare = 1.0;  // C_p
  double safety = 0.9;
  int n = 2;
  double r2 = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

DriftConstants drift_constants(double m_bound, double poincare, int n, double safety,
                               double r_cap = std::numeric_limits<double>::infinity());

/// Per-check record. Pass convention: margin = rhs - lhs >= -tolerance.
struct VerificationReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string details;
  double sort_radius = 0.0;  // secondary report ordering key
};

VerificationReport make_report(std::string name, double lhs, double rhs, double tol,
                               std::string details = "", double sort_radius = 0.0);

// ---------------------------------------------------------------------------
// Moments and frequency values
// ---------------------------------------------------------------------------

/// Computes every moment of `field` at radius r about `center`, using the
/// given quadrature orders. u_nu is grad u . nu with nu the outward unit
/// normal. Throws DomainError when B_r(center) exits the field's domain.
RadialSample radial_moments(const ScalarField& field, const Point& center, double r,
                            std::optional<double> p = std::nullopt,
                            const QuadOptions& quad = {});

/// classical = r D / I, drift = r H / I, p_power = r^{p-1} Dp / Ip,
/// p_tilde = r Dp / Ip. Returns nullopt when the denominator is below the
/// floor (mean-square of u under denom_floor), mirroring the degenerate
/// radius where I vanishes. Drift values may be negative; they are returned,
/// not treated as errors.
std::optional<double> frequency_value(const RadialSample& sample, FrequencyKind kind,
                                      double denom_floor = 1e-14);

/// One radial_moments call per radius (radii strictly increasing, else
/// ParameterError). Per-radius failures are recorded in the sample and the
/// sweep continues. Radii are processed concurrently; `threads` <= 0 uses
/// the FREQLAB_THREADS environment cap or the hardware count.
RadialProfile sweep_profile(const ScalarField& field, const Point& center,
                            const std::vector<double>& radii,
                            std::optional<double> p = std::nullopt,
                            const QuadOptions& quad = {}, int threads = 0);

// ---------------------------------------------------------------------------
// Identity and inequality checks
// ---------------------------------------------------------------------------

/// Rellich-Necas residuals on B_r(center), with positions measured relative
/// to the center. `general` is the full C^2 identity; `harmonic_form` is
/// |r D'(r) - 2 r ∫|u_nu|^2 dS - (n-2) D(r)|, valid for harmonic fields.
struct RellichNecasResidual {
  double general = 0.0;
  double harmonic_form = 0.0;
  double scale = 0.0;  // r * grad_sq_surf, the natural comparison magnitude
};

RellichNecasResidual rellich_necas_residual(const ScalarField& field, const Point& center,
                                            double r, const QuadOptions& quad = {});

/// Finite-difference identity checks on a profile (>= 3 valid samples):
///   (a) I'(r) = (n-1)/r I + 2 H
///   (b) d/dr (r^{2-n} D) = 2 r^{2-n} ∫_{∂B_r}|u_nu|^2 dS   [harmonic only]
///   (c) (log I)'(r) = (n-1)/r + 2 F/r with the flux-form F = r H / I
/// Derivatives use the second-order three-point stencil on the (possibly
/// nonuniform) radius grid; the per-radius tolerance scales with the local
/// spacing squared and is folded into rhs.
std::vector<VerificationReport> identity_checks(const RadialProfile& profile,
                                                bool include_hardt_lin = true);

/// Pass iff F(r_{i+1}) >= F(r_i) - tol for all i (classical kind).
VerificationReport check_monotone_F(const RadialProfile& profile, double tol);

/// max I <= (t/s)^{n-1+2 sup F} min I over sampled radii in [s, t], with the
/// flux-form F. Optionally also the averaged form (harmonic fields):
/// max I/|∂B_r| <= (t/s)^{2 F(t)} min I/|∂B_r|.
VerificationReport check_harnack(const RadialProfile& profile, double s, double t,
                                 double rel_tol);
VerificationReport check_harnack_averaged(const RadialProfile& profile, double s, double t,
                                          double rel_tol);

/// Reconstructs I(r) = gamma exp(-2 ∫_r^R F(t) dt/t) r^{n-1} with
/// gamma = R^{1-n} I(R) and the integral by trapezoid in log r over the
/// sampled radii; compares to the measured I(r) in relative terms.
VerificationReport representation_I(const RadialProfile& profile, double r, double R,
                                    double rel_tol);

/// beta = 2 F(R), gamma = I(R) R^{-beta-n+1}; the bound I(r) >= gamma
/// r^{beta+n-1} must hold (margin >= -tol, relative) at all sampled r < R.
struct VanishingOrder {
  double gamma = 0.0;
  double beta = 0.0;
  VerificationReport report;
};

VanishingOrder vanishing_order(const RadialProfile& profile, double R, double rel_tol);

/// Growth battery for drift profiles with radii <= constants.r2:
///   - H(r) >= -tol at every radius
///   - D(r) <= 2 H(r) + tol (energy-flux bound)
///   - F(r) <= (rho/r)^alpha F(rho) + beta ((rho/r)^alpha - 1) + tol for
///     every sampled pair r < rho (flux-form F)
/// Radii beyond r2 are a precondition violation, not a clipped range.
std::vector<VerificationReport> check_growth_bound(const RadialProfile& profile,
                                                   const DriftConstants& constants, double tol);

/// Largest sampled r_star such that max Ip <= factor * min Ip over the
/// samples up to r_star; also verifies Ip(r_star) <= factor * Ip(r) below
/// r_star. Passes iff r_star lies beyond the first sample.
struct WeakDoubling {
  double r_star = 0.0;
  VerificationReport report;
};

WeakDoubling check_weak_doubling(const RadialProfile& profile, double factor = 4.0);

/// Builds v(x) = u(tau x) and checks F^v(r) = F^u(tau r) for kinds
/// classical/drift/p_power, or the p_tilde law F~^v(r) = tau^{p-2}
/// F~^u(tau r). Scaling is about the origin.
VerificationReport check_scaling(const ScalarField& field, double tau,
                                 const std::vector<double>& radii, FrequencyKind kind,
                                 std::optional<double> p, double tol,
                                 const QuadOptions& quad = {});

/// ratio = ∫_{B_r} u^2 dx / (r^2 ∫_{B_r} |grad u|^2 dx); requires the zero
/// set of u to fill at least a gamma_0 fraction of B_r (verified by
/// sampling on the quadrature nodes). The report passes iff ratio <= c_p.
struct PoincareRatio {
  double ratio = 0.0;
  double zero_fraction = 0.0;
  VerificationReport report;
};

PoincareRatio poincare_ratio(const ScalarField& field, const Point& center, double r,
                             double gamma_0, double c_p, const QuadOptions& quad = {});

}  // namespace freqlab

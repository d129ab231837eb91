#include "freqlab/frequency.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "freqlab/report.hpp"

namespace freqlab {

namespace {

constexpr double kSlack = 1e-12;  // radius comparisons on sampled grids

std::string fmt(double v) { return format_g17(v); }

}  // namespace

FrequencyKind parse_kind(const std::string& name) {
  if (name == "classical") return FrequencyKind::classical;
  if (name == "drift") return FrequencyKind::drift;
  if (name == "p" || name == "p_power") return FrequencyKind::p_power;
  if (name == "p_tilde") return FrequencyKind::p_tilde;
  throw ParameterError("unknown frequency kind '" + name + "'");
}

std::string kind_name(FrequencyKind k) {
  switch (k) {
    case FrequencyKind::classical: return "classical";
    case FrequencyKind::drift: return "drift";
    case FrequencyKind::p_power: return "p";
    case FrequencyKind::p_tilde: return "p_tilde";
  }
  return "?";
}

DriftConstants drift_constants(double m_bound, double poincare, int n, double safety,
                               double r_cap) {
  require_dim(n, "drift_constants");
  if (!(m_bound > 0.0)) throw ParameterError("drift_constants: M must be > 0");
  if (!(poincare > 0.0)) throw ParameterError("drift_constants: C_p must be > 0");
  if (!(safety > 0.0 && safety < 1.0))
    throw ParameterError("drift_constants: safety factor must lie in (0, 1)");
  if (!(r_cap > 0.0)) throw ParameterError("drift_constants: r_cap must be > 0");
  DriftConstants c;
  c.m_bound = m_bound;
  c.poincare = poincare;
  c.safety = safety;
  c.n = n;
  // sqrt(C_p) M r < 1/2 must hold up to r2; the safety factor keeps a gap.
  c.r2 = std::min(safety / (2.0 * std::sqrt(poincare) * m_bound), r_cap);
  c.alpha = std::max(n - 2.0 + 6.0 * m_bound * c.r2, n - 1.0);
  c.beta = 2.0 * (m_bound * c.r2) * (m_bound * c.r2) / (n - 1.0);
  return c;
}

VerificationReport make_report(std::string name, double lhs, double rhs, double tol,
                               std::string details, double sort_radius) {
  VerificationReport rep;
  rep.name = std::move(name);
  rep.lhs = lhs;
  rep.rhs = rhs;
  rep.margin = rhs - lhs;
  rep.tolerance = tol;
  rep.passed = rep.margin >= -tol;
  rep.details = std::move(details);
  rep.sort_radius = sort_radius;
  return rep;
}

// ---------------------------------------------------------------------------
// Moments
// ---------------------------------------------------------------------------

namespace {

RadialSample moments_with_rules(const ScalarField& field, const Point& center, double r,
                                std::optional<double> p, const SphereRule& sphere,
                                const BallRule& ball) {
  if (!(r > 0.0)) throw ParameterError("radial_moments: radius must be > 0");
  if (!field.ball_admissible(center, r))
    throw DomainError(field.name() + ": ball of radius " + std::to_string(r) +
                      " exits the admissible domain");
  const int n = field.dim();
  RadialSample s;
  s.r = r;
  s.n = n;
  s.p = p;

  double mass = 0, flux = 0, dsurf = 0, nsurf = 0, mass_p = 0;
  for (size_t i = 0; i < sphere.nodes.size(); ++i) {
    const Point& nu = sphere.nodes[i];
    Point x = center + r * nu;
    EvalBundle e = field.eval(x);
    double un = dot(e.grad, nu);
    double w = sphere.weights[i];
    mass += w * e.u * e.u;
    flux += w * e.u * un;
    dsurf += w * dot(e.grad, e.grad);
    nsurf += w * un * un;
    if (p) mass_p += w * std::pow(std::abs(e.u), *p);
  }
  const double rpow = std::pow(r, n - 1);
  s.mass = rpow * mass;
  s.flux = rpow * flux;
  s.grad_sq_surf = rpow * dsurf;
  s.normal_sq_surf = rpow * nsurf;
  if (p) s.mass_p = rpow * mass_p;

  // Volume moments; fields singular at the origin integrate over the annulus.
  double inner = 0.0;
  if (norm(center) <= 1e-15 && field.inner_cutoff() > 0.0) inner = field.inner_cutoff();
  double dirichlet = 0, u_lap = 0, dirichlet_p = 0;
  if (inner < r * (1.0 - 1e-14)) {
    const double len = r - inner;
    for (size_t k = 0; k < ball.radial_nodes.size(); ++k) {
      const double rr = inner + len * ball.radial_nodes[k];
      const double ws = len * ball.radial_weights[k] * std::pow(rr, n - 1);
      double shell_d = 0, shell_ul = 0, shell_dp = 0;
      for (size_t i = 0; i < ball.sphere.nodes.size(); ++i) {
        Point x = center + rr * ball.sphere.nodes[i];
        EvalBundle e = field.eval(x);
        double gsq = dot(e.grad, e.grad);
        double w = ball.sphere.weights[i];
        shell_d += w * gsq;
        shell_ul += w * e.u * e.lap;
        if (p) shell_dp += w * std::pow(gsq, 0.5 * (*p));
      }
      dirichlet += ws * shell_d;
      u_lap += ws * shell_ul;
      if (p) dirichlet_p += ws * shell_dp;
    }
  }
  s.dirichlet = dirichlet;
  s.u_lap_vol = u_lap;
  if (p) s.dirichlet_p = dirichlet_p;
  return s;
}

int resolve_threads(int requested, size_t work_items) {
  int t = requested;
  if (t <= 0) {
    if (const char* env = std::getenv("FREQLAB_THREADS")) {
      t = std::atoi(env);
    }
  }
  if (t <= 0) t = static_cast<int>(std::thread::hardware_concurrency());
  if (t <= 0) t = 1;
  return static_cast<int>(std::min<size_t>(t, work_items));
}

}  // namespace

RadialSample radial_moments(const ScalarField& field, const Point& center, double r,
                            std::optional<double> p, const QuadOptions& quad) {
  const int n = field.dim();
  SphereRule sphere = build_rule(n, quad.order_for(n));
  BallRule ball = build_ball_rule(n, quad.order_for(n), quad.radial_nodes);
  return moments_with_rules(field, center, r, p, sphere, ball);
}

std::optional<double> frequency_value(const RadialSample& sample, FrequencyKind kind,
                                      double denom_floor) {
  if (!sample.ok) return std::nullopt;
  if (kind == FrequencyKind::classical || kind == FrequencyKind::drift) {
    // Undefined when the mean square of u on the sphere is below the floor,
    // mirroring the degenerate radius where I vanishes.
    if (sample.mass <= denom_floor * sphere_area(sample.n, sample.r)) return std::nullopt;
    double num = kind == FrequencyKind::classical ? sample.dirichlet : sample.flux;
    return sample.r * num / sample.mass;
  }
  if (!sample.p || !sample.mass_p || !sample.dirichlet_p)
    throw ParameterError("frequency_value: sample carries no p-moments");
  if (*sample.mass_p <= denom_floor * sphere_area(sample.n, sample.r)) return std::nullopt;
  double scale = kind == FrequencyKind::p_power ? std::pow(sample.r, *sample.p - 1.0) : sample.r;
  return scale * *sample.dirichlet_p / *sample.mass_p;
}

RadialProfile sweep_profile(const ScalarField& field, const Point& center,
                            const std::vector<double>& radii, std::optional<double> p,
                            const QuadOptions& quad, int threads) {
  if (radii.empty()) throw ParameterError("sweep_profile: empty radius list");
  for (size_t i = 0; i + 1 < radii.size(); ++i)
    if (!(radii[i] < radii[i + 1]))
      throw ParameterError("sweep_profile: radii must be strictly increasing");
  if (center.n != field.dim()) throw ParameterError("sweep_profile: center dimension mismatch");

  const int n = field.dim();
  const SphereRule sphere = build_rule(n, quad.order_for(n));
  const BallRule ball = build_ball_rule(n, quad.order_for(n), quad.radial_nodes);

  RadialProfile profile;
  profile.center = center;
  profile.n = n;
  profile.p = p;
  profile.samples.resize(radii.size());

  auto work = [&](size_t i) {
    try {
      profile.samples[i] = moments_with_rules(field, center, radii[i], p, sphere, ball);
    } catch (const Error& e) {
      RadialSample bad;
      bad.r = radii[i];
      bad.n = n;
      bad.p = p;
      bad.ok = false;
      bad.error = e.what();
      profile.samples[i] = bad;
    }
  };

  const int nthreads = resolve_threads(threads, radii.size());
  if (nthreads <= 1) {
    for (size_t i = 0; i < radii.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    std::atomic<size_t> next{0};
    for (int t = 0; t < nthreads; ++t) {
      pool.emplace_back([&]() {
        for (size_t i = next.fetch_add(1); i < radii.size(); i = next.fetch_add(1)) work(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  return profile;
}

// ---------------------------------------------------------------------------
// Rellich-Necas
// ---------------------------------------------------------------------------

RellichNecasResidual rellich_necas_residual(const ScalarField& field, const Point& center,
                                            double r, const QuadOptions& quad) {
  const int n = field.dim();
  if (norm(center) <= 1e-15 && field.inner_cutoff() > 0.0)
    throw DomainError("rellich_necas_residual: annular domains are not supported");
  if (!field.ball_admissible(center, r))
    throw DomainError(field.name() + ": ball exits the admissible domain");
  SphereRule sphere = build_rule(n, quad.order_for(n));
  BallRule ball = build_ball_rule(n, quad.order_for(n), quad.radial_nodes);

  // Boundary terms; on a sphere about the center, y = x - center = r nu.
  double dsurf = 0, nsurf = 0, flux = 0;
  for (size_t i = 0; i < sphere.nodes.size(); ++i) {
    const Point& nu = sphere.nodes[i];
    Point x = center + r * nu;
    EvalBundle e = field.eval(x);
    double un = dot(e.grad, nu);
    double w = sphere.weights[i];
    dsurf += w * dot(e.grad, e.grad);
    nsurf += w * un * un;
    flux += w * e.u * un;
  }
  const double rpow = std::pow(r, n - 1);
  dsurf *= rpow;
  nsurf *= rpow;
  flux *= rpow;

  // Volume terms 2 (y . grad u) lap u + (n-2) u lap u, plus the Dirichlet
  // energy for the harmonic form.
  double vol = 0, dirichlet = 0;
  for (size_t k = 0; k < ball.radial_nodes.size(); ++k) {
    const double rr = r * ball.radial_nodes[k];
    const double ws = r * ball.radial_weights[k] * std::pow(rr, n - 1);
    double shell_v = 0, shell_d = 0;
    for (size_t i = 0; i < ball.sphere.nodes.size(); ++i) {
      const Point& nu = ball.sphere.nodes[i];
      Point x = center + rr * nu;
      EvalBundle e = field.eval(x);
      double y_dot_grad = rr * dot(nu, e.grad);
      double w = ball.sphere.weights[i];
      shell_v += w * (2.0 * y_dot_grad * e.lap + (n - 2.0) * e.u * e.lap);
      shell_d += w * dot(e.grad, e.grad);
    }
    vol += ws * shell_v;
    dirichlet += ws * shell_d;
  }

  RellichNecasResidual res;
  double boundary = r * dsurf - 2.0 * r * nsurf - (n - 2.0) * flux;
  res.general = std::abs(boundary + vol);
  res.harmonic_form = std::abs(r * dsurf - 2.0 * r * nsurf - (n - 2.0) * dirichlet);
  res.scale = std::abs(r * dsurf);
  return res;
}

// ---------------------------------------------------------------------------
// Identity checks
// ---------------------------------------------------------------------------

namespace {

// Derivative at xs[i] of the quadratic through three consecutive samples;
// interior points use the centered triple, endpoints the one-sided one.
double stencil_derivative(const std::vector<double>& xs, const std::vector<double>& fs,
                          size_t i) {
  size_t a = i == 0 ? 0 : (i + 1 == xs.size() ? xs.size() - 3 : i - 1);
  double x0 = xs[a], x1 = xs[a + 1], x2 = xs[a + 2];
  double e = xs[i];
  double d0 = fs[a] * (2.0 * e - x1 - x2) / ((x0 - x1) * (x0 - x2));
  double d1 = fs[a + 1] * (2.0 * e - x0 - x2) / ((x1 - x0) * (x1 - x2));
  double d2 = fs[a + 2] * (2.0 * e - x0 - x1) / ((x2 - x0) * (x2 - x1));
  return d0 + d1 + d2;
}

// |(e-a)(e-b) + (e-a)(e-c) + (e-b)(e-c)| / 6: the quadratic-interpolation
// derivative error constant multiplying f'''.
double stencil_error_factor(const std::vector<double>& xs, size_t i) {
  size_t a = i == 0 ? 0 : (i + 1 == xs.size() ? xs.size() - 3 : i - 1);
  double x0 = xs[a], x1 = xs[a + 1], x2 = xs[a + 2];
  double e = xs[i];
  double t = (e - x0) * (e - x1) + (e - x0) * (e - x2) + (e - x1) * (e - x2);
  return std::abs(t) / 6.0;
}

// Third derivative estimate via the third divided difference over a window
// of four consecutive samples around i.
double estimate_f3(const std::vector<double>& xs, const std::vector<double>& fs, size_t i) {
  if (xs.size() < 4) {
    // three samples: fall back on |f''| / span as a curvature-based scale
    double d01 = (fs[1] - fs[0]) / (xs[1] - xs[0]);
    double d12 = (fs[2] - fs[1]) / (xs[2] - xs[1]);
    double d012 = (d12 - d01) / (xs[2] - xs[0]);
    return 6.0 * std::abs(d012) / (xs[2] - xs[0]);
  }
  size_t a = std::min(i >= 1 ? i - 1 : 0, xs.size() - 4);
  double d01 = (fs[a + 1] - fs[a]) / (xs[a + 1] - xs[a]);
  double d12 = (fs[a + 2] - fs[a + 1]) / (xs[a + 2] - xs[a + 1]);
  double d23 = (fs[a + 3] - fs[a + 2]) / (xs[a + 3] - xs[a + 2]);
  double d012 = (d12 - d01) / (xs[a + 2] - xs[a]);
  double d123 = (d23 - d12) / (xs[a + 3] - xs[a + 1]);
  double d0123 = (d123 - d012) / (xs[a + 3] - xs[a]);
  return 6.0 * d0123;
}

struct DerivativeCheck {
  double worst_excess = -std::numeric_limits<double>::infinity();
  double lhs = 0, rhs = 0, r = 0;
};

// Compares the stencil derivative of f against the analytic rhs at every
// sample; the per-radius tolerance c |f'''| S_i absorbs the stencil error.
DerivativeCheck derivative_family(const std::vector<double>& rs, const std::vector<double>& fs,
                                  const std::vector<double>& rhs, double floor_scale) {
  constexpr double c_safety = 4.0;
  DerivativeCheck out;
  for (size_t i = 0; i < rs.size(); ++i) {
    double deriv = stencil_derivative(rs, fs, i);
    double dev = std::abs(deriv - rhs[i]);
    double f3 = std::abs(estimate_f3(rs, fs, i));
    double tol = c_safety * f3 * stencil_error_factor(rs, i) +
                 1e-11 * (std::abs(rhs[i]) + floor_scale);
    if (dev - tol > out.worst_excess) {
      out.worst_excess = dev - tol;
      out.lhs = dev;
      out.rhs = tol;
      out.r = rs[i];
    }
  }
  return out;
}

std::vector<const RadialSample*> valid_samples(const RadialProfile& profile) {
  std::vector<const RadialSample*> out;
  for (const auto& s : profile.samples)
    if (s.ok) out.push_back(&s);
  return out;
}

}  // namespace

std::vector<VerificationReport> identity_checks(const RadialProfile& profile,
                                                bool include_hardt_lin) {
  auto samples = valid_samples(profile);
  if (samples.size() < 3)
    throw ParameterError("identity_checks: need at least three valid samples");
  const int n = profile.n;

  std::vector<double> rs, mass, flux, nsurf, dirichlet;
  for (const auto* s : samples) {
    rs.push_back(s->r);
    mass.push_back(s->mass);
    flux.push_back(s->flux);
    nsurf.push_back(s->normal_sq_surf);
    dirichlet.push_back(s->dirichlet);
  }

  std::vector<VerificationReport> reports;

  // (a) I'(r) = (n-1)/r I + 2H
  {
    std::vector<double> rhs(rs.size());
    for (size_t i = 0; i < rs.size(); ++i) rhs[i] = (n - 1.0) / rs[i] * mass[i] + 2.0 * flux[i];
    auto d = derivative_family(rs, mass, rhs, mass[0] / rs[0] + 1e-30);
    reports.push_back(make_report("identity:mass_slope", d.lhs, d.rhs, 0.0,
                                  "I' vs (n-1)I/r + 2H; worst r=" + fmt(d.r), d.r));
  }

  // (b) d/dr (r^{2-n} D) = 2 r^{2-n} \int |u_nu|^2 dS (harmonic fields)
  if (include_hardt_lin) {
    std::vector<double> g(rs.size()), rhs(rs.size());
    for (size_t i = 0; i < rs.size(); ++i) {
      double w = std::pow(rs[i], 2 - n);
      g[i] = w * dirichlet[i];
      rhs[i] = 2.0 * w * nsurf[i];
    }
    auto d = derivative_family(rs, g, rhs, std::abs(g[0]) / rs[0] + 1e-30);
    reports.push_back(make_report("identity:hardt_lin", d.lhs, d.rhs, 0.0,
                                  "d/dr(r^{2-n}D). worst r=" + fmt(d.r), d.r));
  }

  // (c) (log I)' = (n-1)/r + 2F/r with the flux-form frequency
  {
    bool positive = std::all_of(mass.begin(), mass.end(), [](double v) { return v > 0.0; });
    if (!positive) {
      VerificationReport rep = make_report("identity:log_mass_slope", 0.0, 0.0, 0.0,
                                           "SKIPPED: I vanishes at some radius", 0.0);
      reports.push_back(rep);
    } else {
      std::vector<double> logm(rs.size()), rhs(rs.size());
      for (size_t i = 0; i < rs.size(); ++i) {
        logm[i] = std::log(mass[i]);
        rhs[i] = (n - 1.0) / rs[i] + 2.0 * flux[i] / mass[i];
      }
      auto d = derivative_family(rs, logm, rhs, 1.0 / rs[0]);
      reports.push_back(make_report("identity:log_mass_slope", d.lhs, d.rhs, 0.0,
                                    "(log I)'. worst r=" + fmt(d.r), d.r));
    }
  }
  return reports;
}

// ---------------------------------------------------------------------------
// Monotonicity, Harnack, representation, vanishing order
// ---------------------------------------------------------------------------

VerificationReport check_monotone_F(const RadialProfile& profile, double tol) {
  auto samples = valid_samples(profile);
  if (samples.size() < 2)
    throw ParameterError("check_monotone_F: need at least two valid samples");
  double worst_drop = -std::numeric_limits<double>::infinity();
  double worst_r = 0.0;
  std::optional<double> prev;
  double prev_r = 0.0;
  for (const auto* s : samples) {
    auto f = frequency_value(*s, FrequencyKind::classical);
    if (!f)
      return make_report("monotone_F", 1.0, 0.0, tol,
                         "frequency undefined at r=" + fmt(s->r) + " (I below floor)", s->r);
    if (prev) {
      double drop = *prev - *f;
      if (drop > worst_drop) {
        worst_drop = drop;
        worst_r = prev_r;
      }
    }
    prev = f;
    prev_r = s->r;
  }
  return make_report("monotone_F", worst_drop, 0.0, tol, "max decrease between samples",
                     worst_r);
}

namespace {

std::vector<const RadialSample*> samples_in_range(const RadialProfile& profile, double s,
                                                  double t) {
  std::vector<const RadialSample*> out;
  for (const auto& smp : profile.samples) {
    if (!smp.ok) continue;
    if (smp.r >= s * (1.0 - kSlack) && smp.r <= t * (1.0 + kSlack)) out.push_back(&smp);
  }
  return out;
}

}  // namespace

VerificationReport check_harnack(const RadialProfile& profile, double s, double t,
                                 double rel_tol) {
  if (!(s < t)) throw ParameterError("check_harnack: requires s < t");
  auto range = samples_in_range(profile, s, t);
  if (range.size() < 2) throw ParameterError("check_harnack: fewer than two samples in [s,t]");
  double max_mass = 0, min_mass = std::numeric_limits<double>::infinity(), sup_f = 0;
  for (const auto* smp : range) {
    if (!(smp->mass > 0.0)) throw DegenerateError("check_harnack: I vanishes in [s,t]");
    auto f = frequency_value(*smp, FrequencyKind::drift);
    if (!f) throw DegenerateError("check_harnack: frequency undefined in [s,t]");
    sup_f = std::max(sup_f, *f);
    max_mass = std::max(max_mass, smp->mass);
    min_mass = std::min(min_mass, smp->mass);
  }
  double bound = std::pow(t / s, profile.n - 1.0 + 2.0 * sup_f) * min_mass;
  return make_report("harnack:mass", max_mass, bound, rel_tol * bound,
                     "s=" + fmt(s) + ";t=" + fmt(t) + ";supF=" + fmt(sup_f), t);
}

VerificationReport check_harnack_averaged(const RadialProfile& profile, double s, double t,
                                          double rel_tol) {
  if (!(s < t)) throw ParameterError("check_harnack_averaged: requires s < t");
  auto range = samples_in_range(profile, s, t);
  if (range.size() < 2)
    throw ParameterError("check_harnack_averaged: fewer than two samples in [s,t]");
  double max_avg = 0, min_avg = std::numeric_limits<double>::infinity();
  for (const auto* smp : range) {
    if (!(smp->mass > 0.0))
      throw DegenerateError("check_harnack_averaged: I vanishes in [s,t]");
    double avg = smp->mass / sphere_area(profile.n, smp->r);
    max_avg = std::max(max_avg, avg);
    min_avg = std::min(min_avg, avg);
  }
  auto f_end = frequency_value(*range.back(), FrequencyKind::drift);
  if (!f_end) throw DegenerateError("check_harnack_averaged: frequency undefined at t");
  double bound = std::pow(t / s, 2.0 * *f_end) * min_avg;
  return make_report("harnack:averaged", max_avg, bound, rel_tol * bound,
                     "s=" + fmt(s) + ";t=" + fmt(t) + ";F(t)=" + fmt(*f_end), t);
}

VerificationReport representation_I(const RadialProfile& profile, double r, double R,
                                    double rel_tol) {
  if (!(r < R)) throw ParameterError("representation_I: requires r < R");
  auto range = samples_in_range(profile, r, R);
  if (range.size() < 2)
    throw ParameterError("representation_I: fewer than two samples in [r,R]");
  std::vector<double> fs, ls;  // flux-form F over log-radius
  for (const auto* smp : range) {
    auto f = frequency_value(*smp, FrequencyKind::drift);
    if (!f) throw DegenerateError("representation_I: frequency undefined in [r,R]");
    fs.push_back(*f);
    ls.push_back(std::log(smp->r));
  }
  const int n = profile.n;
  const auto* end = range.back();
  const double gamma = std::pow(end->r, 1.0 - n) * end->mass;

  // Trapezoid curvature |F''| in log-radius, for the discretization bound.
  auto curvature = [&](size_t j) {
    size_t a = std::min(std::max<size_t>(j, 1), ls.size() - 2);
    double d0 = (fs[a] - fs[a - 1]) / (ls[a] - ls[a - 1]);
    double d1 = (fs[a + 1] - fs[a]) / (ls[a + 1] - ls[a]);
    return std::abs(2.0 * (d1 - d0) / (ls[a + 1] - ls[a - 1]));
  };

  // gamma exp(-2 int_r^R F dt/t) r^{n-1}; trapezoid in log t, accumulated
  // from R downward so every sampled radius gets its reconstruction. The
  // accumulated trapezoid error bound (times the exp factor 2, times a
  // safety margin) rides in rhs; rel_tol covers quadrature noise on I.
  double worst_excess = -std::numeric_limits<double>::infinity();
  double worst_dev = 0, worst_est = 0, worst_r = end->r;
  double integral = 0.0, err_est = 0.0;
  for (size_t idx = range.size() - 1; idx-- > 0;) {
    const auto* smp = range[idx];
    double dlog = ls[idx + 1] - ls[idx];
    integral += 0.5 * (fs[idx] + fs[idx + 1]) * dlog;
    err_est += dlog * dlog * dlog / 12.0 * std::max(curvature(idx), curvature(idx + 1));
    double predicted = gamma * std::exp(-2.0 * integral) * std::pow(smp->r, n - 1.0);
    double dev = std::abs(predicted - smp->mass) / smp->mass;
    double est = 6.0 * err_est;  // 2 from the exponent, 3x safety
    if (dev - est > worst_excess) {
      worst_excess = dev - est;
      worst_dev = dev;
      worst_est = est;
      worst_r = smp->r;
    }
  }
  return make_report("representation_I", worst_dev, worst_est, rel_tol,
                     "gamma=" + fmt(gamma) + ";R=" + fmt(end->r) + ";worst r=" + fmt(worst_r),
                     worst_r);
}

VanishingOrder vanishing_order(const RadialProfile& profile, double R, double rel_tol) {
  auto range = samples_in_range(profile, 0.0, R);
  if (range.size() < 2)
    throw ParameterError("vanishing_order: fewer than two samples up to R");
  const auto* end = range.back();
  auto fR = frequency_value(*end, FrequencyKind::classical);
  if (!fR) throw DegenerateError("vanishing_order: frequency undefined at R");
  const int n = profile.n;

  VanishingOrder out;
  out.beta = 2.0 * *fR;
  out.gamma = end->mass * std::pow(end->r, -out.beta - n + 1.0);

  double worst_shortfall = -std::numeric_limits<double>::infinity();
  double worst_r = end->r;
  for (const auto* smp : range) {
    double bound = out.gamma * std::pow(smp->r, out.beta + n - 1.0);
    double shortfall = (bound - smp->mass) / bound;  // > 0 when the bound fails
    if (shortfall > worst_shortfall) {
      worst_shortfall = shortfall;
      worst_r = smp->r;
    }
  }
  out.report = make_report("vanishing_order", worst_shortfall, 0.0, rel_tol,
                           "beta=" + fmt(out.beta) + ";gamma=" + fmt(out.gamma) +
                               ";R=" + fmt(end->r),
                           worst_r);
  return out;
}

// ---------------------------------------------------------------------------
// Drift growth battery
// ---------------------------------------------------------------------------

std::vector<VerificationReport> check_growth_bound(const RadialProfile& profile,
                                                   const DriftConstants& constants,
                                                   double tol) {
  auto samples = valid_samples(profile);
  if (samples.size() < 2)
    throw ParameterError("check_growth_bound: need at least two valid samples");
  for (const auto* s : samples)
    if (s->r > constants.r2 * (1.0 + kSlack))
      throw PreconditionError("check_growth_bound: radius " + fmt(s->r) +
                              " exceeds the small-radius bound r2=" + fmt(constants.r2));

  std::vector<double> rs, fs, flux, dirichlet;
  for (const auto* s : samples) {
    auto f = frequency_value(*s, FrequencyKind::drift);
    if (!f) throw DegenerateError("check_growth_bound: frequency undefined at r=" + fmt(s->r));
    rs.push_back(s->r);
    fs.push_back(*f);
    flux.push_back(s->flux);
    dirichlet.push_back(s->dirichlet);
  }

  std::vector<VerificationReport> reports;

  {  // H(r) >= 0 on (0, r2]
    size_t worst = 0;
    for (size_t i = 1; i < flux.size(); ++i)
      if (flux[i] < flux[worst]) worst = i;
    reports.push_back(make_report("drift:flux_nonneg", -flux[worst], 0.0, tol,
                                  "min H at r=" + fmt(rs[worst]), rs[worst]));
  }

  {  // D(r) <= 2 H(r): the energy-flux bound
    size_t worst = 0;
    double worst_gap = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < flux.size(); ++i) {
      double gap = dirichlet[i] - 2.0 * flux[i];
      if (gap > worst_gap) {
        worst_gap = gap;
        worst = i;
      }
    }
    reports.push_back(make_report("drift:energy_flux", dirichlet[worst], 2.0 * flux[worst], tol,
                                  "worst r=" + fmt(rs[worst]), rs[worst]));
  }

  {  // F(r) <= (rho/r)^alpha F(rho) + beta ((rho/r)^alpha - 1) for r < rho
    double worst_margin = std::numeric_limits<double>::infinity();
    double wl = 0, wr = 0, wrad = 0;
    std::string detail;
    for (size_t i = 0; i < rs.size(); ++i) {
      for (size_t j = i + 1; j < rs.size(); ++j) {
        double ratio_pow = std::pow(rs[j] / rs[i], constants.alpha);
        double rhs = ratio_pow * fs[j] + constants.beta * (ratio_pow - 1.0);
        double margin = rhs - fs[i];
        if (margin < worst_margin) {
          worst_margin = margin;
          wl = fs[i];
          wr = rhs;
          wrad = rs[i];
          detail = "worst pair r=" + fmt(rs[i]) + ";rho=" + fmt(rs[j]) +
                   ";alpha=" + fmt(constants.alpha) + ";beta=" + fmt(constants.beta);
        }
      }
    }
    reports.push_back(make_report("drift:frequency_growth", wl, wr, tol, detail, wrad));
  }
  return reports;
}

// ---------------------------------------------------------------------------
// Weak doubling
// ---------------------------------------------------------------------------

WeakDoubling check_weak_doubling(const RadialProfile& profile, double factor) {
  if (!(factor > 1.0)) throw ParameterError("check_weak_doubling: factor must be > 1");
  auto samples = valid_samples(profile);
  if (samples.size() < 2)
    throw ParameterError("check_weak_doubling: need at least two valid samples");
  std::vector<double> rs, ip;
  for (const auto* s : samples) {
    if (!s->mass_p) throw ParameterError("check_weak_doubling: profile has no p-moments");
    rs.push_back(s->r);
    ip.push_back(*s->mass_p);
  }
  if (std::all_of(ip.begin(), ip.end(), [](double v) { return v <= 0.0; }))
    throw DegenerateError("check_weak_doubling: Ip vanishes on the whole range");

  // Running prefix [r_b, r_j]; the admissible prefix is maximal since the
  // prefix max/min ratio is non-decreasing in j.
  double run_max = ip[0], run_min = ip[0];
  size_t star = 0;
  double star_ratio = 1.0;
  for (size_t j = 1; j < ip.size(); ++j) {
    run_max = std::max(run_max, ip[j]);
    run_min = std::min(run_min, ip[j]);
    if (run_min <= 0.0) break;
    double ratio = run_max / run_min;
    if (ratio <= factor) {
      star = j;
      star_ratio = ratio;
    } else {
      break;
    }
  }

  WeakDoubling out;
  out.r_star = rs[star];
  if (star == 0) {
    // No admissible prefix beyond the first sample: report the first ratio.
    double first_ratio = ip[1] > 0.0 && ip[0] > 0.0
                             ? std::max(ip[0], ip[1]) / std::min(ip[0], ip[1])
                             : std::numeric_limits<double>::infinity();
    out.report = make_report("weak_doubling", first_ratio, factor, 0.0,
                             "no r* beyond the first sample; r_b=" + fmt(rs[0]), rs[0]);
    return out;
  }
  // eq (weak doubling, second form): Ip(r*) <= factor Ip(r) for r <= r*.
  double d2 = 0.0;
  for (size_t j = 0; j <= star; ++j) d2 = std::max(d2, ip[star] / ip[j]);
  out.report = make_report("weak_doubling", std::max(star_ratio, d2), factor, 0.0,
                           "r*=" + fmt(rs[star]) + ";r_b=" + fmt(rs[0]) +
                               ";r*/r_b=" + fmt(rs[star] / rs[0]),
                           rs[star]);
  return out;
}

// ---------------------------------------------------------------------------
// Scaling
// ---------------------------------------------------------------------------

VerificationReport check_scaling(const ScalarField& field, double tau,
                                 const std::vector<double>& radii, FrequencyKind kind,
                                 std::optional<double> p, double tol,
                                 const QuadOptions& quad) {
  if (radii.empty()) throw ParameterError("check_scaling: empty radius list");
  if ((kind == FrequencyKind::p_power || kind == FrequencyKind::p_tilde) && !p)
    throw ParameterError("check_scaling: p kinds require the exponent p");
  ScalarField scaled = make_scaled(field, tau);
  Point origin;
  origin.n = field.dim();

  double worst_dev = 0.0, worst_r = radii.front();
  for (double r : radii) {
    RadialSample sv = radial_moments(scaled, origin, r, p, quad);
    RadialSample su = radial_moments(field, origin, tau * r, p, quad);
    auto fv = frequency_value(sv, kind);
    auto fu = frequency_value(su, kind);
    if (!fv || !fu)
      throw DegenerateError("check_scaling: frequency undefined at r=" + fmt(r));
    double expected = kind == FrequencyKind::p_tilde ? std::pow(tau, *p - 2.0) * *fu : *fu;
    double dev = std::abs(*fv - expected) / std::max(1.0, std::abs(expected));
    if (dev > worst_dev) {
      worst_dev = dev;
      worst_r = r;
    }
  }
  return make_report("scaling:" + kind_name(kind), worst_dev, 0.0, tol,
                     "tau=" + fmt(tau) + ";worst r=" + fmt(worst_r), worst_r);
}

// ---------------------------------------------------------------------------
// Poincare ratio
// ---------------------------------------------------------------------------

PoincareRatio poincare_ratio(const ScalarField& field, const Point& center, double r,
                             double gamma_0, double c_p, const QuadOptions& quad) {
  if (!(gamma_0 > 0.0 && gamma_0 < 1.0))
    throw ParameterError("poincare_ratio: gamma_0 must lie in (0, 1)");
  if (!field.ball_admissible(center, r))
    throw DomainError("poincare_ratio: ball exits the admissible domain");
  const int n = field.dim();
  BallRule ball = build_ball_rule(n, quad.order_for(n), quad.radial_nodes);

  struct NodeVal {
    double w, absu;
  };
  std::vector<NodeVal> vals;
  vals.reserve(ball.radial_nodes.size() * ball.sphere.nodes.size());
  double mass_sq = 0, grad_sq = 0, wtotal = 0, umax = 0;
  for (size_t k = 0; k < ball.radial_nodes.size(); ++k) {
    const double rr = r * ball.radial_nodes[k];
    const double ws = r * ball.radial_weights[k] * std::pow(rr, n - 1);
    for (size_t i = 0; i < ball.sphere.nodes.size(); ++i) {
      Point x = center + rr * ball.sphere.nodes[i];
      EvalBundle e = field.eval(x);
      double w = ws * ball.sphere.weights[i];
      mass_sq += w * e.u * e.u;
      grad_sq += w * dot(e.grad, e.grad);
      wtotal += w;
      umax = std::max(umax, std::abs(e.u));
      vals.push_back({w, std::abs(e.u)});
    }
  }
  double zero_weight = 0.0;
  const double zero_eps = 1e-13 * std::max(umax, 1e-300);
  for (const auto& v : vals)
    if (v.absu <= zero_eps) zero_weight += v.w;
  double fraction = zero_weight / wtotal;
  if (fraction + 1e-12 < gamma_0)
    throw PreconditionError("poincare_ratio: zero-set fraction " + fmt(fraction) +
                            " is below gamma_0=" + fmt(gamma_0));
  if (!(grad_sq > 1e-280))
    throw DegenerateError("poincare_ratio: gradient energy vanishes");

  PoincareRatio out;
  out.zero_fraction = fraction;
  out.ratio = mass_sq / (r * r * grad_sq);
  out.report = make_report("poincare_ratio", out.ratio, c_p, 0.0,
                           "zero_fraction=" + fmt(fraction) + ";r=" + fmt(r), r);
  return out;
}

}  // namespace freqlab

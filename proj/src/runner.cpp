#include "freqlab/runner.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>

#include "freqlab/fields.hpp"
#include "freqlab/frequency.hpp"
#include "freqlab/report.hpp"
#include "freqlab/solver.hpp"

namespace freqlab {

namespace {

QuadOptions quad_from(const ExperimentConfig& c) {
  QuadOptions q;
  q.order2d = c.quad_order2d;
  q.order3d = c.quad_order3d;
  q.radial_nodes = c.quad_radial;
  return q;
}

Point center_from(const ExperimentConfig& c, int dim) {
  if (static_cast<int>(c.center.size()) != dim)
    throw ConfigError("field.center dimension does not match the field");
  Point p;
  p.n = dim;
  for (int i = 0; i < dim; ++i) p[i] = c.center[static_cast<size_t>(i)];
  return p;
}

Equation solver_equation_from(const ExperimentConfig& c, const std::string& override_name) {
  std::string eq = override_name.empty() ? c.solver_equation : override_name;
  if (eq == "laplace") return EquationLaplace{};
  if (eq == "drift") {
    if (c.solver_bvec.size() != 2)
      throw ConfigError("solver.b_vec must have 2 components for the drift solver");
    return EquationDrift{Point(c.solver_bvec[0], c.solver_bvec[1])};
  }
  if (eq == "plaplace") return EquationPLaplace{c.solver_p, c.solver_epsilon};
  throw ConfigError("solver.equation must be laplace, drift or plaplace");
}

GridSolution run_solver(const ExperimentConfig& c, const std::string& equation_override) {
  if (c.solver_boundary.empty())
    throw ConfigError("solver.boundary (a catalog field name) is required");
  ScalarField g = parse_field(c.solver_boundary);
  if (g.dim() != 2) throw ConfigError("solver.boundary must name a 2D field");
  BVP bvp;
  bvp.a = c.solver_a;
  bvp.b = c.solver_b;
  bvp.nodes = c.solver_nodes;
  bvp.equation = solver_equation_from(c, equation_override);
  bvp.boundary = [g](double x, double y) { return g.value(Point(x, y)); };
  SolveOptions opts;
  opts.tol = c.solver_tol;
  opts.max_iter = c.solver_max_iter;
  GridSolution sol = solve(bvp, opts);
  std::cerr << "solver: " << c.solver_nodes << "x" << c.solver_nodes
            << " grid converged, residual " << format_g17(sol.residual) << " after "
            << sol.iterations << " iterations\n";
  return sol;
}

/// Builds the experiment field; "solve:<equation>" runs the solver first.
ScalarField build_field(const ExperimentConfig& c, std::optional<GridSolution>* grid_out) {
  if (c.field_spec.rfind("solve:", 0) == 0 || c.field_spec == "solve") {
    std::string override_name =
        c.field_spec == "solve" ? "" : c.field_spec.substr(std::string("solve:").size());
    GridSolution sol = run_solver(c, override_name);
    if (grid_out) *grid_out = sol;
    return to_field(sol);
  }
  return parse_field(c.field_spec);
}

bool is_harmonic(const ScalarField& f) {
  return std::holds_alternative<EquationLaplace>(f.natural_equation());
}

std::optional<Point> drift_vector(const ScalarField& f) {
  Equation eq = f.natural_equation();
  if (const auto* d = std::get_if<EquationDrift>(&eq)) return d->b;
  return std::nullopt;
}

// -------------------------------------------------------------------------
// verify battery
// -------------------------------------------------------------------------

std::vector<VerificationReport> verify_battery(const ScalarField& field,
                                               const ExperimentConfig& cfg,
                                               const RadialProfile& profile) {
  const QuadOptions quad = quad_from(cfg);
  const Point center = center_from(cfg, field.dim());
  const auto radii = cfg.radii();
  const bool harmonic = is_harmonic(field);
  const auto drift_b = drift_vector(field);
  const bool annular = norm(center) <= 1e-15 && field.inner_cutoff() > 0.0;
  const bool has_equation = !std::holds_alternative<EquationNone>(field.natural_equation());

  // Grid-backed fields carry O(h^2) interpolation error; the tolerances
  // relax to that scale and the report shows the relaxed values.
  const double hgrid = field.discretization_scale();
  const double grid_floor = hgrid > 0.0 ? hgrid * hgrid : 0.0;
  auto relaxed = [&](double configured, double factor) {
    return std::max(configured, factor * grid_floor);
  };
  Tolerances tol = cfg.tol;
  tol.monotone = relaxed(tol.monotone, 10.0);
  tol.harnack = relaxed(tol.harnack, 10.0);
  tol.representation = relaxed(tol.representation, 50.0);
  tol.vanishing = relaxed(tol.vanishing, 50.0);
  tol.scaling = relaxed(tol.scaling, 50.0);
  tol.rellich = relaxed(tol.rellich, 50.0);
  tol.rellich_general = relaxed(tol.rellich_general, 50.0);
  tol.growth = relaxed(tol.growth, 50.0);

  std::vector<VerificationReport> reports;
  auto guarded = [&](const char* what, auto&& fn) {
    try {
      fn();
    } catch (const DegenerateError& e) {
      reports.push_back(make_report(what, 1.0, 0.0, 0.0, std::string("DEGENERATE: ") + e.what()));
    }
  };

  guarded("identity", [&] {
    for (auto& rep : identity_checks(profile, harmonic)) reports.push_back(std::move(rep));
  });

  if (harmonic) {
    guarded("monotone_F", [&] { reports.push_back(check_monotone_F(profile, tol.monotone)); });
  }

  const double s = radii.front(), t = radii.back();
  guarded("harnack:mass", [&] { reports.push_back(check_harnack(profile, s, t, tol.harnack)); });
  if (harmonic) {
    guarded("harnack:averaged",
            [&] { reports.push_back(check_harnack_averaged(profile, s, t, tol.harnack)); });
  }

  guarded("representation_I",
          [&] { reports.push_back(representation_I(profile, s, t, tol.representation)); });

  if (harmonic) {
    guarded("vanishing_order",
            [&] { reports.push_back(vanishing_order(profile, t, tol.vanishing).report); });
  }

  // Rellich-Necas residuals at low/mid/high radii (C^2 fields on full balls).
  if (has_equation && !annular) {
    for (double r : {radii.front(), radii[radii.size() / 2], radii.back()}) {
      auto res = rellich_necas_residual(field, center, r, quad);
      reports.push_back(make_report("rellich_necas:general", res.general, 0.0,
                                    tol.rellich_general * std::max(1.0, res.scale),
                                    "r=" + format_g17(r), r));
      if (harmonic) {
        reports.push_back(make_report("rellich_necas:harmonic_form", res.harmonic_form, 0.0,
                                      tol.rellich * std::max(1.0, res.scale),
                                      "r=" + format_g17(r), r));
      }
    }
  }

  // Scaling law; radii are chosen so both B_r and B_{tau r} stay sampled.
  // The check scales about the origin, so the field must admit balls there.
  {
    const double tau = cfg.scaling_tau;
    double hi = t / std::max(tau, 1.0);
    double lo = s / std::min(tau, 1.0);
    Point origin;
    origin.n = field.dim();
    if (!field.ball_admissible(origin, hi * std::max(tau, 1.0))) {
      reports.push_back(make_report("scaling", 0.0, 0.0, 0.0,
                                    "SKIPPED: field domain has no balls about the origin"));
    } else if (lo < hi) {
      std::vector<double> srad{lo, std::sqrt(lo * hi), hi};
      std::vector<FrequencyKind> kinds{FrequencyKind::classical, FrequencyKind::drift};
      if (cfg.p) {
        kinds.push_back(FrequencyKind::p_power);
        kinds.push_back(FrequencyKind::p_tilde);
      }
      for (auto kind : kinds) {
        guarded("scaling", [&] {
          reports.push_back(check_scaling(field, tau, srad, kind, cfg.p, tol.scaling, quad));
        });
      }
    } else {
      reports.push_back(make_report("scaling", 0.0, 0.0, 0.0,
                                    "SKIPPED: tau incompatible with the radius range"));
    }
  }

  if (drift_b) {
    double m = cfg.drift_m > 0.0 ? cfg.drift_m : norm(*drift_b);
    DriftConstants constants = drift_constants(m, cfg.drift_cp, field.dim(), cfg.drift_safety);
    if (t > constants.r2 * (1.0 + 1e-12))
      throw ConfigError("drift verification: radii extend to " + format_g17(t) +
                        " beyond r2 = " + format_g17(constants.r2) +
                        "; shrink radii.stop (the bound is not silently clipped)");
    guarded("drift", [&] {
      for (auto& rep : check_growth_bound(profile, constants, tol.growth))
        reports.push_back(std::move(rep));
    });
  }

  if (cfg.poincare_enabled || field.name().rfind("ramp", 0) == 0) {
    auto pr = poincare_ratio(field, center, t, cfg.poincare_gamma0, cfg.poincare_cp, quad);
    reports.push_back(pr.report);
  }

  return reports;
}

// -------------------------------------------------------------------------
// commands
// -------------------------------------------------------------------------

namespace fs = std::filesystem;

std::string out_path(const std::string& out_dir, const std::string& name) {
  return (fs::path(out_dir) / name).string();
}

int exit_from_reports(const std::vector<VerificationReport>& reports) {
  for (const auto& r : reports)
    if (!r.passed) return kExitCheckFailed;
  return kExitOk;
}

int cmd_describe(const ExperimentConfig& cfg) {
  std::cout << "field catalog:\n";
  for (const auto& line : field_catalog()) std::cout << "  " << line << "\n";

  std::optional<GridSolution> grid;
  ScalarField field = build_field(cfg, &grid);
  std::cout << "\nconfigured field: " << field.name() << " (n=" << field.dim() << ")\n";

  Equation eq = field.natural_equation();
  const char* eq_name = std::holds_alternative<EquationLaplace>(eq)    ? "laplace"
                        : std::holds_alternative<EquationDrift>(eq)    ? "drift"
                        : std::holds_alternative<EquationPLaplace>(eq) ? "plaplace"
                                                                       : "none";
  std::cout << "equation: " << eq_name << "\n";
  if (std::holds_alternative<EquationNone>(eq)) {
    std::cout << "residual spot-checks: not applicable\n";
    return kExitOk;
  }

  std::cout << "residual spot-checks:\n";
  Point center = center_from(cfg, field.dim());
  const double rr = 0.5 * (cfg.radius_start + cfg.radius_stop);
  std::vector<Point> probes;
  if (field.dim() == 2) {
    probes = {center + Point(rr, 0.0), center + Point(0.0, -0.7 * rr),
              center + Point(0.6 * rr, 0.6 * rr)};
  } else {
    probes = {center + Point(rr, 0.0, 0.0), center + Point(0.0, -0.7 * rr, 0.0),
              center + Point(0.4 * rr, 0.4 * rr, 0.4 * rr)};
  }
  for (const auto& x : probes) {
    std::cout << "  at (";
    for (int i = 0; i < field.dim(); ++i) std::cout << (i ? "," : "") << format_g17(x[i]);
    std::cout << "): ";
    try {
      std::cout << "residual = " << format_g17(pde_residual(field, x, eq)) << "\n";
    } catch (const Error& e) {
      std::cout << "unavailable (" << e.what() << ")\n";
    }
  }
  return kExitOk;
}

int cmd_sweep(const ExperimentConfig& cfg, const std::string& out_dir) {
  std::optional<GridSolution> grid;
  ScalarField field = build_field(cfg, &grid);
  RadialProfile profile = sweep_profile(field, center_from(cfg, field.dim()), cfg.radii(),
                                        cfg.p, quad_from(cfg));
  write_text_file(out_path(out_dir, cfg.out_csv), profile_csv(profile));
  int failures = 0;
  for (const auto& s : profile.samples)
    if (!s.ok) ++failures;
  if (failures > 0)
    std::cerr << "sweep: " << failures << " radii failed (recorded in the CSV)\n";
  std::cout << "sweep: wrote " << out_path(out_dir, cfg.out_csv) << "\n";
  return kExitOk;
}

int cmd_verify(const ExperimentConfig& cfg, const std::string& out_dir) {
  std::optional<GridSolution> grid;
  ScalarField field = build_field(cfg, &grid);
  RadialProfile profile = sweep_profile(field, center_from(cfg, field.dim()), cfg.radii(),
                                        cfg.p, quad_from(cfg));
  auto reports = verify_battery(field, cfg, profile);
  write_text_file(out_path(out_dir, cfg.out_csv), profile_csv(profile));
  write_text_file(out_path(out_dir, cfg.out_report), render_report(reports));
  std::cout << "verify: wrote " << out_path(out_dir, cfg.out_report) << "\n";
  return exit_from_reports(reports);
}

int cmd_solve(const ExperimentConfig& cfg, const std::string& out_dir,
              const std::string& dump_grid) {
  std::string override_name;
  if (cfg.field_spec.rfind("solve:", 0) == 0)
    override_name = cfg.field_spec.substr(std::string("solve:").size());
  GridSolution sol = run_solver(cfg, override_name);
  // --dump-grid is used verbatim; the config path lands in the out dir
  std::string grid_path =
      !dump_grid.empty() ? dump_grid
                         : (cfg.out_grid.empty() ? "" : out_path(out_dir, cfg.out_grid));
  if (!grid_path.empty()) {
    save_grid(sol, grid_path);
    std::cout << "solve: wrote " << grid_path << "\n";
  }
  if (cfg.solve_then.empty()) return kExitOk;

  ScalarField field = to_field(sol);
  RadialProfile profile = sweep_profile(field, center_from(cfg, field.dim()), cfg.radii(),
                                        cfg.p, quad_from(cfg));
  write_text_file(out_path(out_dir, cfg.out_csv), profile_csv(profile));
  if (cfg.solve_then == "sweep") {
    std::cout << "solve: wrote " << out_path(out_dir, cfg.out_csv) << "\n";
    return kExitOk;
  }
  auto reports = verify_battery(field, cfg, profile);
  write_text_file(out_path(out_dir, cfg.out_report), render_report(reports));
  std::cout << "solve: wrote " << out_path(out_dir, cfg.out_report) << "\n";
  return exit_from_reports(reports);
}

int cmd_doubling(const ExperimentConfig& cfg, const std::string& out_dir) {
  if (!cfg.p) throw ConfigError("doubling requires freq.p in the config");
  std::optional<GridSolution> grid;
  ScalarField field = build_field(cfg, &grid);
  RadialProfile profile = sweep_profile(field, center_from(cfg, field.dim()), cfg.radii(),
                                        cfg.p, quad_from(cfg));
  std::vector<VerificationReport> reports;
  try {
    WeakDoubling wd = check_weak_doubling(profile);
    reports.push_back(wd.report);
    std::cout << "doubling: r* = " << format_g17(wd.r_star)
              << " (r*/r_b = " << format_g17(wd.r_star / profile.samples.front().r) << ")\n";
  } catch (const DegenerateError& e) {
    reports.push_back(
        make_report("weak_doubling", 1.0, 0.0, 0.0, std::string("DEGENERATE: ") + e.what()));
  }
  write_text_file(out_path(out_dir, cfg.out_csv), profile_csv(profile));
  write_text_file(out_path(out_dir, cfg.out_report), render_report(reports));
  return exit_from_reports(reports);
}

}  // namespace

int run_command(const std::string& command, const ExperimentConfig& config,
                const std::string& out_dir, const std::string& dump_grid) {
  try {
    fs::create_directories(out_dir.empty() ? "." : out_dir);
    const std::string dir = out_dir.empty() ? "." : out_dir;
    if (command == "describe") return cmd_describe(config);
    if (command == "sweep") return cmd_sweep(config, dir);
    if (command == "verify") return cmd_verify(config, dir);
    if (command == "solve") return cmd_solve(config, dir, dump_grid);
    if (command == "doubling") return cmd_doubling(config, dir);
    std::cerr << "unknown command '" << command << "'\n";
    return kExitUsage;
  } catch (const NonconvergenceError& e) {
    std::cerr << "solver did not converge: " << e.what()
              << " (last residual " << format_g17(e.last_residual) << ")\n";
    return kExitNonconvergence;
  } catch (const DegenerateError& e) {
    std::cerr << "degenerate check: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace freqlab

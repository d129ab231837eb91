#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace freqlab {

/// Flat key = value config with [section] headers; keys are addressed as
/// "section.key". '#' and ';' start comments.
class KeyValueConfig {
 public:
  static KeyValueConfig parse_file(const std::string& path);
  static KeyValueConfig parse_string(const std::string& text);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;  // comma separated

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// Verification tolerances, all > 0; defaults match the acceptance targets.
struct Tolerances {
  double identity_factor = 8.0;  // multiplies the O(dr^2) stencil bound
  double monotone = 1e-9;
  double harnack = 1e-9;
  double representation = 1e-6;
  double vanishing = 1e-9;
  double growth = 1e-6;
  double scaling = 1e-9;
  double rellich = 1e-10;  // relative to r * grad_sq_surf
  double rellich_general = 1e-8;
};

/// Parsed and validated experiment description for the CLI front end.
struct ExperimentConfig {
  std::string field_spec;  // catalog name or "solve:<equation>"
  std::vector<double> center{0.0, 0.0};
  double radius_start = 0.1;
  double radius_stop = 1.0;
  int radius_count = 20;
  bool geometric_radii = true;
  std::optional<double> p;
  double scaling_tau = 2.0;

  int quad_order2d = 128;
  int quad_order3d = 32;
  int quad_radial = 64;

  Tolerances tol;

  // drift constants inputs; m_bound <= 0 means "take |b| from the field"
  double drift_m = 0.0;
  double drift_cp = 1.0;
  double drift_safety = 0.9;

  // Poincare check
  bool poincare_enabled = false;
  double poincare_gamma0 = 0.5;
  double poincare_cp = 1.0;

  // solver section (used when field_spec starts with "solve:")
  std::string solver_equation = "laplace";
  double solver_a = 0.0;
  double solver_b = 1.0;
  int solver_nodes = 129;
  std::string solver_boundary;  // catalog field evaluated on the boundary
  std::vector<double> solver_bvec{0.0, 0.0};
  double solver_p = 2.0;
  double solver_epsilon = 1e-6;
  double solver_tol = 1e-10;
  int solver_max_iter = 20000;
  std::string solve_then;  // "", "sweep" or "verify"

  std::string out_csv = "profile.csv";
  std::string out_report = "report.txt";
  std::string out_grid;  // optional --dump-grid / output.grid

  /// Radius grid, geometric by default (equal ratios).
  std::vector<double> radii() const;

  /// Builds from a parsed file, validating invariants (start < stop,
  /// count >= 3, tolerances > 0). Throws ConfigError.
  static ExperimentConfig from_config(const KeyValueConfig& kv);
};

}  // namespace freqlab

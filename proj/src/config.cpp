#include "freqlab/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "freqlab/errors.hpp"

namespace freqlab {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_string(os.str());
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    cfg.values_[section.empty() ? key : section + "." + key] = value;
  }
  return cfg;
}

bool KeyValueConfig::has(const std::string& key) const { return values_.count(key) > 0; }

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::string KeyValueConfig::require_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required config key '" + key + "'");
  return it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    size_t pos = 0;
    double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument(it->second);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse number '" + it->second + "'");
  }
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
  double v = get_double(key, fallback);
  if (std::abs(v - std::round(v)) > 1e-9)
    throw ConfigError("config key '" + key + "': expected an integer");
  return static_cast<int>(std::llround(v));
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return {};
  std::vector<double> out;
  std::string cur;
  std::istringstream in(it->second);
  while (std::getline(in, cur, ',')) {
    cur = trim(cur);
    try {
      size_t pos = 0;
      out.push_back(std::stod(cur, &pos));
      if (pos != cur.size()) throw std::invalid_argument(cur);
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': cannot parse number '" + cur + "'");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<double> ExperimentConfig::radii() const {
  std::vector<double> out;
  out.reserve(radius_count);
  if (geometric_radii) {
    double q = std::pow(radius_stop / radius_start, 1.0 / (radius_count - 1));
    for (int i = 0; i < radius_count; ++i) out.push_back(radius_start * std::pow(q, i));
  } else {
    double d = (radius_stop - radius_start) / (radius_count - 1);
    for (int i = 0; i < radius_count; ++i) out.push_back(radius_start + i * d);
  }
  out.back() = radius_stop;  // exact endpoint regardless of rounding
  return out;
}

ExperimentConfig ExperimentConfig::from_config(const KeyValueConfig& kv) {
  ExperimentConfig c;
  c.field_spec = kv.require_string("field.spec");
  if (kv.has("field.center")) {
    c.center = kv.get_doubles("field.center");
    if (c.center.size() != 2 && c.center.size() != 3)
      throw ConfigError("field.center must have 2 or 3 components");
  }

  c.radius_start = kv.get_double("radii.start", c.radius_start);
  c.radius_stop = kv.get_double("radii.stop", c.radius_stop);
  c.radius_count = kv.get_int("radii.count", c.radius_count);
  std::string grid = kv.get_string("radii.grid", "geometric");
  if (grid == "geometric") {
    c.geometric_radii = true;
  } else if (grid == "linear") {
    c.geometric_radii = false;
  } else {
    throw ConfigError("radii.grid must be 'geometric' or 'linear'");
  }
  if (!(c.radius_start < c.radius_stop))
    throw ConfigError("radii.start must be < radii.stop");
  if (!(c.radius_start > 0.0) && c.geometric_radii)
    throw ConfigError("geometric radius grids require radii.start > 0");
  if (c.radius_count < 3) throw ConfigError("radii.count must be >= 3");

  if (kv.has("freq.p")) {
    double p = kv.get_double("freq.p", 0.0);
    if (!(p > 1.0)) throw ConfigError("freq.p must be > 1");
    c.p = p;
  }
  c.scaling_tau = kv.get_double("freq.tau", c.scaling_tau);
  if (!(c.scaling_tau > 0.0)) throw ConfigError("freq.tau must be > 0");

  c.quad_order2d = kv.get_int("quad.order2d", c.quad_order2d);
  c.quad_order3d = kv.get_int("quad.order3d", c.quad_order3d);
  c.quad_radial = kv.get_int("quad.radial_nodes", c.quad_radial);

  c.tol.identity_factor = kv.get_double("tol.identity_factor", c.tol.identity_factor);
  c.tol.monotone = kv.get_double("tol.monotone", c.tol.monotone);
  c.tol.harnack = kv.get_double("tol.harnack", c.tol.harnack);
  c.tol.representation = kv.get_double("tol.representation", c.tol.representation);
  c.tol.vanishing = kv.get_double("tol.vanishing", c.tol.vanishing);
  c.tol.growth = kv.get_double("tol.growth", c.tol.growth);
  c.tol.scaling = kv.get_double("tol.scaling", c.tol.scaling);
  c.tol.rellich = kv.get_double("tol.rellich", c.tol.rellich);
  c.tol.rellich_general = kv.get_double("tol.rellich_general", c.tol.rellich_general);
  for (double t : {c.tol.identity_factor, c.tol.monotone, c.tol.harnack, c.tol.representation,
                   c.tol.vanishing, c.tol.growth, c.tol.scaling, c.tol.rellich,
                   c.tol.rellich_general}) {
    if (!(t > 0.0)) throw ConfigError("tolerances must be > 0");
  }

  c.drift_m = kv.get_double("drift.M", c.drift_m);
  c.drift_cp = kv.get_double("drift.C_p", c.drift_cp);
  c.drift_safety = kv.get_double("drift.safety", c.drift_safety);

  c.poincare_enabled = kv.get_bool("poincare.enabled", c.poincare_enabled);
  c.poincare_gamma0 = kv.get_double("poincare.gamma0", c.poincare_gamma0);
  c.poincare_cp = kv.get_double("poincare.C_p", c.poincare_cp);

  c.solver_equation = kv.get_string("solver.equation", c.solver_equation);
  c.solver_a = kv.get_double("solver.a", c.solver_a);
  c.solver_b = kv.get_double("solver.b", c.solver_b);
  c.solver_nodes = kv.get_int("solver.nodes", c.solver_nodes);
  c.solver_boundary = kv.get_string("solver.boundary", c.solver_boundary);
  if (kv.has("solver.b_vec")) c.solver_bvec = kv.get_doubles("solver.b_vec");
  c.solver_p = kv.get_double("solver.p", c.solver_p);
  c.solver_epsilon = kv.get_double("solver.epsilon", c.solver_epsilon);
  c.solver_tol = kv.get_double("solver.tol", c.solver_tol);
  c.solver_max_iter = kv.get_int("solver.max_iter", c.solver_max_iter);
  c.solve_then = kv.get_string("solver.then", c.solve_then);
  if (!c.solve_then.empty() && c.solve_then != "sweep" && c.solve_then != "verify")
    throw ConfigError("solver.then must be empty, 'sweep' or 'verify'");

  c.out_csv = kv.get_string("output.csv", c.out_csv);
  c.out_report = kv.get_string("output.report", c.out_report);
  c.out_grid = kv.get_string("output.grid", c.out_grid);
  return c;
}

}  // namespace freqlab

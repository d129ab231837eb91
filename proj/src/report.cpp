#include "freqlab/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "freqlab/errors.hpp"

namespace freqlab {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

void append_cell(std::string& row, const std::optional<double>& v) {
  row += ',';
  if (v) row += format_g17(*v);
}

}  // namespace

std::string profile_csv(const RadialProfile& profile) {
  std::string out = "r,I,D,H,F,F_drift,Ip,Dp,F_p,F_p_tilde,rn_residual\n";
  for (const auto& s : profile.samples) {
    std::string row = format_g17(s.r);
    if (!s.ok) {
      out += row + ",,,,,,,,,,\n";  // failed sample: radius only
      continue;
    }
    append_cell(row, s.mass);
    append_cell(row, s.dirichlet);
    append_cell(row, s.flux);
    append_cell(row, frequency_value(s, FrequencyKind::classical));
    append_cell(row, frequency_value(s, FrequencyKind::drift));
    append_cell(row, s.mass_p);
    append_cell(row, s.dirichlet_p);
    if (s.p) {
      append_cell(row, frequency_value(s, FrequencyKind::p_power));
      append_cell(row, frequency_value(s, FrequencyKind::p_tilde));
    } else {
      row += ",,";
    }
    // harmonic-form Rellich-Necas residual from the sample moments
    double rn = std::abs(s.r * s.grad_sq_surf - 2.0 * s.r * s.normal_sq_surf -
                         (s.n - 2.0) * s.dirichlet);
    append_cell(row, rn);
    out += row + "\n";
  }
  return out;
}

std::string render_report(std::vector<VerificationReport> reports) {
  std::stable_sort(reports.begin(), reports.end(),
                   [](const VerificationReport& a, const VerificationReport& b) {
                     if (a.name != b.name) return a.name < b.name;
                     return a.sort_radius < b.sort_radius;
                   });
  std::string out = "# freqlab verification report\n";
  out += "# name\tlhs\trhs\tmargin\ttolerance\tstatus\tdetails\n";
  size_t passed = 0;
  for (const auto& r : reports) {
    if (r.passed) ++passed;
    out += r.name + '\t' + format_g17(r.lhs) + '\t' + format_g17(r.rhs) + '\t' +
           format_g17(r.margin) + '\t' + format_g17(r.tolerance) + '\t' +
           (r.passed ? "PASS" : "FAIL") + '\t' + r.details + '\n';
  }
  std::ostringstream summary;
  summary << "summary: " << (passed == reports.size() ? "PASS " : "FAIL ") << passed << "/"
          << reports.size() << " checks passed\n";
  return out + summary.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

}  // namespace freqlab

#pragma once

#include <string>
#include <vector>

#include "freqlab/frequency.hpp"

namespace freqlab {

/// CSV export of a profile: header
/// r,I,D,H,F,F_drift,Ip,Dp,F_p,F_p_tilde,rn_residual
/// one row per radius, 17 significant digits, empty cells for undefined
/// values. rn_residual is the harmonic-form Rellich-Necas residual built
/// from the sample moments. Byte-deterministic for identical profiles.
std::string profile_csv(const RadialProfile& profile);

/// Structured-text report: one tab-separated line per check
/// (name, lhs, rhs, margin, tolerance, PASS/FAIL, details), ordered by
/// (name, radius), then a "summary: PASS|FAIL k/m" line with k the number
/// of passing checks. Deterministic bytes for identical report lists.
std::string render_report(std::vector<VerificationReport> reports);

void write_text_file(const std::string& path, const std::string& content);

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_g17(double v);

}  // namespace freqlab

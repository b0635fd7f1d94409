#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "cryf/analysis.hpp"

namespace cryf {

inline constexpr std::string_view kDiagnosticsCsvHeader =
    "t,E,vol,intR,intR2,var,dEdt_formula,min_u,min_R,max_R,dt";

/// Shortest-round-trip-safe decimal: 17 significant digits, locale independent.
std::string format_double(double value);

void write_diagnostics_csv(std::ostream& out, const std::vector<DiagnosticsRecord>& records);

/// Inverse of write_diagnostics_csv (the n field is not stored and comes back as 1).
/// Throws ConfigError on a malformed header or row.
std::vector<DiagnosticsRecord> read_diagnostics_csv(std::istream& in);

}  // namespace cryf

#include "cryf/diagnostics_io.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "cryf/errors.hpp"

namespace cryf {

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
  (void)ec;
  return std::string(buf.data(), ptr);
}

void write_diagnostics_csv(std::ostream& out, const std::vector<DiagnosticsRecord>& records) {
  out << kDiagnosticsCsvHeader << '\n';
  for (const DiagnosticsRecord& r : records) {
    const std::array<double, 11> row = {r.t,     r.E,     r.vol,   r.intR,  r.intR2, r.var,
                                        r.dE_dt_formula, r.min_u, r.min_R, r.max_R, r.dt_used};
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out << ',';
      out << format_double(row[c]);
    }
    out << '\n';
  }
}

std::vector<DiagnosticsRecord> read_diagnostics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kDiagnosticsCsvHeader) {
    throw ConfigError("diagnostics csv: unexpected header '" + line + "'");
  }
  std::vector<DiagnosticsRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::array<double, 11> row{};
    std::size_t col = 0;
    const char* p = line.data();
    const char* end = p + line.size();
    while (col < row.size()) {
      const auto [next, ec] = std::from_chars(p, end, row[col]);
      if (ec != std::errc()) break;
      ++col;
      p = next;
      if (p == end) break;
      if (*p != ',') break;
      ++p;
    }
    if (col != row.size() || p != end) {
      std::ostringstream msg;
      msg << "diagnostics csv: malformed row on line " << line_no;
      throw ConfigError(msg.str());
    }
    DiagnosticsRecord r;
    r.t = row[0];
    r.E = row[1];
    r.vol = row[2];
    r.intR = row[3];
    r.intR2 = row[4];
    r.var = row[5];
    r.dE_dt_formula = row[6];
    r.min_u = row[7];
    r.min_R = row[8];
    r.max_R = row[9];
    r.dt_used = row[10];
    records.push_back(r);
  }
  return records;
}

}  // namespace cryf

#include "cryf/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "cryf/errors.hpp"

namespace cryf {

namespace {

struct Entry {
  std::string value;
  int line = 0;
  int key_column = 0;
  int value_column = 0;
};

[[noreturn]] void fail_at(int line, int column, const std::string& what) {
  std::ostringstream msg;
  msg << "config line " << line << ", column " << column << ": " << what;
  throw ConfigError(msg.str());
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const Entry& e) {
  double v = 0.0;
  const char* begin = e.value.data();
  const char* end = begin + e.value.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    fail_at(e.line, e.value_column, "expected a finite number, got '" + e.value + "'");
  }
  return v;
}

long long to_integer(const Entry& e) {
  long long v = 0;
  const char* begin = e.value.data();
  const char* end = begin + e.value.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    fail_at(e.line, e.value_column, "expected an integer, got '" + e.value + "'");
  }
  return v;
}

int to_int(const Entry& e) {
  const long long v = to_integer(e);
  if (v < -(1LL << 30) || v > (1LL << 30)) fail_at(e.line, e.value_column, "integer out of range");
  return static_cast<int>(v);
}

bool to_bool(const Entry& e) {
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  fail_at(e.line, e.value_column, "expected true or false, got '" + e.value + "'");
}

template <typename T, typename Convert>
std::vector<T> to_list(const Entry& e, Convert convert) {
  std::vector<T> out;
  std::string_view rest = e.value;
  int offset = 0;
  while (true) {
    const auto comma = rest.find(',');
    const std::string_view raw = rest.substr(0, comma);
    const std::string_view item = trim(raw);
    if (item.empty()) fail_at(e.line, e.value_column + offset, "empty list item");
    Entry sub{std::string(item), e.line, e.key_column,
              e.value_column + offset + static_cast<int>(raw.find(item.front()))};
    out.push_back(convert(sub));
    if (comma == std::string_view::npos) break;
    offset += static_cast<int>(comma) + 1;
    rest = rest.substr(comma + 1);
  }
  return out;
}

void require(bool ok, const Entry& e, const std::string& what) {
  if (!ok) fail_at(e.line, e.value_column, what);
}

using Setter = std::function<void(RunConfig&, const Entry&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      // [geometry]
      {"geometry.N_x", [](RunConfig& c, const Entry& e) { c.grid.nx = to_int(e); }},
      {"geometry.N_y", [](RunConfig& c, const Entry& e) { c.grid.ny = to_int(e); }},
      {"geometry.N_z", [](RunConfig& c, const Entry& e) { c.grid.nz = to_int(e); }},
      // [initial]
      {"initial.preset",
       [](RunConfig& c, const Entry& e) {
         const auto p = parse_preset(e.value);
         require(p.has_value(), e,
                 "unknown preset '" + e.value +
                     "' (expected constant, single_mode_y, single_mode_x, random_smooth)");
         c.initial.preset = *p;
       }},
      {"initial.c",
       [](RunConfig& c, const Entry& e) {
         c.initial.c = to_double(e);
         require(c.initial.c > 0.0, e, "c must be positive");
       }},
      {"initial.epsilon",
       [](RunConfig& c, const Entry& e) {
         c.initial.epsilon = to_double(e);
         require(std::abs(c.initial.epsilon) < 1.0, e, "|epsilon| must be below 1");
       }},
      {"initial.seed",
       [](RunConfig& c, const Entry& e) {
         const long long s = to_integer(e);
         require(s >= 0, e, "seed must be non-negative");
         c.initial.seed = static_cast<std::uint64_t>(s);
       }},
      {"initial.amplitude",
       [](RunConfig& c, const Entry& e) {
         c.initial.amplitude = to_double(e);
         require(c.initial.amplitude >= 0.0 && c.initial.amplitude <= 0.9, e,
                 "amplitude must lie in [0, 0.9]");
       }},
      {"initial.smoothing_passes",
       [](RunConfig& c, const Entry& e) {
         c.initial.smoothing_passes = to_int(e);
         require(c.initial.smoothing_passes >= 0, e, "smoothing_passes must be >= 0");
       }},
      // [flow]
      {"flow.t_end", [](RunConfig& c, const Entry& e) { c.flow.t_end = to_double(e); }},
      {"flow.dt_init", [](RunConfig& c, const Entry& e) { c.flow.dt_init = to_double(e); }},
      {"flow.dt_min", [](RunConfig& c, const Entry& e) { c.flow.dt_min = to_double(e); }},
      {"flow.dt_max", [](RunConfig& c, const Entry& e) { c.flow.dt_max = to_double(e); }},
      {"flow.safety", [](RunConfig& c, const Entry& e) { c.flow.safety = to_double(e); }},
      {"flow.err_tol", [](RunConfig& c, const Entry& e) { c.flow.err_tol = to_double(e); }},
      {"flow.u_floor", [](RunConfig& c, const Entry& e) { c.flow.u_floor = to_double(e); }},
      {"flow.record_every", [](RunConfig& c, const Entry& e) { c.flow.record_every = to_int(e); }},
      {"flow.snapshot_every",
       [](RunConfig& c, const Entry& e) { c.flow.snapshot_every = to_int(e); }},
      // [analysis]
      {"analysis.delta",
       [](RunConfig& c, const Entry& e) {
         c.analysis.delta = to_double(e);
         require(c.analysis.delta > 0.0, e, "delta must be positive");
       }},
      {"analysis.var_tol", [](RunConfig& c, const Entry& e) { c.analysis.var_tol = to_double(e); }},
      {"analysis.volume_rate_bound",
       [](RunConfig& c, const Entry& e) { c.analysis.volume_rate_bound = to_double(e); }},
      {"analysis.mean_curvature_rate_bound",
       [](RunConfig& c, const Entry& e) { c.analysis.mean_curvature_rate_bound = to_double(e); }},
      {"analysis.curvature_evolution_bound",
       [](RunConfig& c, const Entry& e) { c.analysis.curvature_evolution_bound = to_double(e); }},
      {"analysis.dEdt_bound", [](RunConfig& c, const Entry& e) { c.analysis.dEdt_bound = to_double(e); }},
      {"analysis.invariance_bound",
       [](RunConfig& c, const Entry& e) { c.analysis.invariance_bound = to_double(e); }},
      {"analysis.commute_bound",
       [](RunConfig& c, const Entry& e) { c.analysis.commute_bound = to_double(e); }},
      {"analysis.r2_coefficient",
       [](RunConfig& c, const Entry& e) { c.analysis.r2_coefficient = to_double(e); }},
      {"analysis.grids",
       [](RunConfig& c, const Entry& e) {
         c.analysis.grids = to_list<int>(e, to_int);
         for (int g : c.analysis.grids) require(g >= 4, e, "every grid size must be >= 4");
       }},
      {"analysis.convergence_delta",
       [](RunConfig& c, const Entry& e) {
         c.analysis.convergence_delta = to_double(e);
         require(c.analysis.convergence_delta > 0.0, e, "convergence_delta must be positive");
       }},
      {"analysis.min_order_untwisted",
       [](RunConfig& c, const Entry& e) { c.analysis.min_order_untwisted = to_double(e); }},
      {"analysis.min_order_twisted",
       [](RunConfig& c, const Entry& e) { c.analysis.min_order_twisted = to_double(e); }},
      // [soliton]
      {"soliton.sigma",
       [](RunConfig& c, const Entry& e) {
         if (e.value == "constant") {
           c.soliton.sigma = SigmaKind::Constant;
         } else if (e.value == "linear") {
           c.soliton.sigma = SigmaKind::Linear;
         } else if (e.value == "exponential") {
           c.soliton.sigma = SigmaKind::Exponential;
         } else {
           fail_at(e.line, e.value_column,
                   "unknown sigma '" + e.value + "' (expected constant, linear, exponential)");
         }
       }},
      {"soliton.sigma_rate", [](RunConfig& c, const Entry& e) { c.soliton.sigma_rate = to_double(e); }},
      {"soliton.psi_rate", [](RunConfig& c, const Entry& e) { c.soliton.psi_rate = to_double(e); }},
      {"soliton.times",
       [](RunConfig& c, const Entry& e) {
         c.soliton.times = to_list<double>(e, to_double);
         for (double t : c.soliton.times) require(t >= 0.0, e, "sample times must be >= 0");
       }},
      {"soliton.delta",
       [](RunConfig& c, const Entry& e) {
         c.soliton.delta = to_double(e);
         require(c.soliton.delta > 0.0, e, "delta must be positive");
       }},
      {"soliton.flow_tol", [](RunConfig& c, const Entry& e) { c.soliton.flow_tol = to_double(e); }},
      {"soliton.var_tol", [](RunConfig& c, const Entry& e) { c.soliton.var_tol = to_double(e); }},
      {"soliton.snap", [](RunConfig& c, const Entry& e) { c.soliton.snap = to_bool(e); }},
      {"soliton.sweep", [](RunConfig& c, const Entry& e) { c.soliton.sweep = to_bool(e); }},
      // [output]
      {"output.csv", [](RunConfig& c, const Entry& e) { c.output.csv = e.value; }},
      {"output.report", [](RunConfig& c, const Entry& e) { c.output.report = e.value; }},
      {"output.residuals", [](RunConfig& c, const Entry& e) { c.output.residuals = e.value; }},
      {"output.orders", [](RunConfig& c, const Entry& e) { c.output.orders = e.value; }},
      {"output.verdicts", [](RunConfig& c, const Entry& e) { c.output.verdicts = e.value; }},
      {"output.snapshot_prefix",
       [](RunConfig& c, const Entry& e) { c.output.snapshot_prefix = e.value; }},
  };
  return table;
}

bool known_section(std::string_view s) {
  return s == "geometry" || s == "initial" || s == "flow" || s == "analysis" || s == "soliton" ||
         s == "output";
}

}  // namespace

std::string_view to_string(SigmaKind kind) {
  switch (kind) {
    case SigmaKind::Constant:
      return "constant";
    case SigmaKind::Linear:
      return "linear";
    case SigmaKind::Exponential:
      return "exponential";
  }
  return "unknown";
}

RunConfig parse_config(std::string_view text) {
  std::map<std::string, Entry> entries;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string_view content = trim(line);
    if (content.empty()) continue;
    const int first_col = static_cast<int>(line.find(content.front())) + 1;

    if (content.front() == '[') {
      if (content.back() != ']') fail_at(line_no, first_col, "section header is missing ']'");
      section = std::string(trim(content.substr(1, content.size() - 2)));
      if (!known_section(section)) fail_at(line_no, first_col + 1, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail_at(line_no, first_col, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view raw_value = line.substr(eq + 1);
    const std::string_view value = trim(raw_value);
    if (key.empty()) fail_at(line_no, first_col, "missing key before '='");
    if (section.empty()) fail_at(line_no, first_col, "key '" + key + "' appears before any [section]");
    if (value.empty()) fail_at(line_no, static_cast<int>(eq) + 2, "missing value for '" + key + "'");

    const std::string full = section + "." + key;
    if (!setters().contains(full)) fail_at(line_no, first_col, "unknown key '" + key + "' in [" + section + "]");
    const int value_col = static_cast<int>(eq + 1 + raw_value.find(value.front())) + 1;
    Entry entry{std::string(value), line_no, first_col, value_col};
    if (const auto it = entries.find(full); it != entries.end()) {
      std::ostringstream msg;
      msg << "duplicate key '" << key << "' in [" << section << "] (first defined on line "
          << it->second.line << ")";
      fail_at(line_no, first_col, msg.str());
    }
    entries.emplace(full, std::move(entry));
  }

  RunConfig config;
  for (const auto& [name, entry] : entries) setters().at(name)(config, entry);

  for (const char* key : {"geometry.N_x", "geometry.N_y", "geometry.N_z"}) {
    if (!entries.contains(key)) {
      throw ConfigError(std::string("config: missing required key ") + key + " in [geometry]");
    }
  }
  try {
    config.grid.validate();
  } catch (const ConfigError& err) {
    const Entry& e = entries.at("geometry.N_z");
    fail_at(e.line, e.value_column, err.what());
  }
  try {
    config.flow.validate();
  } catch (const ConfigError& err) {
    int line = 0;
    for (const auto& [name, entry] : entries) {
      if (name.rfind("flow.", 0) == 0) line = std::max(line, entry.line);
    }
    if (line == 0) throw;
    fail_at(line, 1, err.what());
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace cryf

#include "cryf/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

#include "cryf/analysis.hpp"
#include "cryf/diagnostics_io.hpp"
#include "cryf/errors.hpp"
#include "cryf/flow.hpp"
#include "cryf/initial_data.hpp"
#include "cryf/manufactured.hpp"
#include "cryf/snapshot.hpp"

namespace cryf {

namespace {

namespace fs = std::filesystem;

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Creates the directory if needed and refuses to clobber existing files without overwrite.
fs::path output_path(const OutputTarget& out, const std::string& name) {
  std::error_code ec;
  fs::create_directories(out.dir, ec);
  if (ec || !fs::is_directory(out.dir)) {
    throw OutputError("cannot create output directory " + out.dir.string());
  }
  const fs::path path = out.dir / name;
  if (!out.overwrite && fs::exists(path)) {
    throw OutputError("output file " + path.string() + " exists (pass --overwrite to replace it)");
  }
  return path;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw OutputError("cannot open " + path.string() + " for writing");
  file << text;
  file.flush();
  if (!file) throw OutputError("write failed for " + path.string());
}

std::shared_ptr<const BaseGeometry> make_geometry(const GridSpec& grid) {
  return std::make_shared<const BaseGeometry>(grid);
}

ConformalState initial_state(const RunConfig& config) {
  auto geom = make_geometry(config.grid);
  return ConformalState(geom, make_initial(*geom, config.initial), 0.0);
}

double relative_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

double l2_error(const BaseGeometry& geom, const ScalarField& a, const ScalarField& b) {
  ScalarField diff(a.size());
  for (std::size_t p = 0; p < a.size(); ++p) diff[p] = a[p] - b[p];
  return std::sqrt(inner_product(geom, diff, diff));
}

std::function<double(double)> sigma_function(SigmaKind kind, double rate) {
  switch (kind) {
    case SigmaKind::Constant:
      return [](double) { return 1.0; };
    case SigmaKind::Linear:
      return [rate](double t) { return 1.0 + rate * t; };
    case SigmaKind::Exponential:
      return [rate](double t) { return std::exp(rate * t); };
  }
  return [](double) { return 1.0; };
}

std::string describe_sigma(SigmaKind kind, double rate) {
  std::ostringstream s;
  switch (kind) {
    case SigmaKind::Constant:
      s << "1";
      break;
    case SigmaKind::Linear:
      s << "1" << (rate < 0 ? "-" : "+") << std::abs(rate) << "*t";
      break;
    case SigmaKind::Exponential:
      s << "exp(" << rate << "*t)";
      break;
  }
  return s.str();
}

}  // namespace

std::vector<IdentityResidual> identity_residuals(const RunConfig& config) {
  const AnalysisConfig& a = config.analysis;
  const ConformalState state = initial_state(config);
  const DiagnosticsRecord rec = diagnose(state);
  const ScalarField curvature = webster_curvature(state, 0.0);
  std::vector<IdentityResidual> rows;

  const TimeWindow window = sample_window(state, a.delta);
  rows.push_back({"volume_rate", volume_rate_residual(window.records), a.volume_rate_bound});
  rows.push_back({"mean_curvature_rate", mean_curvature_rate_residual(window.records),
                  a.mean_curvature_rate_bound});
  rows.push_back({"curvature_evolution",
                  curvature_evolution_residual(state, a.delta, {0.0, a.r2_coefficient}),
                  a.curvature_evolution_bound});
  rows.push_back({"dEdt_vs_finite_difference",
                  relative_gap(dE_dt_finite_difference(window.records), rec.dE_dt_formula),
                  a.dEdt_bound});

  double scale_e = 0.0;
  double scale_r = 0.0;
  for (double sigma : {0.25, 2.5, 7.3}) {
    const ConformalState scaled = scale_state(state, sigma);
    scale_e = std::max(scale_e, std::abs(yamabe_quantity(scaled) - rec.E) / std::max(1.0, std::abs(rec.E)));
    const ScalarField r_scaled = webster_curvature(scaled, 0.0);
    double worst = 0.0;
    for (std::size_t p = 0; p < r_scaled.size(); ++p) {
      worst = std::max(worst, std::abs(r_scaled[p] - curvature[p] / sigma));
    }
    const double ref = curvature.max_abs() / sigma;
    scale_r = std::max(scale_r, ref > 0.0 ? worst / ref : worst);
  }
  rows.push_back({"scaling_invariance_E", scale_e, a.invariance_bound});
  rows.push_back({"scaling_curvature", scale_r, a.invariance_bound});

  double pull_dev = 0.0;
  double commute = 0.0;
  for (long long m : {1LL, 3LL, static_cast<long long>(config.grid.nz / 2)}) {
    const ConformalState pulled = pullback_state(state, m);
    const DiagnosticsRecord prec = diagnose(pulled);
    for (auto [x, y] : {std::pair{prec.E, rec.E}, std::pair{prec.vol, rec.vol},
                        std::pair{prec.intR, rec.intR}, std::pair{prec.intR2, rec.intR2}}) {
      pull_dev = std::max(pull_dev, std::abs(x - y) / std::max(1.0, std::abs(y)));
    }
    const ScalarField lhs = webster_curvature(pulled, 0.0);
    const ScalarField rhs = pullback_z_shift(state.geometry(), curvature, m);
    for (std::size_t p = 0; p < lhs.size(); ++p) commute = std::max(commute, std::abs(lhs[p] - rhs[p]));
  }
  rows.push_back({"pullback_invariance", pull_dev, a.invariance_bound});
  rows.push_back({"pullback_commute", commute, a.commute_bound});
  return rows;
}

std::vector<OrderRow> convergence_rows(const RunConfig& config) {
  const AnalysisConfig& a = config.analysis;
  if (a.grids.size() < 2) {
    throw ConfigError("convergence-study: [analysis] grids needs at least two grid sizes, got " +
                      std::to_string(a.grids.size()));
  }
  std::vector<OrderRow> rows;
  auto row = [&](const std::string& name, bool twisted) -> OrderRow& {
    for (OrderRow& r : rows) {
      if (r.name == name) return r;
    }
    rows.push_back({name, twisted, {}, {}, {}});
    return rows.back();
  };

  const double base_n = a.grids.front();
  for (int n_grid : a.grids) {
    auto geom = make_geometry({n_grid, n_grid, n_grid});
    auto add = [&](const std::string& name, bool twisted, double err) {
      OrderRow& r = row(name, twisted);
      r.grids.push_back(n_grid);
      r.errors.push_back(err);
    };

    for (const ManufacturedCase& c : manufactured_cases()) {
      const ScalarField f = geom->sample(c.f);
      add("sub_laplacian:" + c.name, c.twisted,
          l2_error(*geom, sub_laplacian_base(*geom, f), geom->sample(c.sub_laplacian)));
    }
    const WeightedCase wc = weighted_case();
    add("weighted_div_form:variable_weight", true,
        l2_error(*geom, weighted_div_form(*geom, geom->sample(wc.w), geom->sample(wc.f)),
                 geom->sample(wc.div_form)));
    const ScalarField theta = geom->sample(theta_case().f);
    add("frame_commutator:theta_m1", true,
        l2_error(*geom, frame_commutator_check(*geom, theta), geom->zeros()));

    InitialData mode;
    mode.preset = Preset::SingleModeY;
    mode.epsilon = 0.1;
    const ConformalState state(geom, make_initial(*geom, mode));
    add("curvature_evolution:single_mode_y", true,
        curvature_evolution_residual(state, a.convergence_delta));
    const double joint_delta = a.delta * base_n / n_grid;
    const TimeWindow window = sample_window(state, joint_delta);
    add("volume_rate:single_mode_y(joint h,delta)", true, volume_rate_residual(window.records));
    add("mean_curvature_rate:single_mode_y(joint h,delta)", true,
        mean_curvature_rate_residual(window.records));
  }

  for (OrderRow& r : rows) {
    for (std::size_t s = 0; s + 1 < r.errors.size(); ++s) {
      const double ratio = static_cast<double>(r.grids[s + 1]) / r.grids[s];
      double order = std::numeric_limits<double>::infinity();
      if (r.errors[s + 1] > 0.0 && r.errors[s] > 0.0) {
        order = std::log(r.errors[s] / r.errors[s + 1]) / std::log(ratio);
      } else if (r.errors[s + 1] > 0.0) {
        order = -std::numeric_limits<double>::infinity();
      }
      r.orders.push_back(order);
    }
  }
  return rows;
}

std::vector<NamedFamily> soliton_families(const RunConfig& config) {
  const SolitonConfig& sc = config.soliton;
  auto geom = make_geometry(config.grid);
  std::vector<NamedFamily> families;
  if (!sc.sweep) {
    ConformalState base(geom, make_initial(*geom, config.initial));
    std::ostringstream label;
    label << "base=" << to_string(config.initial.preset) << " sigma=" << describe_sigma(sc.sigma, sc.sigma_rate)
          << " psi_rate=" << sc.psi_rate;
    families.push_back(
        {label.str(), SolitonFamily{base, sigma_function(sc.sigma, sc.sigma_rate), sc.psi_rate, sc.snap}});
    return families;
  }

  std::vector<std::pair<std::string, ScalarField>> bases;
  for (double c : {0.5, 1.0, 2.0}) {
    std::ostringstream name;
    name << "constant(c=" << c << ")";
    bases.emplace_back(name.str(), geom->constant(c));
  }
  InitialData mode;
  mode.preset = Preset::SingleModeY;
  mode.epsilon = 0.1;
  bases.emplace_back("single_mode_y(eps=0.1)", make_initial(*geom, mode));
  InitialData noisy = config.initial;
  noisy.preset = Preset::RandomSmooth;
  bases.emplace_back("random_smooth(seed=" + std::to_string(noisy.seed) + ")", make_initial(*geom, noisy));

  const std::vector<std::pair<SigmaKind, double>> sigmas = {
      {SigmaKind::Constant, 0.0}, {SigmaKind::Linear, 0.0}, {SigmaKind::Linear, 1.0},
      {SigmaKind::Exponential, -0.5}};
  // Rates that move a whole number of cells per δ keep every sampled shift on the grid.
  const double unit_rate = 1.0 / (config.grid.nz * sc.delta);
  for (const auto& [base_name, u] : bases) {
    const ConformalState base(geom, u);
    for (const auto& [kind, rate] : sigmas) {
      for (int cells : {0, 1, 3}) {
        const double psi_rate = cells * unit_rate;
        std::ostringstream label;
        label << "base=" << base_name << " sigma=" << describe_sigma(kind, rate)
              << " psi_rate=" << psi_rate;
        families.push_back({label.str(), SolitonFamily{base, sigma_function(kind, rate), psi_rate, sc.snap}});
      }
    }
  }
  return families;
}

int cmd_run_flow(const RunConfig& config, const OutputTarget& out, std::ostream& log) {
  const fs::path csv_path = output_path(out, config.output.csv);
  const fs::path report_path = output_path(out, config.output.report);

  const ConformalState state = initial_state(config);
  const Trajectory traj = run_flow(state, config.flow);
  const MonotonicityAudit audit = monotonicity_audit(traj.records);

  std::ostringstream csv;
  write_diagnostics_csv(csv, traj.records);
  write_text(csv_path, csv.str());

  for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
    std::ostringstream name;
    name << config.output.snapshot_prefix << "_" << std::setw(6) << std::setfill('0') << s << ".cryf";
    write_snapshot(output_path(out, name.str()),
                   {config.grid, traj.snapshots[s].t, static_cast<double>(state.n()), traj.snapshots[s].u});
  }

  const bool anomaly = traj.termination == Termination::StepUnderflow;
  const bool pass = audit.violation_count == 0 && !anomaly;
  std::ostringstream report;
  report << "command: run-flow\n"
         << "grid: " << config.grid.nx << " " << config.grid.ny << " " << config.grid.nz << "\n"
         << "preset: " << to_string(config.initial.preset) << "\n"
         << "termination: " << to_string(traj.termination) << "\n"
         << "t_final: " << format_double(traj.records.back().t) << "\n"
         << "accepted_steps: " << traj.accepted_steps << "\n"
         << "rejected_steps: " << traj.rejected_steps << "\n"
         << "records: " << traj.records.size() << "\n"
         << "snapshots: " << traj.snapshots.size() << "\n"
         << "E_initial: " << format_double(traj.records.front().E) << "\n"
         << "E_final: " << format_double(traj.records.back().E) << "\n"
         << "vol_final: " << format_double(traj.records.back().vol) << "\n"
         << "monotonicity_violations: " << audit.violation_count << "\n"
         << "worst_violation: " << format_double(audit.worst_violation) << "\n"
         << "status: " << (pass ? "pass" : "fail") << "\n";
  write_text(report_path, report.str());
  log << report.str();
  return pass ? kExitOk : kExitVerificationFailure;
}

int cmd_check_identities(const RunConfig& config, const OutputTarget& out, std::ostream& log) {
  const fs::path path = output_path(out, config.output.residuals);
  const std::vector<IdentityResidual> rows = identity_residuals(config);
  std::ostringstream table;
  table << std::left << std::setw(28) << "identity" << std::setw(26) << "residual" << std::setw(26)
        << "bound" << "status\n";
  bool pass = true;
  for (const IdentityResidual& r : rows) {
    table << std::setw(28) << r.name << std::setw(26) << format_double(r.value) << std::setw(26)
          << format_double(r.bound) << (r.pass() ? "pass" : "FAIL") << "\n";
    pass = pass && r.pass();
  }
  write_text(path, table.str());
  log << table.str();
  for (const IdentityResidual& r : rows) {
    if (!r.pass()) log << "identity failed: " << r.name << "\n";
  }
  return pass ? kExitOk : kExitVerificationFailure;
}

int cmd_convergence_study(const RunConfig& config, const OutputTarget& out, std::ostream& log) {
  const fs::path path = output_path(out, config.output.orders);
  const std::vector<OrderRow> rows = convergence_rows(config);
  std::ostringstream table;
  table << std::left << std::setw(50) << "quantity" << std::setw(10) << "grids" << std::setw(26)
        << "error_coarse" << std::setw(26) << "error_fine" << std::setw(12) << "order"
        << std::setw(10) << "minimum" << "status\n";
  std::vector<std::string> failures;
  for (const OrderRow& r : rows) {
    const double minimum = r.twisted ? config.analysis.min_order_twisted : config.analysis.min_order_untwisted;
    for (std::size_t s = 0; s < r.orders.size(); ++s) {
      const bool ok = r.orders[s] >= minimum;
      std::ostringstream grids;
      grids << r.grids[s] << "->" << r.grids[s + 1];
      std::ostringstream order;
      order << std::fixed << std::setprecision(3) << r.orders[s];
      table << std::setw(50) << r.name << std::setw(10) << grids.str() << std::setw(26)
            << format_double(r.errors[s]) << std::setw(26) << format_double(r.errors[s + 1])
            << std::setw(12) << order.str() << std::setw(10) << minimum << (ok ? "pass" : "FAIL") << "\n";
      if (!ok) failures.push_back(r.name + " (" + grids.str() + ", order " + order.str() + ")");
    }
  }
  write_text(path, table.str());
  log << table.str();
  for (const std::string& f : failures) log << "order below minimum: " << f << "\n";
  return failures.empty() ? kExitOk : kExitVerificationFailure;
}

int cmd_soliton_check(const RunConfig& config, const OutputTarget& out, std::ostream& log) {
  const fs::path path = output_path(out, config.output.verdicts);
  const SolitonConfig& sc = config.soliton;
  HarnessOptions options;
  options.delta = sc.delta;
  options.flow_tol = sc.flow_tol;
  options.var_tol = sc.var_tol;
  options.invariance_tol = config.analysis.invariance_bound;

  std::ostringstream lines;
  int violations = 0;
  for (const NamedFamily& nf : soliton_families(config)) {
    const HarnessReport rep = soliton_theorem_harness(nf.family, sc.times, options);
    if (rep.verdict == SolitonVerdict::TheoremViolation) ++violations;
    lines << nf.label << " -> " << to_string(rep.verdict)
          << " (E_dev=" << format_double(rep.invariance_deviation)
          << ", flow_residual=" << format_double(rep.max_flow_residual)
          << ", normalized_variance=" << format_double(rep.max_normalized_variance)
          << (rep.any_snapped ? ", shifts snapped" : "") << ")\n";
  }
  lines << "theorem_violations: " << violations << "\n";
  write_text(path, lines.str());
  log << lines.str();
  return violations == 0 ? kExitOk : kExitVerificationFailure;
}

int run_command(const std::string& name, const fs::path& config_path, const OutputTarget& out,
                std::ostream& log) {
  try {
    const RunConfig config = load_config(config_path);
    if (name == "run-flow") return cmd_run_flow(config, out, log);
    if (name == "check-identities") return cmd_check_identities(config, out, log);
    if (name == "convergence-study") return cmd_convergence_study(config, out, log);
    if (name == "soliton-check") return cmd_soliton_check(config, out, log);
    log << "error: unknown command '" << name << "'\n";
  } catch (const std::exception& err) {
    log << "error: " << err.what() << "\n";
  }
  return kExitEnvironmentFailure;
}

}  // namespace cryf

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero if any fails.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cryf/analysis.hpp"
#include "cryf/commands.hpp"
#include "cryf/config.hpp"
#include "cryf/flow.hpp"
#include "cryf/snapshot.hpp"
#include "cryf/soliton.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace cryf;
namespace fs = std::filesystem;

namespace tol {
constexpr double kMonotoneSlack = 1e-8;
constexpr double kFlowErrTol = 1e-8;
constexpr double kDEdtRelative = 0.01;
constexpr double kVarianceForm = 1e-13;
constexpr double kScaling = 1e-12;
constexpr double kPullback = 1e-12;
constexpr double kCommute = 1e-15;
constexpr double kRateResidual = 0.02;
constexpr double kJointRefinement = 0.5;
constexpr double kEvolutionOrder = 1.0;
constexpr double kLinearRate = 0.02;
constexpr double kDecayRate = 0.02;
constexpr double kSolitonInvariance = 1e-12;
constexpr double kVarianceFraction = 0.5;
constexpr double kOrderUntwisted = 1.8;
constexpr double kOrderTwisted = 0.9;
constexpr double kOperatorInvariant = 1e-12;
constexpr double kRichardson = 1e-3;
constexpr double kOrderBandLow = 1.5;
constexpr double kOrderBandHigh = 2.5;
}  // namespace tol

namespace {

const double kEightPiSq = 8.0 * oracle::kPi * oracle::kPi;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double l2(const BaseGeometry& g, const ScalarField& a) { return std::sqrt(inner_product(g, a, a)); }

// ---------------------------------------------------------------------------------------------

Outcome monotonicity() {
  FlowConfig cfg;
  cfg.err_tol = tol::kFlowErrTol;
  int violations = 0;
  long steps = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Trajectory tr = run_flow(fixture::random_state(16, seed), cfg);
    if (tr.termination != Termination::ReachedTEnd) ++violations;
    violations += monotonicity_audit(tr.records, tol::kMonotoneSlack).violation_count;
    steps += tr.accepted_steps;
  }
  return {violations == 0, "10 seeds on 16^3, " + std::to_string(steps) + " steps, " +
                               std::to_string(violations) + " violations"};
}

Outcome dedt_identity() {
  const ConformalState s = fixture::single_mode_y(16, 0.1);
  const double formula = dE_dt_formula(s);
  std::vector<double> gap;
  for (double delta : {1e-4, 5e-5}) {
    const TimeWindow w = sample_window(s, delta);
    gap.push_back(std::abs(dE_dt_finite_difference(w.records) - formula) / std::abs(formula));
  }
  return {gap[0] <= tol::kDEdtRelative && gap[1] < gap[0],
          "rel gap " + fmt(gap[0]) + " at delta=1e-4, " + fmt(gap[1]) + " at 5e-5"};
}

Outcome variance_form() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> amp(0.05, 0.6);
  std::uniform_int_distribution<int> passes(1, 8);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const ConformalState s = fixture::random_state(8, 1000 + k, amp(rng), passes(rng));
    const double lib = diagnose(s).dE_dt_formula;
    const double ref = oracle::variance_form_rate(fixture::grid_of(s), fixture::values(s.u()));
    worst = std::max(worst, std::abs(lib - ref) / std::abs(ref));
  }
  return {worst <= tol::kVarianceForm, "1000 states, worst rel " + fmt(worst)};
}

Outcome scaling() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> logsig(-1.0, 1.0);
  double worst_e = 0.0, worst_r = 0.0;
  for (int k = 0; k < 100; ++k) {
    const ConformalState s = fixture::random_state(8, 500 + k);
    const double sigma = std::pow(10.0, logsig(rng));
    const ConformalState t = scale_state(s, sigma);
    const double e = yamabe_quantity(s);
    worst_e = std::max(worst_e, std::abs(yamabe_quantity(t) - e) / std::abs(e));
    const ScalarField r = webster_curvature(s);
    const ScalarField rt = webster_curvature(t);
    double d = 0.0;
    for (std::size_t p = 0; p < r.size(); ++p) d = std::max(d, std::abs(rt[p] - r[p] / sigma));
    worst_r = std::max(worst_r, d / (r.max_abs() / sigma));
  }
  return {worst_e <= tol::kScaling && worst_r <= tol::kScaling,
          "100 pairs, E rel " + fmt(worst_e) + ", R rel " + fmt(worst_r)};
}

Outcome pullback() {
  double worst = 0.0, commute = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const ConformalState s = fixture::random_state(16, 700 + seed);
    const DiagnosticsRecord a = diagnose(s);
    const ScalarField r = webster_curvature(s);
    for (long long m : {1LL, 3LL, 8LL, static_cast<long long>(seed) * 5 - 37}) {
      const ConformalState p = pullback_state(s, m);
      const DiagnosticsRecord b = diagnose(p);
      for (auto [x, y] : {std::pair{a.E, b.E}, {a.vol, b.vol}, {a.intR, b.intR}, {a.intR2, b.intR2}}) {
        worst = std::max(worst, std::abs(x - y) / std::max(std::abs(x), 1e-300));
      }
      const ScalarField lhs = webster_curvature(p);
      const ScalarField rhs = pullback_z_shift(s.geometry(), r, m);
      for (std::size_t q = 0; q < lhs.size(); ++q) commute = std::max(commute, std::abs(lhs[q] - rhs[q]));
    }
  }
  return {worst <= tol::kPullback && commute <= tol::kCommute,
          "invariants rel " + fmt(worst) + ", commute abs " + fmt(commute)};
}

Outcome rate_identities() {
  const AnalysisConfig defaults;
  const bool frozen = defaults.volume_rate_bound == tol::kRateResidual &&
                      defaults.mean_curvature_rate_bound == tol::kRateResidual;
  const TimeWindow coarse = sample_window(fixture::single_mode_y(16, 0.1), 1e-4);
  const TimeWindow fine = sample_window(fixture::single_mode_y(32, 0.1), 5e-5);
  const double v0 = volume_rate_residual(coarse.records), v1 = volume_rate_residual(fine.records);
  const double m0 = mean_curvature_rate_residual(coarse.records);
  const double m1 = mean_curvature_rate_residual(fine.records);
  const bool ok = frozen && v0 <= tol::kRateResidual && m0 <= tol::kRateResidual &&
                  v1 <= tol::kJointRefinement * v0 && m1 <= tol::kJointRefinement * m0;
  return {ok, "volume " + fmt(v0) + " -> " + fmt(v1) + ", mean curvature " + fmt(m0) + " -> " + fmt(m1)};
}

Outcome curvature_evolution_check() {
  std::vector<double> res;
  for (int n : {8, 16, 32}) res.push_back(curvature_evolution_residual(fixture::single_mode_y(n, 0.1), 1e-5));
  const double o1 = std::log2(res[0] / res[1]);
  const double o2 = std::log2(res[1] / res[2]);

  // Linearized mode: dR/dt ≈ 2ΔR ≈ -8π² R.
  const ConformalState s = fixture::single_mode_y(16, 1e-3);
  const CurvatureEvolutionResult lin = curvature_evolution(s, 1e-4, {2.0, 0.0});
  const BaseGeometry& g = s.geometry();
  const double rr = inner_product(g, lin.curvature, lin.curvature);
  const double measured = inner_product(g, lin.dR_dt, lin.curvature) / rr;
  const double predicted = inner_product(g, lin.rhs, lin.curvature) / rr;
  const bool ok = res[1] < res[0] && res[2] < res[1] && o1 >= tol::kEvolutionOrder && o2 >= tol::kEvolutionOrder &&
                  std::abs(measured + kEightPiSq) <= tol::kLinearRate * kEightPiSq &&
                  std::abs(predicted + kEightPiSq) <= tol::kLinearRate * kEightPiSq;
  return {ok, "orders " + fmt(o1) + ", " + fmt(o2) + "; linear rate dR/dt " + fmt(measured) + ", 2*Lap " +
                  fmt(predicted) + " vs -8pi^2"};
}

Outcome linear_decay() {
  FlowConfig cfg;
  cfg.t_end = 0.03;
  cfg.snapshot_every = 1;
  const Trajectory tr = run_flow(fixture::single_mode_y(16, 1e-3), cfg);
  std::vector<double> t, amp;
  for (const Snapshot& s : tr.snapshots) {
    t.push_back(s.t);
    amp.push_back(0.5 * (s.u.max() - s.u.min()));
  }
  const double rate = oracle::fitted_decay_rate(t, amp);
  return {tr.termination == Termination::ReachedTEnd && std::abs(rate - kEightPiSq) <= tol::kDecayRate * kEightPiSq,
          "fitted rate " + fmt(rate) + " vs 8pi^2 = " + fmt(kEightPiSq) + " over " + std::to_string(t.size()) +
              " samples"};
}

Outcome theorem_harness() {
  RunConfig cfg = parse_config("[geometry]\nN_x = 16\nN_y = 16\nN_z = 16\n[initial]\npreset = random_smooth\n"
                               "seed = 3\n[soliton]\nsweep = true\n");
  HarnessOptions opt;
  opt.delta = cfg.soliton.delta;
  opt.flow_tol = cfg.soliton.flow_tol;
  opt.var_tol = cfg.soliton.var_tol;
  opt.invariance_tol = tol::kSolitonInvariance;
  int violations = 0, families = 0;
  double worst_inv = 0.0;
  for (const NamedFamily& f : soliton_families(cfg)) {
    const HarnessReport rep = soliton_theorem_harness(f.family, cfg.soliton.times, opt);
    ++families;
    if (rep.verdict == SolitonVerdict::TheoremViolation || rep.verdict == SolitonVerdict::NotSolitonForm) ++violations;
    worst_inv = std::max(worst_inv, rep.invariance_deviation);
  }

  // Along real flows with non-constant R the decay must carry at least half the variance term.
  FlowConfig fc;
  fc.t_end = 0.03;
  fc.snapshot_every = 5;
  int checked = 0, weak = 0;
  double worst_ratio = 1e300;
  std::vector<ConformalState> starts = {fixture::single_mode_y(16, 0.1), fixture::random_state(16, 1),
                                        fixture::random_state(16, 2), fixture::random_state(16, 3)};
  for (const ConformalState& start : starts) {
    const Trajectory tr = run_flow(start, fc);
    for (const Snapshot& snap : tr.snapshots) {
      const ConformalState s(start.geometry_ptr(), snap.u, snap.t);
      if (normalized_curvature_variance(diagnose(s)) <= cfg.analysis.var_tol) continue;
      const double predicted = -oracle::variance_form_rate(fixture::grid_of(s), fixture::values(s.u()));
      const double formula = dE_dt_formula(s);
      const double fd = dE_dt_finite_difference(sample_window(s, 1e-4).records);
      ++checked;
      worst_ratio = std::min({worst_ratio, -formula / predicted, -fd / predicted});
      if (!(formula < 0.0 && fd < 0.0 && -formula >= tol::kVarianceFraction * predicted &&
            -fd >= tol::kVarianceFraction * predicted)) {
        ++weak;
      }
    }
  }
  return {violations == 0 && worst_inv <= tol::kSolitonInvariance && weak == 0 && checked > 0,
          std::to_string(families) + " families, " + std::to_string(violations) + " violations, E dev " +
              fmt(worst_inv) + "; " + std::to_string(checked) + " flow states, min decay/variance " + fmt(worst_ratio)};
}

Outcome discretization() {
  RunConfig cfg = parse_config("[geometry]\nN_x = 8\nN_y = 8\nN_z = 8\n");
  int failing = 0, rows = 0;
  for (const OrderRow& r : convergence_rows(cfg)) {
    const double minimum = r.twisted ? tol::kOrderTwisted : tol::kOrderUntwisted;
    for (double o : r.orders) {
      ++rows;
      if (!(o >= minimum)) ++failing;
    }
  }
  double worst = 0.0;
  bool semidefinite = true;
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (GridSpec gs : {GridSpec{8, 8, 8}, GridSpec{16, 16, 16}, GridSpec{32, 32, 32}, GridSpec{8, 4, 16},
                      GridSpec{6, 6, 12}}) {
    auto geom = std::make_shared<const BaseGeometry>(gs);
    ScalarField f(geom->size()), h(geom->size());
    for (std::size_t p = 0; p < f.size(); ++p) {
      f[p] = d(rng);
      h[p] = d(rng);
    }
    for (Frame fr : {Frame::X, Frame::Y}) {
      const double a = inner_product(*geom, frame_derivative(*geom, f, fr, Scheme::Forward), h);
      const double b = inner_product(*geom, f, forward_difference_adjoint(*geom, h, fr));
      worst = std::max(worst, std::abs(a - b) / (l2(*geom, frame_derivative(*geom, f, fr, Scheme::Forward)) * l2(*geom, h)));
    }
    ScalarField w(geom->size());
    for (std::size_t p = 0; p < w.size(); ++p) w[p] = 1.5 + d(rng);
    for (const ScalarField& lf : {sub_laplacian_base(*geom, f), weighted_div_form(*geom, w, f)}) {
      worst = std::max(worst, std::abs(integrate_base(*geom, lf)) / l2(*geom, lf));
      const double q = inner_product(*geom, f, lf);
      if (q > tol::kOperatorInvariant * l2(*geom, f) * l2(*geom, lf)) semidefinite = false;
    }
    const ScalarField wf = weighted_div_form(*geom, w, f);
    const ScalarField wh = weighted_div_form(*geom, w, h);
    worst = std::max(worst, std::abs(inner_product(*geom, h, wf) - inner_product(*geom, f, wh)) /
                                (l2(*geom, h) * l2(*geom, wf)));
  }
  return {failing == 0 && worst <= tol::kOperatorInvariant && semidefinite,
          std::to_string(rows) + " order estimates, " + std::to_string(failing) + " below minimum; operator invariants " +
              fmt(worst) + (semidefinite ? ", semidefinite" : ", NOT semidefinite")};
}

Outcome analytic_value() {
  const double exact = oracle::closed_form_E(0.1);
  const double e16 = yamabe_quantity(fixture::single_mode_y(16, 0.1));
  const double e32 = yamabe_quantity(fixture::single_mode_y(32, 0.1));
  const double order = std::log2(std::abs(e16 - exact) / std::abs(e32 - exact));
  const double richardson = (4.0 * e32 - e16) / 3.0;
  const double rel = std::abs(richardson - exact) / exact;
  return {order >= tol::kOrderBandLow && order <= tol::kOrderBandHigh && rel <= tol::kRichardson,
          "E16 " + fmt(e16) + ", E32 " + fmt(e32) + ", observed order " + fmt(order) + ", Richardson rel " + fmt(rel)};
}

// ---------------------------------------------------------------------------------------------

int run_cli(const std::string& env, const std::string& args) {
  const std::string cmd = env + " \"" CRYF_CLI_PATH "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism_io() {
  const fs::path dir = fs::temp_directory_path() / ("cryf_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream(dir / name) << text;
    return (dir / name).string();
  };
  const std::string grid = "[geometry]\nN_x = 16\nN_y = 16\nN_z = 16\n";
  // 32^3 is above the parallel chunk threshold, so CRYF_THREADS=4 really splits the work.
  const std::string flow = write("flow.cfg", "[geometry]\nN_x = 32\nN_y = 32\nN_z = 32\n"
                                              "[initial]\npreset = random_smooth\nseed = 5\n"
                                              "[flow]\nt_end = 0.002\nsnapshot_every = 10\n");
  std::vector<std::string> notes;
  bool ok = true;
  auto expect = [&](bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      notes.push_back(what);
    }
  };

  expect(run_cli("CRYF_THREADS=1", "run-flow --config " + flow + " --out " + (dir / "a").string()) == 0, "run a");
  expect(run_cli("CRYF_THREADS=4", "run-flow --config " + flow + " --out " + (dir / "b").string()) == 0, "run b");
  const std::string csv_a = slurp(dir / "a" / "diagnostics.csv");
  expect(!csv_a.empty() && csv_a == slurp(dir / "b" / "diagnostics.csv"), "csv differs");
  expect(slurp(dir / "a" / "snapshot_000001.cryf") == slurp(dir / "b" / "snapshot_000001.cryf"), "snapshot differs");

  try {
    const SnapshotData snap = read_snapshot(dir / "a" / "snapshot_000001.cryf");
    write_snapshot(dir / "copy.cryf", snap);
    expect(slurp(dir / "copy.cryf") == slurp(dir / "a" / "snapshot_000001.cryf"), "snapshot round trip");
  } catch (const std::exception& e) {
    expect(false, e.what());
  }

  const std::string ident = grid + "[initial]\npreset = single_mode_y\n";
  expect(run_cli("", "check-identities --config " + write("good.cfg", ident) + " --out " + (dir / "g").string()) == 0,
         "good identities != 0");
  expect(run_cli("", "check-identities --config " + write("sab.cfg", ident + "[analysis]\nr2_coefficient = -1\n") +
                         " --out " + (dir / "s").string()) == 1,
         "sabotage != 1");
  expect(run_cli("", "run-flow --config " + (dir / "missing.cfg").string() + " --out " + (dir / "m").string()) == 2,
         "missing config != 2");
  expect(run_cli("", "run-flow --config " + write("bad.cfg", "[geometry]\nN_x = 8\nN_y = 8\nN_z = 12\n") + " --out " +
                         (dir / "x").string()) == 2,
         "invalid config != 2");
  expect(run_cli("", "run-flow --config " + flow + " --out " + (dir / "a").string()) == 2, "no overwrite guard");
  expect(run_cli("", "run-flow --config " + flow + " --out " + (dir / "a").string() + " --overwrite") == 0,
         "overwrite failed");
  write("blocker", "x");
  expect(run_cli("", "run-flow --config " + flow + " --out " + (dir / "blocker" / "o").string()) == 2,
         "unwritable != 2");
  expect(run_cli("", "") == 2, "no subcommand != 2");
  expect(run_cli("", "convergence-study --config " + write("one.cfg", grid + "[analysis]\ngrids = 8\n") + " --out " +
                         (dir / "c").string()) == 2,
         "single grid != 2");
  fs::remove_all(dir);

  std::string detail = "byte-identical CSV across thread widths, bit-exact snapshot, exit codes 0/1/2";
  for (const std::string& n : notes) detail += "; " + n;
  return {ok, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"monotonicity", monotonicity},
      {"dE/dt identity", dedt_identity},
      {"variance form", variance_form},
      {"scaling invariance", scaling},
      {"pullback invariance", pullback},
      {"volume and mean-curvature rates", rate_identities},
      {"curvature evolution", curvature_evolution_check},
      {"linearized decay", linear_decay},
      {"equality case harness", theorem_harness},
      {"discretization quality", discretization},
      {"analytic value", analytic_value},
      {"determinism and I/O", determinism_io},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[k].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!out.pass) ++failures;
    std::printf("criterion %2zu %s  %s: %s [%.1fs]\n", k + 1, out.pass ? "PASS" : "FAIL", criteria[k].first.c_str(),
                out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

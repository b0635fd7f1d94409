#include <gtest/gtest.h>

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cryf/commands.hpp"
#include "cryf/config.hpp"
#include "cryf/diagnostics_io.hpp"
#include "cryf/errors.hpp"
#include "cryf/snapshot.hpp"
#include "support/fixtures.hpp"

using namespace cryf;
namespace fs = std::filesystem;

namespace {

constexpr const char* kMinimal = "[geometry]\nN_x = 8\nN_y = 8\nN_z = 8\n[initial]\npreset = constant\n";

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("cryf_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
             std::to_string(counter++) + "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path_ / name) << text;
    return path_ / name;
  }

 private:
  fs::path path_;
};

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(ParseConfig, MinimalAppliesDefaults) {
  const RunConfig c = parse_config(kMinimal);
  EXPECT_EQ(c.grid, (GridSpec{8, 8, 8}));
  EXPECT_EQ(c.initial.preset, Preset::Constant);
  EXPECT_EQ(c.flow.err_tol, FlowConfig{}.err_tol);
  EXPECT_EQ(c.analysis.grids, (std::vector<int>{8, 16, 32}));
  EXPECT_EQ(c.output.csv, "diagnostics.csv");
}

TEST(ParseConfig, ReadsEverySection) {
  const RunConfig c = parse_config(
      "# comment\n[geometry]\nN_x = 16  # trailing\nN_y = 8\nN_z = 16\n"
      "[initial]\npreset = random_smooth\nseed = 42\namplitude = 0.2\nsmoothing_passes = 3\n"
      "[flow]\nt_end = 0.1\nrecord_every = 5\n"
      "[analysis]\ngrids = 8, 16\ndelta = 2e-4\n"
      "[soliton]\nsigma = exponential\nsigma_rate = -0.5\ntimes = 0.1, 0.2\nsnap = true\n"
      "[output]\ncsv = out.csv\n");
  EXPECT_EQ(c.grid, (GridSpec{16, 8, 16}));
  EXPECT_EQ(c.initial.seed, 42u);
  EXPECT_EQ(c.initial.smoothing_passes, 3);
  EXPECT_EQ(c.flow.record_every, 5);
  EXPECT_EQ(c.analysis.grids, (std::vector<int>{8, 16}));
  EXPECT_EQ(c.soliton.sigma, SigmaKind::Exponential);
  EXPECT_TRUE(c.soliton.snap);
  EXPECT_EQ(c.soliton.times, (std::vector<double>{0.1, 0.2}));
  EXPECT_EQ(c.output.csv, "out.csv");
}

TEST(ParseConfig, DivisibilityRuleNamed) {
  const std::string err = config_error("[geometry]\nN_x = 8\nN_y = 8\nN_z = 12\n");
  EXPECT_NE(err.find("line 4"), std::string::npos) << err;
  EXPECT_NE(err.find("divide"), std::string::npos) << err;
}

TEST(ParseConfig, DuplicateCitesBothLines) {
  const std::string err = config_error("[geometry]\nN_x = 8\nN_y = 8\nN_z = 8\nN_x = 16\n");
  EXPECT_NE(err.find("line 5"), std::string::npos) << err;
  EXPECT_NE(err.find("line 2"), std::string::npos) << err;
}

TEST(ParseConfig, UnknownKeysAndBadValues) {
  const std::string base = "[geometry]\nN_x = 8\nN_y = 8\nN_z = 8\n";
  EXPECT_NE(config_error(base + "[flow]\ndt_mx = 1\n").find("line 6, column 1: unknown key 'dt_mx'"),
            std::string::npos);
  EXPECT_NE(config_error(base + "[bogus]\n").find("unknown section"), std::string::npos);
  EXPECT_NE(config_error(base + "[initial]\npreset = wobbly\n").find("line 6"), std::string::npos);
  EXPECT_NE(config_error(base + "[flow]\nt_end = abc\n").find("column 9"), std::string::npos);
  EXPECT_NE(config_error(base + "[flow]\ndt_min = 1\n").find("dt_min"), std::string::npos);
  EXPECT_NE(config_error("[geometry]\nN_x = 8\nN_y = 8\n").find("N_z"), std::string::npos);
  EXPECT_NE(config_error("N_x = 8\n").find("before any [section]"), std::string::npos);
  EXPECT_THROW(load_config("/nonexistent/cryf.cfg"), ConfigError);
}

TEST(Snapshot, RoundTripBitExact) {
  TempDir dir;
  const ConformalState s = fixture::random_state(8, 17);
  const SnapshotData in{s.geometry().grid(), 0.1 + 0.2, 1.0, s.u()};
  write_snapshot(dir.path() / "a.cryf", in);
  const SnapshotData out = read_snapshot(dir.path() / "a.cryf");
  EXPECT_EQ(out.grid, in.grid);
  EXPECT_EQ(std::bit_cast<std::uint64_t>(out.t), std::bit_cast<std::uint64_t>(in.t));
  EXPECT_EQ(out.n, 1.0);
  ASSERT_EQ(out.u.size(), in.u.size());
  EXPECT_EQ(std::memcmp(out.u.values().data(), in.u.values().data(), 8 * in.u.size()), 0);
}

TEST(Snapshot, LayoutIsLittleEndian) {
  TempDir dir;
  ScalarField u(4 * 4 * 8, 0.0);
  u[1] = 1.0;
  write_snapshot(dir.path() / "b.cryf", {{4, 4, 8}, 2.0, 1.0, u});
  const std::string bytes = slurp(dir.path() / "b.cryf");
  ASSERT_EQ(bytes.size(), 36u + 8u * 128u);
  EXPECT_EQ(bytes.substr(0, 4), "CRYF");
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[8], 4);
  EXPECT_EQ(bytes[16], 8);
  EXPECT_EQ(static_cast<unsigned char>(bytes[27]), 0x40);  // 2.0 high byte
  EXPECT_EQ(static_cast<unsigned char>(bytes[36 + 15]), 0x3f);  // u[1] = 1.0 high byte
}

TEST(Snapshot, StructuredErrors) {
  TempDir dir;
  ScalarField u(64, 1.0);
  write_snapshot(dir.path() / "c.cryf", {{4, 4, 4}, 0.0, 1.0, u});
  std::string bytes = slurp(dir.path() / "c.cryf");

  auto kind_of = [&](const std::string& content) {
    std::ofstream(dir.path() / "d.cryf", std::ios::binary) << content;
    try {
      read_snapshot(dir.path() / "d.cryf");
    } catch (const SnapshotError& e) {
      return std::make_pair(e.kind(), std::string(e.what()));
    }
    return std::make_pair(SnapshotError::Kind::Io, std::string("no error"));
  };
  EXPECT_EQ(kind_of(bytes.substr(0, bytes.size() - 8)).first, SnapshotError::Kind::Shape);
  std::string v2 = bytes;
  v2[4] = 2;
  const auto [kind, what] = kind_of(v2);
  EXPECT_EQ(kind, SnapshotError::Kind::Version);
  EXPECT_NE(what.find("version 2"), std::string::npos);
  EXPECT_NE(what.find("version 1"), std::string::npos);
  std::string bad = bytes;
  bad[0] = 'X';
  EXPECT_EQ(kind_of(bad).first, SnapshotError::Kind::Magic);
  EXPECT_THROW(read_snapshot(dir.path() / "missing.cryf"), SnapshotError);
}

TEST(DiagnosticsCsv, ExactRoundTrip) {
  std::vector<DiagnosticsRecord> recs(3);
  for (int k = 0; k < 3; ++k) {
    recs[k] = diagnose(fixture::random_state(8, 30 + k), 1e-5 / 3.0);
    recs[k].t = 0.1 * k + 1.0 / 3.0;
  }
  std::stringstream ss;
  write_diagnostics_csv(ss, recs);
  std::string header;
  std::getline(std::stringstream(ss.str()), header);
  EXPECT_EQ(header, kDiagnosticsCsvHeader);
  const std::vector<DiagnosticsRecord> back = read_diagnostics_csv(ss);
  ASSERT_EQ(back.size(), 3u);
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(back[k].t, recs[k].t);
    EXPECT_EQ(back[k].E, recs[k].E);
    EXPECT_EQ(back[k].var, recs[k].var);
    EXPECT_EQ(back[k].dE_dt_formula, recs[k].dE_dt_formula);
    EXPECT_EQ(back[k].max_R, recs[k].max_R);
    EXPECT_EQ(back[k].dt_used, recs[k].dt_used);
  }
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(0.0), "0");
}

TEST(Commands, RunFlowConstantAllZeroE) {
  TempDir dir;
  const fs::path cfg = dir.write("c.cfg", std::string(kMinimal) + "[flow]\nt_end = 0.002\n");
  std::ostringstream log;
  EXPECT_EQ(run_command("run-flow", cfg, {dir.path() / "out", false}, log), kExitOk) << log.str();
  std::ifstream csv(dir.path() / "out" / "diagnostics.csv");
  for (const DiagnosticsRecord& r : read_diagnostics_csv(csv)) EXPECT_EQ(r.E, 0.0);
  EXPECT_NE(slurp(dir.path() / "out" / "report.txt").find("termination: reached_t_end"), std::string::npos);
}

TEST(Commands, OverwriteGuardAndUnwritable) {
  TempDir dir;
  const fs::path cfg = dir.write("c.cfg", std::string(kMinimal) + "[flow]\nt_end = 0.001\n");
  std::ostringstream log;
  EXPECT_EQ(run_command("run-flow", cfg, {dir.path() / "o", false}, log), kExitOk);
  EXPECT_EQ(run_command("run-flow", cfg, {dir.path() / "o", false}, log), kExitEnvironmentFailure);
  EXPECT_EQ(run_command("run-flow", cfg, {dir.path() / "o", true}, log), kExitOk);
  const fs::path blocker = dir.write("file", "x");
  EXPECT_EQ(run_command("run-flow", cfg, {blocker / "sub", false}, log), kExitEnvironmentFailure);
  EXPECT_EQ(run_command("run-flow", dir.path() / "nope.cfg", {dir.path() / "p", false}, log),
            kExitEnvironmentFailure);
  EXPECT_EQ(run_command("fly", cfg, {dir.path() / "q", false}, log), kExitEnvironmentFailure);
}

TEST(Commands, CheckIdentitiesConstantTiny) {
  RunConfig c = parse_config(kMinimal);
  for (const IdentityResidual& r : identity_residuals(c)) EXPECT_LE(r.value, 1e-10) << r.name;
}

TEST(Commands, CheckIdentitiesSabotageFailsNamed) {
  TempDir dir;
  const std::string base = "[geometry]\nN_x = 16\nN_y = 16\nN_z = 16\n[initial]\npreset = single_mode_y\n";
  std::ostringstream good_log, bad_log;
  EXPECT_EQ(run_command("check-identities", dir.write("g.cfg", base), {dir.path() / "g", false}, good_log), kExitOk)
      << good_log.str();
  EXPECT_EQ(run_command("check-identities", dir.write("b.cfg", base + "[analysis]\nr2_coefficient = -1\n"),
                        {dir.path() / "b", false}, bad_log),
            kExitVerificationFailure);
  EXPECT_NE(bad_log.str().find("identity failed: curvature_evolution"), std::string::npos);
}

TEST(Commands, ConvergenceNeedsTwoGrids) {
  RunConfig c = parse_config(std::string(kMinimal) + "[analysis]\ngrids = 8\n");
  EXPECT_THROW(convergence_rows(c), ConfigError);
  TempDir dir;
  std::ostringstream log;
  EXPECT_EQ(run_command("convergence-study", dir.write("c.cfg", std::string(kMinimal) + "[analysis]\ngrids = 8\n"),
                        {dir.path() / "o", false}, log),
            kExitEnvironmentFailure);
}

TEST(Commands, ConvergenceOrders) {
  RunConfig c = parse_config(std::string(kMinimal) + "[analysis]\ngrids = 8, 16\n");
  for (const OrderRow& r : convergence_rows(c)) {
    ASSERT_EQ(r.orders.size(), 1u);
    if (r.name == "sub_laplacian:sin_2pi_x") EXPECT_NEAR(r.orders[0], 2.0, 0.1);
    EXPECT_GE(r.orders[0], r.twisted ? 0.9 : 1.8) << r.name;
  }
}

TEST(Commands, SolitonSingleFamilies) {
  TempDir dir;
  std::ostringstream a, b;
  EXPECT_EQ(run_command("soliton-check", dir.write("a.cfg", kMinimal), {dir.path() / "a", false}, a), kExitOk);
  EXPECT_NE(a.str().find("-> constant curvature"), std::string::npos) << a.str();
  const std::string wavy = "[geometry]\nN_x = 8\nN_y = 8\nN_z = 8\n[initial]\npreset = single_mode_y\n";
  EXPECT_EQ(run_command("soliton-check", dir.write("b.cfg", wavy), {dir.path() / "b", false}, b), kExitOk);
  EXPECT_NE(b.str().find("-> not a flow solution"), std::string::npos) << b.str();
}

TEST(Commands, SolitonSweepHasNoViolations) {
  RunConfig c = parse_config(std::string(kMinimal) + "[soliton]\nsweep = true\n");
  const auto fams = soliton_families(c);
  EXPECT_EQ(fams.size(), 5u * 4u * 3u);
  HarnessOptions opt;
  for (const NamedFamily& f : fams) {
    EXPECT_NE(soliton_theorem_harness(f.family, c.soliton.times, opt).verdict, SolitonVerdict::TheoremViolation)
        << f.label;
  }
}

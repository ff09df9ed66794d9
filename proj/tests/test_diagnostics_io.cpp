#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vpfocus/vpfocus.hpp"

using namespace vpfocus;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("vpfocus_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig small_config() {
  RunConfig cfg = io::config_for(design_theorem1(32.0, 1e-7, 0.2), std::nullopt, {6, 8, 6});
  cfg.integrator.output_stride = 7;
  return cfg;
}

// Replaces the value of the first line reading "key=...".
std::string with_value(std::string text, const std::string& key, const std::string& value) {
  const auto at = text.find("\n" + key + "=");
  if (at == std::string::npos) throw std::runtime_error("no key " + key);
  const auto start = at + key.size() + 2;
  return text.replace(start, text.find('\n', start) - start, value);
}

int cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(VPFOCUS_CLI) + " " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

// --- numbers ------------------------------------------------------------------------

TEST(Numbers, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(-25.0), "-25");
  for (double x : {1.0 / 3.0, 1e-300, 6.02214076e23, -0.008000000000000002, 5e-324}) {
    EXPECT_EQ(*parse_double(format_double(x)), x);
  }
  EXPECT_FALSE(parse_double("1.5x"));
  EXPECT_FALSE(parse_double(""));
}

// --- configs ------------------------------------------------------------------------

TEST(Config, RoundTrip) {
  std::vector<RunConfig> configs;
  configs.push_back(small_config());
  RunConfig k = io::config_for(design_theorem2(1.0, 1.0, 0.01, 0.02, true));
  k.integrator.mark_times = {1.0 / 3.0, 0.01, 2e-7};
  k.integrator.cfl = 0.0125;
  k.write_snapshots = false;
  k.restart_from = "runs/previous run";
  configs.push_back(k);
  RunConfig bare;
  bare.spec = ClassSpec::make(0.7, -3.3, 0.11);
  bare.integrator.mark_times.clear();
  configs.push_back(bare);
  for (const RunConfig& c : configs) {
    const std::string text = io::serialize_config(c);
    EXPECT_EQ(io::parse_config(text), c) << text;
    EXPECT_EQ(io::serialize_config(io::parse_config(text)), text);
  }
}

TEST(Config, AttractiveSignIsRejected) {
  std::string text = io::serialize_config(small_config());
  const auto at = text.find("repulsive");
  ASSERT_NE(at, std::string::npos);
  text.replace(at, 9, "attractive");
  try {
    io::parse_config(text);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("attractive"), std::string::npos);
  }
}

TEST(Config, UnknownKeysAndBadValuesAreRejected) {
  const std::string good = io::serialize_config(small_config());
  EXPECT_THROW(io::parse_config(good + "\n[integrator]\nfoo = 1\n"), ValidationError);
  EXPECT_THROW(io::parse_config(good + "\n[extra]\nx = 1\n"), ValidationError);
  EXPECT_THROW(io::parse_config(with_value(good, "format_version", "2")), ValidationError);
  EXPECT_THROW(io::parse_config(with_value(good, "cfl", "fast")), ValidationError);
  EXPECT_THROW(io::parse_config(with_value(good, "cfl", "2")), ValidationError);
  EXPECT_THROW(io::parse_config(with_value(good, "delta_w", "0.5")), ValidationError);
  EXPECT_THROW(io::parse_config(with_value(good, "nr", "1")), ValidationError);
  EXPECT_NO_THROW(io::parse_config(with_value(good, "nr", "7")));
  EXPECT_THROW(io::parse_config("[integrator]\ndt_max = 1\n"), ValidationError);
}

TEST(Certificate, RoundTripForEveryApplicability) {
  const BoundsCertificate certs[] = {design_theorem1(32.0, 1e-7, 0.2), design_theorem1(32.0, 1.0, 0.1, true),
                                     design_theorem1(32.0, 1.0, 0.1), design_theorem2(1.0, 1.0, 1.0, 1e-4),
                                     design_theorem2(1.0, 1.0, 0.01, 0.02, true)};
  for (const BoundsCertificate& c : certs) {
    const std::string text = io::serialize_certificate(c);
    const BoundsCertificate back = io::parse_certificate(text);
    EXPECT_EQ(back.ref(), c.ref());
    EXPECT_EQ(back.spec, c.spec);
    EXPECT_EQ(back.applicability, c.applicability);
    EXPECT_EQ(back.rhoT_lower, c.rhoT_lower);
    EXPECT_EQ(io::serialize_certificate(back), text);
  }
}

TEST(Certificate, EditedValuesAreCaught) {
  const std::string text = io::serialize_certificate(design_theorem1(32.0, 1e-7, 0.2));
  EXPECT_THROW(io::parse_certificate(with_value(text, "sup_R_bound", "5")), ValidationError);
  EXPECT_THROW(io::parse_certificate(with_value(text, "applicability", "exploratory")), ValidationError);
  EXPECT_THROW(io::parse_certificate(with_value(text, "rhoT_lower", "1")), ValidationError);
  EXPECT_THROW(io::parse_certificate(with_value(text, "a1", "-24")), ValidationError);
}

// --- CSV ------------------------------------------------------------------------------

TEST(Csv, ShellsRoundTripExactly) {
  const fs::path dir = scratch("shells");
  const std::vector<Shell> shells{{{1.0 / 3.0, -25.000000000000004, 1e-17}, 5e-324, 0},
                                  {{2.0, 0.0, 0.0}, 1.0, 18446744073709551615ull}};
  io::write_text_file(dir / "s.csv", io::format_shells(shells));
  EXPECT_EQ(io::read_shells(dir / "s.csv"), shells);
  EXPECT_EQ(slurp(dir / "s.csv").substr(0, 18), "id,r,w,ell,weight\n");
}

TEST(Csv, TimeseriesAndTurningRoundTrip) {
  const fs::path dir = scratch("series");
  std::vector<DiagnosticsRow> rows{{0.0, 1.5, 0.25, 32.0, 0.992, 1.008, 0.0, 2e-5},
                                   {0.1 + 0.2, 1e300, 1e-300, 7.0, 0.1, 0.2, 0.0, 0.1}};
  {
    io::TimeseriesWriter w(dir / "t.csv");
    for (const auto& r : rows) w.write(r);
    w.close();
  }
  const auto back = io::read_timeseries(dir / "t.csv");
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    EXPECT_EQ(io::csv_line(back[k]), io::csv_line(rows[k]));
    EXPECT_EQ(back[k].t, rows[k].t);
  }
  const std::string header = slurp(dir / "t.csv").substr(0, slurp(dir / "t.csv").find('\n'));
  EXPECT_EQ(header, "t,rho_sup_binned,rho_sup_certified,E_sup_exact,r_min,r_max,mass_error,dt_current");

  const std::vector<TurningRecord> turning{{3, 0.5, 0.25, true}, {9, 1.0, 0.0, false}};
  io::write_text_file(dir / "turning.csv", io::format_turning(turning));
  const auto tb = io::read_turning(dir / "turning.csv");
  ASSERT_EQ(tb.size(), 2u);
  EXPECT_EQ(tb[0].id, 3u);
  EXPECT_EQ(tb[0].t_argmin, 0.25);
  EXPECT_TRUE(tb[0].turned);
  EXPECT_FALSE(tb[1].turned);
}

TEST(Csv, WrongHeaderOrRaggedRowsAreRejected) {
  const fs::path dir = scratch("bad");
  io::write_text_file(dir / "a.csv", "id,r,w,weight\n0,1,2,3\n");
  EXPECT_THROW(io::read_shells(dir / "a.csv"), ValidationError);
  io::write_text_file(dir / "b.csv", "id,r,w,ell,weight\n0,1,2,3\n");
  EXPECT_THROW(io::read_shells(dir / "b.csv"), ValidationError);
  io::write_text_file(dir / "c.csv", "id,r,w,ell,weight\n0,1,2,x,3\n");
  EXPECT_THROW(io::read_shells(dir / "c.csv"), ValidationError);
  EXPECT_THROW(io::read_shells(dir / "missing.csv"), ValidationError);
}

// --- pipeline -------------------------------------------------------------------------

TEST(Pipeline, ZeroEndTimeWritesOneRow) {
  RunConfig cfg = small_config();
  cfg.integrator.t_end = 0.0;
  const fs::path dir = scratch("t0");
  const RunRecord rec = io::run_pipeline(cfg, dir);
  ASSERT_EQ(rec.rows.size(), 1u);
  EXPECT_EQ(io::read_timeseries(dir / "timeseries.csv").size(), 1u);
  EXPECT_EQ(io::read_index(dir / "snapshots" / "index.csv").size(), 1u);
}

TEST(Pipeline, RecordSurvivesTheDisk) {
  const fs::path dir = scratch("reload");
  const RunRecord rec = io::run_pipeline(small_config(), dir);
  const RunRecord back = io::load_run(dir);
  EXPECT_EQ(back.manifest.config, rec.manifest.config);
  EXPECT_EQ(back.manifest.total_mass, rec.manifest.total_mass);
  EXPECT_EQ(back.manifest.steps, rec.manifest.steps);
  EXPECT_EQ(back.manifest.rho0_sup_marginal, rec.manifest.rho0_sup_marginal);
  ASSERT_EQ(back.rows.size(), rec.rows.size());
  for (std::size_t k = 0; k < rec.rows.size(); ++k) EXPECT_EQ(io::csv_line(back.rows[k]), io::csv_line(rec.rows[k]));
  ASSERT_EQ(back.marks.size(), 1u);
  EXPECT_EQ(back.marks[0].t, rec.marks[0].t);
  EXPECT_EQ(back.marks[0].shells, rec.marks[0].shells);
  const BoundsCertificate cert = design_theorem1(32.0, 1e-7, 0.2);
  EXPECT_TRUE(verify_proof_chain(back, cert).passed());
}

TEST(Pipeline, RowsAreOrderedAndMassIsExact) {
  const RunRecord rec = io::run_pipeline(small_config(), scratch("rows"));
  for (std::size_t k = 0; k < rec.rows.size(); ++k) {
    EXPECT_EQ(rec.rows[k].mass_error, 0.0);
    if (k > 0) {
      EXPECT_GT(rec.rows[k].t, rec.rows[k - 1].t);
    }
  }
}

TEST(Pipeline, RerunIsByteIdentical) {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  io::run_pipeline(small_config(), a);
  set_thread_count(2);
  io::run_pipeline(small_config(), b);
  set_thread_count(1);
  std::size_t files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), a);
    EXPECT_EQ(slurp(entry.path()), slurp(b / rel)) << rel;
    ++files;
  }
  EXPECT_GT(files, 5u);
}

TEST(Pipeline, RerunIntoTheSameDirectoryReplacesSnapshots) {
  const fs::path dir = scratch("reuse");
  io::run_pipeline(small_config(), dir);
  RunConfig shorter = small_config();
  shorter.integrator.t_end = 0.0;
  io::run_pipeline(shorter, dir);
  std::size_t snaps = 0;
  for (const auto& e : fs::directory_iterator(dir / "snapshots")) snaps += e.path().filename() != "index.csv";
  EXPECT_EQ(snaps, 1u);
}

TEST(Pipeline, RestartContinuesFromTheCheckpoint) {
  const fs::path full = scratch("full"), first = scratch("first"), second = scratch("second");
  RunConfig cfg = small_config();
  cfg.integrator.mark_times = {0.01};
  cfg.certificate.reset();
  cfg.write_snapshots = false;
  const RunRecord whole = io::run_pipeline(cfg, full);
  RunConfig head = cfg;
  head.integrator.t_end = 0.01;
  io::run_pipeline(head, first);
  RunConfig tail = cfg;
  tail.restart_from = first.string();
  const RunRecord rest = io::run_pipeline(tail, second);
  EXPECT_EQ(rest.manifest.start_time, 0.01);
  EXPECT_EQ(rest.manifest.final_time, whole.manifest.final_time);
  // restarted runs recompute the step size from the checkpoint, so agree to rounding
  const auto a = io::read_shells(full / "checkpoint.csv"), b = io::read_shells(second / "checkpoint.csv");
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i].coords.r, b[i].coords.r, 1e-12);
}

// --- command line ---------------------------------------------------------------------

TEST(Cli, DesignTheorem1) {
  const fs::path dir = scratch("cli_design");
  ASSERT_EQ(cli("design --c1 32 --c2 1e-7 --eps 0.2 --out " + (dir / "c.ini").string(), dir / "log"), 0) << slurp(dir / "log");
  const std::string text = slurp(dir / "c.ini");
  EXPECT_NE(text.find("\na0=1\n"), std::string::npos) << text;
  const BoundsCertificate c = io::load_certificate(dir / "c.ini");
  EXPECT_NEAR(c.T, 0.008, 1e-15);
}

TEST(Cli, DesignTheorem2) {
  const fs::path dir = scratch("cli_design2");
  ASSERT_EQ(cli("design --c1 1 --c2 1 --t 1 --out " + (dir / "c.ini").string(), dir / "log"), 0);
  EXPECT_NE(slurp(dir / "log").find("19.97"), std::string::npos) << slurp(dir / "log");
  EXPECT_NE(slurp(dir / "c.ini").find("C0=19.97"), std::string::npos);
}

TEST(Cli, UsageErrors) {
  const fs::path dir = scratch("cli_usage");
  EXPECT_NE(cli("design --c1 -1 --c2 1 --out " + (dir / "c.ini").string(), dir / "log"), 0);
  EXPECT_FALSE(fs::exists(dir / "c.ini"));
  EXPECT_NE(cli("design --c2 1 --out x", dir / "log"), 0);
  EXPECT_NE(cli("frobnicate", dir / "log"), 0);
  EXPECT_NE(cli("", dir / "log"), 0);
  EXPECT_EQ(cli("design --c1 32 --c2 1 --eps 0.1 --out " + (dir / "bad.ini").string(), dir / "log"), 3);
}

TEST(Cli, InitRunVerify) {
  const fs::path dir = scratch("cli_flow");
  const std::string cert = (dir / "cert.ini").string(), cfg = (dir / "run.ini").string(), run = (dir / "run").string();
  ASSERT_EQ(cli("design --c1 32 --c2 1e-7 --eps 0.2 --out " + cert, dir / "log"), 0);
  ASSERT_EQ(cli("init --config " + cert + " --out " + cfg, dir / "log"), 0) << slurp(dir / "log");
  ASSERT_EQ(cli("run --threads 2 --config " + cfg + " --out " + run, dir / "log"), 0) << slurp(dir / "log");
  ASSERT_EQ(cli("verify --config " + cert + " --run " + run, dir / "log"), 0) << slurp(dir / "log");
  const auto report = nlohmann::json::parse(slurp(dir / "run" / "report.json"));
  EXPECT_TRUE(report["passed"].get<bool>());
  EXPECT_EQ(report["stages"].size(), 5u);

  // final row radius is within the bound at the end of the run as well
  const auto rows = io::read_timeseries(dir / "run" / "timeseries.csv");
  EXPECT_LE(rows.back().r_max, io::load_certificate(cert).sup_R_bound);

  // a certificate the run was not made from is refused
  const std::string other = (dir / "other.ini").string();
  ASSERT_EQ(cli("design --c1 32 --c2 2e-7 --eps 0.2 --out " + other, dir / "log"), 0);
  EXPECT_EQ(cli("verify --config " + other + " --run " + run + " --out " + (dir / "r2.json").string(), dir / "log"), 2);
  EXPECT_TRUE(nlohmann::json::parse(slurp(dir / "r2.json"))["refused"].get<bool>());
}

TEST(Cli, ExploratoryReportMarksSkippedStages) {
  const fs::path dir = scratch("cli_explore");
  const std::string cert = (dir / "cert.ini").string(), cfg = (dir / "run.ini").string(), run = (dir / "run").string();
  ASSERT_EQ(cli("design --c1 1 --c2 1 --t 0.01 --eps 0.02 --exploratory --out " + cert, dir / "log"), 0);
  ASSERT_EQ(cli("init --config " + cert + " --out " + cfg, dir / "log"), 0) << slurp(dir / "log");
  ASSERT_EQ(cli("run --config " + cfg + " --out " + run, dir / "log"), 0) << slurp(dir / "log");
  ASSERT_EQ(cli("verify --config " + cert + " --run " + run, dir / "log"), 0) << slurp(dir / "log");
  const auto report = nlohmann::json::parse(slurp(dir / "run" / "report.json"));
  EXPECT_EQ(report["stages"][0]["status"], "skipped");
  EXPECT_EQ(report["stages"][1]["status"], "skipped");
  EXPECT_EQ(report["stages"][4]["status"], "pass");
}

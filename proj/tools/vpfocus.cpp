// vpfocus command line: design, init, run, verify, oracle.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "vpfocus/vpfocus.hpp"

namespace fs = std::filesystem;
using namespace vpfocus;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitRefused = 2;
constexpr int kExitInapplicable = 3;
constexpr int kExitStiff = 4;

void print_certificate(const BoundsCertificate& c) {
  std::cout << "theorem            " << c.theorem_number() << "\n"
            << "applicability      " << to_string(c.applicability) << "\n";
  if (!c.violated_constraint.empty()) std::cout << "violated           " << c.violated_constraint << "\n";
  std::cout << "eps                " << format_double(c.spec.eps) << "  (admissible below "
            << format_double(c.eps_admissible_max) << ")\n"
            << "a0                 " << format_double(c.spec.a0) << "\n"
            << "a1                 " << format_double(c.spec.a1) << "\n";
  if (c.spec.target_mass) std::cout << "M                  " << format_double(*c.spec.target_mass) << "\n";
  if (c.c0) std::cout << "C0                 " << format_double(*c.c0) << "\n";
  if (c.eta) std::cout << "eta                " << format_double(*c.eta) << "\n";
  std::cout << "T                  " << format_double(c.T) << "\n"
            << "sup R(T) bound     " << format_double(c.sup_R_bound) << "\n";
  if (c.rho0_sup_bound) std::cout << "rho(0) sup bound   " << format_double(*c.rho0_sup_bound) << "\n";
  if (c.e0_sup_bound) std::cout << "E(0) sup bound     " << format_double(*c.e0_sup_bound) << "\n";
  std::cout << "rho(T) lower       " << format_double(c.rhoT_lower) << "  (chain " << format_double(c.chain.rho_lower)
            << ")\n"
            << "E(T) lower         " << format_double(c.ET_lower) << "  (chain " << format_double(c.chain.e_lower) << ")\n";
}

int cmd_design(double c1, double c2, std::optional<double> T, std::optional<double> eps, bool exploratory,
               const fs::path& out) {
  const BoundsCertificate cert =
      T ? design_theorem2(c1, c2, *T, eps, exploratory) : design_theorem1(c1, c2, eps, exploratory);
  io::write_text_file(out, io::serialize_certificate(cert));
  print_certificate(cert);
  std::cout << "wrote " << out.string() << "\n";
  if (cert.applicability == Applicability::inapplicable) {
    std::cerr << "eps violates " << cert.violated_constraint << "; pass --exploratory to accept it\n";
    return kExitInapplicable;
  }
  return 0;
}

int cmd_init(const fs::path& cert_path, const fs::path& out, std::optional<double> t_end) {
  const BoundsCertificate cert = io::load_certificate(cert_path);
  if (cert.applicability == Applicability::inapplicable) {
    std::cerr << "certificate is inapplicable (" << cert.violated_constraint << ")\n";
    return kExitInapplicable;
  }
  const RunConfig cfg = io::config_for(cert, t_end);
  const InitialDatum datum = InitialDatum::canonical(cfg.spec, ProfileH::bump(), cfg.resolution);
  const MembershipReport report = check_membership(cfg.spec, probe_datum(datum));
  for (const CheckOutcome& c : report.checks) {
    std::cout << (c.passed ? "[ok]   " : "[FAIL] ") << c.name;
    if (!c.passed) std::cout << "  " << c.violations << " violations, e.g. " << c.witness;
    std::cout << "\n";
  }
  io::write_text_file(out, io::serialize_config(cfg));
  std::cout << "wrote " << out.string() << "\n";
  return report.passed() ? 0 : kExitFail;
}

int cmd_run(const fs::path& config, const fs::path& out) {
  const RunConfig cfg = io::load_config(config);
  try {
    const RunRecord rec = io::run_pipeline(cfg, out);
    const DiagnosticsRow& last = rec.rows.back();
    std::cout << "shells " << rec.manifest.shell_count << ", steps " << rec.manifest.steps << ", t "
              << format_double(last.t) << ", r_max " << format_double(last.r_max) << ", r_min "
              << format_double(last.r_min) << "\n"
              << "wrote " << out.string() << "\n";
  } catch (const StiffnessError& e) {
    std::cerr << "stiffness: " << e.what() << " (shell " << e.shell_id() << ", t " << format_double(e.time()) << ")\n";
    return kExitStiff;
  }
  return 0;
}

int cmd_verify(const fs::path& cert_path, const fs::path& run_dir, std::optional<fs::path> out) {
  const BoundsCertificate cert = io::load_certificate(cert_path);
  const RunRecord run = io::load_run(run_dir);
  const VerificationReport report = verify_proof_chain(run, cert);
  const fs::path report_path = out.value_or(run_dir / "report.json");
  io::write_json_file(report_path, io::report_json(report, cert));
  if (report.refused) {
    std::cout << "refused: " << report.refusal_reason << "\n";
    return kExitRefused;
  }
  for (const StageResult& s : report.stages) {
    std::cout << "(" << s.id << ") " << to_string(s.status) << "  " << s.name << ": " << s.detail;
    if (s.witness_shell) std::cout << " [shell " << *s.witness_shell << "]";
    std::cout << "\n";
  }
  std::cout << "wrote " << report_path.string() << "\n";
  return report.passed() ? 0 : kExitFail;
}

int cmd_oracle(std::optional<fs::path> out) {
  const SuiteResult suites[] = {closed_form_suite(), turning_suite(), envelope_suite()};
  io::json j = io::json::array();
  bool ok = true;
  for (const SuiteResult& s : suites) {
    std::cout << (s.passed() ? "[PASS] " : "[FAIL] ") << s.name << ": " << s.cases << " cases, " << s.violations
              << " violations, worst " << format_double(s.worst) << "\n";
    if (!s.first_violation.empty()) std::cout << "       first: " << s.first_violation << "\n";
    ok = ok && s.passed();
    j.push_back(io::suite_json(s));
  }
  if (out) io::write_json_file(*out, j);
  return ok ? 0 : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Focusing simulator and bound checker for spherically symmetric Vlasov-Poisson"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (results do not depend on it)")->check(CLI::NonNegativeNumber);

  double c1 = 0.0, c2 = 0.0;
  std::optional<double> T, eps, t_end;
  bool exploratory = false;
  std::string out, config, run_dir;

  auto* design = app.add_subcommand("design", "choose class parameters and write a bounds certificate");
  design->add_option("--c1", c1, "mass-side constant C1")->required()->check(CLI::PositiveNumber);
  design->add_option("--c2", c2, "target lower bound C2")->required()->check(CLI::PositiveNumber);
  design->add_option("--t", T, "growth time; selects the prescribed-time recipe")->check(CLI::PositiveNumber);
  design->add_option("--eps", eps, "shell thickness parameter (default: half the admissible maximum)")
      ->check(CLI::PositiveNumber);
  design->add_flag("--exploratory", exploratory, "accept eps outside the admissible range");
  design->add_option("--out", out, "certificate file")->required();

  auto* init = app.add_subcommand("init", "write a run config for a certificate and check the sampled data");
  init->add_option("--config", config, "certificate file")->required()->check(CLI::ExistingFile);
  init->add_option("--out", out, "run config to write")->required();
  init->add_option("--t", t_end, "end time (default: twice the focusing time)")->check(CLI::PositiveNumber);

  auto* run = app.add_subcommand("run", "integrate a run config into an output directory");
  run->add_option("--config", config, "run config")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "output directory")->required();

  auto* verify = app.add_subcommand("verify", "check a run against a certificate");
  verify->add_option("--config", config, "certificate file")->required()->check(CLI::ExistingFile);
  verify->add_option("--run", run_dir, "run directory")->required()->check(CLI::ExistingDirectory);
  verify->add_option("--out", out, "report file (default: <run>/report.json)");

  auto* oracle = app.add_subcommand("oracle", "run the turning/envelope property suite against the ODE oracle");
  oracle->add_option("--out", out, "JSON summary file");

  for (auto* sub : {design, init, run, verify, oracle}) {
    sub->add_option("--threads", threads, "worker threads")->check(CLI::NonNegativeNumber);
  }

  CLI11_PARSE(app, argc, argv);
  set_thread_count(threads);

  auto optional_path = [&]() -> std::optional<fs::path> {
    if (out.empty()) return std::nullopt;
    return fs::path(out);
  };
  try {
    if (*design) return cmd_design(c1, c2, T, eps, exploratory, out);
    if (*init) return cmd_init(config, out, t_end);
    if (*run) return cmd_run(config, out);
    if (*verify) return cmd_verify(config, run_dir, optional_path());
    if (*oracle) return cmd_oracle(optional_path());
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRefused;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
  return 0;
}

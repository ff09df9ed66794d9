#pragma once

// Run configs, certificates and run manifests as sectioned text files.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vpfocus/error.hpp"
#include "vpfocus/io/ini.hpp"
#include "vpfocus/run_record.hpp"
#include "vpfocus/theorem_designer.hpp"

namespace vpfocus::io {

// --- class parameters ---------------------------------------------------------

inline void put_class(Ini& ini, const ClassSpec& spec) {
  put(ini, "class", "a0", spec.a0);
  put(ini, "class", "a1", spec.a1);
  put(ini, "class", "eps", spec.eps);
  if (spec.target_mass) put(ini, "class", "target_mass", *spec.target_mass);
  put(ini, "class", "delta_r", spec.delta_r);
  put(ini, "class", "delta_w", spec.delta_w);
}

/// delta_r and delta_w are derived; when present they must agree with a0, a1, eps.
inline ClassSpec read_class(IniReader& in) {
  if (!in.has_section("class")) throw ValidationError(in.source() + ": missing [class] section");
  const double a0 = in.require_double("class", "a0");
  const double a1 = in.require_double("class", "a1");
  const double eps = in.require_double("class", "eps");
  const auto mass = in.optional_double("class", "target_mass");
  ClassSpec spec;
  try {
    spec = ClassSpec::make(a0, a1, eps, mass);
  } catch (const ParameterError& e) {
    throw ValidationError(in.source() + ": " + e.what());
  }
  const auto dr = in.optional_double("class", "delta_r");
  const auto dw = in.optional_double("class", "delta_w");
  if ((dr && *dr != spec.delta_r) || (dw && *dw != spec.delta_w)) {
    throw ValidationError(in.source() + ": [class] delta_r/delta_w disagree with a0, a1, eps");
  }
  return spec;
}

// --- run config ---------------------------------------------------------------

inline void put_config(Ini& ini, const RunConfig& cfg) {
  put(ini, "run", "format_version", kFormatVersion);
  put(ini, "physics", "sign", std::string("repulsive"));
  put_class(ini, cfg.spec);
  put(ini, "sampler", "nr", cfg.resolution.nr);
  put(ini, "sampler", "nu", cfg.resolution.nu);
  put(ini, "sampler", "ns", cfg.resolution.ns);
  const IntegratorConfig& ic = cfg.integrator;
  put(ini, "integrator", "dt_max", ic.dt_max);
  put(ini, "integrator", "cfl", ic.cfl);
  put(ini, "integrator", "t_end", ic.t_end);
  put(ini, "integrator", "output_stride", ic.output_stride);
  put(ini, "integrator", "oracle_tolerance", ic.oracle_tolerance);
  put(ini, "integrator", "mark_times", join_doubles(ic.mark_times));
  if (cfg.certificate) {
    put(ini, "certificate", "theorem", cfg.certificate->theorem);
    put(ini, "certificate", "c1", cfg.certificate->c1);
    put(ini, "certificate", "c2", cfg.certificate->c2);
    put(ini, "certificate", "T", cfg.certificate->T);
  }
  put(ini, "output", "snapshots", cfg.write_snapshots);
  if (cfg.restart_from) put(ini, "restart", "from", *cfg.restart_from);
}

inline RunConfig read_config(IniReader& in) {
  if (in.has_section("run")) {
    const int version = in.require_int("run", "format_version");
    if (version != kFormatVersion) {
      throw ValidationError(in.source() + ": unsupported format_version " + std::to_string(version));
    }
  }
  if (const auto sign = in.get("physics", "sign")) {
    if (*sign == "attractive") {
      throw ValidationError(in.source() + ": [physics] sign = attractive is not supported; only the repulsive case is simulated");
    }
    if (*sign != "repulsive") throw ValidationError(in.source() + ": [physics] sign must be 'repulsive'");
  }
  RunConfig cfg;
  cfg.spec = read_class(in);
  if (in.has_section("sampler")) {
    cfg.resolution.nr = in.require_int("sampler", "nr");
    cfg.resolution.nu = in.require_int("sampler", "nu");
    cfg.resolution.ns = in.require_int("sampler", "ns");
  }
  IntegratorConfig& ic = cfg.integrator;
  if (!in.has_section("integrator")) throw ValidationError(in.source() + ": missing [integrator] section");
  ic.dt_max = in.require_double("integrator", "dt_max");
  ic.cfl = in.require_double("integrator", "cfl");
  ic.t_end = in.require_double("integrator", "t_end");
  ic.output_stride = in.require_int("integrator", "output_stride");
  if (auto tol = in.optional_double("integrator", "oracle_tolerance")) ic.oracle_tolerance = *tol;
  ic.mark_times = in.double_list("integrator", "mark_times");
  if (in.has_section("certificate")) {
    CertificateRef ref;
    ref.theorem = in.require_int("certificate", "theorem");
    if (ref.theorem != 1 && ref.theorem != 2) throw ValidationError(in.source() + ": [certificate] theorem must be 1 or 2");
    ref.c1 = in.require_double("certificate", "c1");
    ref.c2 = in.require_double("certificate", "c2");
    ref.T = in.require_double("certificate", "T");
    cfg.certificate = ref;
  }
  cfg.write_snapshots = in.optional_bool("output", "snapshots", true);
  if (auto from = in.get("restart", "from")) cfg.restart_from = *from;
  try {
    cfg.resolution.validate();
    ic.validate();
  } catch (const ParameterError& e) {
    throw ValidationError(in.source() + ": " + e.what());
  }
  return cfg;
}

inline std::string serialize_config(const RunConfig& cfg) {
  Ini ini;
  put_config(ini, cfg);
  return format_ini(ini);
}

inline RunConfig parse_config(const std::string& text, const std::string& source = "<config>") {
  const Ini ini = parse_ini(text, source);
  IniReader in(ini, source);
  RunConfig cfg = read_config(in);
  in.finish();
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  const Ini ini = read_ini_file(path);
  IniReader in(ini, path.string());
  RunConfig cfg = read_config(in);
  in.finish();
  return cfg;
}

// --- certificate ----------------------------------------------------------------

inline Ini certificate_ini(const BoundsCertificate& c) {
  Ini ini;
  const std::string s = "certificate";
  put(ini, s, "theorem", c.theorem_number());
  put(ini, s, "c1", c.c1);
  put(ini, s, "c2", c.c2);
  put(ini, s, "T", c.T);
  put(ini, s, "applicability", std::string(to_string(c.applicability)));
  if (!c.violated_constraint.empty()) put(ini, s, "violated_constraint", c.violated_constraint);
  put(ini, s, "eps_admissible_max", c.eps_admissible_max);
  put(ini, s, "sup_R_bound", c.sup_R_bound);
  if (c.rho0_sup_bound) put(ini, s, "rho0_sup_bound", *c.rho0_sup_bound);
  if (c.e0_sup_bound) put(ini, s, "E0_sup_bound", *c.e0_sup_bound);
  put(ini, s, "rhoT_lower", c.rhoT_lower);
  put(ini, s, "ET_lower", c.ET_lower);
  put(ini, s, "mass_used", c.mass_used);
  put(ini, s, "rhoT_chain", c.chain.rho_lower);
  put(ini, s, "ET_chain", c.chain.e_lower);
  if (c.c0) put(ini, s, "C0", *c.c0);
  if (c.eta) put(ini, s, "eta", *c.eta);
  put_class(ini, c.spec);
  return ini;
}

inline std::string serialize_certificate(const BoundsCertificate& c) { return format_ini(certificate_ini(c)); }

/// Rebuilds the certificate from its inputs (theorem, C1, C2, T, class) and
/// requires every stored derived value to match the recomputation exactly.
inline BoundsCertificate read_certificate(IniReader& in) {
  if (!in.has_section("certificate")) throw ValidationError(in.source() + ": missing [certificate] section");
  const std::string s = "certificate";
  const int theorem = in.require_int(s, "theorem");
  const double c1 = in.require_double(s, "c1");
  const double c2 = in.require_double(s, "c2");
  const double T = in.require_double(s, "T");
  const std::string applicability = in.require(s, "applicability");
  const ClassSpec spec = read_class(in);
  const bool exploratory = applicability == "exploratory";

  BoundsCertificate cert;
  try {
    if (theorem == 1) {
      cert = theorem1_certificate(c1, c2, spec, exploratory);
    } else if (theorem == 2) {
      cert = theorem2_certificate(c1, c2, T, spec, exploratory);
    } else {
      throw ValidationError(in.source() + ": [certificate] theorem must be 1 or 2");
    }
  } catch (const ParameterError& e) {
    throw ValidationError(in.source() + ": " + e.what());
  }

  auto mismatch = [&](const std::string& key) {
    return ValidationError(in.source() + ": [certificate] " + key + " does not match the value recomputed from the class parameters");
  };
  auto check = [&](const std::string& key, double expected) {
    if (in.require_double(s, key) != expected) throw mismatch(key);
  };
  auto check_optional = [&](const std::string& key, const std::optional<double>& expected) {
    const auto got = in.optional_double(s, key);
    if (got != expected) throw mismatch(key);
  };
  if (std::string(to_string(cert.applicability)) != applicability) throw mismatch("applicability");
  if (in.get(s, "violated_constraint").value_or("") != cert.violated_constraint) throw mismatch("violated_constraint");
  check("T", cert.T);
  check("eps_admissible_max", cert.eps_admissible_max);
  check("sup_R_bound", cert.sup_R_bound);
  check_optional("rho0_sup_bound", cert.rho0_sup_bound);
  check_optional("E0_sup_bound", cert.e0_sup_bound);
  check("rhoT_lower", cert.rhoT_lower);
  check("ET_lower", cert.ET_lower);
  check("mass_used", cert.mass_used);
  check("rhoT_chain", cert.chain.rho_lower);
  check("ET_chain", cert.chain.e_lower);
  check_optional("C0", cert.c0);
  check_optional("eta", cert.eta);
  return cert;
}

inline BoundsCertificate parse_certificate(const std::string& text, const std::string& source = "<certificate>") {
  const Ini ini = parse_ini(text, source);
  IniReader in(ini, source);
  BoundsCertificate cert = read_certificate(in);
  in.finish();
  return cert;
}

inline BoundsCertificate load_certificate(const std::filesystem::path& path) {
  const Ini ini = read_ini_file(path);
  IniReader in(ini, path.string());
  BoundsCertificate cert = read_certificate(in);
  in.finish();
  return cert;
}

/// Run config for a certificate: marks T and runs on past the focus.
inline RunConfig config_for(const BoundsCertificate& cert, std::optional<double> t_end = std::nullopt,
                            SampleResolution res = {}) {
  RunConfig cfg;
  cfg.spec = cert.spec;
  cfg.resolution = res;
  const double focus = cert.spec.a0 / std::abs(cert.spec.a1);
  cfg.integrator.t_end = t_end.value_or(2.0 * focus);
  cfg.integrator.dt_max = focus / 200.0;
  cfg.integrator.mark_times = {cert.T};
  cfg.certificate = cert.ref();
  return cfg;
}

// --- manifest ---------------------------------------------------------------------

inline Ini manifest_ini(const RunManifest& m) {
  Ini ini;
  put_config(ini, m.config);
  put(ini, "manifest", "code_version", m.code_version);
  put(ini, "manifest", "start_time", m.start_time);
  put(ini, "manifest", "shell_count", static_cast<std::uint64_t>(m.shell_count));
  put(ini, "manifest", "total_mass", m.total_mass);
  put(ini, "manifest", "rho0_sup_marginal", m.rho0_sup_marginal);
  put(ini, "manifest", "final_time", m.final_time);
  put(ini, "manifest", "steps", m.steps);
  return ini;
}

inline RunManifest load_manifest(const std::filesystem::path& path) {
  const Ini ini = read_ini_file(path);
  IniReader in(ini, path.string());
  RunManifest m;
  m.config = read_config(in);
  m.code_version = in.require("manifest", "code_version");
  m.start_time = in.require_double("manifest", "start_time");
  const long long count = in.require_integer("manifest", "shell_count");
  if (count < 0) throw ValidationError(path.string() + ": negative shell_count");
  m.shell_count = static_cast<std::size_t>(count);
  m.total_mass = in.require_double("manifest", "total_mass");
  m.rho0_sup_marginal = in.require_double("manifest", "rho0_sup_marginal");
  m.final_time = in.require_double("manifest", "final_time");
  const long long steps = in.require_integer("manifest", "steps");
  if (steps < 0) throw ValidationError(path.string() + ": negative steps");
  m.steps = static_cast<std::uint64_t>(steps);
  in.finish();
  return m;
}

}  // namespace vpfocus::io

#pragma once

// JSON documents: proof-chain verification reports, membership reports, and
// property-suite summaries.

#include <string>

#include <json.hpp>

#include "vpfocus/initial_data.hpp"
#include "vpfocus/io/ini.hpp"
#include "vpfocus/property_suite.hpp"
#include "vpfocus/theorem_designer.hpp"

namespace vpfocus::io {

using nlohmann::json;

inline json certificate_json(const BoundsCertificate& c) {
  json j;
  j["theorem"] = c.theorem_number();
  j["c1"] = c.c1;
  j["c2"] = c.c2;
  j["T"] = c.T;
  j["applicability"] = to_string(c.applicability);
  if (!c.violated_constraint.empty()) j["violated_constraint"] = c.violated_constraint;
  j["eps"] = c.spec.eps;
  j["eps_admissible_max"] = c.eps_admissible_max;
  j["a0"] = c.spec.a0;
  j["a1"] = c.spec.a1;
  if (c.spec.target_mass) j["target_mass"] = *c.spec.target_mass;
  j["sup_R_bound"] = c.sup_R_bound;
  if (c.rho0_sup_bound) j["rho0_sup_bound"] = *c.rho0_sup_bound;
  if (c.e0_sup_bound) j["E0_sup_bound"] = *c.e0_sup_bound;
  j["rhoT_lower"] = c.rhoT_lower;
  j["ET_lower"] = c.ET_lower;
  j["mass_used"] = c.mass_used;
  j["rhoT_chain"] = c.chain.rho_lower;
  j["ET_chain"] = c.chain.e_lower;
  if (c.c0) j["C0"] = *c.c0;
  if (c.eta) j["eta"] = *c.eta;
  return j;
}

inline json report_json(const VerificationReport& r, const BoundsCertificate& cert) {
  json j;
  j["format_version"] = kFormatVersion;
  j["code_version"] = kCodeVersion;
  j["certificate"] = certificate_json(cert);
  j["refused"] = r.refused;
  if (r.refused) j["refusal_reason"] = r.refusal_reason;
  j["passed"] = r.passed();
  json stages = json::array();
  for (const StageResult& s : r.stages) {
    json e;
    e["id"] = s.id;
    e["name"] = s.name;
    e["status"] = to_string(s.status);
    e["detail"] = s.detail;
    if (s.witness_shell) e["witness_shell"] = *s.witness_shell;
    stages.push_back(e);
  }
  j["stages"] = stages;
  if (const StageResult* f = r.first_failure()) j["first_failure"] = f->id;
  return j;
}

inline json membership_json(const MembershipReport& r) {
  json j;
  j["passed"] = r.passed();
  json checks = json::array();
  for (const CheckOutcome& c : r.checks) {
    json e;
    e["name"] = c.name;
    e["passed"] = c.passed;
    e["severity"] = c.severity == Severity::hard ? "hard" : "tolerance";
    e["violations"] = c.violations;
    if (!c.witness.empty()) e["witness"] = c.witness;
    checks.push_back(e);
  }
  j["checks"] = checks;
  return j;
}

inline json suite_json(const SuiteResult& s) {
  json j;
  j["name"] = s.name;
  j["cases"] = s.cases;
  j["violations"] = s.violations;
  j["worst"] = s.worst;
  j["passed"] = s.passed();
  if (!s.first_violation.empty()) j["first_violation"] = s.first_violation;
  return j;
}

inline void write_json_file(const std::filesystem::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

}  // namespace vpfocus::io

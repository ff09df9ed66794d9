#pragma once

// Parameter recipes that force density and field growth, the bounds each
// recipe guarantees, and a checker that walks the inequality chain against a
// completed run.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "vpfocus/bounds.hpp"
#include "vpfocus/error.hpp"
#include "vpfocus/initial_data.hpp"
#include "vpfocus/numeric.hpp"
#include "vpfocus/run_record.hpp"

namespace vpfocus {

enum class Theorem { small_data_growth = 1, prescribed_time_growth = 2 };

enum class Applicability {
  rigorous,      // eps inside the admissible range; every stage is meaningful
  exploratory,   // eps outside the range, accepted on request; lemma-level stages only
  inapplicable,  // eps outside the range, not accepted
};

inline const char* to_string(Applicability a) {
  switch (a) {
    case Applicability::rigorous:
      return "rigorous";
    case Applicability::exploratory:
      return "exploratory";
    case Applicability::inapplicable:
      return "inapplicable";
  }
  return "?";
}

struct BoundsCertificate {
  Theorem theorem = Theorem::small_data_growth;
  double c1 = 0.0;
  double c2 = 0.0;
  ClassSpec spec;
  double T = 0.0;
  double eps_admissible_max = 0.0;
  double sup_R_bound = 0.0;
  std::optional<double> rho0_sup_bound;
  std::optional<double> e0_sup_bound;
  double rhoT_lower = 0.0;
  double ET_lower = 0.0;
  /// Mass lower bound the chain runs on, and the sup-norm bounds it yields
  /// at radius sup_R_bound.
  double mass_used = 0.0;
  bounds::SupNormBound chain;
  std::optional<double> c0;
  std::optional<double> eta;
  Applicability applicability = Applicability::rigorous;
  std::string violated_constraint;

  int theorem_number() const { return static_cast<int>(theorem); }
  CertificateRef ref() const { return {theorem_number(), c1, c2, T}; }
};

namespace detail {

struct Constraint {
  const char* name;
  double bound;
};

inline double admissible_max(const std::vector<Constraint>& cs) {
  double m = cs.front().bound;
  for (const Constraint& c : cs) m = std::min(m, c.bound);
  return m;
}

inline std::string violated(const std::vector<Constraint>& cs, double eps) {
  std::string out;
  for (const Constraint& c : cs) {
    if (!(eps < c.bound)) {
      if (!out.empty()) out += "; ";
      out += c.name;
    }
  }
  return out;
}

inline std::vector<Constraint> theorem1_constraints(double a0, double c2) {
  return {{"eps < 1", 1.0}, {"eps < a0/4", 0.25 * a0}, {"eps < 1/(200^3 a0 C2)", 1.0 / (200.0 * 200.0 * 200.0 * a0 * c2)}};
}

inline double theorem2_c0(double c1, double T) { return 3.0 + 12.0 * std::sqrt(1.0 + c1 * T); }

inline std::vector<Constraint> theorem2_constraints(double c1, double c2, double T) {
  const double c0 = theorem2_c0(c1, T);
  const double k = 8.0 * c0;
  return {{"eps < 1", 1.0},
          {"eps < T/C0", T / c0},
          {"eps < ((1/(8 C0)^3) (C1/(6 C2)))^(1/2)", std::sqrt(1.0 / (k * k * k) * (c1 / (6.0 * c2)))}};
}

inline void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError(std::string("designer: ") + name + " must be positive");
}

inline void classify(BoundsCertificate& cert, const std::vector<Constraint>& cs, bool exploratory) {
  cert.eps_admissible_max = admissible_max(cs);
  cert.violated_constraint = violated(cs, cert.spec.eps);
  if (cert.violated_constraint.empty()) {
    cert.applicability = Applicability::rigorous;
  } else {
    cert.applicability = exploratory ? Applicability::exploratory : Applicability::inapplicable;
  }
}

}  // namespace detail

inline double theorem1_a0(double c1) { return std::cbrt(32.0 / c1); }

/// Certificate for the small-data recipe, computed from an emitted ClassSpec.
/// Every field is a pure function of (c1, c2, spec).
inline BoundsCertificate theorem1_certificate(double c1, double c2, const ClassSpec& spec, bool exploratory = false) {
  detail::require_positive(c1, "C1");
  detail::require_positive(c2, "C2");
  const double eps = spec.eps;
  if (spec.a0 != theorem1_a0(c1) || spec.a1 != -1.0 / (eps * eps) || spec.target_mass) {
    throw ParameterError("theorem1_certificate: spec does not follow the recipe for these constants");
  }
  BoundsCertificate cert;
  cert.theorem = Theorem::small_data_growth;
  cert.c1 = c1;
  cert.c2 = c2;
  cert.spec = spec;
  const double a0 = spec.a0;
  const double e2 = eps * eps;
  cert.T = a0 / std::abs(spec.a1) - 20.0 * e2 * e2;
  if (!(cert.T > 0.0)) throw ParameterError("theorem1_certificate: eps too large, T = a0/|a1| - 20 eps^4 <= 0");
  cert.sup_R_bound = 100.0 * e2;
  cert.rho0_sup_bound = 3.0 / (4.0 * pi * a0 * a0 * a0);
  cert.e0_sup_bound = 32.0 / (a0 * a0 * a0);
  cert.rhoT_lower = 1.0 / (200.0 * 200.0 * 200.0 * a0 * eps * e2);
  cert.ET_lower = 3.0 / (100.0 * 100.0 * a0 * eps);
  cert.mass_used = derived_bounds(spec).mass_lower;
  cert.chain = bounds::lemma3_lower_bounds(cert.mass_used, cert.sup_R_bound);
  detail::classify(cert, detail::theorem1_constraints(a0, c2), exploratory);
  return cert;
}

/// Small-data recipe: a0 = (32/C1)^(1/3), a1 = -eps^-2, T = a0/|a1| - 20 eps^4.
/// Without eps, picks half the admissible maximum.
inline BoundsCertificate design_theorem1(double c1, double c2, std::optional<double> eps = std::nullopt,
                                         bool exploratory = false) {
  detail::require_positive(c1, "C1");
  detail::require_positive(c2, "C2");
  const double a0 = theorem1_a0(c1);
  const double e = eps ? *eps : 0.5 * detail::admissible_max(detail::theorem1_constraints(a0, c2));
  detail::require_positive(e, "eps");
  const ClassSpec spec = ClassSpec::make(a0, -1.0 / (e * e), e);
  return theorem1_certificate(c1, c2, spec, exploratory);
}

/// Certificate for the prescribed-time recipe from an emitted ClassSpec.
inline BoundsCertificate theorem2_certificate(double c1, double c2, double T, const ClassSpec& spec,
                                              bool exploratory = false) {
  detail::require_positive(c1, "C1");
  detail::require_positive(c2, "C2");
  detail::require_positive(T, "T");
  const double eps = spec.eps;
  const double c0 = detail::theorem2_c0(c1, T);
  const double eta = c0 * eps * eps * eps;
  if (spec.a1 != -1.0 / (eps * eps) || spec.a0 != (T + eta) / (eps * eps) || spec.target_mass != c1) {
    throw ParameterError("theorem2_certificate: spec does not follow the recipe for these constants");
  }
  BoundsCertificate cert;
  cert.theorem = Theorem::prescribed_time_growth;
  cert.c1 = c1;
  cert.c2 = c2;
  cert.spec = spec;
  cert.T = T;
  cert.c0 = c0;
  cert.eta = eta;
  const double k = 8.0 * c0;
  cert.sup_R_bound = k * eps;
  cert.rhoT_lower = 3.0 * c1 / (k * k * k * eps * eps);
  cert.ET_lower = c1 / (cert.sup_R_bound * cert.sup_R_bound);
  cert.mass_used = c1;
  cert.chain = bounds::lemma3_lower_bounds(cert.mass_used, cert.sup_R_bound);
  detail::classify(cert, detail::theorem2_constraints(c1, c2, T), exploratory);
  return cert;
}

/// Prescribed-time recipe: C0 = 3 + 12 sqrt(1 + C1 T), M = C1, a1 = -eps^-2,
/// eta = C0 eps^3, a0 = eps^-2 (T + eta).
inline BoundsCertificate design_theorem2(double c1, double c2, double T, std::optional<double> eps = std::nullopt,
                                         bool exploratory = false) {
  detail::require_positive(c1, "C1");
  detail::require_positive(c2, "C2");
  detail::require_positive(T, "T");
  const double e = eps ? *eps : 0.5 * detail::admissible_max(detail::theorem2_constraints(c1, c2, T));
  detail::require_positive(e, "eps");
  const double c0 = detail::theorem2_c0(c1, T);
  const double eta = c0 * e * e * e;
  const ClassSpec spec = ClassSpec::make((T + eta) / (e * e), -1.0 / (e * e), e, c1);
  return theorem2_certificate(c1, c2, T, spec, exploratory);
}

// --- proof-chain verification ----------------------------------------------

enum class StageStatus { pass, fail, skipped };

inline const char* to_string(StageStatus s) {
  switch (s) {
    case StageStatus::pass:
      return "pass";
    case StageStatus::fail:
      return "fail";
    case StageStatus::skipped:
      return "skipped";
  }
  return "?";
}

struct StageResult {
  std::string id;
  std::string name;
  StageStatus status = StageStatus::pass;
  std::string detail;
  std::optional<std::uint64_t> witness_shell;
};

struct VerificationReport {
  bool refused = false;
  std::string refusal_reason;
  Applicability applicability = Applicability::rigorous;
  std::vector<StageResult> stages;

  bool passed() const {
    if (refused) return false;
    return std::none_of(stages.begin(), stages.end(), [](const StageResult& s) { return s.status == StageStatus::fail; });
  }

  const StageResult* first_failure() const {
    for (const StageResult& s : stages) {
      if (s.status == StageStatus::fail) return &s;
    }
    return nullptr;
  }

  const StageResult* stage(const std::string& id) const {
    for (const StageResult& s : stages) {
      if (s.id == id) return &s;
    }
    return nullptr;
  }
};

struct ChainTolerances {
  double density_rel = 1e-6;  // sampled rho0 against its bound
  double radius_rel = 1e-6;   // radius at T against sup_R_bound
  double mass_rel = 1e-10;    // K-class mass against C1
};

/// Walks the certificate's inequality chain against a completed run.
inline VerificationReport verify_proof_chain(const RunRecord& run, const BoundsCertificate& cert,
                                             const ChainTolerances& tol = {}) {
  VerificationReport report;
  report.applicability = cert.applicability;
  auto refuse = [&](std::string why) {
    report.refused = true;
    report.refusal_reason = std::move(why);
    return report;
  };
  if (cert.applicability == Applicability::inapplicable) {
    return refuse("certificate is inapplicable (violates " + cert.violated_constraint + ")");
  }
  if (!run.manifest.config.certificate || !(*run.manifest.config.certificate == cert.ref())) {
    return refuse("run manifest was not produced from this certificate");
  }
  if (!(run.manifest.config.spec == cert.spec)) return refuse("run manifest class parameters differ from the certificate");
  if (run.manifest.config.restart_from) return refuse("run was restarted; its turning history is incomplete");
  const MarkedState* at_T = run.mark_at(cert.T);
  if (at_T == nullptr || at_T->shells.empty()) return refuse("run has no state recorded at the certificate time T");
  if (run.rows.empty() || run.turning.empty()) return refuse("run record is empty");

  const bool exploratory = cert.applicability == Applicability::exploratory;
  const double M = run.manifest.total_mass;

  // (i) time-zero bounds
  StageResult s1{"i", "initial sup norms within time-zero bounds", StageStatus::pass, {}, {}};
  if (exploratory) {
    s1.status = StageStatus::skipped;
    s1.detail = "exploratory certificate";
  } else if (!cert.rho0_sup_bound || !cert.e0_sup_bound) {
    s1.status = StageStatus::skipped;
    s1.detail = "recipe makes no time-zero claim";
  } else {
    const double rho0 = run.manifest.rho0_sup_marginal;
    const double e0 = run.rows.front().e_sup_exact;
    const bool ok_rho = rho0 <= *cert.rho0_sup_bound * (1.0 + tol.density_rel);
    const bool ok_e = e0 <= *cert.e0_sup_bound;
    s1.status = ok_rho && ok_e ? StageStatus::pass : StageStatus::fail;
    s1.detail = "rho0=" + format_double(rho0) + " (bound " + format_double(*cert.rho0_sup_bound) + "), E0=" +
                format_double(e0) + " (bound " + format_double(*cert.e0_sup_bound) + ")";
  }
  report.stages.push_back(s1);

  // (ii) total mass
  StageResult s2{"ii", "total mass", StageStatus::pass, {}, {}};
  if (exploratory) {
    s2.status = StageStatus::skipped;
    s2.detail = "exploratory certificate";
  } else if (cert.theorem == Theorem::small_data_growth) {
    const DerivedBounds db = derived_bounds(cert.spec);
    s2.status = M >= db.mass_lower && M <= db.mass_upper ? StageStatus::pass : StageStatus::fail;
    s2.detail = "M=" + format_double(M) + " in [" + format_double(db.mass_lower) + ", " + format_double(db.mass_upper) + "]";
  } else {
    s2.status = std::abs(M - cert.c1) <= tol.mass_rel * cert.c1 ? StageStatus::pass : StageStatus::fail;
    s2.detail = "M=" + format_double(M) + " vs C1=" + format_double(cert.c1);
  }
  report.stages.push_back(s2);

  // (iii) no shell turns before T
  StageResult s3{"iii", "every turning time exceeds T", StageStatus::pass, {}, {}};
  {
    double earliest = std::numeric_limits<double>::infinity();
    for (const TurningRecord& rec : run.turning) {
      if (rec.t_argmin < earliest) {
        earliest = rec.t_argmin;
        if (!(rec.t_argmin > cert.T)) {
          s3.status = StageStatus::fail;
          s3.witness_shell = rec.id;
        }
      }
    }
    s3.detail = "earliest radius argmin at t=" + format_double(earliest) + ", T=" + format_double(cert.T);
  }
  report.stages.push_back(s3);

  // (iv) radius bound at T
  StageResult s4{"iv", "every radius at T within sup_R_bound", StageStatus::pass, {}, {}};
  double r_max = 0.0;
  std::uint64_t r_max_id = 0;
  for (const Shell& s : at_T->shells) {
    if (s.coords.r > r_max) {
      r_max = s.coords.r;
      r_max_id = s.id;
    }
  }
  if (!(r_max <= cert.sup_R_bound * (1.0 + tol.radius_rel))) {
    s4.status = StageStatus::fail;
    s4.witness_shell = r_max_id;
  }
  s4.detail = "max r(T)=" + format_double(r_max) + ", bound " + format_double(cert.sup_R_bound);
  report.stages.push_back(s4);

  // (v) certified sup-norm lower bounds at T
  StageResult s5{"v", "certified sup-norm lower bounds at T reach C2", StageStatus::pass, {}, {}};
  const bounds::SupNormBound lower = bounds::lemma3_lower_bounds(M, r_max);
  s5.status = lower.rho_lower >= cert.c2 && lower.e_lower >= cert.c2 ? StageStatus::pass : StageStatus::fail;
  s5.detail = "rho>=" + format_double(lower.rho_lower) + ", |E|>=" + format_double(lower.e_lower) + ", C2=" +
              format_double(cert.c2);
  report.stages.push_back(s5);
  return report;
}

}  // namespace vpfocus

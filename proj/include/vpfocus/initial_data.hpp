#pragma once

// Initial data concentrated on a thin spherical shell of nearly radially
// infalling particles, in two normalizations: bounded density ("J" class)
// and prescribed total mass ("K" class).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "vpfocus/error.hpp"
#include "vpfocus/numeric.hpp"
#include "vpfocus/phase_space.hpp"

namespace vpfocus {

/// Parameters of a data class. `target_mass` present means the K class.
struct ClassSpec {
  double a0 = 1.0;
  double a1 = -1.0;
  double eps = 0.5;
  std::optional<double> target_mass;
  double delta_r = 0.0;
  double delta_w = 0.0;

  static ClassSpec make(double a0, double a1, double eps, std::optional<double> target_mass = std::nullopt) {
    if (!(a0 > 0.0) || !std::isfinite(a0)) throw ParameterError("ClassSpec: a0 must be positive");
    if (!(a1 < 0.0) || !std::isfinite(a1)) throw ParameterError("ClassSpec: a1 must be negative");
    if (!(eps > 0.0) || !std::isfinite(eps)) throw ParameterError("ClassSpec: eps must be positive");
    if (target_mass && !(*target_mass > 0.0)) throw ParameterError("ClassSpec: target mass must be positive");
    ClassSpec s;
    s.a0 = a0;
    s.a1 = a1;
    s.eps = eps;
    s.target_mass = target_mass;
    s.delta_r = eps * eps * eps;
    s.delta_w = (std::abs(a1) * s.delta_r + eps) / a0;
    return s;
  }

  bool is_mass_class() const { return target_mass.has_value(); }

  /// Upper bound 3/(4 pi a0^3) on the initial charge density.
  double rho_bound() const { return 3.0 / (4.0 * pi * a0 * a0 * a0); }

  friend bool operator==(const ClassSpec&, const ClassSpec&) = default;
};

struct DerivedBounds {
  double delta_w = 0.0;
  double mass_lower = 0.0;  // J class only
  double mass_upper = 0.0;  // J class only
  double a0 = 1.0;
  double eps = 0.0;

  /// Angular momentum bound (r/a0)^2 eps^2 on the support.
  double ell_max(double r) const {
    const double q = r / a0;
    return q * q * eps * eps;
  }
};

inline DerivedBounds derived_bounds(const ClassSpec& spec) {
  DerivedBounds b;
  b.delta_w = (std::abs(spec.a1) * spec.delta_r + spec.eps) / spec.a0;
  const double e3 = spec.eps * spec.eps * spec.eps;
  b.mass_lower = 3.0 * e3 / spec.a0;
  b.mass_upper = 8.0 * e3 / spec.a0;
  b.a0 = spec.a0;
  b.eps = spec.eps;
  return b;
}

/// Velocity profile H on [0, inf) with supp H in [0, 1] and
/// integral of H(|u|^2) over 3-space equal to 3/(4 pi).
class ProfileH {
 public:
  using Shape = std::function<double(double)>;

  /// c * exp(-1/(1-s)) on [0, 1), with c fixed by quadrature.
  static ProfileH bump() {
    static const double c = normalizing_constant(bump_shape);
    return ProfileH(bump_shape, c);
  }

  /// Normalizes an arbitrary nonnegative shape supported in [0, 1].
  static ProfileH from_shape(Shape shape) {
    const double c = normalizing_constant(shape);
    return ProfileH(std::move(shape), c);
  }

  static ProfileH zero() {
    return ProfileH([](double) { return 0.0; }, 0.0);
  }

  /// Same shape multiplied by `factor`; breaks the normalization on purpose.
  ProfileH scaled(double factor) const { return ProfileH(shape_, scale_ * factor); }

  double operator()(double s) const {
    if (s < 0.0 || s > support_bound()) return 0.0;
    return scale_ * shape_(s);
  }

  static constexpr double support_bound() { return 1.0; }
  static constexpr double normalization() { return 3.0 / (4.0 * pi); }

 private:
  ProfileH(Shape shape, double scale) : shape_(std::move(shape)), scale_(scale) {}

  static double bump_shape(double s) { return s < 1.0 ? std::exp(-1.0 / (1.0 - s)) : 0.0; }

  static double normalizing_constant(const Shape& shape) {
    boost::math::quadrature::tanh_sinh<double> integrator;
    const double raw = 4.0 * pi * integrator.integrate([&](double u) { return shape(u * u) * u * u; }, 0.0, 1.0);
    if (!(raw > 0.0)) throw ParameterError("ProfileH: shape has zero integral");
    return normalization() / raw;
  }

  Shape shape_;
  double scale_;
};

/// 4 pi * int_0^inf H(u^2) u^2 du, by tanh-sinh quadrature on [0, support].
template <class Profile>
double profile_normalization(const Profile& h, double support_radius) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  return 4.0 * pi * integrator.integrate([&](double u) { return h(u * u) * u * u; }, 0.0, support_radius);
}

/// H_eps(s) = eps^-3 H(s / eps^2); supported in [0, eps^2].
class RescaledProfile {
 public:
  RescaledProfile(ProfileH h, double eps) : h_(std::move(h)), eps_(eps) {
    if (!(eps > 0.0)) throw ParameterError("rescale_profile: eps must be positive");
  }

  double operator()(double s) const { return h_(s / (eps_ * eps_)) / (eps_ * eps_ * eps_); }
  double eps() const { return eps_; }
  double support_bound() const { return eps_ * eps_; }
  const ProfileH& base() const { return h_; }

 private:
  ProfileH h_;
  double eps_;
};

inline RescaledProfile rescale_profile(const ProfileH& h, double eps) { return RescaledProfile(h, eps); }

/// Smooth cutoff: 1 on [a0 - dr/2, a0 + dr/2], 0 outside (a0 - dr, a0 + dr).
class CutoffPhi {
 public:
  CutoffPhi(double a0, double delta_r) : a0_(a0), delta_r_(delta_r) {
    if (!(delta_r > 0.0)) throw ParameterError("CutoffPhi: delta_r must be positive");
  }

  double operator()(double r) const {
    const double t = (delta_r_ - std::abs(r - a0_)) / (0.5 * delta_r_);
    return smoothstep(t);
  }

  double a0() const { return a0_; }
  double delta_r() const { return delta_r_; }

 private:
  static double psi(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
  static double smoothstep(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = psi(t);
    return a / (a + psi(1.0 - t));
  }

  double a0_;
  double delta_r_;
};

/// Grid sizes of the sampler along r, the normalized radial-velocity offset
/// u in (-1, 1) and the normalized angular momentum s in (0, 1).
struct SampleResolution {
  int nr = 24;
  int nu = 40;
  int ns = 24;

  void validate() const {
    if (nr < 2 || nu < 2 || ns < 2) throw ParameterError("SampleResolution: need at least 2 points per axis");
  }

  friend bool operator==(const SampleResolution&, const SampleResolution&) = default;
};

/// f0 = H_eps(|a1 x - a0 v|^2) phi(|x|), times target/||f0||_1 for the K class.
class InitialDatum {
 public:
  InitialDatum(ClassSpec spec, ProfileH h, double mass_scale = 1.0, SampleResolution norm_res = {})
      : spec_(spec),
        h_eps_(std::move(h), spec.eps),
        phi_(spec.a0, spec.delta_r),
        scale_(mass_scale),
        norm_res_(norm_res) {}

  /// Canonical datum; for the K class the L1 norm is taken with the sampler
  /// quadrature at `res`, so sampling reproduces the target mass.
  static InitialDatum canonical(const ClassSpec& spec, const ProfileH& h = ProfileH::bump(),
                                const SampleResolution& res = {});

  const ClassSpec& spec() const { return spec_; }
  const RescaledProfile& profile() const { return h_eps_; }
  const CutoffPhi& cutoff() const { return phi_; }
  double mass_scale() const { return scale_; }
  const SampleResolution& normalization_resolution() const { return norm_res_; }

  double operator()(const RadialCoordinates& c) const {
    if (!(c.r > 0.0)) throw DomainError("f0: undefined at r = 0");
    const double d = spec_.a1 * c.r - spec_.a0 * c.w;
    const double q = d * d + spec_.a0 * spec_.a0 * c.ell / (c.r * c.r);
    return scale_ * h_eps_(q) * phi_(c.r);
  }

  double evaluate(const Vec3& x, const Vec3& v) const {
    const double r = norm(x);
    if (!(r > 0.0)) throw DomainError("f0: undefined at x = 0");
    const Vec3 d{spec_.a1 * x[0] - spec_.a0 * v[0], spec_.a1 * x[1] - spec_.a0 * v[1],
                 spec_.a1 * x[2] - spec_.a0 * v[2]};
    return scale_ * h_eps_(dot(d, d)) * phi_(r);
  }

  /// rho0(r) = pi/r^2 * int int f0 dw dell, midpoint rule on the per-radius
  /// support box |a1 r - a0 w| < eps, 0 < ell < (r/a0)^2 eps^2.
  double density(double r, int nw = 512, int nl = 512) const {
    if (!(r > 0.0)) throw DomainError("density: r must be positive");
    const double abs_a1 = std::abs(spec_.a1);
    const double w_lo = (-spec_.eps - abs_a1 * r) / spec_.a0;
    const double w_hi = (spec_.eps - abs_a1 * r) / spec_.a0;
    const double l_hi = (r / spec_.a0) * (r / spec_.a0) * spec_.eps * spec_.eps;
    const double dw = (w_hi - w_lo) / nw;
    const double dl = l_hi / nl;
    std::vector<double> row(static_cast<std::size_t>(nl));
    std::vector<double> cols(static_cast<std::size_t>(nw));
    for (int j = 0; j < nw; ++j) {
      const double w = w_lo + (j + 0.5) * dw;
      for (int k = 0; k < nl; ++k) row[k] = (*this)({r, w, (k + 0.5) * dl});
      cols[j] = pairwise_sum(row);
    }
    return pi / (r * r) * pairwise_sum(cols) * dw * dl;
  }

 private:
  ClassSpec spec_;
  RescaledProfile h_eps_;
  CutoffPhi phi_;
  double scale_;
  SampleResolution norm_res_;
};

namespace detail {

struct GridCell {
  Shell shell;
  double f = 0.0;
};

/// Midpoint cells of the sheared tensor grid (r, u, s) with
/// w = (eps u - |a1| r)/a0 and ell = s (r/a0)^2 eps^2. The weight field holds
/// the unscaled quadrature mass 4 pi^2 f dr dw dell. `extent` > 1 widens the
/// grid beyond the support for probing.
template <class Visit>
void for_each_cell(const InitialDatum& datum, const SampleResolution& res, double extent, Visit&& visit) {
  res.validate();
  const ClassSpec& s = datum.spec();
  const double abs_a1 = std::abs(s.a1);
  const double r_lo = s.a0 - extent * s.delta_r;
  const double dr = 2.0 * extent * s.delta_r / res.nr;
  const double du = 2.0 * extent / res.nu;
  const double ds = extent / res.ns;
  std::uint64_t id = 0;
  for (int i = 0; i < res.nr; ++i) {
    const double r = r_lo + (i + 0.5) * dr;
    if (!(r > 0.0)) {
      id += static_cast<std::uint64_t>(res.nu) * res.ns;
      continue;
    }
    const double ell_scale = (r / s.a0) * (r / s.a0) * s.eps * s.eps;
    const double dw = s.eps * du / s.a0;
    const double dl = ell_scale * ds;
    for (int j = 0; j < res.nu; ++j) {
      const double u = -extent + (j + 0.5) * du;
      const double w = (s.eps * u - abs_a1 * r) / s.a0;
      for (int k = 0; k < res.ns; ++k, ++id) {
        const double sv = (k + 0.5) * ds;
        const RadialCoordinates c{r, w, sv * ell_scale};
        const double f = datum(c);
        visit(GridCell{Shell{c, 4.0 * pi * pi * f * dr * dw * dl, id}, f}, u * u + sv);
      }
    }
  }
}

}  // namespace detail

/// Quadrature mass of the datum on the sampler grid.
inline double quadrature_mass(const InitialDatum& datum, const SampleResolution& res) {
  std::vector<double> terms;
  detail::for_each_cell(datum, res, 1.0, [&](const detail::GridCell& cell, double q) {
    if (cell.f > 0.0 && q < 1.0 - 1e-12) terms.push_back(cell.shell.weight);
  });
  return pairwise_sum(terms);
}

inline InitialDatum InitialDatum::canonical(const ClassSpec& spec, const ProfileH& h, const SampleResolution& res) {
  InitialDatum datum(spec, h, 1.0, res);
  if (!spec.target_mass) return datum;
  const double l1 = quadrature_mass(datum, res);
  if (!(l1 > 0.0)) throw EmptyEnsembleError("K-class normalization: datum has zero mass on the sampler grid");
  return InitialDatum(spec, h, *spec.target_mass / l1, res);
}

/// Shells at every midpoint cell strictly inside the support; ell > 0 always.
inline Ensemble sample_ensemble(const InitialDatum& datum, const SampleResolution& res = {}) {
  std::vector<Shell> shells;
  detail::for_each_cell(datum, res, 1.0, [&](const detail::GridCell& cell, double q) {
    // cells on the boundary of the open support are never populated
    if (cell.f > 0.0 && q < 1.0 - 1e-12) shells.push_back(cell.shell);
  });
  if (shells.empty()) {
    throw EmptyEnsembleError("sample_ensemble: no grid cell falls inside the support (zero profile or coarse grid)");
  }
  return Ensemble(std::move(shells), 0.0);
}

inline Ensemble sample_ensemble(const ClassSpec& spec, const ProfileH& h = ProfileH::bump(),
                                const SampleResolution& res = {}) {
  return sample_ensemble(InitialDatum::canonical(spec, h, res), res);
}

// --- membership validation -------------------------------------------------

struct SupportSample {
  RadialCoordinates at;
  double f = 0.0;
};

struct DensitySample {
  double r = 0.0;
  double rho = 0.0;
};

/// Discrete view of a candidate f0: support points, rho0 at probe radii and
/// (for the K class) its total mass.
struct SampledDatum {
  std::vector<SupportSample> support;
  std::vector<DensitySample> density;
  std::optional<double> mass;
};

struct ProbeResolution {
  SampleResolution support{24, 48, 24};
  double extent = 1.5;  // probe box relative to the class box
  int n_radii = 33;
  int nw = 512;
  int nl = 512;
};

inline SampledDatum probe_datum(const InitialDatum& datum, const ProbeResolution& probe = {}) {
  SampledDatum out;
  detail::for_each_cell(datum, probe.support, probe.extent, [&](const detail::GridCell& cell, double) {
    if (cell.f > 0.0) out.support.push_back({cell.shell.coords, cell.f});
  });
  const ClassSpec& s = datum.spec();
  std::vector<double> radii;
  for (int i = 0; i < probe.n_radii; ++i) {
    radii.push_back(s.a0 - s.delta_r + 2.0 * s.delta_r * (i + 0.5) / probe.n_radii);
  }
  radii.push_back(s.a0 - 0.5 * s.delta_r);
  radii.push_back(s.a0 + 0.5 * s.delta_r);
  radii.push_back(s.a0);
  std::sort(radii.begin(), radii.end());
  for (double r : radii) out.density.push_back({r, datum.density(r, probe.nw, probe.nl)});
  if (s.target_mass) {
    out.mass = quadrature_mass(datum, datum.normalization_resolution());
  }
  return out;
}

enum class Severity { hard, tolerance };

struct CheckOutcome {
  std::string name;
  bool passed = true;
  Severity severity = Severity::hard;
  std::string witness;  // first violating point, empty on pass
  std::size_t violations = 0;
};

struct MembershipReport {
  std::vector<CheckOutcome> checks;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckOutcome& c) { return c.passed; });
  }

  const CheckOutcome* find(const std::string& name) const {
    for (const CheckOutcome& c : checks) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }
};

struct MembershipTolerances {
  double density_rel = 1e-6;
  double mass_rel = 1e-10;
};

inline std::string describe(const RadialCoordinates& c) {
  std::ostringstream os;
  os << "(r=" << format_double(c.r) << ", w=" << format_double(c.w) << ", ell=" << format_double(c.ell) << ")";
  return os.str();
}

/// Checks the support, density and mass conditions defining the class.
inline MembershipReport check_membership(const ClassSpec& spec, const SampledDatum& datum,
                                         const MembershipTolerances& tol = {}) {
  const double abs_a1 = std::abs(spec.a1);
  const double ratio = spec.a0 / abs_a1;
  const DerivedBounds db = derived_bounds(spec);

  auto support_check = [&](std::string name, auto&& ok) {
    CheckOutcome out{std::move(name), true, Severity::hard, {}, 0};
    for (const SupportSample& p : datum.support) {
      if (!(p.f > 0.0) || ok(p.at)) continue;
      if (out.passed) out.witness = describe(p.at);
      out.passed = false;
      ++out.violations;
    }
    return out;
  };

  MembershipReport report;
  report.checks.push_back(support_check("suppcond", [&](const RadialCoordinates& c) {
    const double x = c.r + ratio * c.w;
    return x * x + c.ell / (c.r * c.r) * ratio * ratio < spec.eps * spec.eps / (spec.a1 * spec.a1);
  }));
  report.checks.push_back(support_check("shell_radius", [&](const RadialCoordinates& c) {
    return spec.a0 - spec.delta_r < c.r && c.r < spec.a0 + spec.delta_r;
  }));
  report.checks.push_back(support_check("radial_offset", [&](const RadialCoordinates& c) {
    return std::abs(c.r + ratio * c.w) < spec.eps / abs_a1;
  }));
  report.checks.push_back(
      support_check("angular_momentum", [&](const RadialCoordinates& c) { return c.ell < db.ell_max(c.r); }));
  report.checks.push_back(support_check("inward_velocity", [&](const RadialCoordinates& c) {
    return spec.a1 - db.delta_w < c.w && c.w < spec.a1 + db.delta_w;
  }));

  // The density conditions define the J class; the K class trades them for a mass condition.
  if (!spec.target_mass) {
    const double bound = spec.rho_bound();
    CheckOutcome upper{"density_bound", true, Severity::tolerance, {}, 0};
    CheckOutcome plateau{"density_plateau", true, Severity::tolerance, {}, 0};
    for (const DensitySample& d : datum.density) {
      if (d.rho > bound * (1.0 + tol.density_rel)) {
        if (upper.passed) upper.witness = "r=" + format_double(d.r) + " rho0=" + format_double(d.rho);
        upper.passed = false;
        ++upper.violations;
      }
      if (std::abs(d.r - spec.a0) <= 0.5 * spec.delta_r && std::abs(d.rho - bound) > tol.density_rel * bound) {
        if (plateau.passed) plateau.witness = "r=" + format_double(d.r) + " rho0=" + format_double(d.rho);
        plateau.passed = false;
        ++plateau.violations;
      }
    }
    report.checks.push_back(upper);
    report.checks.push_back(plateau);
  }

  if (spec.target_mass) {
    CheckOutcome mass{"total_mass", true, Severity::tolerance, {}, 0};
    if (!datum.mass || std::abs(*datum.mass - *spec.target_mass) > tol.mass_rel * *spec.target_mass) {
      mass.passed = false;
      mass.violations = 1;
      mass.witness = datum.mass ? "M=" + format_double(*datum.mass) : "mass not sampled";
    }
    report.checks.push_back(mass);
  }
  return report;
}

}  // namespace vpfocus

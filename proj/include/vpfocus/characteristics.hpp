#pragma once

// Self-consistent integration of the reduced characteristics
//   r' = w,  w' = ell/r^3 + m(t, r)/r^2,  ell' = 0
// for a whole shell ensemble, with kick-drift-kick steps and an adaptive dt
// that resolves pericenter passage.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "vpfocus/error.hpp"
#include "vpfocus/field_solver.hpp"
#include "vpfocus/numeric.hpp"
#include "vpfocus/phase_space.hpp"

namespace vpfocus {

/// Radial acceleration ell/r^3 + m/r^2. Both terms push outward.
inline double accel(double r, double ell, double m_enc) {
  if (!(r > 0.0)) throw DomainError("accel: r must be positive");
  return ell / (r * r * r) + m_enc / (r * r);
}

struct IntegratorConfig {
  double dt_max = 1e-3;
  double cfl = 0.05;
  double t_end = 1.0;
  int output_stride = 100;
  double oracle_tolerance = 1e-10;
  /// Times the integrator lands on exactly (e.g. the certificate's T).
  std::vector<double> mark_times;

  void validate() const {
    if (!(dt_max > 0.0)) throw ParameterError("IntegratorConfig: dt_max must be positive");
    if (!(cfl > 0.0 && cfl <= 1.0)) throw ParameterError("IntegratorConfig: cfl must lie in (0, 1]");
    if (!(t_end >= 0.0)) throw ParameterError("IntegratorConfig: t_end must be nonnegative");
    if (output_stride < 1) throw ParameterError("IntegratorConfig: output_stride must be positive");
    if (!(oracle_tolerance > 0.0)) throw ParameterError("IntegratorConfig: oracle_tolerance must be positive");
  }

  double dt_min() const { return 1e-12 * dt_max; }

  friend bool operator==(const IntegratorConfig&, const IntegratorConfig&) = default;
};

/// One KDK stepper over an ensemble. Caches the accelerations at the current
/// positions so that each step costs one field rebuild.
class SelfConsistentStepper {
 public:
  explicit SelfConsistentStepper(const Ensemble& e) {
    const std::size_t n = e.size();
    r_.resize(n);
    w_.resize(n);
    ell_.resize(n);
    weight_.resize(n);
    ids_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      r_[i] = e[i].coords.r;
      w_[i] = e[i].coords.w;
      ell_[i] = e[i].coords.ell;
      weight_[i] = e[i].weight;
      ids_[i] = e[i].id;
    }
    acc_.resize(n);
    w_half_.resize(n);
    r_new_.resize(n);
    refresh_field(r_);
  }

  const SortedMassIndex& index() const { return index_; }
  std::span<const double> accelerations() const { return acc_; }
  std::span<const double> radii() const { return r_; }
  std::span<const double> velocities() const { return w_; }

  /// cfl * min_i r_i / (|w_i| + sqrt(a_i r_i)).
  double stable_dt(double cfl) const {
    double best = std::numeric_limits<double>::infinity();
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(r_.size());
#pragma omp parallel for reduction(min : best) schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const double denom = std::abs(w_[i]) + std::sqrt(acc_[i] * r_[i]);
      if (denom > 0.0) best = std::min(best, r_[i] / denom);
    }
    return cfl * best;
  }

  /// Advances `e` by at most `dt`; halves dt while any drift would reach
  /// r <= 0. Returns the step actually taken.
  double step(Ensemble& e, double dt, double dt_min) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(r_.size());
    for (;;) {
      std::ptrdiff_t bad = n;
#pragma omp parallel for reduction(min : bad) schedule(static)
      for (std::ptrdiff_t i = 0; i < n; ++i) {
        w_half_[i] = w_[i] + 0.5 * dt * acc_[i];
        r_new_[i] = r_[i] + dt * w_half_[i];
        if (!(r_new_[i] > 0.0)) bad = std::min(bad, i);
      }
      if (bad == n) break;
      dt *= 0.5;
      if (dt < dt_min) {
        throw StiffnessError("step: dt fell below its floor; shell " + std::to_string(ids_[bad]) +
                                 " keeps crossing r = 0 at t = " + format_double(e.time()),
                             ids_[bad], e.time());
      }
    }
    refresh_field(r_new_);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      r_[i] = r_new_[i];
      w_[i] = w_half_[i] + 0.5 * dt * acc_[i];
    }
    for (std::ptrdiff_t i = 0; i < n; ++i) e.set_phase(static_cast<std::size_t>(i), r_[i], w_[i]);
    e.set_time(e.time() + dt);
    return dt;
  }

 private:
  void refresh_field(std::span<const double> radii) {
    index_.rebuild(radii, weight_, ids_);
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(radii.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const double r = radii[i];
      acc_[i] = ell_[i] / (r * r * r) + index_.felt_mass(static_cast<std::size_t>(i)) / (r * r);
    }
  }

  std::vector<double> r_, w_, ell_, weight_;
  std::vector<std::uint64_t> ids_;
  std::vector<double> acc_, w_half_, r_new_;
  SortedMassIndex index_;
};

/// One self-consistent KDK step of size dt (halved if a shell would cross
/// the origin). Weights and ell are untouched.
inline Ensemble step_selfconsistent(const Ensemble& ensemble, double dt, double dt_min = 1e-14) {
  if (!(dt > 0.0)) throw ParameterError("step_selfconsistent: dt must be positive");
  Ensemble out = ensemble;
  SelfConsistentStepper stepper(out);
  stepper.step(out, dt, dt_min);
  return out;
}

struct DiagnosticsRow {
  double t = 0.0;
  double rho_sup_binned = 0.0;
  double rho_sup_certified = 0.0;
  double e_sup_exact = 0.0;
  double r_min = 0.0;
  double r_max = 0.0;
  double mass_error = 0.0;
  double dt_current = 0.0;
};

/// Minimum radius reached by one shell and when. `turned` is set once the
/// radial velocity changes sign from negative to nonnegative.
struct TurningRecord {
  std::uint64_t id = 0;
  double r_min = 0.0;
  double t_argmin = 0.0;
  bool turned = false;
};

class RunObserver {
 public:
  virtual ~RunObserver() = default;
  virtual void on_row(const DiagnosticsRow& /*row*/, const Ensemble& /*state*/) {}
  virtual void on_mark(double /*t*/, const Ensemble& /*state*/) {}
};

struct IntegrationSummary {
  std::vector<TurningRecord> turning;
  std::uint64_t steps = 0;
  std::uint64_t rows = 0;
};

namespace detail {

/// Minimum of the cubic Hermite interpolant through (r0, w0) and (r1, w1)
/// over a step of length h, when w0 < 0 <= w1. Returns (tau in [0,1], r).
inline std::pair<double, double> hermite_minimum(double r0, double w0, double r1, double w1, double h) {
  const double m0 = w0 * h, m1 = w1 * h;
  const double a = 6.0 * r0 + 3.0 * m0 - 6.0 * r1 + 3.0 * m1;
  const double b = -6.0 * r0 - 4.0 * m0 + 6.0 * r1 - 2.0 * m1;
  const double c = m0;
  double tau = 1.0;
  if (std::abs(a) < 1e-14 * (std::abs(b) + std::abs(c))) {
    if (b != 0.0) tau = -c / b;
  } else {
    const double disc = std::max(0.0, b * b - 4.0 * a * c);
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (b + std::copysign(sq, b));
    double best = 1.0;
    for (double root : {q / a, q != 0.0 ? c / q : 1.0}) {
      if (root >= 0.0 && root <= 1.0) best = std::min(best, root);
    }
    tau = best;
  }
  tau = std::clamp(tau, 0.0, 1.0);
  const double t2 = tau * tau, t3 = t2 * tau;
  const double r = (2 * t3 - 3 * t2 + 1) * r0 + (t3 - 2 * t2 + tau) * m0 + (-2 * t3 + 3 * t2) * r1 + (t3 - t2) * m1;
  return {tau, r};
}

}  // namespace detail

inline DiagnosticsRow diagnostics_row(const Ensemble& e, const SortedMassIndex& index, double dt_current) {
  const SupNorms s = sup_norms(e, index);
  DiagnosticsRow row;
  row.t = e.time();
  row.rho_sup_binned = s.rho_sup_binned;
  row.rho_sup_certified = s.rho_sup_certified;
  row.e_sup_exact = s.e_sup_exact;
  row.r_min = s.r_min;
  row.r_max = s.r_max;
  row.mass_error = e.sum_weights() - e.total_mass();
  row.dt_current = dt_current;
  return row;
}

/// Advances `ensemble` to config.t_end, landing exactly on every mark time.
/// Emits a row at the start, every output_stride steps, at marks and at the end.
inline IntegrationSummary integrate(Ensemble& ensemble, const IntegratorConfig& config, RunObserver& observer) {
  config.validate();
  if (ensemble.empty()) throw ValidationError("integrate: empty ensemble");

  std::vector<double> marks;
  for (double m : config.mark_times) {
    if (m >= ensemble.time() && m <= config.t_end) marks.push_back(m);
  }
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

  IntegrationSummary summary;
  const std::size_t n = ensemble.size();
  summary.turning.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    summary.turning[i] = {ensemble[i].id, ensemble[i].coords.r, ensemble.time(), false};
  }

  SelfConsistentStepper stepper(ensemble);
  auto emit = [&](double dt_current) {
    observer.on_row(diagnostics_row(ensemble, stepper.index(), dt_current), ensemble);
    ++summary.rows;
  };

  std::size_t next_mark = 0;
  auto fire_marks = [&]() {
    while (next_mark < marks.size() && marks[next_mark] <= ensemble.time()) {
      if (marks[next_mark] == ensemble.time()) observer.on_mark(ensemble.time(), ensemble);
      ++next_mark;
    }
  };

  emit(std::min(config.dt_max, stepper.stable_dt(config.cfl)));
  fire_marks();

  std::vector<double> r_prev(n), w_prev(n);
  while (ensemble.time() < config.t_end) {
    const double t0 = ensemble.time();
    const double target = next_mark < marks.size() ? marks[next_mark] : config.t_end;
    double dt = std::min(config.dt_max, stepper.stable_dt(config.cfl));
    bool landing = false;
    if (t0 + dt >= target) {
      dt = target - t0;
      landing = true;
    }
    std::copy(stepper.radii().begin(), stepper.radii().end(), r_prev.begin());
    std::copy(stepper.velocities().begin(), stepper.velocities().end(), w_prev.begin());

    const double taken = stepper.step(ensemble, dt, config.dt_min());
    const bool on_target = landing && taken == dt;
    if (on_target) ensemble.set_time(target);
    const double t1 = ensemble.time();
    ++summary.steps;

    const auto r1 = stepper.radii();
    const auto w1 = stepper.velocities();
    for (std::size_t i = 0; i < n; ++i) {
      TurningRecord& rec = summary.turning[i];
      if (!rec.turned && w_prev[i] < 0.0 && w1[i] >= 0.0) {
        const auto [tau, r_star] = detail::hermite_minimum(r_prev[i], w_prev[i], r1[i], w1[i], taken);
        rec.turned = true;
        if (r_star < rec.r_min) {
          rec.r_min = r_star;
          rec.t_argmin = t0 + tau * taken;
        }
      }
      if (r1[i] < rec.r_min) {
        rec.r_min = r1[i];
        rec.t_argmin = t1;
      }
    }

    const bool at_mark = on_target && next_mark < marks.size() && marks[next_mark] == t1;
    if (at_mark || t1 >= config.t_end || summary.steps % static_cast<std::uint64_t>(config.output_stride) == 0) {
      emit(taken);
    }
    fire_marks();
  }
  return summary;
}

/// In-memory record of an integration: every row plus a full snapshot of the
/// ensemble at each row.
class TrajectoryRecorder : public RunObserver {
 public:
  void on_row(const DiagnosticsRow& row, const Ensemble& state) override {
    rows.push_back(row);
    times.push_back(row.t);
    snapshots.emplace_back(state.shells().begin(), state.shells().end());
  }

  void on_mark(double t, const Ensemble& state) override {
    mark_times.push_back(t);
    marked.emplace_back(state.shells().begin(), state.shells().end());
  }

  std::vector<DiagnosticsRow> rows;
  std::vector<double> times;
  std::vector<std::vector<Shell>> snapshots;
  std::vector<double> mark_times;
  std::vector<std::vector<Shell>> marked;
};

}  // namespace vpfocus

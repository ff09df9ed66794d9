#pragma once

// High-accuracy reference integrator for a single radial trajectory
//   y'' = ell / y^3 + p(t) P / y^2,   p(t) in [0, 1],
// used to check the integrator and the turning/envelope bounds.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "vpfocus/error.hpp"

namespace vpfocus {

/// Piecewise-constant force profile: values[k] on [breaks[k-1], breaks[k]),
/// with breaks[-1] = 0 and breaks[n] = +inf.
class PiecewiseProfile {
 public:
  static PiecewiseProfile constant(double value) { return PiecewiseProfile({}, {value}); }

  PiecewiseProfile(std::vector<double> breaks, std::vector<double> values)
      : breaks_(std::move(breaks)), values_(std::move(values)) {
    if (values_.size() != breaks_.size() + 1) throw ParameterError("PiecewiseProfile: need one more value than breaks");
    for (std::size_t k = 0; k < breaks_.size(); ++k) {
      if (!(breaks_[k] > 0.0) || (k > 0 && !(breaks_[k] > breaks_[k - 1]))) {
        throw ParameterError("PiecewiseProfile: breaks must be positive and ascending");
      }
    }
    for (double v : values_) {
      if (!(v >= 0.0 && v <= 1.0)) throw ParameterError("PiecewiseProfile: values must lie in [0, 1]");
    }
  }

  double operator()(double t) const {
    const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
    return values_[static_cast<std::size_t>(it - breaks_.begin())];
  }

  /// First break strictly after t, or +inf.
  double next_break(double t) const {
    const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
    return it == breaks_.end() ? std::numeric_limits<double>::infinity() : *it;
  }

  std::span<const double> breaks() const { return breaks_; }
  std::span<const double> values() const { return values_; }

 private:
  std::vector<double> breaks_;
  std::vector<double> values_;
};

struct OracleProblem {
  double r0 = 1.0;
  double w0 = -1.0;
  double ell = 1.0;
  double P = 0.0;
  PiecewiseProfile profile = PiecewiseProfile::constant(0.0);
};

struct OracleSample {
  double t = 0.0;
  double y = 0.0;
  double ydot = 0.0;
};

struct OracleResult {
  std::vector<OracleSample> samples;
  std::optional<double> turning_time;  // first zero of y'
  double y_turn = 0.0;                 // y at the turning time
  std::uint64_t steps = 0;
};

namespace detail {

using OracleState = std::array<double, 2>;

struct OracleRhs {
  double ell;
  double force;  // p * P on the current piece

  void operator()(const OracleState& x, OracleState& dxdt, double /*t*/) const {
    const double y = x[0];
    dxdt[0] = x[1];
    dxdt[1] = ell / (y * y * y) + force / (y * y);
  }
};

}  // namespace detail

/// Integrates to every sample time and on until the turning point is found.
/// Throws OracleFailure when the controlled stepper cannot hold `tol`.
inline OracleResult integrate_oracle(const OracleProblem& p, std::span<const double> sample_times, double tol) {
  namespace odeint = boost::numeric::odeint;
  using detail::OracleState;
  if (!(p.r0 > 0.0)) throw ParameterError("integrate_oracle: r0 must be positive");
  if (!(p.ell > 0.0)) throw ParameterError("integrate_oracle: ell must be positive");
  if (!(p.P >= 0.0)) throw ParameterError("integrate_oracle: P must be nonnegative");
  if (!(tol > 0.0)) throw ParameterError("integrate_oracle: tolerance must be positive");
  std::vector<double> times(sample_times.begin(), sample_times.end());
  std::sort(times.begin(), times.end());
  if (!times.empty() && times.front() < 0.0) throw ParameterError("integrate_oracle: sample times must be >= 0");

  using Stepper = odeint::runge_kutta_fehlberg78<OracleState>;
  auto controlled = odeint::make_controlled(tol, tol, Stepper());

  OracleResult out;
  OracleState x{p.r0, p.w0};
  double t = 0.0;
  double dt = 1e-3 * p.r0 / (std::abs(p.w0) + std::sqrt(p.ell) / p.r0);

  bool searching = p.w0 < 0.0;
  if (p.w0 == 0.0) {
    out.turning_time = 0.0;
    out.y_turn = p.r0;
  }
  // y' <= 0 before the turn and y'' >= ell y0^-3, so the turn happens before -w0 y0^3 / ell.
  const double turn_cap = searching ? -p.w0 * p.r0 * p.r0 * p.r0 / p.ell * (1.0 + 1e-6) + 1e-12 : 0.0;

  std::size_t next_sample = 0;
  while (next_sample < times.size() && times[next_sample] == 0.0) {
    out.samples.push_back({0.0, x[0], x[1]});
    ++next_sample;
  }

  constexpr std::uint64_t kMaxSteps = 50'000'000;
  while (next_sample < times.size() || searching) {
    double target = std::numeric_limits<double>::infinity();
    if (next_sample < times.size()) target = times[next_sample];
    if (searching) target = std::min(target, turn_cap);
    target = std::min(target, p.profile.next_break(t));
    const detail::OracleRhs rhs{p.ell, p.profile(t) * p.P};

    const OracleState x_old = x;
    const double t_old = t;
    double h = std::min(dt, target - t);
    const bool to_target = h == target - t;
    if (controlled.try_step(rhs, x, t, h) == odeint::fail) {
      dt = h;
      if (dt < 1e-15 * std::max(1.0, std::abs(t))) throw OracleFailure("integrate_oracle: step size underflow");
      continue;
    }
    if (to_target) {
      t = target;
    } else {
      dt = h;
    }
    if (++out.steps > kMaxSteps) throw OracleFailure("integrate_oracle: step budget exhausted");
    if (!(x[0] > 0.0) || !std::isfinite(x[0]) || !std::isfinite(x[1])) {
      throw OracleFailure("integrate_oracle: trajectory left the domain y > 0");
    }

    if (searching && x_old[1] < 0.0 && x[1] >= 0.0) {
      auto ydot_at = [&](double tau) {
        OracleState z = x_old;
        if (tau > t_old) {
          odeint::integrate_adaptive(odeint::make_controlled(tol, tol, Stepper()), rhs, z, t_old, tau,
                                     (tau - t_old) * 0.1);
        }
        return z;
      };
      std::uintmax_t iters = 200;
      const auto bracket = boost::math::tools::toms748_solve(
          [&](double tau) { return ydot_at(tau)[1]; }, t_old, t, x_old[1], x[1],
          boost::math::tools::eps_tolerance<double>(52), iters);
      const double t_turn = 0.5 * (bracket.first + bracket.second);
      out.turning_time = t_turn;
      out.y_turn = ydot_at(t_turn)[0];
      searching = false;
    } else if (searching && t >= turn_cap) {
      throw OracleFailure("integrate_oracle: no turning point found before the a priori cap");
    }

    while (next_sample < times.size() && times[next_sample] <= t) {
      out.samples.push_back({t, x[0], x[1]});
      ++next_sample;
    }
  }
  return out;
}

inline OracleResult integrate_oracle(const OracleProblem& p, double t_end, int n_samples, double tol) {
  if (!(t_end >= 0.0) || n_samples < 1) throw ParameterError("integrate_oracle: bad sampling");
  std::vector<double> times;
  for (int k = 1; k <= n_samples; ++k) times.push_back(t_end * k / n_samples);
  return integrate_oracle(p, times, tol);
}

/// Closed-form free motion (P = 0): y(t)^2 = (r0 + w0 t)^2 + ell t^2 / r0^2.
inline double free_motion_squared(double r0, double w0, double ell, double t) {
  const double lin = r0 + w0 * t;
  return lin * lin + ell * t * t / (r0 * r0);
}

}  // namespace vpfocus

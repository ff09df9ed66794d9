#pragma once

// Randomized checks of the turning and envelope bounds against the ODE
// oracle. Fixed seeds, so a given (seed, count) always draws the same cases.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "vpfocus/bounds.hpp"
#include "vpfocus/numeric.hpp"
#include "vpfocus/oracle.hpp"

namespace vpfocus {

struct LemmaDraw {
  double L = 1.0;
  double P = 0.0;
  double y0 = 1.0;
  double y1 = -1.0;
  PiecewiseProfile profile = PiecewiseProfile::constant(0.0);

  OracleProblem problem() const { return {y0, y1, L, P, profile}; }
};

namespace detail {

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

}  // namespace detail

/// Hypothesis-satisfying draw: L > 0, P >= 0, y0 > 0, y1 < 0, and a random
/// piecewise-constant profile with values in [0, 1].
inline LemmaDraw draw_lemma_case(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  LemmaDraw d;
  d.y0 = detail::log_uniform(rng, 0.2, 5.0);
  d.y1 = -detail::log_uniform(rng, 0.2, 5.0);
  d.L = detail::log_uniform(rng, 1e-2, 10.0);
  d.P = unit(rng) < 0.1 ? 0.0 : detail::log_uniform(rng, 1e-2, 10.0);
  // Breaks spread over the natural time scale y0/|y1|.
  const double scale = d.y0 / std::abs(d.y1);
  const int n_breaks = static_cast<int>(unit(rng) * 5.0);
  std::vector<double> breaks;
  for (int k = 0; k < n_breaks; ++k) breaks.push_back(2.0 * scale * unit(rng) + 1e-9);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  std::vector<double> values;
  for (std::size_t k = 0; k <= breaks.size(); ++k) values.push_back(unit(rng));
  d.profile = PiecewiseProfile(std::move(breaks), std::move(values));
  return d;
}

struct SuiteResult {
  std::string name;
  int cases = 0;
  int violations = 0;
  double worst = 0.0;  // largest relative error or constraint excess seen
  std::string first_violation;

  bool passed() const { return cases > 0 && violations == 0; }
};

/// Zero-field trajectories against y(t)^2 = (r0 + w0 t)^2 + ell t^2 / r0^2.
inline SuiteResult closed_form_suite(int cases = 100, int samples = 20, std::uint64_t seed = 1, double tol = 1e-12,
                                     double max_rel_error = 1e-8) {
  SuiteResult out{"closed_form", 0, 0, 0.0, {}};
  std::mt19937_64 rng(seed);
  for (int c = 0; c < cases; ++c) {
    const double r0 = detail::log_uniform(rng, 0.2, 5.0);
    const double w0 = -detail::log_uniform(rng, 0.2, 5.0);
    const double ell = detail::log_uniform(rng, 1e-2, 10.0);
    const double t_turn = -w0 * r0 / (w0 * w0 + ell / (r0 * r0));
    const OracleResult res = integrate_oracle({r0, w0, ell, 0.0, PiecewiseProfile::constant(0.0)}, 2.0 * t_turn, samples, tol);
    ++out.cases;
    for (const OracleSample& s : res.samples) {
      const double exact = free_motion_squared(r0, w0, ell, s.t);
      const double rel = std::abs(s.y * s.y - exact) / exact;
      out.worst = std::max(out.worst, rel);
      if (rel > max_rel_error) {
        if (out.violations++ == 0) {
          out.first_violation = "case " + std::to_string(c) + " t=" + format_double(s.t) + " rel=" + format_double(rel);
        }
        break;
      }
    }
  }
  return out;
}

/// Turning-point bound: y' < 0 before t0_lower and y(T0) <= y_star + slack.
inline SuiteResult turning_suite(int cases = 1000, std::uint64_t seed = 2, double tol = 1e-12, double slack = 1e-9) {
  SuiteResult out{"turning", 0, 0, 0.0, {}};
  std::mt19937_64 rng(seed);
  constexpr int kSamples = 20;
  for (int c = 0; c < cases; ++c) {
    const LemmaDraw d = draw_lemma_case(rng);
    const bounds::TurningBound b = bounds::lemma1_turning(d.L, d.P, d.y0, d.y1);
    std::vector<double> times;
    for (int k = 1; k < kSamples; ++k) times.push_back(b.t0_lower * k / kSamples);
    const OracleResult res = integrate_oracle(d.problem(), times, tol);
    ++out.cases;
    bool ok = res.turning_time.has_value() && *res.turning_time >= b.t0_lower && res.y_turn <= b.y_star + slack;
    for (const OracleSample& s : res.samples) ok = ok && s.ydot < 0.0;
    out.worst = std::max(out.worst, res.y_turn - b.y_star);
    if (!ok && out.violations++ == 0) {
      out.first_violation = "case " + std::to_string(c) + " y_turn=" + format_double(res.y_turn) +
                            " y_star=" + format_double(b.y_star);
    }
  }
  return out;
}

/// Envelope bound: y(t)^2 <= envelope(t) + slack for sampled t up to the turn.
inline SuiteResult envelope_suite(int cases = 1000, std::uint64_t seed = 2, double tol = 1e-12, double slack = 1e-9) {
  SuiteResult out{"envelope", 0, 0, 0.0, {}};
  std::mt19937_64 rng(seed);
  constexpr int kSamples = 40;
  for (int c = 0; c < cases; ++c) {
    const LemmaDraw d = draw_lemma_case(rng);
    const OracleResult first = integrate_oracle(d.problem(), std::span<const double>{}, tol);
    const double t0 = *first.turning_time;
    std::vector<double> times;
    for (int k = 1; k <= kSamples; ++k) times.push_back(t0 * k / kSamples);
    const OracleResult res = integrate_oracle(d.problem(), times, tol);
    ++out.cases;
    bool ok = true;
    for (const OracleSample& s : res.samples) {
      const double env = bounds::lemma2_envelope(d.L, d.P, d.y0, d.y1, s.t);
      const double excess = s.y * s.y - env;
      out.worst = std::max(out.worst, excess);
      ok = ok && excess <= slack * std::max(1.0, env);
    }
    if (!ok && out.violations++ == 0) out.first_violation = "case " + std::to_string(c);
  }
  return out;
}

}  // namespace vpfocus

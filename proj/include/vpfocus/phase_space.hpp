#pragma once

// Reduced phase space of spherically symmetric data: radius r, radial
// velocity w (negative means inward) and squared angular momentum ell.

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "vpfocus/error.hpp"
#include "vpfocus/numeric.hpp"

namespace vpfocus {

using Vec3 = std::array<double, 3>;

struct RadialCoordinates {
  double r = 1.0;
  double w = 0.0;
  double ell = 0.0;

  friend bool operator==(const RadialCoordinates&, const RadialCoordinates&) = default;
};

/// One weighted characteristic: a sphere of particles sharing (r, w, ell).
struct Shell {
  RadialCoordinates coords;
  double weight = 0.0;
  std::uint64_t id = 0;

  friend bool operator==(const Shell&, const Shell&) = default;
};

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// (|x|, x.v/|x|, |x cross v|^2). Throws DomainError at the origin.
inline RadialCoordinates to_radial(const Vec3& x, const Vec3& v) {
  const double r = norm(x);
  if (!(r > 0.0)) throw DomainError("to_radial: radial coordinates are undefined at x = 0");
  const Vec3 l = cross(x, v);
  return {r, dot(x, v) / r, dot(l, l)};
}

/// A Cartesian pair realizing the given reduced coordinates.
inline std::pair<Vec3, Vec3> from_radial(const RadialCoordinates& c) {
  if (!(c.r > 0.0)) throw DomainError("from_radial: r must be positive");
  if (c.ell < 0.0) throw DomainError("from_radial: ell must be nonnegative");
  return {Vec3{c.r, 0.0, 0.0}, Vec3{c.w, std::sqrt(c.ell) / c.r, 0.0}};
}

/// Time-stamped collection of shells. Weights, ell and ids are fixed at
/// construction; only (r, w) and the clock can change afterwards, so the
/// cached total mass stays exact for the lifetime of the object.
class Ensemble {
 public:
  Ensemble() = default;

  explicit Ensemble(std::vector<Shell> shells, double time = 0.0)
      : shells_(std::move(shells)), time_(time) {
    if (!(time_ >= 0.0)) throw ValidationError("Ensemble: time must be nonnegative");
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(shells_.size());
    for (const Shell& s : shells_) {
      if (!(s.weight > 0.0) || !std::isfinite(s.weight)) {
        throw ValidationError("Ensemble: shell " + std::to_string(s.id) + " has nonpositive weight");
      }
      if (!(s.coords.r > 0.0)) {
        throw ValidationError("Ensemble: shell " + std::to_string(s.id) + " has r <= 0");
      }
      if (!(s.coords.ell >= 0.0)) {
        throw ValidationError("Ensemble: shell " + std::to_string(s.id) + " has ell < 0");
      }
      if (!seen.insert(s.id).second) {
        throw ValidationError("Ensemble: duplicate shell id " + std::to_string(s.id));
      }
    }
    total_mass_ = sum_weights();
  }

  std::span<const Shell> shells() const { return shells_; }
  const Shell& operator[](std::size_t i) const { return shells_[i]; }
  std::size_t size() const { return shells_.size(); }
  bool empty() const { return shells_.empty(); }
  double time() const { return time_; }
  double total_mass() const { return total_mass_; }

  /// Weight sum recomputed from scratch in storage order.
  double sum_weights() const {
    std::vector<double> w(shells_.size());
    for (std::size_t i = 0; i < shells_.size(); ++i) w[i] = shells_[i].weight;
    return pairwise_sum(w);
  }

  void set_time(double t) { time_ = t; }

  void set_phase(std::size_t i, double r, double w) {
    if (!(r > 0.0)) throw DomainError("Ensemble::set_phase: r must stay positive");
    shells_[i].coords.r = r;
    shells_[i].coords.w = w;
  }

 private:
  std::vector<Shell> shells_;
  double time_ = 0.0;
  double total_mass_ = 0.0;
};

/// A point of a tensor quadrature grid in (r, w, ell) with its cell volume.
struct QuadratureSample {
  RadialCoordinates at;
  double f = 0.0;
  double cell_volume = 0.0;
};

/// Total mass 4 pi^2 * sum f dr dw dell of a sampled density.
inline double reduced_mass_of(std::span<const QuadratureSample> samples) {
  std::vector<double> terms;
  terms.reserve(samples.size());
  for (const QuadratureSample& q : samples) {
    if (q.f < 0.0 || q.cell_volume < 0.0) throw ValidationError("reduced_mass_of: negative sample weight");
    terms.push_back(q.f * q.cell_volume);
  }
  return 4.0 * pi * pi * pairwise_sum(terms);
}

inline double reduced_mass_of(const Ensemble& ensemble) { return ensemble.sum_weights(); }

}  // namespace vpfocus

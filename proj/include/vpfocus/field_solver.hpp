#pragma once

// Radial field of a shell ensemble. Under spherical symmetry the field at r
// is m(r)/r^2 with m the mass enclosed, so a sort plus a prefix sum gives it
// exactly.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "vpfocus/bounds.hpp"
#include "vpfocus/error.hpp"
#include "vpfocus/numeric.hpp"
#include "vpfocus/phase_space.hpp"

namespace vpfocus {

/// Shells sorted by (radius, id) with cumulative masses.
///
/// Tie convention: a query at radius r counts every shell strictly inside r
/// plus half the weight of shells exactly at r. The mass felt by a shell is
/// the same quantity with its own weight removed, so there is no self-force.
class SortedMassIndex {
 public:
  SortedMassIndex() = default;

  explicit SortedMassIndex(const Ensemble& ensemble) {
    std::vector<double> r(ensemble.size()), w(ensemble.size());
    std::vector<std::uint64_t> ids(ensemble.size());
    for (std::size_t i = 0; i < ensemble.size(); ++i) {
      r[i] = ensemble[i].coords.r;
      w[i] = ensemble[i].weight;
      ids[i] = ensemble[i].id;
    }
    rebuild(r, w, ids);
  }

  /// Rebuilds from scratch. The previous ordering seeds the sort, but the
  /// result depends only on the keys.
  void rebuild(std::span<const double> radii, std::span<const double> weights, std::span<const std::uint64_t> ids) {
    const std::size_t n = radii.size();
    if (order_.size() != n) {
      order_.resize(n);
      std::iota(order_.begin(), order_.end(), std::size_t{0});
    }
    std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      return radii[a] < radii[b] || (radii[a] == radii[b] && ids[a] < ids[b]);
    });
    radii_.resize(n);
    weights_.resize(n);
    cumulative_.assign(n + 1, 0.0);
    prefix_.resize(n);
    felt_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      radii_[k] = radii[order_[k]];
      weights_[k] = weights[order_[k]];
      cumulative_[k + 1] = cumulative_[k] + weights_[k];
    }
    std::size_t a = 0;
    while (a < n) {
      std::size_t b = a + 1;
      while (b < n && radii_[b] == radii_[a]) ++b;
      if (b == a + 1) {
        prefix_[a] = cumulative_[a];
      } else {
        const double group = cumulative_[b] - cumulative_[a];
        for (std::size_t k = a; k < b; ++k) prefix_[k] = cumulative_[a] + 0.5 * (group - weights_[k]);
      }
      for (std::size_t k = a; k < b; ++k) felt_[order_[k]] = prefix_[k];
      a = b;
    }
  }

  std::size_t size() const { return radii_.size(); }
  bool empty() const { return radii_.empty(); }
  std::span<const double> radii() const { return radii_; }
  std::span<const double> sorted_weights() const { return weights_; }
  /// Per sorted entry: mass strictly below plus half of the other shells at the same radius.
  std::span<const double> prefix_mass() const { return prefix_; }
  std::span<const std::size_t> order() const { return order_; }
  double total_mass() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }

  /// Mass felt by the shell stored at `shell` in the source arrays.
  double felt_mass(std::size_t shell) const { return felt_[shell]; }

  double enclosed_mass(double r) const {
    const auto lo = std::lower_bound(radii_.begin(), radii_.end(), r);
    const auto hi = std::upper_bound(lo, radii_.end(), r);
    const auto i = static_cast<std::size_t>(lo - radii_.begin());
    const auto j = static_cast<std::size_t>(hi - radii_.begin());
    if (i == j) return cumulative_[i];
    return cumulative_[i] + 0.5 * (cumulative_[j] - cumulative_[i]);
  }

  /// Radial field m(r)/r^2 (outward).
  double field_at(double r) const {
    if (!(r > 0.0)) throw DomainError("field_at: r must be positive");
    return enclosed_mass(r) / (r * r);
  }

  /// max_i m(r_i+)/r_i^2: the supremum of the piecewise field, attained just
  /// outside a shell.
  double field_sup() const {
    double best = 0.0;
    std::size_t a = 0;
    const std::size_t n = radii_.size();
    while (a < n) {
      std::size_t b = a + 1;
      while (b < n && radii_[b] == radii_[a]) ++b;
      best = std::max(best, cumulative_[b] / (radii_[a] * radii_[a]));
      a = b;
    }
    return best;
  }

 private:
  std::vector<std::size_t> order_;
  std::vector<double> radii_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
  std::vector<double> prefix_;
  std::vector<double> felt_;
};

/// Ascending bin edges; bin b covers [edges[b], edges[b+1]).
struct GridSpec {
  std::vector<double> edges;

  std::size_t bins() const { return edges.size() < 2 ? 0 : edges.size() - 1; }

  /// A core bin [0, r_min/2] followed by `bins` geometric bins up to 1.01 r_max.
  static GridSpec geometric(double r_min, double r_max, int bins = 256) {
    if (!(r_min > 0.0) || !(r_max >= r_min) || bins < 1) throw ParameterError("GridSpec::geometric: bad range");
    GridSpec g;
    const double lo = 0.5 * r_min;
    const double hi = 1.01 * r_max;
    g.edges.reserve(static_cast<std::size_t>(bins) + 2);
    g.edges.push_back(0.0);
    for (int k = 0; k <= bins; ++k) g.edges.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / bins));
    g.edges.back() = hi;
    return g;
  }

  static GridSpec uniform(double r_lo, double r_hi, int bins) {
    if (!(r_hi > r_lo) || r_lo < 0.0 || bins < 1) throw ParameterError("GridSpec::uniform: bad range");
    GridSpec g;
    for (int k = 0; k <= bins; ++k) g.edges.push_back(r_lo + (r_hi - r_lo) * k / bins);
    return g;
  }
};

struct DensityGrid {
  std::vector<double> bin_edges;
  std::vector<double> bin_values;
  double captured_mass = 0.0;

  double bin_volume(std::size_t b) const {
    const double a = bin_edges[b], c = bin_edges[b + 1];
    return 4.0 / 3.0 * pi * (c * c * c - a * a * a);
  }
};

/// Shell-mass histogram divided by shell volume.
inline DensityGrid density_estimate(const Ensemble& ensemble, const GridSpec& grid) {
  if (grid.bins() == 0) throw ParameterError("density_estimate: empty grid");
  for (std::size_t k = 1; k < grid.edges.size(); ++k) {
    if (!(grid.edges[k] > grid.edges[k - 1])) throw ParameterError("density_estimate: edges must ascend");
  }
  DensityGrid out;
  out.bin_edges = grid.edges;
  std::vector<double> mass(grid.bins(), 0.0);
  for (const Shell& s : ensemble.shells()) {
    const double r = s.coords.r;
    if (r < grid.edges.front() || r >= grid.edges.back()) continue;
    const auto it = std::upper_bound(grid.edges.begin(), grid.edges.end(), r);
    mass[static_cast<std::size_t>(it - grid.edges.begin()) - 1] += s.weight;
  }
  out.bin_values.resize(mass.size());
  for (std::size_t b = 0; b < mass.size(); ++b) out.bin_values[b] = mass[b] / out.bin_volume(b);
  out.captured_mass = pairwise_sum(mass);
  return out;
}

struct SupNorms {
  double rho_sup_binned = 0.0;
  double rho_sup_certified = 0.0;
  double e_sup_exact = 0.0;
  double r_min = 0.0;
  double r_max = 0.0;
};

/// Sup-norm diagnostics from a prebuilt index. `grid` defaults to the
/// geometric grid spanning the current radii.
inline SupNorms sup_norms(const Ensemble& ensemble, const SortedMassIndex& index, const GridSpec* grid = nullptr) {
  if (ensemble.empty() || index.empty()) throw ValidationError("sup_norms: empty ensemble");
  SupNorms out;
  out.r_min = index.radii().front();
  out.r_max = index.radii().back();
  const GridSpec fallback = grid ? GridSpec{} : GridSpec::geometric(out.r_min, out.r_max);
  const DensityGrid rho = density_estimate(ensemble, grid ? *grid : fallback);
  out.rho_sup_binned = *std::max_element(rho.bin_values.begin(), rho.bin_values.end());
  out.rho_sup_certified = bounds::certified_density_lower(ensemble.total_mass(), out.r_max);
  out.e_sup_exact = index.field_sup();
  return out;
}

inline SupNorms sup_norms(const Ensemble& ensemble, const GridSpec* grid = nullptr) {
  return sup_norms(ensemble, SortedMassIndex(ensemble), grid);
}

}  // namespace vpfocus

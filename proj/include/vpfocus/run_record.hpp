#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vpfocus/characteristics.hpp"
#include "vpfocus/initial_data.hpp"
#include "vpfocus/phase_space.hpp"

namespace vpfocus {

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kCodeVersion = "vpfocus 1.0.0";

/// Which certificate a run was configured from.
struct CertificateRef {
  int theorem = 1;
  double c1 = 0.0;
  double c2 = 0.0;
  double T = 0.0;

  friend bool operator==(const CertificateRef&, const CertificateRef&) = default;
};

/// Everything `run` needs: class, sampler, integrator, and where it came from.
struct RunConfig {
  ClassSpec spec;
  SampleResolution resolution;
  IntegratorConfig integrator;
  std::optional<CertificateRef> certificate;
  bool write_snapshots = true;
  /// Run directory to continue from (its checkpoint replaces sampling).
  std::optional<std::string> restart_from;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Config echo plus what the run measured at start and end.
struct RunManifest {
  int format_version = kFormatVersion;
  std::string code_version = kCodeVersion;
  RunConfig config;
  double start_time = 0.0;
  std::size_t shell_count = 0;
  double total_mass = 0.0;
  /// Largest rho0 over the sampled radius rows, from the velocity marginal.
  double rho0_sup_marginal = 0.0;
  double final_time = 0.0;
  std::uint64_t steps = 0;
};

struct MarkedState {
  double t = 0.0;
  std::vector<Shell> shells;
};

struct RunRecord {
  RunManifest manifest;
  std::vector<DiagnosticsRow> rows;
  std::vector<TurningRecord> turning;
  std::vector<MarkedState> marks;

  const MarkedState* mark_at(double t) const {
    for (const MarkedState& m : marks) {
      if (m.t == t) return &m;
    }
    return nullptr;
  }
};

/// rho0 per sampled radius row: row mass / (4 pi r^2 dr), which is the
/// midpoint rule for pi/r^2 * int int f0 dw dell.
inline double sampled_density_sup(const Ensemble& initial, const ClassSpec& spec, const SampleResolution& res) {
  const double dr = 2.0 * spec.delta_r / res.nr;
  const std::uint64_t per_row = static_cast<std::uint64_t>(res.nu) * static_cast<std::uint64_t>(res.ns);
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(res.nr));
  std::vector<double> radius(static_cast<std::size_t>(res.nr), 0.0);
  for (const Shell& s : initial.shells()) {
    const std::size_t i = static_cast<std::size_t>(s.id / per_row);
    if (i >= rows.size()) continue;
    rows[i].push_back(s.weight);
    radius[i] = s.coords.r;
  }
  double best = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].empty()) continue;
    const double r = radius[i];
    best = std::max(best, pairwise_sum(rows[i]) / (4.0 * pi * r * r * dr));
  }
  return best;
}

}  // namespace vpfocus

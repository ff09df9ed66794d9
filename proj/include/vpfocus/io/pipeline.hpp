#pragma once

// End-to-end run: sample (or restart), integrate, and write the run directory
//   manifest.ini, timeseries.csv, turning.csv, checkpoint.csv,
//   snapshots/{index.csv, snap_NNNNNN.csv}, marks/{index.csv, mark_NNN.csv}

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "vpfocus/characteristics.hpp"
#include "vpfocus/initial_data.hpp"
#include "vpfocus/io/config.hpp"
#include "vpfocus/io/csv.hpp"
#include "vpfocus/run_record.hpp"

namespace vpfocus::io {

namespace fs = std::filesystem;

namespace detail {

inline std::string numbered(const char* stem, std::size_t k, int width) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%0*zu.csv", stem, width, k);
  return buf;
}

/// Streams rows, per-row snapshots and marked states into a run directory.
class DirectorySink : public RunObserver {
 public:
  DirectorySink(const fs::path& dir, bool snapshots) : dir_(dir), snapshots_(snapshots), series_(dir / "timeseries.csv") {}

  void on_row(const DiagnosticsRow& row, const Ensemble& state) override {
    series_.write(row);
    rows.push_back(row);
    if (snapshots_) {
      const std::string name = numbered("snap", snapshot_index_.size(), 6);
      write_text_file(dir_ / "snapshots" / name, format_shells(state.shells()));
      snapshot_index_.push_back({name, row.t});
    }
  }

  void on_mark(double t, const Ensemble& state) override {
    const std::string name = numbered("mark", marks.size(), 3);
    write_text_file(dir_ / "marks" / name, format_shells(state.shells()));
    mark_index_.push_back({name, t});
    marks.push_back({t, std::vector<Shell>(state.shells().begin(), state.shells().end())});
  }

  void finish() {
    series_.close();
    if (snapshots_) write_text_file(dir_ / "snapshots" / "index.csv", format_index(snapshot_index_));
    write_text_file(dir_ / "marks" / "index.csv", format_index(mark_index_));
  }

  std::vector<DiagnosticsRow> rows;
  std::vector<MarkedState> marks;

 private:
  static std::string format_index(const std::vector<IndexEntry>& entries) {
    std::string out = kIndexHeader;
    out += '\n';
    for (const IndexEntry& e : entries) out += e.file + ',' + format_double(e.t) + '\n';
    return out;
  }

  fs::path dir_;
  bool snapshots_;
  TimeseriesWriter series_;
  std::vector<IndexEntry> snapshot_index_;
  std::vector<IndexEntry> mark_index_;
};

}  // namespace detail

/// Initial ensemble for a config: sampled from the class, or the checkpoint of
/// the run named in restart_from.
inline Ensemble initial_ensemble(const RunConfig& cfg) {
  if (cfg.restart_from) {
    const fs::path prev(*cfg.restart_from);
    const RunManifest m = load_manifest(prev / "manifest.ini");
    return Ensemble(read_shells(prev / "checkpoint.csv"), m.final_time);
  }
  const InitialDatum datum = InitialDatum::canonical(cfg.spec, ProfileH::bump(), cfg.resolution);
  return sample_ensemble(datum, cfg.resolution);
}

inline RunRecord run_pipeline(const RunConfig& cfg, const fs::path& out_dir) {
  cfg.resolution.validate();
  cfg.integrator.validate();
  fs::create_directories(out_dir);
  fs::remove_all(out_dir / "snapshots");
  fs::remove_all(out_dir / "marks");
  if (cfg.write_snapshots) fs::create_directories(out_dir / "snapshots");
  fs::create_directories(out_dir / "marks");

  Ensemble ensemble = initial_ensemble(cfg);
  RunRecord record;
  RunManifest& m = record.manifest;
  m.config = cfg;
  m.start_time = ensemble.time();
  m.final_time = ensemble.time();
  m.shell_count = ensemble.size();
  m.total_mass = ensemble.total_mass();
  if (!cfg.restart_from) m.rho0_sup_marginal = sampled_density_sup(ensemble, cfg.spec, cfg.resolution);
  write_ini_file(out_dir / "manifest.ini", manifest_ini(m));

  detail::DirectorySink sink(out_dir, cfg.write_snapshots);
  const IntegrationSummary summary = integrate(ensemble, cfg.integrator, sink);
  sink.finish();

  m.final_time = ensemble.time();
  m.steps = summary.steps;
  record.rows = std::move(sink.rows);
  record.turning = summary.turning;
  record.marks = std::move(sink.marks);
  write_text_file(out_dir / "turning.csv", format_turning(record.turning));
  write_text_file(out_dir / "checkpoint.csv", format_shells(ensemble.shells()));
  write_ini_file(out_dir / "manifest.ini", manifest_ini(m));
  return record;
}

inline RunRecord load_run(const fs::path& dir) {
  RunRecord record;
  record.manifest = load_manifest(dir / "manifest.ini");
  record.rows = read_timeseries(dir / "timeseries.csv");
  record.turning = read_turning(dir / "turning.csv");
  const fs::path marks = dir / "marks";
  if (fs::exists(marks / "index.csv")) {
    for (const IndexEntry& e : read_index(marks / "index.csv")) {
      record.marks.push_back({e.t, read_shells(marks / e.file)});
    }
  }
  return record;
}

}  // namespace vpfocus::io

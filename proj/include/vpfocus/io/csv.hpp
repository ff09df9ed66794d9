#pragma once

// CSV files for diagnostics rows, shell states and turning records. Column
// sets and order are fixed; doubles are written shortest round-trip.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "vpfocus/characteristics.hpp"
#include "vpfocus/error.hpp"
#include "vpfocus/numeric.hpp"
#include "vpfocus/phase_space.hpp"

namespace vpfocus::io {

inline constexpr const char* kTimeseriesHeader =
    "t,rho_sup_binned,rho_sup_certified,E_sup_exact,r_min,r_max,mass_error,dt_current";
inline constexpr const char* kShellHeader = "id,r,w,ell,weight";
inline constexpr const char* kTurningHeader = "id,r_min,t_argmin,turned";
inline constexpr const char* kIndexHeader = "file,t";

inline std::string csv_line(const DiagnosticsRow& r) {
  std::string s = format_double(r.t);
  for (double v : {r.rho_sup_binned, r.rho_sup_certified, r.e_sup_exact, r.r_min, r.r_max, r.mass_error, r.dt_current}) {
    s += ',';
    s += format_double(v);
  }
  return s;
}

inline std::string format_shells(std::span<const Shell> shells) {
  std::string out = kShellHeader;
  out += '\n';
  for (const Shell& s : shells) {
    out += std::to_string(s.id);
    for (double v : {s.coords.r, s.coords.w, s.coords.ell, s.weight}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

inline std::string format_turning(std::span<const TurningRecord> recs) {
  std::string out = kTurningHeader;
  out += '\n';
  for (const TurningRecord& r : recs) {
    out += std::to_string(r.id) + ',' + format_double(r.r_min) + ',' + format_double(r.t_argmin) + ',' +
           (r.turned ? "1" : "0") + '\n';
  }
  return out;
}

/// Appends rows to timeseries.csv as they are produced.
class TimeseriesWriter {
 public:
  explicit TimeseriesWriter(const std::filesystem::path& path) : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw ValidationError("cannot write " + path.string());
    out_ << kTimeseriesHeader << '\n';
  }

  void write(const DiagnosticsRow& row) { out_ << csv_line(row) << '\n'; }

  void close() {
    out_.close();
    if (out_.fail()) throw ValidationError("timeseries write failed");
  }

 private:
  std::ofstream out_;
};

// --- reading ------------------------------------------------------------------------

namespace detail {

struct CsvTable {
  std::vector<std::vector<std::string>> rows;
};

inline CsvTable read_csv(const std::filesystem::path& path, std::string_view header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw ValidationError(path.string() + ": unexpected header (want '" + std::string(header) + "')");
  }
  const std::size_t width = static_cast<std::size_t>(std::count(header.begin(), header.end(), ',')) + 1;
  CsvTable t;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != width) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(width) + " columns");
    }
    t.rows.push_back(std::move(cells));
  }
  return t;
}

inline double cell_double(const std::string& s, const std::filesystem::path& path) {
  const auto v = parse_double(s);
  if (!v) throw ValidationError(path.string() + ": not a number: '" + s + "'");
  return *v;
}

inline std::uint64_t cell_id(const std::string& s, const std::filesystem::path& path) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ValidationError(path.string() + ": bad id '" + s + "'");
  return v;
}

}  // namespace detail

inline std::vector<DiagnosticsRow> read_timeseries(const std::filesystem::path& path) {
  const auto table = detail::read_csv(path, kTimeseriesHeader);
  std::vector<DiagnosticsRow> out;
  for (const auto& c : table.rows) {
    DiagnosticsRow r;
    double* fields[] = {&r.t, &r.rho_sup_binned, &r.rho_sup_certified, &r.e_sup_exact,
                        &r.r_min, &r.r_max, &r.mass_error, &r.dt_current};
    for (std::size_t k = 0; k < 8; ++k) *fields[k] = detail::cell_double(c[k], path);
    out.push_back(r);
  }
  return out;
}

inline std::vector<Shell> read_shells(const std::filesystem::path& path) {
  const auto table = detail::read_csv(path, kShellHeader);
  std::vector<Shell> out;
  out.reserve(table.rows.size());
  for (const auto& c : table.rows) {
    Shell s;
    s.id = detail::cell_id(c[0], path);
    s.coords.r = detail::cell_double(c[1], path);
    s.coords.w = detail::cell_double(c[2], path);
    s.coords.ell = detail::cell_double(c[3], path);
    s.weight = detail::cell_double(c[4], path);
    out.push_back(s);
  }
  return out;
}

inline std::vector<TurningRecord> read_turning(const std::filesystem::path& path) {
  const auto table = detail::read_csv(path, kTurningHeader);
  std::vector<TurningRecord> out;
  for (const auto& c : table.rows) {
    TurningRecord r;
    r.id = detail::cell_id(c[0], path);
    r.r_min = detail::cell_double(c[1], path);
    r.t_argmin = detail::cell_double(c[2], path);
    if (c[3] != "0" && c[3] != "1") throw ValidationError(path.string() + ": turned must be 0 or 1");
    r.turned = c[3] == "1";
    out.push_back(r);
  }
  return out;
}

struct IndexEntry {
  std::string file;
  double t = 0.0;
};

inline std::vector<IndexEntry> read_index(const std::filesystem::path& path) {
  const auto table = detail::read_csv(path, kIndexHeader);
  std::vector<IndexEntry> out;
  for (const auto& c : table.rows) out.push_back({c[0], detail::cell_double(c[1], path)});
  return out;
}

}  // namespace vpfocus::io

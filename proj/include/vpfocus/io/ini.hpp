#pragma once

// Sectioned key = value files on top of boost::property_tree, with strict
// typed reads: unknown keys and malformed numbers are errors.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "vpfocus/error.hpp"
#include "vpfocus/numeric.hpp"

namespace vpfocus::io {

using Ini = boost::property_tree::ptree;

inline Ini parse_ini(const std::string& text, const std::string& source = "<string>") {
  std::istringstream in(text);
  Ini ini;
  try {
    boost::property_tree::read_ini(in, ini);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ValidationError(source + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  return ini;
}

inline Ini read_ini_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_ini(text.str(), path.string());
}

inline std::string format_ini(const Ini& ini) {
  std::ostringstream out;
  boost::property_tree::write_ini(out, ini);
  return out.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
  if (!out) throw ValidationError("write failed for " + path.string());
}

inline void write_ini_file(const std::filesystem::path& path, const Ini& ini) { write_text_file(path, format_ini(ini)); }

inline void put(Ini& ini, const std::string& section, const std::string& key, const std::string& value) {
  ini.put(Ini::path_type(section + "." + key, '.'), value);
}

inline void put(Ini& ini, const std::string& section, const std::string& key, double value) {
  put(ini, section, key, format_double(value));
}

inline void put(Ini& ini, const std::string& section, const std::string& key, int value) {
  put(ini, section, key, std::to_string(value));
}

inline void put(Ini& ini, const std::string& section, const std::string& key, std::uint64_t value) {
  put(ini, section, key, std::to_string(value));
}

inline void put(Ini& ini, const std::string& section, const std::string& key, bool value) {
  put(ini, section, key, std::string(value ? "true" : "false"));
}

inline std::string join_doubles(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += ", ";
    out += format_double(xs[i]);
  }
  return out;
}

/// Typed reader that remembers which keys were consumed.
class IniReader {
 public:
  IniReader(const Ini& ini, std::string source) : ini_(ini), source_(std::move(source)) {}

  bool has_section(const std::string& section) const { return ini_.get_child_optional(section).has_value(); }

  std::optional<std::string> get(const std::string& section, const std::string& key) {
    const auto sec = ini_.get_child_optional(section);
    if (!sec) return std::nullopt;
    const auto val = sec->get_optional<std::string>(key);
    if (!val) return std::nullopt;
    used_.insert(section + "." + key);
    return *val;
  }

  std::string require(const std::string& section, const std::string& key) {
    auto v = get(section, key);
    if (!v) throw ValidationError(where(section, key) + " is missing");
    return *v;
  }

  double to_double(const std::string& section, const std::string& key, const std::string& text) const {
    const auto v = parse_double(text);
    if (!v) throw ValidationError(where(section, key) + ": not a number: '" + text + "'");
    return *v;
  }

  double require_double(const std::string& section, const std::string& key) {
    return to_double(section, key, require(section, key));
  }

  std::optional<double> optional_double(const std::string& section, const std::string& key) {
    auto v = get(section, key);
    if (!v) return std::nullopt;
    return to_double(section, key, *v);
  }

  long long require_integer(const std::string& section, const std::string& key) {
    const std::string text = require(section, key);
    long long out = 0;
    const char* first = text.data();
    const char* last = first + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last) throw ValidationError(where(section, key) + ": not an integer: '" + text + "'");
    return out;
  }

  int require_int(const std::string& section, const std::string& key) {
    const long long v = require_integer(section, key);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
      throw ValidationError(where(section, key) + ": out of range");
    }
    return static_cast<int>(v);
  }

  bool optional_bool(const std::string& section, const std::string& key, bool fallback) {
    auto v = get(section, key);
    if (!v) return fallback;
    if (*v == "true") return true;
    if (*v == "false") return false;
    throw ValidationError(where(section, key) + ": expected true or false, got '" + *v + "'");
  }

  std::vector<double> double_list(const std::string& section, const std::string& key) {
    std::vector<double> out;
    auto v = get(section, key);
    if (!v) return out;
    std::string item;
    std::istringstream in(*v);
    while (std::getline(in, item, ',')) {
      if (item.find_first_not_of(" \t") == std::string::npos) continue;
      out.push_back(to_double(section, key, item));
    }
    return out;
  }

  /// Throws on any key that no reader asked for (typos, stale fields).
  void finish() const {
    for (const auto& [section, children] : ini_) {
      if (children.empty() && !children.data().empty()) {
        throw ValidationError(source_ + ": key '" + section + "' outside any section");
      }
      for (const auto& [key, _] : children) {
        if (!used_.count(section + "." + key)) throw ValidationError(where(section, key) + " is not a recognized key");
      }
    }
  }

  const std::string& source() const { return source_; }

 private:
  std::string where(const std::string& section, const std::string& key) const {
    return source_ + ": [" + section + "] " + key;
  }

  const Ini& ini_;
  std::string source_;
  std::set<std::string> used_;
};

}  // namespace vpfocus::io

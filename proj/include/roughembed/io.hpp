#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "roughembed/domain.hpp"

namespace roughembed {

inline constexpr const char* kVersion = "0.1.0";

/// Plain-text graymap: "P2", a comment carrying spacing and origin, dims, max 1,
/// then 0/1 rows from the top (largest y) down. 2-D masks only.
void write_pgm(std::ostream& os, const GridMask& mask);
GridMask read_pgm(std::istream& is);

/// SVG 1.1 with one filled rectangle per horizontal run of included cells.
void write_svg(std::ostream& os, const GridMask& mask, const std::string& title = "");

/// RFC-4180 quoting: fields with comma, quote, CR or LF are quoted, quotes doubled.
std::string csv_escape(const std::string& field);
/// Shortest round-trip decimal form.
std::string format_number(double x);

class CsvWriter {
 public:
  /// Writes "# roughembed <version> seed=<seed>" then the header row.
  CsvWriter(std::ostream& os, std::uint64_t seed, const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& fields);
  std::size_t rows() const { return rows_; }

 private:
  std::ostream& os_;
  std::size_t columns_;
  std::size_t rows_ = 0;
};

/// key = value lines; '#' starts a comment; values are numbers, "strings",
/// bare words or [a, b, ...] lists.
class Config {
 public:
  static Config parse(std::istream& is, const std::string& origin = "<config>");
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::vector<double> get_list(const std::string& key) const;
  const std::map<std::string, std::string>& values() const { return values_; }
  /// Directory of the file the config came from, for relative paths.
  const std::string& base_dir() const { return base_dir_; }

 private:
  std::map<std::string, std::string> values_;
  std::string origin_;
  std::string base_dir_;
};

/// Two-column CSV (x, f(x)) with uniform x over [0,1]. '#' lines and a
/// non-numeric header are skipped.
ProfileFunction load_sampled_profile(std::istream& is);
ProfileFunction load_sampled_profile(const std::string& path);

/// profile = "xsin" | "step" | "constant" | "accumulating" | "sampled" (+ keys).
ProfileFunction profile_from_config(const Config& config);
/// domain = <catalog name> (+ catalog keys), or a profile description with
/// optional scale = [..] and shift = [..] for the affine part.
Domain domain_from_config(const Config& config);
CatalogParams catalog_params_from_config(const Config& config);

}  // namespace roughembed

#include "roughembed/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "roughembed/error.hpp"

namespace roughembed {

namespace {

void require_planar(const GridMask& mask) {
  if (mask.grid().dim() != 2) throw ParameterError("only planar masks can be written as images");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_number(const std::string& s) {
  const std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  std::istringstream is(t);
  is.imbue(std::locale::classic());
  double v = 0.0;
  is >> v;
  if (is.fail() || !is.eof()) return std::nullopt;
  return v;
}

}  // namespace

void write_pgm(std::ostream& os, const GridMask& mask) {
  require_planar(mask);
  const Grid& g = mask.grid();
  const int w = g.dims[0], h = g.dims[1];
  os << "P2\n# spacing " << format_number(g.spacing) << " origin " << format_number(g.origin[0]) << ' '
     << format_number(g.origin[1]) << '\n'
     << w << ' ' << h << "\n1\n";
  for (int j = h - 1; j >= 0; --j) {
    for (int i = 0; i < w; ++i) {
      os << (mask.at(static_cast<std::size_t>(j) * static_cast<std::size_t>(w) + static_cast<std::size_t>(i)) ? '1' : '0')
         << (i + 1 < w ? " " : "");
    }
    os << '\n';
  }
}

GridMask read_pgm(std::istream& is) {
  std::string magic;
  is >> magic;
  if (magic != "P2") throw InvalidData("not a plain graymap (expected P2)");
  double spacing = 0.0;
  Point origin = Point::Zero(2);
  bool have_meta = false;
  std::vector<long> numbers;
  std::string line;
  std::getline(is, line);
  while (numbers.size() < 3 && std::getline(is, line)) {
    if (!line.empty() && line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string key;
      while (ls >> key) {
        if (key == "spacing") {
          ls >> spacing;
        } else if (key == "origin") {
          ls >> origin[0] >> origin[1];
        }
      }
      have_meta = spacing > 0.0;
      continue;
    }
    std::istringstream ls(line);
    long v = 0;
    while (numbers.size() < 3 && ls >> v) numbers.push_back(v);
  }
  if (numbers.size() < 3 || numbers[0] <= 0 || numbers[1] <= 0) throw InvalidData("graymap header is incomplete");
  if (!have_meta) throw InvalidData("graymap lacks the spacing/origin comment");
  const int w = static_cast<int>(numbers[0]), h = static_cast<int>(numbers[1]);
  Grid g{origin, spacing, {w, h}};
  std::vector<std::uint8_t> cells(g.cell_count(), 0);
  for (int j = h - 1; j >= 0; --j) {
    for (int i = 0; i < w; ++i) {
      long v = 0;
      if (!(is >> v)) throw InvalidData("graymap body is truncated");
      cells[static_cast<std::size_t>(j) * static_cast<std::size_t>(w) + static_cast<std::size_t>(i)] = v > 0 ? 1 : 0;
    }
  }
  return {g, std::move(cells)};
}

void write_svg(std::ostream& os, const GridMask& mask, const std::string& title) {
  require_planar(mask);
  const Grid& g = mask.grid();
  const int w = g.dims[0], h = g.dims[1];
  // One user unit per cell; y grows downwards in SVG, so row j is drawn at h-1-j.
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 " << w << ' ' << h
     << "\" width=\"" << std::min(w, 2048) << "\" height=\""
     << static_cast<int>(std::lround(static_cast<double>(h) * std::min(w, 2048) / w)) << "\" shape-rendering=\"crispEdges\">\n";
  if (!title.empty()) {
    std::string esc;
    for (char c : title) {
      if (c == '<') esc += "&lt;";
      else if (c == '>') esc += "&gt;";
      else if (c == '&') esc += "&amp;";
      else esc += c;
    }
    os << "<title>" << esc << "</title>\n";
  }
  os << "<desc>spacing " << format_number(g.spacing) << " origin " << format_number(g.origin[0]) << ' '
     << format_number(g.origin[1]) << "</desc>\n<rect width=\"" << w << "\" height=\"" << h
     << "\" fill=\"white\"/>\n<g fill=\"black\">\n";
  for (int j = 0; j < h; ++j) {
    int i = 0;
    while (i < w) {
      const std::size_t row = static_cast<std::size_t>(j) * static_cast<std::size_t>(w);
      if (!mask.at(row + static_cast<std::size_t>(i))) {
        ++i;
        continue;
      }
      int end = i;
      while (end < w && mask.at(row + static_cast<std::size_t>(end))) ++end;
      os << "<rect x=\"" << i << "\" y=\"" << (h - 1 - j) << "\" width=\"" << (end - i) << "\" height=\"1\"/>\n";
      i = end;
    }
  }
  os << "</g>\n</svg>\n";
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string format_number(double x) { return fmt::format("{}", x); }

CsvWriter::CsvWriter(std::ostream& os, std::uint64_t seed, const std::vector<std::string>& columns)
    : os_(os), columns_(columns.size()) {
  os_ << "# roughembed " << kVersion << " seed=" << seed << "\r\n";
  for (std::size_t i = 0; i < columns.size(); ++i) os_ << (i ? "," : "") << csv_escape(columns[i]);
  os_ << "\r\n";
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_) throw ParameterError("CSV row has the wrong number of fields");
  for (std::size_t i = 0; i < fields.size(); ++i) os_ << (i ? "," : "") << csv_escape(fields[i]);
  os_ << "\r\n";
  ++rows_;
}

// ---------------------------------------------------------------------------

Config Config::parse(std::istream& is, const std::string& origin) {
  Config c;
  c.origin_ = origin;
  std::string line;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    // Strip comments outside quotes.
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(number) + ": expected 'key = value'");
    }
    const std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty() || !std::all_of(key.begin(), key.end(), [](char ch) {
          return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.';
        })) {
      throw ConfigError(origin + ":" + std::to_string(number) + ": invalid key '" + key + "'");
    }
    if (value.empty()) throw ConfigError(origin + ":" + std::to_string(number) + ": missing value for '" + key + "'");
    if (value.front() == '"') {
      if (value.size() < 2 || value.back() != '"') {
        throw ConfigError(origin + ":" + std::to_string(number) + ": unterminated string");
      }
      value = value.substr(1, value.size() - 2);
    } else if (value.front() == '[' && value.back() != ']') {
      throw ConfigError(origin + ":" + std::to_string(number) + ": unterminated list");
    }
    if (c.values_.count(key)) throw ConfigError(origin + ":" + std::to_string(number) + ": duplicate key '" + key + "'");
    c.values_[key] = value;
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  Config c = parse(in, path);
  c.base_dir_ = std::filesystem::path(path).parent_path().string();
  return c;
}

std::string Config::get_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(origin_ + ": missing key '" + key + "'");
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

double Config::get_double(const std::string& key) const {
  const auto v = parse_number(get_string(key));
  if (!v) throw ConfigError(origin_ + ": key '" + key + "' is not a number");
  return *v;
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

int Config::get_int(const std::string& key, int fallback) const {
  if (!has(key)) return fallback;
  const double v = get_double(key);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(origin_ + ": key '" + key + "' is not an integer");
  return static_cast<int>(v);
}

std::vector<double> Config::get_list(const std::string& key) const {
  std::string s = get_string(key);
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') {
    throw ConfigError(origin_ + ": key '" + key + "' is not a list");
  }
  s = trim(s.substr(1, s.size() - 2));
  std::vector<double> out;
  if (s.empty()) return out;
  std::istringstream is(s);
  std::string item;
  while (std::getline(is, item, ',')) {
    const auto v = parse_number(item);
    if (!v) throw ConfigError(origin_ + ": key '" + key + "' has a non-numeric entry '" + trim(item) + "'");
    out.push_back(*v);
  }
  return out;
}

// ---------------------------------------------------------------------------

ProfileFunction load_sampled_profile(std::istream& is) {
  std::vector<double> xs, fs;
  std::string line;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto comma = t.find(',');
    if (comma == std::string::npos) throw InvalidData("line " + std::to_string(number) + ": expected two columns");
    const auto x = parse_number(t.substr(0, comma));
    const auto f = parse_number(t.substr(comma + 1));
    if (!x || !f) {
      if (xs.empty() && !x) continue;  // header row
      throw InvalidData("line " + std::to_string(number) + ": non-numeric entry");
    }
    xs.push_back(*x);
    fs.push_back(*f);
  }
  if (xs.size() < 2) throw InvalidData("sampled profile needs at least two rows");
  const double dx = 1.0 / static_cast<double>(xs.size() - 1);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (std::abs(xs[i] - static_cast<double>(i) * dx) > 1e-9) {
      throw InvalidData("sampled profile abscissae must be uniform over [0, 1]");
    }
  }
  return ProfileFunction::sampled_1d(std::move(fs));
}

ProfileFunction load_sampled_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read sampled profile '" + path + "'");
  return load_sampled_profile(in);
}

ProfileFunction profile_from_config(const Config& config) {
  const std::string kind = config.get_string("profile");
  if (kind == "xsin") {
    return ProfileFunction::closed_form(
        1, ClosedForm::xsin(config.get_double("x_lo", 0.0), config.get_double("x_hi", 1.0 / std::numbers::pi),
                            config.get_double("scale", 1.0)));
  }
  if (kind == "constant") {
    return ProfileFunction::closed_form(config.get_int("base_dim", 1), ClosedForm::constant(config.get_double("value", 0.0)));
  }
  if (kind == "step") return ProfileFunction::step(config.get_list("breaks"), config.get_list("values"));
  if (kind == "accumulating") return ProfileFunction::accumulating_jumps(config.get_int("k_max", 40));
  if (kind == "sampled") {
    std::filesystem::path file = config.get_string("file");
    if (file.is_relative() && !config.base_dir().empty()) file = std::filesystem::path(config.base_dir()) / file;
    return load_sampled_profile(file.string());
  }
  throw ConfigError("unknown profile kind '" + kind + "'");
}

CatalogParams catalog_params_from_config(const Config& config) {
  CatalogParams p;
  p.n = config.get_int("n", p.n);
  p.alpha = config.get_double("alpha", p.alpha);
  p.k_max = config.get_int("k_max", p.k_max);
  if (config.has("breaks")) p.breaks = config.get_list("breaks");
  if (config.has("values")) p.values = config.get_list("values");
  return p;
}

Domain domain_from_config(const Config& config) {
  if (config.has("domain")) return catalog(config.get_string("domain"), catalog_params_from_config(config));
  if (!config.has("profile")) throw ConfigError("config names neither a domain nor a profile");
  ProfileFunction f = profile_from_config(config);
  const int n = f.base_dim() + 1;
  if (!config.has("scale") && !config.has("shift")) return ElementaryDomain(std::move(f));
  const std::vector<double> scale = config.has("scale") ? config.get_list("scale") : std::vector<double>(n, 1.0);
  const std::vector<double> shift = config.has("shift") ? config.get_list("shift") : std::vector<double>(n, 0.0);
  if (static_cast<int>(scale.size()) != n || static_cast<int>(shift.size()) != n) {
    throw ConfigError("scale and shift need one entry per dimension");
  }
  return ElementaryDomain(std::move(f), AffineMap::axis_aligned(Eigen::Map<const Vec>(scale.data(), n),
                                                                Eigen::Map<const Vec>(shift.data(), n)));
}

}  // namespace roughembed

#ifndef WGQED_CONFIG_HPP
#define WGQED_CONFIG_HPP

// Run configuration: a flat key=value file with '#' comments and a
// closed key set.  Unknown keys, malformed values, and duplicates are
// rejected with the offending line number so a typo cannot silently
// fall back to a default.

#include <cctype>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>

#include "wgqed/model.hpp"

namespace wgqed {

struct axis_spec {
  std::string name;
  bool log = false;
  double from = 0.0;
  double to = 0.0;
  std::size_t points = 0;

  bool name_set = false, scale_set = false, from_set = false, to_set = false, points_set = false;
};

struct run_config {
  double gamma0 = 1.0;
  double ratio = 1.0;
  double omega = 1.0;
  double delta = 0.0;
  double na = 1.0;
  double nb = 1.0;
  double phi = 0.0;
  pulse_kind kind = pulse_kind::coherent;
  double t_atom = 0.0;  // valid only when t_atom_set
  bool t_atom_set = false;
  double span = default_span;
  std::size_t grid_points = 0;  // 0: automatic density
  axis_spec axis;

  // t_atom defaults to six pulse widths so the drive is negligible at t = 0.
  double t_atom_for(double om) const { return t_atom_set ? t_atom : 6.0 / om; }

  phys_params params_at(double om) const {
    phys_params p;
    p.gamma0 = gamma0;
    p.ratio = ratio;
    p.delta = delta;
    p.t_atom = t_atom_for(om);
    return p;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline double parse_double(const std::string& v, int line, const std::string& key) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    throw param_error("line " + std::to_string(line) + ": value for '" + key +
                      "' is not a number: '" + v + "'");
  }
  if (used != v.size())
    throw param_error("line " + std::to_string(line) + ": trailing characters after number in '" +
                      key + "': '" + v + "'");
  return x;
}

inline std::size_t parse_count(const std::string& v, int line, const std::string& key) {
  double x = parse_double(v, line, key);
  if (x < 0.0 || x != std::floor(x))
    throw param_error("line " + std::to_string(line) + ": '" + key +
                      "' must be a non-negative integer");
  return std::size_t(x);
}

}  // namespace detail

inline run_config parse_config(std::istream& in) {
  run_config cfg;
  bool seen[16] = {};
  auto check_dup = [&](int idx, int line, const char* key) {
    if (seen[idx])
      throw param_error("line " + std::to_string(line) + ": duplicate key '" + key + "'");
    seen[idx] = true;
  };

  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = detail::trim(raw);
    if (s.empty() || s[0] == '#') continue;
    std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw param_error("line " + std::to_string(line) + ": expected key=value, got '" + s + "'");
    std::string key = detail::trim(s.substr(0, eq));
    std::string val = detail::trim(s.substr(eq + 1));
    if (key.empty())
      throw param_error("line " + std::to_string(line) + ": empty key");
    if (val.empty())
      throw param_error("line " + std::to_string(line) + ": empty value for '" + key + "'");

    if (key == "gamma0") {
      check_dup(0, line, "gamma0");
      cfg.gamma0 = detail::parse_double(val, line, key);
      if (cfg.gamma0 <= 0.0)
        throw param_error("line " + std::to_string(line) + ": gamma0 must be > 0");
    } else if (key == "ratio") {
      check_dup(1, line, "ratio");
      cfg.ratio = detail::parse_double(val, line, key);
      if (cfg.ratio < 0.0)
        throw param_error("line " + std::to_string(line) + ": ratio must be >= 0");
    } else if (key == "omega") {
      check_dup(2, line, "omega");
      cfg.omega = detail::parse_double(val, line, key);
      if (cfg.omega <= 0.0)
        throw param_error("line " + std::to_string(line) + ": omega must be > 0");
    } else if (key == "delta") {
      check_dup(3, line, "delta");
      cfg.delta = detail::parse_double(val, line, key);
    } else if (key == "na") {
      check_dup(4, line, "na");
      cfg.na = detail::parse_double(val, line, key);
      if (cfg.na < 0.0) throw param_error("line " + std::to_string(line) + ": na must be >= 0");
    } else if (key == "nb") {
      check_dup(5, line, "nb");
      cfg.nb = detail::parse_double(val, line, key);
      if (cfg.nb < 0.0) throw param_error("line " + std::to_string(line) + ": nb must be >= 0");
    } else if (key == "phi") {
      check_dup(6, line, "phi");
      cfg.phi = detail::parse_double(val, line, key);
    } else if (key == "kind") {
      check_dup(7, line, "kind");
      if (val == "coherent")
        cfg.kind = pulse_kind::coherent;
      else if (val == "fock1")
        cfg.kind = pulse_kind::fock_one;
      else
        throw param_error("line " + std::to_string(line) +
                          ": kind must be 'coherent' or 'fock1', got '" + val + "'");
    } else if (key == "t_atom") {
      check_dup(8, line, "t_atom");
      cfg.t_atom = detail::parse_double(val, line, key);
      cfg.t_atom_set = true;
      if (cfg.t_atom <= 0.0)
        throw param_error("line " + std::to_string(line) + ": t_atom must be > 0");
    } else if (key == "grid.span") {
      check_dup(9, line, "grid.span");
      cfg.span = detail::parse_double(val, line, key);
      if (cfg.span < 4.0)
        throw param_error("line " + std::to_string(line) + ": grid.span must be >= 4");
    } else if (key == "grid.points") {
      check_dup(10, line, "grid.points");
      cfg.grid_points = detail::parse_count(val, line, key);
    } else if (key == "axis.name") {
      check_dup(11, line, "axis.name");
      cfg.axis.name = val;
      cfg.axis.name_set = true;
    } else if (key == "axis.scale") {
      check_dup(12, line, "axis.scale");
      if (val == "linear")
        cfg.axis.log = false;
      else if (val == "log")
        cfg.axis.log = true;
      else
        throw param_error("line " + std::to_string(line) +
                          ": axis.scale must be 'linear' or 'log', got '" + val + "'");
      cfg.axis.scale_set = true;
    } else if (key == "axis.from") {
      check_dup(13, line, "axis.from");
      cfg.axis.from = detail::parse_double(val, line, key);
      cfg.axis.from_set = true;
    } else if (key == "axis.to") {
      check_dup(14, line, "axis.to");
      cfg.axis.to = detail::parse_double(val, line, key);
      cfg.axis.to_set = true;
    } else if (key == "axis.points") {
      check_dup(15, line, "axis.points");
      cfg.axis.points = detail::parse_count(val, line, key);
      if (cfg.axis.points < 2)
        throw param_error("line " + std::to_string(line) + ": axis.points must be >= 2");
      cfg.axis.points_set = true;
    } else {
      throw param_error("line " + std::to_string(line) + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

inline run_config parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline run_config parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw param_error("cannot open config file '" + path + "'");
  return parse_config(in);
}

}  // namespace wgqed

#endif
